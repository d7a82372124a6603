#pragma once
#include "nsm/core.hpp"

namespace nsm {

/// an evaluable wave pattern (rho, u, theta)(x, t); its electromagnetic parts are identically zero
class WaveProfile {
  public:
    virtual ~WaveProfile() = default;
    [[nodiscard]] virtual FluidState at(double x, double t) const = 0;
    /// state approached as x -> infinity
    [[nodiscard]] virtual FluidState far() const = 0;
};

} // namespace nsm
