#pragma once
// Superposition of the boundary layer and the smoothed rarefaction through the
// shared intermediate state: hat = tilde + bar - star.
#include <cmath>
#include <memory>
#include <ostream>
#include <vector>

#include "nsm/boundary_layer.hpp"
#include "nsm/io.hpp"
#include "nsm/profile.hpp"
#include "nsm/rarefaction.hpp"

namespace nsm {

class CompositeProfile final : public WaveProfile {
  public:
    /// either part may be absent; a constant state is a composite with neither
    CompositeProfile(std::shared_ptr<const LayerProfile> layer, std::shared_ptr<const RarefactionProfile> rare,
                     FluidState star)
        : layer_(std::move(layer)), rare_(std::move(rare)), star_(star) {
        auto close = [](const FluidState& a, const FluidState& b) {
            auto rel = [](double x, double y) { return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y)); };
            return rel(a.rho, b.rho) && rel(a.u, b.u) && rel(a.theta, b.theta);
        };
        if (layer_ && !layer_->exists()) throw NumericalError("superpose: layer does not exist: " + layer_->message());
        if (layer_ && !close(layer_->far(), star_))
            throw DomainError("superpose: the layer does not target the intermediate state");
        if (rare_ && !close(rare_->left(), star_))
            throw DomainError("superpose: the rarefaction does not start at the intermediate state");
        far_ = rare_ ? rare_->far() : star_;
    }

    [[nodiscard]] FluidState at(double x, double t) const override {
        FluidState s = star_;
        if (layer_) {
            const FluidState l = layer_->value(x);
            s.rho += l.rho - star_.rho;
            s.u += l.u - star_.u;
            s.theta += l.theta - star_.theta;
        }
        if (rare_) {
            const FluidState r = rare_->at(x, t);
            s.rho += r.rho - star_.rho;
            s.u += r.u - star_.u;
            s.theta += r.theta - star_.theta;
        }
        return s;
    }

    [[nodiscard]] FluidState far() const override { return far_; }
    [[nodiscard]] const FluidState& star() const { return star_; }
    [[nodiscard]] const LayerProfile* layer() const { return layer_.get(); }
    [[nodiscard]] const RarefactionProfile* rarefaction() const { return rare_.get(); }

    /// boundary state (rho_-, u_-, theta_-) at x = 0
    [[nodiscard]] FluidState boundary() const { return at(0.0, 0.0); }

  private:
    std::shared_ptr<const LayerProfile> layer_;
    std::shared_ptr<const RarefactionProfile> rare_;
    FluidState star_;
    FluidState far_;
};

inline CompositeProfile superpose(const LayerProfile& layer, const RarefactionProfile& rare, const FluidState& star) {
    return {std::make_shared<const LayerProfile>(layer), std::make_shared<const RarefactionProfile>(rare), star};
}

/// composite dump with the constituent columns
inline void write_composite_csv(std::ostream& os, const CompositeProfile& c, double t, const std::vector<double>& xs) {
    os << "x,rho_hat,u_hat,theta_hat,rho_tilde,u_tilde,theta_tilde,rho_bar,u_bar,theta_bar\n";
    for (double x : xs) {
        const FluidState h = c.at(x, t);
        const FluidState l = c.layer() ? c.layer()->value(x) : c.star();
        const FluidState r = c.rarefaction() ? c.rarefaction()->at(x, t) : c.star();
        io::write_row(os, {x, h.rho, h.u, h.theta, l.rho, l.u, l.theta, r.rho, r.u, r.theta});
    }
}

} // namespace nsm
