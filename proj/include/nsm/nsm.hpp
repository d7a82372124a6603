#pragma once
// Umbrella header.
#include "nsm/appendix.hpp"
#include "nsm/boundary_layer.hpp"
#include "nsm/checks.hpp"
#include "nsm/composite.hpp"
#include "nsm/config.hpp"
#include "nsm/core.hpp"
#include "nsm/diagnostics.hpp"
#include "nsm/field.hpp"
#include "nsm/interpolation.hpp"
#include "nsm/io.hpp"
#include "nsm/ode.hpp"
#include "nsm/profile.hpp"
#include "nsm/rarefaction.hpp"
#include "nsm/scenario.hpp"
#include "nsm/solver.hpp"
