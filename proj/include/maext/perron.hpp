#pragma once

#include "maext/discrete_op.hpp"

namespace maext {

/// Node-wise maximum; the subsolution lattice is closed under max.
GridField pointwise_max(const GridField& u, const GridField& v);

/// alpha*u3 + (1-alpha)*u1.  Concavity of det^(1/n) makes the output a
/// discrete subsolution whenever both inputs are.
GridField convex_combination(const GridField& u1, const GridField& u3, double alpha);

struct PerronOptions {
    double patch_radius = 2.0;  ///< in units of h
    double lift_tol = 1e-12;    ///< local solve tolerance inside a patch
    int lift_max_sweeps = 500;
    double floor_delta = kOperatorFloor;
};

/// Replaces u inside the node ball around `center_box` by the local Dirichlet
/// solve (u frozen outside), then takes the max with u.  Never decreases any
/// node.  Throws when the requested patch is not fully interior, unless
/// `clip` allows trimming it to interior nodes.
GridField perron_lift(const GridField& u, const RhsField& g, const StencilDictionary& d,
                      std::int64_t center_box, const PerronOptions& opts = {}, bool clip = false);

/// Repeated lifting over forward/backward lexicographic ball sweeps until the
/// sup-change drops below tol.  seed must be a discrete subsolution below the
/// discrete supersolution cap; the output stays in [seed, cap].
GridField perron_iterate(const GridField& seed, const GridField& cap, const RhsField& g,
                         const StencilDictionary& d, int max_passes, double tol,
                         const PerronOptions& opts = {});

/// Node-wise limit of a monotone solution family c_j decreasing to c_limit.
/// Checks the comparison estimate sup|u_i - u_j| <= |c_i - c_j| + tol for
/// consecutive pairs and the uniform sandwich u_j >= u_inf >= u_j - (c_j - c).
GridField monotone_limit(const std::vector<GridField>& fields, const std::vector<double>& constants,
                         double c_limit, double tol);

}  // namespace maext
