#pragma once

#include "maext/field.hpp"
#include "maext/stencil.hpp"

namespace maext {

inline constexpr double kOperatorFloor = 1e-14;  ///< degenerate-ellipticity guard

/// Centered second difference (u(x+he) - 2u(x) + u(x-he)) / (h^2 |e|^2).
/// Arms crossing the inner boundary of a bound field use the Shortley-Weller
/// cut-cell formula with the exact boundary intersection; unbound fields
/// difference through stored ghost values.
double second_difference(const GridField& u, std::int64_t box, const std::vector<int>& e);

/// Monotone wide-stencil Monge-Ampere operator:
///   min over frames of prod_j max(Delta_j u, floor)
///   - (1/h) * sum over all dictionary directions of max(-Delta u, 0).
double ma_operator(const GridField& u, std::int64_t box, const StencilDictionary& d,
                   double floor_delta = kOperatorFloor);

/// Second differences at one node as affine functions of the center value:
/// Delta_d(t) = a_d - b_d t with b_d > 0.  This is what the per-node scalar
/// root solve in the nonlinear Gauss-Seidel sweeps consumes.
struct NodeOperator {
    std::vector<double> a, b;  // per unique direction
    const StencilDictionary* dict = nullptr;
    double floor_delta = kOperatorFloor;
    double penalty = 0;  // 1/h

    /// operator value and its t-derivative at center value t
    std::pair<double, double> eval(double t) const;
    /// unique root of eval(t) = rhs (the map is monotone nonincreasing)
    double solve_for(double rhs, double t_start) const;
};

NodeOperator make_node_operator(const GridField& u, std::int64_t box, const StencilDictionary& d,
                                double floor_delta = kOperatorFloor);

struct SubsolutionVerdict {
    bool ok = true;
    std::int64_t worst_box = -1;
    double margin = 0;  ///< most negative slack; >= -tol when ok
    enum class Reason { None, Operator, Convexity } reason = Reason::None;
};

/// Discrete subsolution test: ma_operator >= g - tol and all dictionary
/// second differences >= -tol at every interior node.
SubsolutionVerdict is_discrete_subsolution(const GridField& u, const RhsField& g,
                                           const StencilDictionary& d, double tol);

/// Discrete supersolution test: ma_operator <= g + tol at every interior node.
SubsolutionVerdict is_discrete_supersolution(const GridField& u, const RhsField& g,
                                             const StencilDictionary& d, double tol);

struct ComparisonVerdict {
    enum class Status {
        Holds,
        Fails,
        PreconditionSubsolution,
        PreconditionSupersolution,
        PreconditionBoundary
    } status = Status::Holds;
    std::int64_t worst_box = -1;
    double margin = 0;
};

/// Comparison harness: u a discrete subsolution, v a discrete supersolution,
/// u <= v + tol on boundary nodes, then u <= v + tol must hold everywhere.
ComparisonVerdict comparison_check(const GridField& u, const GridField& v, const RhsField& g,
                                   const StencilDictionary& d, double tol);

/// Sup-convolution u^eps(x) = max_y (u(y) - |y-x|^2/eps) over stored nodes,
/// computed exactly by the separable parabolic max-transform with argmax
/// reconstruction.  Rejects eps < h^2.
GridField eps_upper_envelope(const GridField& u, double eps);

/// Spherical rearrangement about `center`: nodes are binned by radius with
/// bin width h/2 and each node receives the max of u over its bin.  Requires
/// a centered ball inner domain.
GridField radialize(const GridField& u, const Vector& center);

}  // namespace maext
