#pragma once

#include <optional>

#include "maext/discrete_op.hpp"
#include "maext/quadrature.hpp"
#include "maext/radial.hpp"

namespace maext {

enum class Classification { Exists, FailsBoundary, NotConverged };

const char* to_string(Classification c);

enum class OuterMode { Plain, Corrected };

struct SolveOptions {
    double sweep_tol = 1e-10;  ///< sup-change stopping tolerance
    int max_sweeps = 50000;
    double tol_b = -1;   ///< boundary residual tolerance; < 0 selects 10*h
    double tol_ma = -1;  ///< interior residual tolerance; < 0 selects 10*h
    double floor_delta = kOperatorFloor;
    OuterMode mode = OuterMode::Plain;
    double omega = 1.0;  ///< optional over-relaxation after warmup
    int warmup_sweeps = 10;
    const GridField* initial = nullptr;  ///< warm start (values copied)
    bool log_sweeps = false;
};

struct SolveReport {
    GridField field;
    double ma_residual = 0;
    double boundary_residual = 0;
    int iterations = 0;
    Classification classification = Classification::NotConverged;
    double fitted_correction = 0;  ///< d in the Corrected outer mode
    double tol_b = 0, tol_ma = 0;
    std::vector<double> sweep_changes;
};

/// Truncated asymptote data on an outer node: Q(x) (Plain) or
/// Q(x) + d |x|^(2-n) (Corrected with fitted decay coefficient d).
double outer_value(const QuadraticAsymptote& q, const Vector& x, OuterMode mode, double d_coef);

/// Fill the outer Dirichlet band of `u`.
void apply_outer_data(GridField& u, const QuadraticAsymptote& q, OuterMode mode, double d_coef);

/// Nonlinear Gauss-Seidel solve of the truncated exterior problem: at each
/// interior node the scalar equation ma_operator(u;x) = g(x) is solved for
/// u(x) with neighbors frozen (the map is monotone in u(x)), sweeping in a
/// 3^n-color ordering until the sup-change drops below tolerance.
SolveReport solve_truncated(const ProblemSpec& p, std::shared_ptr<const AnnularGrid> grid,
                            const StencilDictionary& d, const SolveOptions& opts = {});

Classification classify_existence(double ma_residual, double boundary_residual, double tol_b,
                                  double tol_ma, bool converged);

struct ThresholdReport {
    double c_low = 0, c_high = 0;
    struct Probe {
        double c;
        Classification classification;
        double boundary_residual;
    };
    std::vector<Probe> evaluations;
    std::optional<double> reference;     ///< exact C* when the radial oracle applies
    std::optional<double> richardson;    ///< R-extrapolated estimate when requested
    double estimate() const { return 0.5 * (c_low + c_high); }
};

struct ThresholdOptions {
    SolveOptions solve;
    double tol_c = 0.05;
    std::optional<std::pair<double, double>> bracket;
    bool richardson_in_R = false;
    QuadratureSettings quadrature;
};

/// Bisection in the asymptote constant c on the existence classification,
/// seeded from the radial nonexistence bound when no bracket is supplied.
ThresholdReport estimate_threshold(const ProblemSpec& p, std::shared_ptr<const AnnularGrid> grid,
                                   const StencilDictionary& d, const ThresholdOptions& opts);

/// Samples the exact radial solution onto the grid (centered-ball problem
/// with constant boundary data and g == 1); the oracle for solve_truncated.
GridField solve_exterior_radial(const ProblemSpec& p, std::shared_ptr<const AnnularGrid> grid,
                                const QuadratureSettings& q);

}  // namespace maext
