#pragma once

#include <functional>
#include <memory>
#include <string>

#include "maext/grid.hpp"

namespace maext {

/// Inner Dirichlet data a field is attached to.  Fields produced by the
/// solver carry one; cut-cell stencil arms then read exact boundary values.
/// Fields without a binding (envelopes, radializations) difference through
/// stored ghost values instead.
struct BoundaryBinding {
    BoundaryData phi;
    Domain domain;

    BoundaryBinding(BoundaryData p, Domain d) : phi(std::move(p)), domain(std::move(d)) {}
    double eval(const Vector& x) const { return phi.eval(x); }
    bool operator==(const BoundaryBinding& o) const {
        return phi == o.phi && domain.center() == o.domain.center() &&
               domain.shape() == o.domain.shape();
    }
};

/// Scalar values on every non-excluded node of an annular grid.
class GridField {
public:
    explicit GridField(std::shared_ptr<const AnnularGrid> grid, double fill = 0.0,
                       std::shared_ptr<const BoundaryBinding> binding = nullptr);

    static GridField sample(std::shared_ptr<const AnnularGrid> grid,
                            const std::function<double(const Vector&)>& f,
                            std::shared_ptr<const BoundaryBinding> binding = nullptr);

    const AnnularGrid& grid() const { return *grid_; }
    const std::shared_ptr<const AnnularGrid>& grid_ptr() const { return grid_; }
    const std::shared_ptr<const BoundaryBinding>& binding() const { return binding_; }
    void set_binding(std::shared_ptr<const BoundaryBinding> b) { binding_ = std::move(b); }

    std::int64_t size() const { return static_cast<std::int64_t>(v_.size()); }
    double operator[](std::int64_t stored_id) const { return v_[stored_id]; }
    double& operator[](std::int64_t stored_id) { return v_[stored_id]; }
    double at_box(std::int64_t box) const { return v_[grid_->stored_id(box)]; }
    double& at_box(std::int64_t box) { return v_[grid_->stored_id(box)]; }

    bool same_grid(const GridField& o) const;
    bool compatible_binding(const GridField& o) const;

    double sup_diff(const GridField& o) const;           ///< over all stored nodes
    double sup_diff_interior(const GridField& o) const;  ///< over interior nodes only

private:
    std::shared_ptr<const AnnularGrid> grid_;
    std::shared_ptr<const BoundaryBinding> binding_;
    std::vector<double> v_;
};

/// MAEXT1 snapshot: magic "MAEXT1", u32 n, u32 dims[n], f64 h, f64 R, then
/// 64-bit node values over the full box in row-major order (NaN marks
/// excluded nodes).  Little-endian throughout.
void save_snapshot(const GridField& u, const std::string& path);
GridField load_snapshot(std::shared_ptr<const AnnularGrid> grid, const std::string& path,
                        std::shared_ptr<const BoundaryBinding> binding = nullptr);

/// CSV export (x1..xn,value), one row per stored node, 17 significant digits.
void write_field_csv(const GridField& u, const std::string& path);

}  // namespace maext
