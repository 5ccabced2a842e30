#include "maext/field.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>

#include "maext/error.hpp"

namespace maext {

GridField::GridField(std::shared_ptr<const AnnularGrid> grid, double fill,
                     std::shared_ptr<const BoundaryBinding> binding)
    : grid_(std::move(grid)), binding_(std::move(binding)) {
    v_.assign(grid_->stored_count(), fill);
}

GridField GridField::sample(std::shared_ptr<const AnnularGrid> grid,
                            const std::function<double(const Vector&)>& f,
                            std::shared_ptr<const BoundaryBinding> binding) {
    GridField u(grid, 0.0, std::move(binding));
    for (std::int64_t b : grid->stored_boxes()) u.at_box(b) = f(grid->coords(b));
    return u;
}

bool GridField::same_grid(const GridField& o) const {
    return grid_ == o.grid_ || grid_->structurally_equal(*o.grid_);
}

bool GridField::compatible_binding(const GridField& o) const {
    if (!binding_ || !o.binding_) return true;
    return binding_ == o.binding_ || *binding_ == *o.binding_;
}

double GridField::sup_diff(const GridField& o) const {
    if (!same_grid(o)) throw InvalidArgument("fields live on different grids");
    double m = 0;
    for (std::int64_t i = 0; i < size(); ++i) m = std::max(m, std::fabs(v_[i] - o.v_[i]));
    return m;
}

double GridField::sup_diff_interior(const GridField& o) const {
    if (!same_grid(o)) throw InvalidArgument("fields live on different grids");
    double m = 0;
    for (std::int64_t b : grid_->interior_boxes())
        m = std::max(m, std::fabs(at_box(b) - o.at_box(b)));
    return m;
}

// ---------------------------------------------------------------------------
// snapshot + csv

static_assert(std::endian::native == std::endian::little,
              "MAEXT1 snapshots are little-endian; big-endian hosts are unsupported");

void save_snapshot(const GridField& u, const std::string& path) {
    const AnnularGrid& g = u.grid();
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open snapshot for writing: " + path);
    out.write("MAEXT1", 6);
    const std::uint32_t n = g.dim();
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (int a = 0; a < g.dim(); ++a) {
        const std::uint32_t ext = g.extent();
        out.write(reinterpret_cast<const char*>(&ext), 4);
    }
    const double h = g.spacing(), r = g.truncation_radius();
    out.write(reinterpret_cast<const char*>(&h), 8);
    out.write(reinterpret_cast<const char*>(&r), 8);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (std::int64_t b = 0; b < g.box_size(); ++b) {
        const double v = (g.node_class(b) == NodeClass::Excluded) ? nan : u.at_box(b);
        out.write(reinterpret_cast<const char*>(&v), 8);
    }
    if (!out) throw IoError("snapshot write failed: " + path);
}

GridField load_snapshot(std::shared_ptr<const AnnularGrid> grid, const std::string& path,
                        std::shared_ptr<const BoundaryBinding> binding) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open snapshot: " + path);
    char magic[6];
    in.read(magic, 6);
    if (!in || std::memcmp(magic, "MAEXT1", 6) != 0)
        throw ParseError("bad snapshot magic in " + path);
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    if (static_cast<int>(n) != grid->dim())
        throw ParseError("snapshot dimension does not match grid");
    for (std::uint32_t a = 0; a < n; ++a) {
        std::uint32_t ext = 0;
        in.read(reinterpret_cast<char*>(&ext), 4);
        if (static_cast<int>(ext) != grid->extent())
            throw ParseError("snapshot grid extents do not match grid");
    }
    double h = 0, r = 0;
    in.read(reinterpret_cast<char*>(&h), 8);
    in.read(reinterpret_cast<char*>(&r), 8);
    if (h != grid->spacing() || r != grid->truncation_radius())
        throw ParseError("snapshot h/R do not match grid");
    GridField u(grid, 0.0, std::move(binding));
    for (std::int64_t b = 0; b < grid->box_size(); ++b) {
        double v;
        in.read(reinterpret_cast<char*>(&v), 8);
        if (!in) throw ParseError("snapshot truncated: " + path);
        if (grid->node_class(b) != NodeClass::Excluded) {
            if (std::isnan(v)) throw ParseError("snapshot value missing at a stored node");
            u.at_box(b) = v;
        }
    }
    return u;
}

void write_field_csv(const GridField& u, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open csv for writing: " + path);
    const AnnularGrid& g = u.grid();
    for (int a = 0; a < g.dim(); ++a) out << "x" << (a + 1) << ",";
    out << "value\n";
    char buf[32];
    for (std::int64_t b : g.stored_boxes()) {
        const Vector x = g.coords(b);
        for (double xi : x) {
            std::snprintf(buf, sizeof buf, "%.17g", xi);
            out << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", u.at_box(b));
        out << buf << "\n";
    }
    if (!out) throw IoError("csv write failed: " + path);
}

}  // namespace maext
