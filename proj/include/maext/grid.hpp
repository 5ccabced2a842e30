#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "maext/geometry.hpp"

namespace maext {

enum class NodeClass : std::uint8_t { Excluded = 0, Interior = 1, InnerBoundary = 2, OuterBoundary = 3 };

/// Uniform Cartesian grid on the truncated annulus B_R \ D.  Nodes sit at
/// integer multiples of h on a symmetric box [-K,K]^n.  Interior nodes are the
/// unknowns; OuterBoundary nodes carry truncated asymptote data; InnerBoundary
/// nodes are the ghost layer just inside D (stencil arms crossing the inner
/// boundary are resolved by exact cut-cell intersection, not by ghost values).
class AnnularGrid {
public:
    AnnularGrid(Domain d, double R, double h, int stencil_width);

    int dim() const { return n_; }
    double spacing() const { return h_; }
    double truncation_radius() const { return R_; }
    int stencil_width() const { return width_; }
    const Domain& domain() const { return domain_; }

    int extent() const { return ext_; }  ///< nodes per axis (2K+1)
    std::int64_t box_size() const { return box_size_; }

    std::int64_t box_index(const std::vector<int>& idx) const;
    void multi_index(std::int64_t box, std::vector<int>& idx) const;
    Vector coords(std::int64_t box) const;

    NodeClass node_class(std::int64_t box) const { return cls_[box]; }
    std::int64_t stored_count() const { return static_cast<std::int64_t>(stored_.size()); }
    std::int64_t interior_count() const { return static_cast<std::int64_t>(interior_.size()); }
    std::int64_t stored_id(std::int64_t box) const { return id_[box]; }

    const std::vector<std::int64_t>& stored_boxes() const { return stored_; }
    const std::vector<std::int64_t>& interior_boxes() const { return interior_; }
    const std::vector<std::int64_t>& outer_boxes() const { return outer_; }
    const std::vector<std::int64_t>& inner_ghost_boxes() const { return ghost_; }

    /// Box index of node + dir (unit step per axis component); -1 if outside.
    std::int64_t offset_box(std::int64_t box, const int* dir, int n_dir, int sign) const;

    /// One stencil arm from `box` along sign*h*dir.  When the segment crosses
    /// the inner boundary, `crosses` is set and theta/point give the exact
    /// cut-cell intersection; otherwise nbr_box names the neighbor node.
    struct ArmHit {
        bool crosses = false;
        double theta = 1.0;
        std::int64_t nbr_box = -1;
        Vector point;  // boundary point when crosses
    };
    ArmHit resolve_arm(std::int64_t box, const int* dir, int n_dir, int sign) const;

    bool structurally_equal(const AnnularGrid& o) const;

private:
    Domain domain_;
    double R_, h_;
    int n_, width_, k_, ext_;
    std::int64_t box_size_;
    std::vector<std::int64_t> strides_;
    std::vector<NodeClass> cls_;
    std::vector<std::int64_t> id_;
    std::vector<std::int64_t> stored_, interior_, outer_, ghost_;
};

/// Builds the grid, checking R > circumradius(D) + 2h and at least 3 interior
/// layers between the boundaries.
std::shared_ptr<const AnnularGrid> build_grid(const Domain& d, double R, double h, int width = 2);

}  // namespace maext
