#include "maext/grid.hpp"

#include <cmath>

#include "maext/error.hpp"

namespace maext {

AnnularGrid::AnnularGrid(Domain d, double R, double h, int stencil_width)
    : domain_(std::move(d)), R_(R), h_(h), n_(domain_.dim()), width_(stencil_width) {
    if (!(h > 0)) throw InvalidArgument("grid spacing h must be > 0");
    if (width_ < 1 || width_ > 4) throw InvalidArgument("stencil width must be in [1,4]");
    const double circ = domain_.circumradius_origin();
    if (!(R > circ + 2 * h))
        throw InvalidArgument("truncation radius R must exceed the circumscribed radius + 2h");
    if (R - circ < 3 * h)
        throw InvalidArgument("h too coarse to separate the inner boundary from |x| = R "
                              "(fewer than 3 interior layers)");

    const double reach = h_ * width_ * std::sqrt(static_cast<double>(n_)) * (1 + 1e-12);
    k_ = static_cast<int>(std::ceil((R_ + reach) / h_)) + 1;
    ext_ = 2 * k_ + 1;

    strides_.assign(n_, 1);
    for (int a = n_ - 2; a >= 0; --a) strides_[a] = strides_[a + 1] * ext_;
    box_size_ = strides_[0] * ext_;

    cls_.assign(box_size_, NodeClass::Excluded);
    id_.assign(box_size_, -1);

    // position-based classification
    std::vector<int> idx(n_, -k_);
    Vector x(n_);
    std::vector<std::int64_t> inside;
    for (std::int64_t b = 0; b < box_size_; ++b) {
        for (int a = 0; a < n_; ++a) x[a] = idx[a] * h_;
        const double r = norm2(x);
        if (domain_.level(x) <= 1.0) {
            inside.push_back(b);
        } else if (r < R_) {
            cls_[b] = NodeClass::Interior;
        } else if (r <= R_ + reach) {
            cls_[b] = NodeClass::OuterBoundary;
        }
        for (int a = n_ - 1; a >= 0; --a) {
            if (++idx[a] <= k_) break;
            idx[a] = -k_;
        }
    }

    // ghost layer: inside nodes within stencil reach of an interior node
    std::vector<int> off(n_, 0);
    for (std::int64_t b : inside) {
        multi_index(b, idx);
        bool adjacent = false;
        off.assign(n_, -width_);
        while (!adjacent) {
            std::int64_t nb = b;
            bool valid = true;
            for (int a = 0; a < n_; ++a) {
                const int j = idx[a] + off[a];
                if (j < -k_ || j > k_) {
                    valid = false;
                    break;
                }
                nb += static_cast<std::int64_t>(off[a]) * strides_[a];
            }
            if (valid && cls_[nb] == NodeClass::Interior) adjacent = true;
            int a = n_ - 1;
            for (; a >= 0; --a) {
                if (++off[a] <= width_) break;
                off[a] = -width_;
            }
            if (a < 0) break;
        }
        if (adjacent) cls_[b] = NodeClass::InnerBoundary;
    }

    for (std::int64_t b = 0; b < box_size_; ++b) {
        if (cls_[b] == NodeClass::Excluded) continue;
        id_[b] = static_cast<std::int64_t>(stored_.size());
        stored_.push_back(b);
        switch (cls_[b]) {
            case NodeClass::Interior: interior_.push_back(b); break;
            case NodeClass::OuterBoundary: outer_.push_back(b); break;
            case NodeClass::InnerBoundary: ghost_.push_back(b); break;
            default: break;
        }
    }
}

std::int64_t AnnularGrid::box_index(const std::vector<int>& idx) const {
    std::int64_t b = 0;
    for (int a = 0; a < n_; ++a) {
        if (idx[a] < -k_ || idx[a] > k_) return -1;
        b += static_cast<std::int64_t>(idx[a] + k_) * strides_[a];
    }
    return b;
}

void AnnularGrid::multi_index(std::int64_t box, std::vector<int>& idx) const {
    idx.resize(n_);
    for (int a = 0; a < n_; ++a) {
        idx[a] = static_cast<int>(box / strides_[a]) - k_;
        box %= strides_[a];
    }
}

Vector AnnularGrid::coords(std::int64_t box) const {
    Vector x(n_);
    for (int a = 0; a < n_; ++a) {
        x[a] = (static_cast<int>(box / strides_[a]) - k_) * h_;
        box %= strides_[a];
    }
    return x;
}

std::int64_t AnnularGrid::offset_box(std::int64_t box, const int* dir, int n_dir, int sign) const {
    std::int64_t b = box;
    for (int a = 0; a < n_dir; ++a) {
        const int j = static_cast<int>(box / strides_[a]) - k_ + sign * dir[a];
        if (j < -k_ || j > k_) return -1;
        b += static_cast<std::int64_t>(sign * dir[a]) * strides_[a];
        box %= strides_[a];
    }
    return b;
}

AnnularGrid::ArmHit AnnularGrid::resolve_arm(std::int64_t box, const int* dir, int n_dir,
                                             int sign) const {
    ArmHit hit;
    Vector x = coords(box);
    Vector step(n_);
    for (int a = 0; a < n_; ++a) step[a] = sign * dir[a] * h_;
    if (auto t = domain_.segment_crossing(x, step)) {
        hit.crosses = true;
        hit.theta = *t;
        hit.point.resize(n_);
        for (int a = 0; a < n_; ++a) hit.point[a] = x[a] + *t * step[a];
        return hit;
    }
    hit.nbr_box = offset_box(box, dir, n_dir, sign);
    if (hit.nbr_box < 0 || cls_[hit.nbr_box] == NodeClass::Excluded)
        throw PreconditionError("stencil arm neighbor unresolvable");
    return hit;
}

bool AnnularGrid::structurally_equal(const AnnularGrid& o) const {
    return n_ == o.n_ && ext_ == o.ext_ && h_ == o.h_ && R_ == o.R_ &&
           domain_.center() == o.domain_.center() && domain_.shape() == o.domain_.shape();
}

std::shared_ptr<const AnnularGrid> build_grid(const Domain& d, double R, double h, int width) {
    return std::make_shared<const AnnularGrid>(d, R, h, width);
}

}  // namespace maext
