#include "maext/stencil.hpp"

#include <algorithm>
#include <map>
#include <numeric>

#include "maext/error.hpp"

namespace maext {

namespace {

// primitive and sign-canonical: gcd 1, first nonzero entry positive
bool canonical(const std::vector<int>& v) {
    int g = 0;
    for (int x : v) g = std::gcd(g, std::abs(x));
    if (g != 1) return false;
    for (int x : v) {
        if (x != 0) return x > 0;
    }
    return false;
}

long dot_i(const std::vector<int>& a, const std::vector<int>& b) {
    long s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<long>(a[i]) * b[i];
    return s;
}

void backtrack(const std::vector<std::vector<int>>& vecs, std::vector<int>& cur, std::size_t start,
               int n, std::vector<std::vector<int>>& out) {
    if (static_cast<int>(cur.size()) == n) {
        out.push_back(cur);
        return;
    }
    for (std::size_t i = start; i < vecs.size(); ++i) {
        bool ok = true;
        for (int j : cur)
            if (dot_i(vecs[i], vecs[j]) != 0) {
                ok = false;
                break;
            }
        if (!ok) continue;
        cur.push_back(static_cast<int>(i));
        backtrack(vecs, cur, i + 1, n, out);
        cur.pop_back();
    }
}

}  // namespace

StencilDictionary StencilDictionary::build(int n, int width) {
    if (n < 2 || n > 6) throw InvalidArgument("stencil dictionary supports 2 <= n <= 6");
    if (width < 1 || width > 4) throw InvalidArgument("stencil width must be in [1,4]");

    StencilDictionary d;
    d.n = n;
    d.width = width;

    // enumerate canonical direction candidates
    std::vector<int> v(n, -width);
    while (true) {
        if (canonical(v)) d.directions.push_back(v);
        int a = n - 1;
        for (; a >= 0; --a) {
            if (++v[a] <= width) break;
            v[a] = -width;
        }
        if (a < 0) break;
    }
    std::sort(d.directions.begin(), d.directions.end());

    std::vector<int> cur;
    backtrack(d.directions, cur, 0, n, d.frames);
    if (d.frames.empty()) throw Error(kErrInternal, "stencil enumeration produced no frames");

    // drop directions not used by any frame, remap frame indices
    std::vector<int> used(d.directions.size(), -1);
    std::vector<std::vector<int>> kept;
    for (auto& f : d.frames)
        for (int& di : f) {
            if (used[di] < 0) {
                used[di] = static_cast<int>(kept.size());
                kept.push_back(d.directions[di]);
            }
            di = used[di];
        }
    d.directions = std::move(kept);

    d.dir_norm2.resize(d.directions.size());
    for (std::size_t i = 0; i < d.directions.size(); ++i)
        d.dir_norm2[i] = static_cast<double>(dot_i(d.directions[i], d.directions[i]));

    // locate the axis frame
    for (std::size_t f = 0; f < d.frames.size(); ++f) {
        bool all_axis = true;
        for (int di : d.frames[f]) {
            const auto& dir = d.directions[di];
            int nz = 0;
            for (int x : dir) nz += (x != 0);
            if (nz != 1 || *std::max_element(dir.begin(), dir.end()) != 1) all_axis = false;
        }
        if (all_axis) {
            d.axis_frame_ = static_cast<int>(f);
            break;
        }
    }
    if (d.axis_frame_ < 0) throw Error(kErrInternal, "axis frame missing from dictionary");
    return d;
}

}  // namespace maext
