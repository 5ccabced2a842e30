#pragma once

#include <vector>

namespace maext {

/// Wide-stencil direction set: every orthogonal frame of n primitive integer
/// vectors with entries bounded by `width`, enumerated exhaustively (hence
/// closed under coordinate permutations and containing the axis frame).
/// In 3-D this yields 4 frames at width 1 (the 13-axis stencil), 26 at
/// width 2 and 50 at width 3.
struct StencilDictionary {
    int n = 0;
    int width = 0;
    /// unique primitive directions (sign-canonical), each of length n
    std::vector<std::vector<int>> directions;
    std::vector<double> dir_norm2;  ///< squared Euclidean length per direction
    /// frames as index lists into `directions`, n entries each
    std::vector<std::vector<int>> frames;

    static StencilDictionary build(int n, int width);

    int axis_frame() const { return axis_frame_; }

private:
    int axis_frame_ = -1;
};

}  // namespace maext
