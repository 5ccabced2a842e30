#pragma once

#include <string>

#include "maext/geometry.hpp"

namespace maext {

struct GridParams {
    double h = 0.25;
    double R = 4.0;
    int width = 2;
};

struct LoadedProblem {
    ProblemSpec spec;
    GridParams grid;
};

/// Parses the problem specification file: key-value sections [domain], [phi],
/// [g], [asymptote], [grid]; matrices row-major, '#' and ';' comments.
LoadedProblem parse_problem_file(const std::string& path);
LoadedProblem parse_problem_text(const std::string& text, const std::string& origin = "<string>");

/// Serializes back to the file format (used by run manifests).
std::string serialize_problem(const LoadedProblem& p);

}  // namespace maext
