#pragma once

#include <stdexcept>
#include <string>

namespace maext {

/// Base class for all library errors; `code()` maps onto the C API status enum.
class Error : public std::runtime_error {
public:
    Error(int code, const std::string& what) : std::runtime_error(what), code_(code) {}
    int code() const { return code_; }

private:
    int code_;
};

// Codes mirror maext_status in the public C header.
inline constexpr int kErrInvalidArgument = 1;
inline constexpr int kErrParse = 2;
inline constexpr int kErrNoSolution = 3;
inline constexpr int kErrQuadrature = 4;
inline constexpr int kErrNotConverged = 5;
inline constexpr int kErrIo = 6;
inline constexpr int kErrPrecondition = 7;
inline constexpr int kErrInternal = 8;

struct InvalidArgument : Error {
    explicit InvalidArgument(const std::string& what) : Error(kErrInvalidArgument, what) {}
};
struct ParseError : Error {
    explicit ParseError(const std::string& what) : Error(kErrParse, what) {}
};
/// Requested data lies in the nonexistence regime (c below the sharp constant).
struct NoSolution : Error {
    explicit NoSolution(const std::string& what) : Error(kErrNoSolution, what) {}
};
struct QuadratureError : Error {
    explicit QuadratureError(const std::string& what) : Error(kErrQuadrature, what) {}
};
struct IoError : Error {
    explicit IoError(const std::string& what) : Error(kErrIo, what) {}
};
struct PreconditionError : Error {
    explicit PreconditionError(const std::string& what) : Error(kErrPrecondition, what) {}
};

}  // namespace maext
