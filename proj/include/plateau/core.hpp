#pragma once

#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

namespace plateau {

using cplx = std::complex<double>;

inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

/// A point of C^2.
struct C2 {
    cplx z1{};
    cplx z2{};

    C2 operator+(const C2& o) const { return {z1 + o.z1, z2 + o.z2}; }
    C2 operator-(const C2& o) const { return {z1 - o.z1, z2 - o.z2}; }
    C2 operator*(double s) const { return {z1 * s, z2 * s}; }
};

inline double norm2(const C2& p) { return std::norm(p.z1) + std::norm(p.z2); }
inline double abs(const C2& p) { return std::sqrt(norm2(p)); }

enum class ErrorKind {
    InvalidSpec,
    NearBoundary,
    QuadratureFailure,
    ResolutionTooCoarse,
    SingularPoint,
    UseAlternative,
    OutOfRange,
    NonPositiveChain,
    MomentViolation,
    RootFailure,
    BoundaryMismatch,
    MassBoundViolation,
    OrientationInconsistency,
    SingularPointOfCurve,
    DegenerateParametrization,
    ObstructedExtension,
    ParseError,
    IoError,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::InvalidSpec: return "InvalidSpec";
        case ErrorKind::NearBoundary: return "NearBoundary";
        case ErrorKind::QuadratureFailure: return "QuadratureFailure";
        case ErrorKind::ResolutionTooCoarse: return "ResolutionTooCoarse";
        case ErrorKind::SingularPoint: return "SingularPoint";
        case ErrorKind::UseAlternative: return "UseAlternative";
        case ErrorKind::OutOfRange: return "OutOfRange";
        case ErrorKind::NonPositiveChain: return "NonPositiveChain";
        case ErrorKind::MomentViolation: return "MomentViolation";
        case ErrorKind::RootFailure: return "RootFailure";
        case ErrorKind::BoundaryMismatch: return "BoundaryMismatch";
        case ErrorKind::MassBoundViolation: return "MassBoundViolation";
        case ErrorKind::OrientationInconsistency: return "OrientationInconsistency";
        case ErrorKind::SingularPointOfCurve: return "SingularPointOfCurve";
        case ErrorKind::DegenerateParametrization: return "DegenerateParametrization";
        case ErrorKind::ObstructedExtension: return "ObstructedExtension";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries a kind so callers can map it
/// to an exit code or a fallback path.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

    std::optional<double> t;

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace plateau
