#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace levtrap {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;

inline constexpr double pi = std::numbers::pi;
inline constexpr cplx I{0.0, 1.0};

namespace constants {
inline constexpr double c = 299792458.0;
inline constexpr double epsilon0 = 8.8541878128e-12;
inline constexpr double mu0 = 1.25663706212e-6;
inline constexpr double Z0 = mu0 * c;
inline constexpr double hbar = 1.054571817e-34;
inline constexpr double kB = 1.380649e-23;
inline constexpr double T_ambient = 293.0;
inline constexpr double Si_melting_K = 1680.0;
}  // namespace constants

// Error taxonomy. The CLI maps these onto exit codes.
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct RangeError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct ConvergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConsistencyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct StepSizeError : ConsistencyError {
  using ConsistencyError::ConsistencyError;
};
struct DataFileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParseError : DataFileError {
  ParseError(const std::string& what, int line_number) : DataFileError(what), line(line_number) {}
  int line;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }

inline CVec3 operator+(const CVec3& a, const CVec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline CVec3 operator-(const CVec3& a, const CVec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline CVec3 operator*(cplx s, const CVec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline double norm2(const CVec3& a) { return std::norm(a[0]) + std::norm(a[1]) + std::norm(a[2]); }

// z-mirror used for counterpropagating pairs
inline Vec3 mirror_z(const Vec3& r) { return {r[0], r[1], -r[2]}; }
inline CVec3 mirror_z(const CVec3& v) { return {v[0], v[1], -v[2]}; }

}  // namespace levtrap
