#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string>

namespace maviscid {

using Index = std::ptrdiff_t;

/// Point or vector in R^d, d <= 3. Unused trailing components are zero.
using Vec3 = std::array<double, 3>;

/// Row-major 3x3 matrix. For d = 2 only the leading 2x2 block is used and the
/// remaining entries are kept at zero.
using Mat3 = std::array<std::array<double, 3>, 3>;

enum class ErrorCode {
  ok = 0,
  invalid_argument = 1,
  topology = 2,
  contract = 3,
  quadrature = 4,
  singular = 5,
  not_converged = 6,
  damping_floor = 7,
  io = 8,
  verification_failed = 9,
  unknown = 99,
};

/// Base exception for the library. Carries a stable code that the C API
/// reports to callers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class TopologyError : public Error {
 public:
  explicit TopologyError(const std::string& what)
      : Error(ErrorCode::topology, what) {}
};

class ContractError : public Error {
 public:
  explicit ContractError(const std::string& what)
      : Error(ErrorCode::contract, what) {}
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw Error(ErrorCode::invalid_argument, what);
}

inline Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

inline double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

inline double trace(const Mat3& m, int dim) {
  double t = 0.0;
  for (int i = 0; i < dim; ++i) t += m[i][i];
  return t;
}

/// Frobenius inner product A:B.
inline double frobenius(const Mat3& a, const Mat3& b, int dim) {
  double s = 0.0;
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) s += a[i][j] * b[i][j];
  return s;
}

}  // namespace maviscid
