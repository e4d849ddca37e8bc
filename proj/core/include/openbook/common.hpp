#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace obl {

using Vec = std::vector<double>;
using CSpan = std::span<const double>;
using MSpan = std::span<double>;

enum class ErrorCode {
  InvalidArgument,
  MismatchedQ,
  MismatchedSpine,
  OnSpine,
  DegenerateAngles,
  EmptyBall,
  NonVanishingOnSpine,
  MissingTangents,
  UnbalancedMass,
  EmptyCurrent,
  TooFewSamples,
  MultiplicityMismatch,
  SheetAmbiguity,
  VanishingHeight,
  NonSeparableBoundary,
  ZeroEnergy,
  StallDetected,
  ParseError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);

inline double dot(CSpan a, CSpan b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}
inline double norm2(CSpan a) { return dot(a, a); }
inline double norm(CSpan a) { return std::sqrt(norm2(a)); }
inline double dist2(CSpan a, CSpan b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}
inline Vec sub(CSpan a, CSpan b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}
inline Vec add(CSpan a, CSpan b) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}
inline Vec scaled(CSpan a, double s) {
  Vec r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] * s;
  return r;
}
inline void axpy(double s, CSpan x, MSpan y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}
Vec normalized(CSpan a);
Vec unit_vector(int dim, int axis);

// Volume of the unit ball in R^m.
double unit_ball_volume(int m);

// Angle between two unit vectors, robust near 0 and pi.
double angle_between(CSpan a, CSpan b);

// Determinant of a small dense row-major k x k matrix.
double small_det(std::vector<double> a, int k);

// xoshiro256** seeded through splitmix64. Distributions are written out so
// that outputs do not depend on the standard library implementation.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  double uniform();                      // [0,1)
  double uniform(double lo, double hi);  // [lo,hi)
  double normal();
  std::uint64_t next();
  int below(int n);  // uniform integer in [0,n)
  Vec unit_sphere(int dim);

 private:
  std::uint64_t state_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// Derive a child seed so that independent streams do not collide.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt);

// Worker count: hardware concurrency capped by OPENBOOK_LAB_THREADS.
int worker_count();

// Runs body(i) for i in [0,n) on worker_count() threads. Callers write
// results into per-index slots so that reductions stay order independent.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace obl
