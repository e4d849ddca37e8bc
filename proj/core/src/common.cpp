#include "openbook/common.hpp"

#include <algorithm>
#include <cstdlib>
#include <thread>

namespace obl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::MismatchedQ: return "MismatchedQ";
    case ErrorCode::MismatchedSpine: return "MismatchedSpine";
    case ErrorCode::OnSpine: return "OnSpine";
    case ErrorCode::DegenerateAngles: return "DegenerateAngles";
    case ErrorCode::EmptyBall: return "EmptyBall";
    case ErrorCode::NonVanishingOnSpine: return "NonVanishingOnSpine";
    case ErrorCode::MissingTangents: return "MissingTangents";
    case ErrorCode::UnbalancedMass: return "UnbalancedMass";
    case ErrorCode::EmptyCurrent: return "EmptyCurrent";
    case ErrorCode::TooFewSamples: return "TooFewSamples";
    case ErrorCode::MultiplicityMismatch: return "MultiplicityMismatch";
    case ErrorCode::SheetAmbiguity: return "SheetAmbiguity";
    case ErrorCode::VanishingHeight: return "VanishingHeight";
    case ErrorCode::NonSeparableBoundary: return "NonSeparableBoundary";
    case ErrorCode::ZeroEnergy: return "ZeroEnergy";
    case ErrorCode::StallDetected: return "StallDetected";
    case ErrorCode::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

Vec normalized(CSpan a) {
  const double n = norm(a);
  if (n == 0.0) fail(ErrorCode::InvalidArgument, "cannot normalize a zero vector");
  return scaled(a, 1.0 / n);
}

Vec unit_vector(int dim, int axis) {
  Vec e(static_cast<std::size_t>(dim), 0.0);
  e[static_cast<std::size_t>(axis)] = 1.0;
  return e;
}

double unit_ball_volume(int m) {
  const double half = 0.5 * m;
  return std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
}

double angle_between(CSpan a, CSpan b) {
  // atan2(|a x b|, a.b) generalised: |a - b| and |a + b| keep precision at both ends.
  double dm = 0.0, dp = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dm += (a[i] - b[i]) * (a[i] - b[i]);
    dp += (a[i] + b[i]) * (a[i] + b[i]);
  }
  return 2.0 * std::atan2(std::sqrt(dm), std::sqrt(dp));
}

double small_det(std::vector<double> a, int k) {
  double det = 1.0;
  for (int c = 0; c < k; ++c) {
    int piv = c;
    double best = std::abs(a[c * k + c]);
    for (int r = c + 1; r < k; ++r) {
      const double v = std::abs(a[r * k + c]);
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0.0) return 0.0;
    if (piv != c) {
      for (int j = 0; j < k; ++j) std::swap(a[c * k + j], a[piv * k + j]);
      det = -det;
    }
    const double d = a[c * k + c];
    det *= d;
    for (int r = c + 1; r < k; ++r) {
      const double f = a[r * k + c] / d;
      if (f == 0.0) continue;
      for (int j = c; j < k; ++j) a[r * k + j] -= f * a[c * k + j];
    }
  }
  return det;
}

namespace {
std::uint64_t splitmix(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
}  // namespace

Rng::Rng(std::uint64_t seed) {
  std::uint64_t s = seed;
  for (auto& w : state_) w = splitmix(s);
}

std::uint64_t Rng::next() {
  const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
  const std::uint64_t t = state_[1] << 17;
  state_[2] ^= state_[0];
  state_[3] ^= state_[1];
  state_[1] ^= state_[2];
  state_[0] ^= state_[3];
  state_[2] ^= t;
  state_[3] = rotl(state_[3], 45);
  return result;
}

double Rng::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Rng::uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u = 0.0;
  do {
    u = uniform();
  } while (u <= 0.0);
  const double v = uniform();
  const double rad = std::sqrt(-2.0 * std::log(u));
  spare_ = rad * std::sin(2.0 * std::numbers::pi * v);
  has_spare_ = true;
  return rad * std::cos(2.0 * std::numbers::pi * v);
}

int Rng::below(int n) { return static_cast<int>(uniform() * n) % n; }

Vec Rng::unit_sphere(int dim) {
  Vec v(static_cast<std::size_t>(dim));
  double n2 = 0.0;
  do {
    for (auto& x : v) x = normal();
    n2 = norm2(v);
  } while (n2 < 1e-20);
  return scaled(v, 1.0 / std::sqrt(n2));
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t x = seed ^ (salt * 0xd1b54a32d192ed03ULL);
  return splitmix(x);
}

int worker_count() {
  int n = static_cast<int>(std::thread::hardware_concurrency());
  if (n <= 0) n = 1;
  if (const char* env = std::getenv("OPENBOOK_LAB_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) n = std::min(n, cap);
  }
  return n;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, worker_count()));
  if (workers == 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t count = std::min(workers, n);
  for (std::size_t w = 0; w < count; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < n; i += count) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace obl
