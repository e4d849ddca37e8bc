#include "openbook/qvalued.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace obl {

QPoint::QPoint(int q, int n) : q_(q), n_(n), data_(static_cast<std::size_t>(q) * n, 0.0) {}

QPoint::QPoint(int q, int n, std::vector<double> atoms) : q_(q), n_(n), data_(std::move(atoms)) {
  if (data_.size() != static_cast<std::size_t>(q) * n)
    fail(ErrorCode::InvalidArgument, "QPoint atom buffer has wrong size");
  canonicalize();
}

QPoint QPoint::from_atoms(const std::vector<Vec>& atoms) {
  if (atoms.empty()) fail(ErrorCode::InvalidArgument, "QPoint needs at least one atom");
  const int n = static_cast<int>(atoms.front().size());
  std::vector<double> buf;
  buf.reserve(atoms.size() * n);
  for (const auto& a : atoms) {
    if (static_cast<int>(a.size()) != n) fail(ErrorCode::InvalidArgument, "QPoint atoms differ in dimension");
    buf.insert(buf.end(), a.begin(), a.end());
  }
  return QPoint(static_cast<int>(atoms.size()), n, std::move(buf));
}

std::vector<Vec> QPoint::atoms() const {
  std::vector<Vec> out;
  for (int i = 0; i < q_; ++i) out.emplace_back(atom(i).begin(), atom(i).end());
  return out;
}

void QPoint::canonicalize() {
  std::vector<int> idx(static_cast<std::size_t>(q_));
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) {
    return std::lexicographical_compare(data_.begin() + a * n_, data_.begin() + (a + 1) * n_,
                                        data_.begin() + b * n_, data_.begin() + (b + 1) * n_);
  });
  std::vector<double> sorted;
  sorted.reserve(data_.size());
  for (int i : idx) sorted.insert(sorted.end(), data_.begin() + i * n_, data_.begin() + (i + 1) * n_);
  data_ = std::move(sorted);
}

Matching exhaustive_assignment(const std::vector<double>& cost, int q) {
  std::vector<int> perm(static_cast<std::size_t>(q));
  std::iota(perm.begin(), perm.end(), 0);
  Matching best{perm, std::numeric_limits<double>::infinity()};
  do {
    double c = 0.0;
    for (int i = 0; i < q; ++i) c += cost[i * q + perm[i]];
    if (c < best.cost) best = {perm, c};  // first permutation in lexicographic order wins ties
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

Matching hungarian_assignment(const std::vector<double>& cost, int q) {
  // Shortest augmenting path version with potentials (1-indexed internally).
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(q + 1, 0.0), v(q + 1, 0.0), minv(q + 1);
  std::vector<int> p(q + 1, 0), way(q + 1, 0);
  std::vector<char> used(q + 1);
  for (int i = 1; i <= q; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= q; ++j) {
        if (used[j]) continue;
        const double cur = cost[(i0 - 1) * q + (j - 1)] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= q; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  Matching m;
  m.perm.assign(q, 0);
  for (int j = 1; j <= q; ++j) m.perm[p[j] - 1] = j - 1;
  for (int i = 0; i < q; ++i) m.cost += cost[i * q + m.perm[i]];
  return m;
}

Matching min_cost_assignment(const std::vector<double>& cost, int q) {
  if (q <= 6) return exhaustive_assignment(cost, q);
  return hungarian_assignment(cost, q);
}

double second_best_assignment_cost(const std::vector<double>& cost, int q, const std::vector<int>& best) {
  if (q < 2) return std::numeric_limits<double>::infinity();
  std::vector<int> perm(static_cast<std::size_t>(q));
  std::iota(perm.begin(), perm.end(), 0);
  double second = std::numeric_limits<double>::infinity();
  do {
    if (perm == best) continue;
    double c = 0.0;
    for (int i = 0; i < q; ++i) c += cost[i * q + perm[i]];
    second = std::min(second, c);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return second;
}

Matching q_matching(const QPoint& a, const QPoint& b) {
  if (a.q() != b.q()) fail(ErrorCode::MismatchedQ, "QPoints have different Q");
  if (a.n() != b.n()) fail(ErrorCode::InvalidArgument, "QPoints have different n");
  const int q = a.q();
  std::vector<double> cost(static_cast<std::size_t>(q) * q);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j) cost[i * q + j] = dist2(a.atom(i), b.atom(j));
  return min_cost_assignment(cost, q);
}

double q_metric(const QPoint& a, const QPoint& b) { return std::sqrt(q_matching(a, b).cost); }

Vec q_average(const QPoint& a) {
  Vec mean(static_cast<std::size_t>(a.n()), 0.0);
  for (int i = 0; i < a.q(); ++i) axpy(1.0, a.atom(i), mean);
  for (auto& x : mean) x /= a.q();
  return mean;
}

QPoint q_translate(const QPoint& a, CSpan v) {
  std::vector<double> buf = a.data();
  for (int i = 0; i < a.q(); ++i)
    for (int k = 0; k < a.n(); ++k) buf[i * a.n() + k] += v[k];
  return QPoint(a.q(), a.n(), std::move(buf));
}

QPoint q_subtract_average(const QPoint& a) {
  const Vec mean = q_average(a);
  return q_translate(a, scaled(mean, -1.0));
}

int LinearQMap::q() const { return std::accumulate(multiplicities.begin(), multiplicities.end(), 0); }

QPoint LinearQMap::evaluate(double xm) const {
  std::vector<Vec> atoms;
  for (std::size_t i = 0; i < directions.size(); ++i)
    for (int k = 0; k < multiplicities[i]; ++k) atoms.push_back(scaled(directions[i], xm));
  return QPoint::from_atoms(atoms);
}

double LinearQMap::separation() const {
  if (directions.size() < 2) return 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < directions.size(); ++i)
    for (std::size_t j = i + 1; j < directions.size(); ++j)
      best = std::min(best, std::sqrt(dist2(directions[i], directions[j])));
  return best;
}

void LinearQMap::validate() const {
  if (directions.size() != multiplicities.size() || directions.empty())
    fail(ErrorCode::InvalidArgument, "LinearQMap needs one multiplicity per direction");
  for (int q : multiplicities)
    if (q <= 0) fail(ErrorCode::InvalidArgument, "LinearQMap multiplicities must be positive");
  for (std::size_t i = 0; i < directions.size(); ++i)
    for (std::size_t j = i + 1; j < directions.size(); ++j)
      if (dist2(directions[i], directions[j]) == 0.0)
        fail(ErrorCode::InvalidArgument, "LinearQMap directions must be pairwise distinct");
}

}  // namespace obl
