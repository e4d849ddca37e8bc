#include "oracles.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace obl::testing {

namespace {

DiscreteMeasure to_measure(int dim, const std::vector<Vec>& pts, const std::vector<int>& units, double unit) {
  DiscreteMeasure m(dim);
  for (std::size_t i = 0; i < pts.size(); ++i) m.add(pts[i], units[i] * unit);
  return m;
}

double sq(CSpan a, CSpan b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return s;
}

// Mixed-radix encoding of remaining target capacities.
struct Radix {
  std::vector<std::size_t> stride;
  std::size_t size = 1;
  explicit Radix(const std::vector<int>& caps) {
    for (int c : caps) {
      stride.push_back(size);
      size *= static_cast<std::size_t>(c + 1);
    }
  }
};

double half_plane_angle(CSpan a, CSpan b) {
  Vec d(a.size()), s(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = a[i] - b[i];
    s[i] = a[i] + b[i];
  }
  return 2.0 * std::atan2(std::sqrt(sq(d, Vec(d.size(), 0.0))), std::sqrt(sq(s, Vec(s.size(), 0.0))));
}

}  // namespace

DiscreteMeasure UnitInstance::a() const { return to_measure(dim, a_points, a_units, unit); }
DiscreteMeasure UnitInstance::b() const { return to_measure(dim, b_points, b_units, unit); }

double balanced_transport_oracle(const UnitInstance& inst) {
  std::vector<int> src;
  for (std::size_t i = 0; i < inst.a_units.size(); ++i) src.insert(src.end(), inst.a_units[i], static_cast<int>(i));
  const int total = static_cast<int>(src.size());
  const Radix rad(inst.b_units);
  const std::size_t nb = inst.b_units.size();
  std::vector<double> memo(rad.size, std::numeric_limits<double>::quiet_NaN());
  std::vector<int> rem(inst.b_units);

  // f(rem) = cheapest routing of the unrouted source units into rem
  std::function<double(std::size_t, int)> f = [&](std::size_t key, int left) -> double {
    if (left == 0) return 0.0;
    if (!std::isnan(memo[key])) return memo[key];
    const int u = src[static_cast<std::size_t>(total - left)];
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < nb; ++j) {
      if (rem[j] == 0) continue;
      --rem[j];
      const double c = inst.unit * sq(inst.a_points[static_cast<std::size_t>(u)], inst.b_points[j]) +
                       f(key - rad.stride[j], left - 1);
      ++rem[j];
      best = std::min(best, c);
    }
    return memo[key] = best;
  };
  std::size_t key = 0;
  for (std::size_t j = 0; j < nb; ++j) key += rad.stride[j] * static_cast<std::size_t>(inst.b_units[j]);
  return f(key, total);
}

double unbalanced_transport_oracle(const UnitInstance& inst, const Spine& spine) {
  std::vector<int> src;
  for (std::size_t i = 0; i < inst.a_units.size(); ++i) src.insert(src.end(), inst.a_units[i], static_cast<int>(i));
  const std::size_t total = src.size();
  const Radix rad(inst.b_units);
  const std::size_t nb = inst.b_units.size();
  std::vector<double> create(nb);
  for (std::size_t j = 0; j < nb; ++j) create[j] = inst.unit * spine.distance2(inst.b_points[j]);

  // value[u][key]: cheapest completion from source unit u with capacities key
  std::vector<double> next(rad.size), cur(rad.size);
  std::vector<int> rem(nb);
  auto decode = [&](std::size_t key) {
    for (std::size_t j = nb; j-- > 0;) {
      rem[j] = static_cast<int>(key / rad.stride[j]);
      key %= rad.stride[j];
    }
  };
  for (std::size_t key = 0; key < rad.size; ++key) {
    decode(key);
    double s = 0.0;
    for (std::size_t j = 0; j < nb; ++j) s += rem[j] * create[j];
    next[key] = s;
  }
  for (std::size_t u = total; u-- > 0;) {
    const Vec& x = inst.a_points[static_cast<std::size_t>(src[u])];
    const double destroy = inst.unit * spine.distance2(x);
    for (std::size_t key = 0; key < rad.size; ++key) {
      decode(key);
      double best = destroy + next[key];
      for (std::size_t j = 0; j < nb; ++j)
        if (rem[j] > 0) best = std::min(best, inst.unit * sq(x, inst.b_points[j]) + next[key - rad.stride[j]]);
      cur[key] = best;
    }
    std::swap(cur, next);
  }
  std::size_t key = 0;
  for (std::size_t j = 0; j < nb; ++j) key += rad.stride[j] * static_cast<std::size_t>(inst.b_units[j]);
  return next[key];
}

std::vector<std::string> check_layers(const OpenBook& book, const LayerDecomposition& l) {
  std::vector<std::string> bad;
  const int n = book.sheet_count();
  auto angle = [&](int i, int j) { return half_plane_angle(book.sheets[i].normal, book.sheets[j].normal); };
  const double tol = 1e-10;
  const int kappa = l.kappa;
  const auto& sets = l.index_sets;
  if (kappa < 0 || static_cast<int>(sets.size()) < kappa + 1) return {"fewer index sets than kappa + 1"};

  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);
  if (sets[0] != all) bad.push_back("I(0) is not every sheet");

  std::vector<double> mn, mx, d;
  for (int s = 0; s <= kappa; ++s) {
    const auto& is = sets[static_cast<std::size_t>(s)];
    if (is.size() < 2) bad.push_back("I(" + std::to_string(s) + ") has fewer than two sheets");
    if (s > 0) {
      const auto& prev = sets[static_cast<std::size_t>(s - 1)];
      if (is.size() >= prev.size() || !std::includes(prev.begin(), prev.end(), is.begin(), is.end()))
        bad.push_back("I(" + std::to_string(s) + ") is not a proper subset");
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0, spread = 0.0;
    for (std::size_t a = 0; a < is.size(); ++a)
      for (std::size_t b = a + 1; b < is.size(); ++b) {
        lo = std::min(lo, angle(is[a], is[b]));
        hi = std::max(hi, angle(is[a], is[b]));
      }
    for (int i = 0; i < n; ++i) {
      double nearest = std::numeric_limits<double>::infinity();
      for (int j : is) nearest = std::min(nearest, angle(i, j));
      spread = std::max(spread, nearest);
    }
    mn.push_back(lo);
    mx.push_back(hi);
    d.push_back(spread);
  }
  if (!bad.empty()) return bad;

  const double eta = l.eta, delta = l.delta;
  if (!(eta > 0.0)) bad.push_back("eta is not positive");
  if (std::abs(mx[kappa] - mx[0]) > tol) bad.push_back("(1) M(kappa) != M(0)");
  if (eta * mx[kappa] > mn[kappa] + tol) bad.push_back("(2) eta M(kappa) > m(kappa)");
  for (int s = 1; s <= kappa; ++s) {
    const std::string at = " at s = " + std::to_string(s);
    if (d[s] > delta * mn[s] + tol) bad.push_back("(3) d(s) > delta m(s)" + at);
    if (eta * d[s] > mn[s - 1] + tol) bad.push_back("(3) eta d(s) > m(s-1)" + at);
    if (mn[s - 1] > delta * mn[s] + tol) bad.push_back("(4) m(s-1) > delta m(s)" + at);
  }

  const bool extend = mx[kappa] < delta;
  const std::size_t expect_sets = static_cast<std::size_t>(kappa) + (extend ? 2 : 1);
  if (sets.size() != expect_sets) bad.push_back("extension rule not followed");
  if (extend && sets.size() == expect_sets) {
    const int lowest = *std::min_element(sets[kappa].begin(), sets[kappa].end());
    if (sets.back() != std::vector<int>{lowest}) bad.push_back("extended layer is not min I(kappa)");
  }

  // multiplicities handed to the nearest sheet of the next layer
  if (l.multiplicities.size() != sets.size()) {
    bad.push_back("multiplicities not aligned with index sets");
    return bad;
  }
  std::vector<int> q;
  for (const auto& s : book.sheets) q.push_back(s.multiplicity);
  const int total = std::accumulate(q.begin(), q.end(), 0);
  for (std::size_t k = 0; k < sets.size(); ++k) {
    if (l.multiplicities[k] != q) bad.push_back("multiplicities differ at layer " + std::to_string(k));
    if (std::accumulate(l.multiplicities[k].begin(), l.multiplicities[k].end(), 0) != total)
      bad.push_back("total multiplicity not conserved at layer " + std::to_string(k));
    if (k + 1 == sets.size()) break;
    std::vector<int> next(sets[k + 1].size(), 0);
    for (std::size_t a = 0; a < sets[k].size(); ++a) {
      std::size_t arg = 0;
      for (std::size_t b = 1; b < sets[k + 1].size(); ++b)
        if (angle(sets[k][a], sets[k + 1][b]) < angle(sets[k][a], sets[k + 1][arg])) arg = b;
      next[arg] += q[a];
    }
    q = next;
  }
  return bad;
}

OpenBook random_book(Rng& rng, int m, int n, int sheets, int max_multiplicity, double min_angle) {
  OpenBook book;
  book.spine = Spine::standard(m, n);
  const int d = m + n;
  while (static_cast<int>(book.sheets.size()) < sheets) {
    const Vec dir = rng.unit_sphere(n + 1);
    Vec normal(static_cast<std::size_t>(d), 0.0);
    for (int i = 0; i <= n; ++i) normal[static_cast<std::size_t>(m - 1 + i)] = dir[static_cast<std::size_t>(i)];
    bool ok = true;
    for (const auto& s : book.sheets)
      if (half_plane_angle(s.normal, normal) < min_angle) ok = false;
    if (!ok) continue;
    book.sheets.push_back(Sheet{normal, 1 + rng.below(max_multiplicity)});
  }
  return book;
}

double permutation_oracle(const std::vector<Vec>& a, const std::vector<Vec>& b) {
  std::vector<int> p(a.size());
  std::iota(p.begin(), p.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double c = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) c += sq(a[i], b[static_cast<std::size_t>(p[i])]);
    best = std::min(best, c);
  } while (std::next_permutation(p.begin(), p.end()));
  return best;
}

}  // namespace obl::testing
