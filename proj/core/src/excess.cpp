#include "openbook/excess.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "openbook/spatial.hpp"

namespace obl {

double l2_excess(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
  double acc = 0.0;
  std::size_t inside = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CSpan x = t.measure.point(i);
    if (dist2(x, center) >= r * r) continue;
    ++inside;
    acc += t.measure.weights[i] * cone.distance2(x);
  }
  if (inside == 0) fail(ErrorCode::EmptyBall, "no samples inside the ball");
  return acc / std::pow(r, t.m + 2);
}

ReverseExcess reverse_l2_excess(const DiscreteCurrent& t, const DiscreteCurrent& cone_sample, CSpan center, double r,
                                const BumpFunction& bump) {
  if (t.size() == 0) fail(ErrorCode::EmptyCurrent, "current has no samples");
  BumpFunction b = bump;
  b.radius = r;
  const PointIndex index(t.measure.points, t.ambient_dim());
  ReverseExcess res;
  for (std::size_t j = 0; j < cone_sample.size(); ++j) {
    const CSpan y = cone_sample.measure.point(j);
    const double phi = b(y, center);
    if (phi <= 0.0) continue;
    double d2 = 0.0;
    const std::size_t k = index.nearest(y, d2);
    res.value += phi * cone_sample.measure.weights[j] * d2;
    double spacing = 0.0;
    if (t.size() > 1) index.nearest(t.measure.point(k), spacing, k);
    res.bias += phi * cone_sample.measure.weights[j] * spacing;
  }
  const double norm_r = std::pow(r, t.m + 2);
  res.value /= norm_r;
  res.bias /= norm_r;
  return res;
}

ReverseExcess reverse_l2_excess(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r,
                                const ConeSampling& sampling) {
  std::size_t inside = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (dist2(t.measure.point(i), center) < r * r) ++inside;
  const int count = sampling.count > 0 ? sampling.count : static_cast<int>(std::max<std::size_t>(100, 4 * inside));
  const DiscreteCurrent cs = sample_cone_ball(cone, center, r, count, sampling.seed, sampling.per_sheet);
  return reverse_l2_excess(t, cs, center, r);
}

double tilt_excess(const DiscreteCurrent& t, CSpan plane, CSpan center, double r) {
  if (!t.has_tangents()) fail(ErrorCode::MissingTangents, "current carries no tangents");
  if (plane.size() != static_cast<std::size_t>(t.m) * t.ambient_dim())
    fail(ErrorCode::InvalidArgument, "plane must have m rows of ambient length");
  const Vec pi = orthonormal_rows(plane, t.m, t.ambient_dim());
  double acc = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (dist2(t.measure.point(i), center) >= r * r) continue;
    // |xi - pi|^2 / 2 = 1 - <xi, pi> for unit simple m-vectors
    acc += t.measure.weights[i] * (1.0 - mvector_inner(t.tangent(i), pi, t.m));
  }
  return acc / (unit_ball_volume(t.m) * std::pow(r, t.m));
}

double amended_excess(double strong, double kappa, double a_gamma, double a_sigma, double r) {
  if (!(kappa > 0.0)) fail(ErrorCode::InvalidArgument, "kappa must be positive");
  return std::max({strong, a_gamma * r / kappa, a_sigma * a_sigma * r * r / kappa});
}

// ------------------------------------------------------------- fitting

// Mass of a unit-multiplicity half-plane V + R^+ nu inside
// {|x - p| < r, dist(x, V) > r/8}.
double sector_area(const Spine& spine, CSpan nu, CSpan center, double r) {
  const int m = spine.m();
  const Vec pperp = spine.normal_part(center);
  const double a = dot(nu, pperp);
  const double disc = a * a - norm2(pperp) + r * r;
  if (disc <= 0.0) return 0.0;
  const double lo = std::max(r / 8.0, a - std::sqrt(disc));
  const double hi = a + std::sqrt(disc);
  if (hi <= lo) return 0.0;
  // substitute t = hi - (hi-lo) u^2 to absorb the square-root endpoint
  const double wm = unit_ball_volume(m - 1);
  constexpr int kPanels = 64;
  constexpr double gx[3] = {-0.7745966692414833770, 0.0, 0.7745966692414833770};
  constexpr double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  double acc = 0.0;
  for (int pnl = 0; pnl < kPanels; ++pnl) {
    const double u0 = static_cast<double>(pnl) / kPanels, u1 = static_cast<double>(pnl + 1) / kPanels;
    for (int g = 0; g < 3; ++g) {
      const double u = 0.5 * (u0 + u1) + 0.5 * (u1 - u0) * gx[g];
      const double tt = hi - (hi - lo) * u * u;
      const double rad2 = r * r - (tt * tt - 2.0 * tt * a + norm2(pperp));
      if (rad2 <= 0.0) continue;
      acc += gw[g] * 0.5 * (u1 - u0) * wm * std::pow(rad2, 0.5 * (m - 1)) * 2.0 * (hi - lo) * u;
    }
  }
  return acc;
}

namespace {

struct Cluster {
  Vec sum;
  double mass = 0.0;
  std::size_t first = 0;
  Vec mean() const { return normalized(sum); }
};

}  // namespace

FitResult fit_open_book(const DiscreteCurrent& t, const Spine& spine, CSpan center, double r,
                        const FitOptions& options) {
  const int d = t.ambient_dim();
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CSpan x = t.measure.point(i);
    if (dist2(x, center) < r * r && spine.distance(x) > r / 8.0) idx.push_back(i);
  }
  if (idx.size() < options.min_samples) fail(ErrorCode::TooFewSamples, "too few samples in the fitting annulus");

  std::vector<Vec> sig(idx.size());
  std::vector<double> pts;
  pts.reserve(idx.size() * d);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const CSpan x = t.measure.point(idx[k]);
    sig[k] = sigma_direction(spine, x);
    pts.insert(pts.end(), x.begin(), x.end());
  }

  FitResult res;
  res.samples = idx.size();
  {
    const PointIndex index(pts, d);
    std::vector<double> ang(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) {
      double d2 = 0.0;
      const std::size_t nn = index.nearest(CSpan(pts.data() + k * d, static_cast<std::size_t>(d)), d2, k);
      ang[k] = angle_between(sig[k], sig[nn]);
    }
    std::nth_element(ang.begin(), ang.begin() + ang.size() / 2, ang.end());
    res.angular_noise = ang[ang.size() / 2];
  }
  res.threshold = std::max(4.0 * res.angular_noise, options.cluster_threshold);

  std::vector<std::size_t> order(idx.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return t.measure.weights[idx[a]] > t.measure.weights[idx[b]];
  });

  std::vector<Cluster> clusters;
  auto nearest_cluster = [&](const Vec& s, const std::vector<Vec>& means) {
    int best = -1;
    double ba = 0.0;
    for (std::size_t c = 0; c < means.size(); ++c) {
      const double a = angle_between(s, means[c]);
      if (best < 0 || a < ba) {
        best = static_cast<int>(c);
        ba = a;
      }
    }
    return std::pair<int, double>{best, ba};
  };
  {
    std::vector<Vec> means;
    for (std::size_t k : order) {
      const double w = t.measure.weights[idx[k]];
      auto [c, a] = nearest_cluster(sig[k], means);
      if (c < 0 || a >= res.threshold) {
        clusters.push_back({scaled(sig[k], w), w, k});
        means.push_back(sig[k]);
      } else {
        axpy(w, sig[k], clusters[c].sum);
        clusters[c].mass += w;
        means[c] = clusters[c].mean();
      }
    }
  }

  auto reassign = [&]() {
    std::vector<Vec> means;
    for (const auto& c : clusters) means.push_back(c.mean());
    std::vector<Cluster> next(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
      next[c].sum.assign(d, 0.0);
      next[c].first = idx.size();
    }
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const int c = nearest_cluster(sig[k], means).first;
      const double w = t.measure.weights[idx[k]];
      axpy(w, sig[k], next[c].sum);
      next[c].mass += w;
      next[c].first = std::min(next[c].first, k);
    }
    std::erase_if(next, [](const Cluster& c) { return c.mass <= 0.0; });
    clusters = std::move(next);
  };
  auto merge_closest = [&](double limit) {
    int bi = -1, bj = -1;
    double ba = 0.0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        const double a = angle_between(clusters[i].mean(), clusters[j].mean());
        if (bi < 0 || a < ba) {
          bi = static_cast<int>(i);
          bj = static_cast<int>(j);
          ba = a;
        }
      }
    if (bi < 0 || ba >= limit) return false;
    axpy(1.0, clusters[bj].sum, clusters[bi].sum);
    clusters[bi].mass += clusters[bj].mass;
    clusters[bi].first = std::min(clusters[bi].first, clusters[bj].first);
    clusters.erase(clusters.begin() + bj);
    return true;
  };

  for (int it = 0; it < 3; ++it) reassign();
  while (merge_closest(res.threshold)) {
  }
  while (static_cast<int>(clusters.size()) > options.max_sheets) merge_closest(std::numeric_limits<double>::infinity());
  reassign();
  std::stable_sort(clusters.begin(), clusters.end(), [](const Cluster& a, const Cluster& b) {
    if (a.mass != b.mass) return a.mass > b.mass;
    return a.first < b.first;
  });

  const int target_q = options.q > 0 ? options.q : t.q;
  std::vector<int> mult(clusters.size());
  std::vector<double> rem(clusters.size());
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const double area = sector_area(spine, clusters[c].mean(), center, r);
    const double raw = area > 0.0 ? clusters[c].mass / area : 1.0;
    res.raw_multiplicity.push_back(raw);
    mult[c] = std::max(1, static_cast<int>(std::lround(raw)));
    rem[c] = raw - mult[c];
  }
  if (target_q > 0) {
    int total = std::accumulate(mult.begin(), mult.end(), 0);
    std::vector<std::size_t> ord(mult.size());
    std::iota(ord.begin(), ord.end(), std::size_t{0});
    if (total < target_q) {
      std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
      for (std::size_t k = 0; k < ord.size() && total < target_q; ++k, ++total) ++mult[ord[k]];
    } else if (total > target_q) {
      std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return rem[a] < rem[b]; });
      for (std::size_t k = 0; k < ord.size() && total > target_q; ++k)
        if (mult[ord[k]] > 1) {
          --mult[ord[k]];
          --total;
        }
    }
    if (total != target_q) fail(ErrorCode::MultiplicityMismatch, "cannot reach the total multiplicity by rounding");
  }

  res.book.spine = spine;
  for (std::size_t c = 0; c < clusters.size(); ++c) res.book.sheets.push_back({clusters[c].mean(), mult[c]});
  return res;
}

// ------------------------------------------------------------- pruning

std::pair<int, int> closest_sheets(const OpenBook& cone) {
  const int n = cone.sheet_count();
  std::pair<int, int> best{-1, -1};
  double ba = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double a = angle_between(cone.sheets[i].normal, cone.sheets[j].normal);
      if (best.first < 0 || a < ba) {
        best = {i, j};
        ba = a;
      }
    }
  return best;
}

OpenBook merge_sheets(const OpenBook& cone, int i, int j) {
  if (i == j || i < 0 || j < 0 || i >= cone.sheet_count() || j >= cone.sheet_count())
    fail(ErrorCode::InvalidArgument, "invalid sheet pair");
  OpenBook out = cone;
  out.sheets[i].multiplicity += cone.sheets[j].multiplicity;
  out.sheets.erase(out.sheets.begin() + j);
  return out;
}

PruneTrace prune(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r, const std::vector<double>& eps,
                 const PruneOptions& options) {
  cone.validate();
  const int q = cone.total_multiplicity();
  if (static_cast<int>(eps.size()) < cone.sheet_count())
    fail(ErrorCode::InvalidArgument, "epsilon schedule shorter than the sheet count");
  for (double e : eps)
    if (!(e > 0.0 && e < 1.0)) fail(ErrorCode::InvalidArgument, "epsilon values must lie in (0,1)");

  PruneTrace trace;
  trace.evaluator = options.evaluator == ExcessEvaluator::Strong ? "strong" : "l2";
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(cone.sheet_count()));
  for (int i = 0; i < cone.sheet_count(); ++i) groups[i] = {i};

  auto evaluate = [&](const OpenBook& c) {
    if (options.evaluator == ExcessEvaluator::L2) return l2_excess(t, c, center, r);
    ConeSampling s = options.sampling;
    s.noise_floor = false;
    return strong_excess(t, c, center, r, BumpFunction{r}, s, options.lp).value;
  };

  OpenBook current = cone;
  while (true) {
    PruneStep step;
    step.cone = current;
    step.excess = evaluate(current);
    step.alpha = book_angle(current);
    step.threshold = eps[current.sheet_count() - 1] * step.alpha * step.alpha;
    step.stop = step.excess <= step.threshold;
    if (!trace.steps.empty()) trace.inflation.push_back(trace.steps.back().excess > 0.0
                                                            ? step.excess / trace.steps.back().excess
                                                            : 0.0);
    if (step.stop || current.sheet_count() == 1) {
      trace.stopped = step.stop;
      trace.steps.push_back(step);
      break;
    }
    const auto [i, j] = closest_sheets(current);
    step.merged_into = i;
    step.merged_from = j;
    trace.steps.push_back(step);
    groups[i].insert(groups[i].end(), groups[j].begin(), groups[j].end());
    std::sort(groups[i].begin(), groups[i].end());
    groups.erase(groups.begin() + j);
    current = merge_sheets(current, i, j);
    if (current.total_multiplicity() != q) fail(ErrorCode::MultiplicityMismatch, "merge lost multiplicity");
  }
  trace.final_cone = current;
  trace.final_sheets = current.sheet_count();
  trace.partition = groups;
  return trace;
}

}  // namespace obl
