#include "openbook/transport.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "openbook/spatial.hpp"

namespace obl {

namespace {

std::vector<double> squared_costs(const DiscreteMeasure& a, const DiscreteMeasure& b, int extra_cols) {
  const std::size_t na = a.size(), nb = b.size();
  const std::size_t cols = nb + extra_cols;
  std::vector<double> cost(na * cols + (extra_cols ? cols : 0), 0.0);
  parallel_for(na, [&](std::size_t i) {
    for (std::size_t j = 0; j < nb; ++j) cost[i * cols + j] = dist2(a.point(i), b.point(j));
  });
  return cost;
}

void check_dims(const DiscreteMeasure& a, const DiscreteMeasure& b) {
  a.validate();
  b.validate();
  if (a.dim != b.dim && a.size() > 0 && b.size() > 0) fail(ErrorCode::InvalidArgument, "measures live in different dimensions");
}

}  // namespace

TransportResult wasserstein2(const DiscreteMeasure& a, const DiscreteMeasure& b, const SimplexOptions& options) {
  check_dims(a, b);
  const double ma = a.total_mass(), mb = b.total_mass();
  if (std::abs(ma - mb) > 1e-9 * std::max(1.0, std::max(ma, mb))) fail(ErrorCode::UnbalancedMass, "masses differ");
  TransportResult res;
  res.plan.leftover_source.assign(a.size(), 0.0);
  res.plan.leftover_target.assign(b.size(), 0.0);
  if (a.size() == 0 || b.size() == 0) return res;
  TransportationProblem p;
  p.sources = static_cast<int>(a.size());
  p.targets = static_cast<int>(b.size());
  p.cost = squared_costs(a, b, 0);
  p.supply = a.weights;
  p.demand = b.weights;
  // absorb rounding in the total so the LP is exactly balanced
  const double sa = std::accumulate(p.supply.begin(), p.supply.end(), 0.0);
  const double sb = std::accumulate(p.demand.begin(), p.demand.end(), 0.0);
  p.demand.back() += sa - sb;
  if (p.demand.back() < 0.0) p.demand.back() = 0.0;
  const TransportationResult r = solve_transportation(p, options);
  res.plan.pairs = r.flows;
  res.pivots = r.pivots;
  for (const Flow& f : r.flows) res.cost += f.mass * p.cost[static_cast<std::size_t>(f.source) * p.targets + f.target];
  return res;
}

TransportResult unbalanced_distance(const DiscreteMeasure& a, const DiscreteMeasure& b, const Spine& spine,
                                    double penalty_scale, const SimplexOptions& options) {
  check_dims(a, b);
  if (!(penalty_scale > 0.0)) fail(ErrorCode::InvalidArgument, "penalty scale must be positive");
  TransportResult res;
  const std::size_t na = a.size(), nb = b.size();
  res.plan.leftover_source.assign(na, 0.0);
  res.plan.leftover_target.assign(nb, 0.0);
  if (na == 0 && nb == 0) return res;

  // rows: sources + void, columns: targets + void
  TransportationProblem p;
  p.sources = static_cast<int>(na) + 1;
  p.targets = static_cast<int>(nb) + 1;
  const std::size_t cols = nb + 1;
  p.cost = squared_costs(a, b, 1);
  for (std::size_t i = 0; i < na; ++i) p.cost[i * cols + nb] = penalty_scale * spine.distance2(a.point(i));
  for (std::size_t j = 0; j < nb; ++j) p.cost[na * cols + j] = penalty_scale * spine.distance2(b.point(j));
  p.cost[na * cols + nb] = 0.0;
  p.supply = a.weights;
  p.supply.push_back(b.total_mass());
  p.demand = b.weights;
  p.demand.push_back(a.total_mass());

  const TransportationResult r = solve_transportation(p, options);
  res.pivots = r.pivots;
  for (const Flow& f : r.flows) {
    const bool void_src = f.source == static_cast<int>(na);
    const bool void_dst = f.target == static_cast<int>(nb);
    if (void_src && void_dst) continue;
    if (void_dst)
      res.plan.leftover_source[f.source] += f.mass;
    else if (void_src)
      res.plan.leftover_target[f.target] += f.mass;
    else
      res.plan.pairs.push_back(f);
  }
  res.cost = plan_cost(a, b, spine, res.plan, penalty_scale);
  return res;
}

double plan_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, const Spine& spine, const TransportPlan& plan,
                 double penalty_scale) {
  double c = 0.0;
  for (const Flow& f : plan.pairs) c += f.mass * dist2(a.point(f.source), b.point(f.target));
  for (std::size_t i = 0; i < plan.leftover_source.size(); ++i)
    if (plan.leftover_source[i] > 0.0) c += plan.leftover_source[i] * penalty_scale * spine.distance2(a.point(i));
  for (std::size_t j = 0; j < plan.leftover_target.size(); ++j)
    if (plan.leftover_target[j] > 0.0) c += plan.leftover_target[j] * penalty_scale * spine.distance2(b.point(j));
  return c;
}

double BumpFunction::profile(double t) {
  if (t <= 0.5) return 1.0;
  if (t >= 1.0) return 0.0;
  const double c = std::cos(std::numbers::pi * (t - 0.5));
  return c * c;
}

double BumpFunction::operator()(CSpan x, CSpan center) const { return profile(std::sqrt(dist2(x, center)) / radius); }

DiscreteCurrent sample_cone_ball(const OpenBook& cone, CSpan center, double r, int count, std::uint64_t seed,
                                 int per_sheet) {
  OpenBook shifted = cone;
  shifted.spine.origin = cone.spine.project(center);
  const double offset = std::sqrt(dist2(center, shifted.spine.origin));
  const double big = offset + r;
  SampleOptions opt;
  opt.per_sheet_count = per_sheet;
  const int m = cone.m();
  const int total = std::max(100, static_cast<int>(std::ceil(count * std::pow(big / r, m))));
  DiscreteCurrent c = sample_open_book(shifted, big, total, seed, opt);
  return offset > 0.0 ? c.restricted(center, r) : c;
}

namespace {

DiscreteMeasure bump_weighted(const DiscreteCurrent& t, CSpan center, const BumpFunction& bump) {
  DiscreteMeasure out(t.ambient_dim());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double phi = bump(t.measure.point(i), center);
    if (phi > 0.0) out.add(t.measure.point(i), phi * t.measure.weights[i]);
  }
  return out;
}

double scaled_distance(const DiscreteMeasure& a, const DiscreteMeasure& b, const Spine& spine, double r,
                       const SimplexOptions& options) {
  const int m = spine.m();
  return unbalanced_distance(a, b, spine, 1.0, options).cost / std::pow(r, m + 2);
}

}  // namespace

StrongExcess strong_excess_against(const DiscreteCurrent& t, const DiscreteCurrent& cone_sample, const OpenBook& cone,
                                   CSpan center, double r, const BumpFunction& bump,
                                   const DiscreteCurrent* floor_sample, const SimplexOptions& options) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
  if (t.ambient_dim() != cone.ambient_dim()) fail(ErrorCode::InvalidArgument, "current and cone dimensions differ");
  BumpFunction b = bump;
  b.radius = r;
  StrongExcess ex;
  ex.radius = r;
  ex.source = bump_weighted(t, center, b);
  ex.target = bump_weighted(cone_sample, center, b);
  ex.current_samples = ex.source.size();
  ex.cone_samples = ex.target.size();
  const Spine& spine = cone.spine;
  const TransportResult res = unbalanced_distance(ex.source, ex.target, spine, 1.0, options);
  ex.plan = res.plan;

  // Components read off the plan term by term, in the order used for the
  // objective, so each partial sum is bounded by the objective.
  std::vector<double> dist_c(ex.source.size()), dist_t(ex.target.size());
  for (std::size_t i = 0; i < ex.source.size(); ++i) dist_c[i] = cone.distance2(ex.source.point(i));
  {
    const PointIndex index(t.measure.points, t.ambient_dim());
    for (std::size_t j = 0; j < ex.target.size(); ++j) {
      double d2 = 0.0;
      index.nearest(ex.target.point(j), d2);
      dist_t[j] = std::min(d2, spine.distance2(ex.target.point(j)));
    }
  }
  double cost = 0.0, l2 = 0.0, rev = 0.0;
  for (const Flow& f : ex.plan.pairs) {
    const double c = dist2(ex.source.point(f.source), ex.target.point(f.target));
    cost += f.mass * c;
    l2 += f.mass * std::min(dist_c[f.source], c);  // min guards rounding only
    rev += f.mass * std::min(dist_t[f.target], c);
  }
  for (std::size_t i = 0; i < ex.source.size(); ++i) {
    const double lo = ex.plan.leftover_source[i];
    if (lo <= 0.0) continue;
    const double c = spine.distance2(ex.source.point(i));
    cost += lo * c;
    l2 += lo * std::min(dist_c[i], c);
  }
  for (std::size_t j = 0; j < ex.target.size(); ++j) {
    const double lo = ex.plan.leftover_target[j];
    if (lo <= 0.0) continue;
    const double c = spine.distance2(ex.target.point(j));
    cost += lo * c;
    rev += lo * std::min(dist_t[j], c);
  }
  const double norm_r = std::pow(r, t.m + 2);
  ex.value = cost / norm_r;
  ex.l2_part = l2 / norm_r;
  ex.reverse_part = rev / norm_r;
  if (floor_sample != nullptr) {
    const DiscreteMeasure fs = bump_weighted(*floor_sample, center, b);
    ex.noise_floor = scaled_distance(fs, ex.target, spine, r, options);
  }
  return ex;
}

StrongExcess strong_excess(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r,
                           const BumpFunction& bump, const ConeSampling& sampling, const SimplexOptions& options) {
  std::size_t inside = 0;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (dist2(t.measure.point(i), center) < r * r) ++inside;
  const int count = sampling.count > 0 ? sampling.count : static_cast<int>(std::max<std::size_t>(100, 4 * inside));
  const DiscreteCurrent cs = sample_cone_ball(cone, center, r, count, sampling.seed, sampling.per_sheet);
  if (!sampling.noise_floor) return strong_excess_against(t, cs, cone, center, r, bump, nullptr, options);
  const DiscreteCurrent fs = sample_cone_ball(cone, center, r, static_cast<int>(std::max<std::size_t>(100, inside)),
                                              mix_seed(sampling.seed, 0x5eed), 0);
  return strong_excess_against(t, cs, cone, center, r, bump, &fs, options);
}

void write_plan_csv(std::ostream& os, const TransportPlan& plan) {
  os << "src,dst,mass,void\n";
  char buf[64];
  auto mass = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
  };
  for (const Flow& f : plan.pairs) os << f.source << ',' << f.target << ',' << mass(f.mass) << ",0\n";
  for (std::size_t i = 0; i < plan.leftover_source.size(); ++i)
    if (plan.leftover_source[i] > 0.0) os << i << ",-1," << mass(plan.leftover_source[i]) << ",1\n";
  for (std::size_t j = 0; j < plan.leftover_target.size(); ++j)
    if (plan.leftover_target[j] > 0.0) os << "-1," << j << ',' << mass(plan.leftover_target[j]) << ",1\n";
}

}  // namespace obl
