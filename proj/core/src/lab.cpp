#include "openbook/lab.hpp"

#include <algorithm>
#include <chrono>
#include <limits>

namespace obl {

const char* to_string(CubeKind kind) {
  switch (kind) {
    case CubeKind::Outer: return "outer";
    case CubeKind::Central: return "central";
    case CubeKind::Inner: return "inner";
    case CubeKind::Interior: return "interior";
    case CubeKind::BoundaryStopping: return "boundary_stopping";
    case CubeKind::Excluded: return "excluded";
  }
  return "?";
}

const char* to_string(DecayAction action) { return action == DecayAction::Halve ? "halve" : "refit"; }

// ------------------------------------------------------------- Whitney cubes

namespace {

double half_side0(int m) { return 1.0 / std::sqrt(static_cast<double>(m - 1)); }

// Separation of two sheets inside B_1: the Hausdorff distance of the unit
// half-discs, sin(angle) up to a right angle and 1 beyond.
double sheet_separation(double angle) { return angle <= 0.5 * std::numbers::pi ? std::sin(angle) : 1.0; }

// Does the affine plane G contain a point of B_R(y) at distance >= delta
// from V? The distance to V is affine along G, so its maximum over the disc
// is probed on the disc boundary.
bool plane_meets_hollow_ball(const Spine& g, const Spine& v, CSpan y, double radius, double delta) {
  const Vec c = g.project(y);
  const double d2 = dist2(c, y);
  if (d2 >= radius * radius) return false;
  const double rho = std::sqrt(radius * radius - d2) * (1.0 - 1e-12);
  if (v.distance(c) >= delta) return true;
  const int k = g.spine_dim();
  std::vector<Vec> dirs;
  for (int a = 0; a < k; ++a) {
    dirs.push_back(g.basis[a]);
    for (int b = a + 1; b < k; ++b) {
      dirs.push_back(scaled(add(g.basis[a], g.basis[b]), std::sqrt(0.5)));
      dirs.push_back(scaled(sub(g.basis[a], g.basis[b]), std::sqrt(0.5)));
    }
  }
  for (const auto& dir : dirs)
    for (double s : {-1.0, 1.0}) {
      Vec x = c;
      axpy(s * rho, dir, x);
      if (v.distance(x) >= delta) return true;
    }
  return false;
}

double lens_height(double d, double r1, double r2) {
  if (d >= r1 + r2) return -1.0;
  if (d <= std::abs(r1 - r2)) return std::min(r1, r2);
  const double a = (d * d + r1 * r1 - r2 * r2) / (2.0 * d);
  return std::sqrt(std::max(0.0, r1 * r1 - a * a));
}

}  // namespace

bool region_contains(const CubeRegion& cube, int m, CSpan p) {
  const double h0 = half_side0(m);
  for (int a = 0; a < m - 1; ++a) {
    const double lo = -h0 + cube.cell[a] * cube.side;
    if (p[a] < lo || p[a] > lo + cube.side) return false;
  }
  double perp2 = 0.0;
  for (std::size_t a = static_cast<std::size_t>(m - 1); a < p.size(); ++a) perp2 += p[a] * p[a];
  const double perp = std::sqrt(perp2);
  const double top = std::ldexp(1.0, -cube.generation);
  return perp >= 0.5 * top && perp <= top;
}

WhitneyReport whitney_classify(const DiscreteCurrent& t, const OpenBook& cone, const WhitneyOptions& options) {
  cone.validate();
  t.validate();
  const int m = cone.m(), n = cone.spine.n();
  if (m < 2) fail(ErrorCode::InvalidArgument, "cubes need a spine of dimension >= 1");
  if (!cone.spine.same_as(Spine::standard(m, n))) fail(ErrorCode::InvalidArgument, "cubes assume the standard spine");
  if (options.max_generation < 0 || options.max_generation > 12)
    fail(ErrorCode::InvalidArgument, "max generation must lie in [0, 12]");
  const Spine& v = cone.spine;
  const Spine gamma = options.boundary.value_or(v);
  const int q = cone.total_multiplicity();

  WhitneyReport rep;
  rep.density_factor = options.density_factor > 0.0 ? options.density_factor : 0.5 * q + 0.5;
  if (cone.sheet_count() >= 2) {
    rep.layers = layer_subdivision(cone, options.layer_delta);
  } else {
    rep.layers.index_sets = {{0}};
    rep.layers.multiplicities = {{q}};
  }
  const auto ang = sheet_angle_matrix(cone);
  const int nsheets = cone.sheet_count();
  for (const auto& set : rep.layers.index_sets) {
    if (set.size() < 2) {
      rep.separation.push_back(options.delta_bar);
      continue;
    }
    double s = std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < set.size(); ++a)
      for (std::size_t b = a + 1; b < set.size(); ++b) s = std::min(s, sheet_separation(ang[set[a] * nsheets + set[b]]));
    rep.separation.push_back(s);
  }
  const int kbar = static_cast<int>(rep.separation.size()) - 1;

  // Per-sample distances, computed once.
  const std::size_t ns = t.size();
  std::vector<double> dist_c(ns), dist_v(ns);
  for (std::size_t i = 0; i < ns; ++i) {
    dist_c[i] = cone.distance2(t.measure.point(i));
    dist_v[i] = v.distance(t.measure.point(i));
  }

  const double h0 = half_side0(m);
  const double wm = unit_ball_volume(m);
  std::vector<int> gen_start;
  for (int l = 0; l <= options.max_generation; ++l) {
    gen_start.push_back(static_cast<int>(rep.cubes.size()));
    const int per_axis = 1 << l;
    const double side = 2.0 * h0 / per_axis;
    long total = 1;
    for (int a = 0; a < m - 1; ++a) total *= per_axis;
    for (long id = 0; id < total; ++id) {
      CubeRegion c;
      c.generation = l;
      c.side = side;
      c.cell.resize(m - 1);
      long rem = id;
      for (int a = 0; a < m - 1; ++a) {
        c.cell[a] = static_cast<int>(rem % per_axis);
        rem /= per_axis;
      }
      c.center = v.origin;
      for (int a = 0; a < m - 1; ++a) axpy(-h0 + (c.cell[a] + 0.5) * side, v.basis[a], c.center);
      if (l > 0) {
        long pid = 0, mul = 1;
        for (int a = 0; a < m - 1; ++a) {
          pid += (c.cell[a] / 2) * mul;
          mul *= per_axis / 2;
        }
        c.parent = gen_start[l - 1] + static_cast<int>(pid);
      }
      const double big = std::ldexp(1.0, 2 - l);
      const double hole = std::ldexp(1.0, -5 - l);
      c.meets_boundary = plane_meets_hollow_ball(gamma, v, c.center, big, hole);
      const double scale = std::ldexp(1.0, (m + 2) * l);
      for (std::size_t i = 0; i < ns; ++i) {
        if (dist2(t.measure.point(i), c.center) >= big * big) continue;
        c.mass += t.measure.weights[i];
        if (dist_v[i] < hole) continue;
        ++c.samples;
        c.excess += t.measure.weights[i] * dist_c[i];
      }
      c.excess *= scale;
      c.insufficient_samples = c.samples < options.min_samples;
      rep.cubes.push_back(std::move(c));
    }
  }

  // Classification in generation order so parents are final.
  std::vector<char> ancestors_clear(rep.cubes.size());
  std::vector<double> max_excess(rep.cubes.size());
  for (std::size_t k = 0; k < rep.cubes.size(); ++k) {
    CubeRegion& c = rep.cubes[k];
    const bool parent_clear = c.parent < 0 || ancestors_clear[c.parent];
    ancestors_clear[k] = parent_clear && !c.meets_boundary;
    max_excess[k] = std::max(c.excess, c.parent < 0 ? 0.0 : max_excess[c.parent]);
    const double threshold = rep.density_factor * wm * std::ldexp(1.0, m * (2 - c.generation));
    const bool density_ok = c.mass <= threshold;
    c.interior = ancestors_clear[k] && density_ok;
    const bool parent_interior = c.parent < 0 || rep.cubes[c.parent].interior;
    if (!c.interior) {
      c.kind = ((c.meets_boundary || !density_ok) && parent_interior) ? CubeKind::BoundaryStopping : CubeKind::Excluded;
      continue;
    }
    for (int k2 = 0; k2 <= kbar; ++k2) {
      const double s = rep.separation[k2];
      if (max_excess[k] <= options.tau * options.tau * s * s) {
        c.type = k2;
        break;
      }
    }
    if (c.type == 0) {
      c.kind = CubeKind::Outer;
    } else if (c.type > 0) {
      c.kind = CubeKind::Central;
    } else {
      const bool parent_typed = c.parent >= 0 && rep.cubes[c.parent].type >= 0 && rep.cubes[c.parent].interior;
      c.kind = parent_typed ? CubeKind::Inner : CubeKind::Interior;
    }
  }

  // Tiling of R down to the finest generation: exactly one region holds a
  // random probe.
  Rng rng(0x7111e);
  const double finest = std::ldexp(1.0, -options.max_generation - 1);
  const int d = cone.ambient_dim();
  for (std::size_t k = 0; k < options.tiling_probes; ++k) {
    Vec p(d, 0.0);
    for (int a = 0; a < m - 1; ++a) p[a] = rng.uniform(-h0, h0);
    const double rad = std::pow(2.0, -rng.uniform(0.0, options.max_generation + 1.0));
    Vec dir(d, 0.0);
    for (int a = m - 1; a < d; ++a) dir[a] = rng.normal();
    dir = normalized(dir);
    axpy(std::max(rad, finest), dir, p);
    int hits = 0;
    for (const auto& c : rep.cubes)
      if (region_contains(c, m, p)) ++hits;
    if (hits != 1) ++rep.tiling_failures;
  }
  rep.tiling_ok = rep.tiling_failures == 0;

  // Bounded overlap of the hollow balls B^h.
  for (std::size_t a = 0; a < rep.cubes.size(); ++a) {
    int count = 0;
    const double ra = std::ldexp(1.0, 2 - rep.cubes[a].generation), ha = std::ldexp(1.0, -5 - rep.cubes[a].generation);
    for (std::size_t b = 0; b < rep.cubes.size(); ++b) {
      if (a == b) continue;
      const double rb = std::ldexp(1.0, 2 - rep.cubes[b].generation);
      const double hb = std::ldexp(1.0, -5 - rep.cubes[b].generation);
      const double lens = lens_height(std::sqrt(dist2(rep.cubes[a].center, rep.cubes[b].center)), ra, rb);
      if (lens > std::max(ha, hb)) ++count;
    }
    rep.max_overlap = std::max(rep.max_overlap, count);
  }
  return rep;
}

// ------------------------------------------------------------- profiles

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int k = 0;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (!(x[i] > 0.0 && y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++k;
  }
  if (k < 2) return 0.0;
  const double den = k * sxx - sx * sx;
  return den > 0.0 ? (k * sxy - sx * sy) / den : 0.0;
}

Profile nonconcentration_profile(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r,
                                 const std::vector<double>& sigmas) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
  Profile p;
  p.x = sigmas;
  p.values.assign(sigmas.size(), 0.0);
  const double norm_r = std::pow(r, t.m + 2);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CSpan x = t.measure.point(i);
    if (dist2(x, center) >= r * r) continue;
    const double dv = cone.spine.distance(x);
    const double c = t.measure.weights[i] * cone.distance2(x);
    for (std::size_t k = 0; k < sigmas.size(); ++k)
      if (dv < sigmas[k] * r) p.values[k] += c;
  }
  for (auto& v : p.values) v /= norm_r;
  p.slope = loglog_slope(p.x, p.values);
  return p;
}

Profile remainder_profile(const DiscreteCurrent& t, CSpan center, const std::vector<double>& radii, double exclusion) {
  if (!t.has_tangents()) fail(ErrorCode::MissingTangents, "current carries no tangents");
  Profile p;
  p.x = radii;
  p.values.assign(radii.size(), 0.0);
  for (std::size_t i = 0; i < t.size(); ++i) {
    const Vec y = sub(t.measure.point(i), center);
    const double d = norm(y);
    if (d <= exclusion) continue;
    const double perp = norm2(normal_component(t.tangent(i), t.m, y));
    const double c = t.measure.weights[i] * perp / std::pow(d, t.m + 2);
    for (std::size_t k = 0; k < radii.size(); ++k)
      if (d < radii[k]) p.values[k] += c;
  }
  p.slope = loglog_slope(p.x, p.values);
  return p;
}

// ------------------------------------------------------------- decay loop

double DecayParameters::eps_at(int k) const {
  if (k >= 1 && static_cast<std::size_t>(k) <= eps.size()) return eps[k - 1];
  return 1e-3 * std::pow(4.0, -k);
}

std::vector<std::string> DecayParameters::ordering_issues(int q, int n_sheets) const {
  std::vector<std::string> out;
  for (int i = n_sheets + 1; i <= q; ++i)
    if (!(theta < eps_at(i)))
      out.push_back("theta = " + std::to_string(theta) + " is not below eps_" + std::to_string(i) + " = " +
                    std::to_string(eps_at(i)));
  for (int i = 1; i < q; ++i)
    if (!(eps_at(i + 1) <= eps_at(i)))
      out.push_back("eps schedule increases at index " + std::to_string(i + 1));
  return out;
}

DiscreteCurrent rescaled_current(const DiscreteCurrent& t, CSpan center, double r) {
  DiscreteCurrent out;
  out.m = t.m;
  out.n = t.n;
  out.q = t.q;
  out.generator = t.generator;
  out.seed = t.seed;
  out.measure.dim = t.ambient_dim();
  const double ws = std::pow(r, -t.m);
  Vec y(t.ambient_dim());
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CSpan x = t.measure.point(i);
    if (dist2(x, center) >= r * r) continue;
    for (std::size_t a = 0; a < y.size(); ++a) y[a] = (x[a] - center[a]) / r;
    if (t.has_tangents())
      out.add(y, t.measure.weights[i] * ws, t.tangent(i));
    else
      out.measure.add(y, t.measure.weights[i] * ws);
  }
  return out;
}

namespace {

OpenBook unit_frame(const OpenBook& book) {
  OpenBook b = book;
  b.spine.origin.assign(book.ambient_dim(), 0.0);
  return b;
}

double book_alpha(const OpenBook& b) { return b.sheet_count() < 2 ? 1.0 : book_angle(b); }

}  // namespace

std::vector<ExperimentRecord> decay_loop(const CurrentSource& source, const OpenBook& start, CSpan center, double r0,
                                         const DecayParameters& params) {
  start.validate();
  if (start.spine.distance(center) > 1e-9) fail(ErrorCode::InvalidArgument, "center must lie on the spine");
  if (!(r0 > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
  if (!(params.eta > 0.0 && params.eta <= 0.5)) fail(ErrorCode::InvalidArgument, "eta must lie in (0, 1/2]");
  if (params.candidates < 1 || params.max_steps < 0) fail(ErrorCode::InvalidArgument, "bad step or candidate count");
  const int q = start.total_multiplicity();

  auto sample = [&](double r) { return source(r); };
  auto evaluate = [&](const DiscreteCurrent& unit, const OpenBook& cone) {
    const OpenBook uc = unit_frame(cone);
    SampleOptions so;
    so.per_sheet_count = params.per_sheet;
    const DiscreteCurrent cs =
        sample_open_book(uc, 1.0, static_cast<int>(std::max<std::size_t>(100, unit.size())), params.seed, so);
    const Vec zero(cone.ambient_dim(), 0.0);
    return strong_excess_against(unit, cs, uc, zero, 1.0, BumpFunction{}, nullptr, {});
  };

  std::vector<ExperimentRecord> out;
  OpenBook cone = start;
  double r = r0;
  DiscreteCurrent unit = sample(r);
  StrongExcess ex = evaluate(unit, cone);
  const Vec zero(start.ambient_dim(), 0.0);
  for (int step = 0; step < params.max_steps; ++step) {
    const auto t0 = std::chrono::steady_clock::now();
    ExperimentRecord rec;
    rec.step = step;
    rec.radius = r;
    rec.cone = cone;
    rec.seed = params.seed;
    rec.strong = ex.value;
    rec.l2 = l2_excess(unit, unit_frame(cone), zero, 1.0);
    rec.alpha = book_alpha(cone);
    rec.amended = amended_excess(ex.value, params.kappa, params.a_gamma, params.a_sigma, r);
    rec.admissible = ex.value <= params.eps_at(cone.sheet_count()) * rec.alpha * rec.alpha;

    OpenBook next_cone = cone;
    double next_r = 0.5 * r;
    DiscreteCurrent next_unit;
    StrongExcess next_ex;
    bool chosen = false;
    if (rec.amended > ex.value) {
      rec.action = DecayAction::Halve;
    } else {
      rec.action = DecayAction::Refit;
      double best = std::numeric_limits<double>::infinity();
      bool contracted = false;
      for (int k = 0; k < params.candidates; ++k) {
        const double frac = params.candidates == 1 ? 0.0 : static_cast<double>(k) / (params.candidates - 1);
        const double rc = r * params.eta * std::pow(0.5 / params.eta, frac);
        rec.candidate_radii.push_back(rc);
        DiscreteCurrent cu = sample(rc);
        double score = std::numeric_limits<double>::infinity();
        try {
          FitOptions fo;
          fo.q = q;
          const FitResult fit = fit_open_book(cu, unit_frame(start).spine, zero, 1.0, fo);
          StrongExcess ce = evaluate(cu, fit.book);
          const double denom = std::min(book_alpha(fit.book) * book_alpha(fit.book), ex.value);
          score = denom > 0.0 ? ce.value / denom : (ce.value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
          if (ce.value <= params.theta * ex.value) contracted = true;
          if (score < best) {
            best = score;
            next_cone = fit.book;
            next_cone.spine = start.spine;
            next_r = rc;
            next_unit = std::move(cu);
            next_ex = std::move(ce);
            chosen = true;
          }
        } catch (const Error& e) {
          if (e.code() != ErrorCode::TooFewSamples && e.code() != ErrorCode::MultiplicityMismatch) throw;
        }
        rec.candidate_scores.push_back(score);
      }
      rec.stall = !contracted;
      if (!chosen) {
        rec.action = DecayAction::Halve;
        next_cone = cone;
        next_r = 0.5 * r;
      }
    }
    if (!chosen) {
      next_unit = sample(next_r);
      next_ex = evaluate(next_unit, next_cone);
    }
    rec.next_radius = next_r;
    rec.next_strong = next_ex.value;
    rec.ratio = ex.value > 0.0 ? next_ex.value / ex.value : (next_ex.value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0);
    rec.contraction = rec.ratio <= params.theta;
    const double g = book_distance(next_cone, cone);
    rec.drift = ex.value > 0.0 ? g * g / ex.value : 0.0;
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    out.push_back(std::move(rec));
    cone = std::move(next_cone);
    r = next_r;
    unit = std::move(next_unit);
    ex = std::move(next_ex);
  }
  return out;
}

// ------------------------------------------------------------- fixtures

GraphFixture harmonic_graph_fixture(int family, double amplitude) {
  GraphFixture f;
  std::vector<double> angles;
  std::vector<int> mult;
  // offsets along the in-plane direction perpendicular to each sheet
  using Poly = std::function<double(double t, double s)>;
  std::vector<std::vector<Poly>> data;
  const double e = amplitude;
  switch (family) {
    case 0:
      f.name = "tilt_quadratic";
      angles = {0.0, 2.2};
      mult = {1, 1};
      data = {{[e](double t, double s) { return e * t * s; }}, {[e](double t, double s) { return -e * t * s; }}};
      break;
    case 1:
      f.name = "quadratic_cubic";
      angles = {0.0, 2.0, 4.0};
      mult = {1, 1, 1};
      data = {{[e](double t, double s) { return e * t * s; }},
              {[e](double t, double s) { return e * (3.0 * s * s * t - t * t * t); }},
              {[e](double t, double s) { return -e * t * s; }}};
      break;
    case 2:
      f.name = "doubled_sheet";
      angles = {0.0, 2.5};
      mult = {2, 1};
      data = {{[e](double t, double s) { return e * t * s; }, [e](double t, double s) { return -e * t * s; }},
              {[e](double t, double s) { return e * (3.0 * s * s * t - t * t * t); }}};
      break;
    default:
      fail(ErrorCode::InvalidArgument, "unknown fixture family");
  }
  f.book = OpenBook::planar(2, 1, angles, mult);
  f.start = f.book;
  if (family == 0) f.start = OpenBook::planar(2, 1, {0.5 * e, 2.2 - 0.3 * e}, mult);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    const Vec perp = {0.0, -std::sin(angles[i]), std::cos(angles[i])};
    const std::vector<Poly> polys = data[i];
    f.sheets.push_back([perp, polys](CSpan y, MSpan out) {
      for (std::size_t k = 0; k < polys.size(); ++k) {
        const double v = polys[k](y[0], y[1]);
        for (int a = 0; a < 3; ++a) out[k * 3 + a] = v * perp[a];
      }
    });
  }
  return f;
}

CurrentSource graph_source(const GraphFixture& fixture, int per_sheet, std::uint64_t seed) {
  return [book = fixture.book, sheets = fixture.sheets, per_sheet, seed](double radius) {
    // g_r(y) = g(r y) / r
    std::vector<SheetFunction> scaled_sheets;
    for (const auto& g : sheets)
      scaled_sheets.push_back([g, radius](CSpan y, MSpan out) {
        Vec ys(y.begin(), y.end());
        for (auto& v : ys) v *= radius;
        g(ys, out);
        for (auto& v : out) v /= radius;
      });
    SampleOptions so;
    so.per_sheet_count = per_sheet;
    DiscreteCurrent t = sample_graph_over_book(book, scaled_sheets, 1.0, per_sheet * book.sheet_count(), seed, so);
    return t;
  };
}

CurrentSource rescaling_source(const DiscreteCurrent& t, CSpan center) {
  return [t, c = Vec(center.begin(), center.end())](double radius) { return rescaled_current(t, c, radius); };
}

DiscreteCurrent handle_fixture(const OpenBook& book, double handle_mass, int count, std::uint64_t seed) {
  if (book.sheet_count() < 2) fail(ErrorCode::InvalidArgument, "handle fixture needs two sheets");
  if (!(handle_mass > 0.0)) fail(ErrorCode::InvalidArgument, "handle mass must be positive");
  DiscreteCurrent t = sample_open_book(book, 1.0, count, seed);
  t.generator = "handle_fixture";
  const int m = book.m(), d = book.ambient_dim();
  const Vec& a = book.sheets[0].normal;
  const Vec& b = book.sheets[1].normal;
  const double omega = angle_between(a, b);
  const Vec ortho = normalized(sub(b, scaled(a, dot(a, b))));
  Rng rng(mix_seed(seed, 0xba5e));
  constexpr int kStrip = 40;
  Vec tangent(static_cast<std::size_t>(m) * d);
  for (int k = 0; k < kStrip; ++k) {
    const double phi = omega * rng.uniform(0.1, 0.9);
    Vec dir = add(scaled(a, std::cos(phi)), scaled(ortho, std::sin(phi)));
    const Vec along = add(scaled(a, -std::sin(phi)), scaled(ortho, std::cos(phi)));
    Vec x = scaled(dir, 0.5);
    axpy(1.0, book.spine.origin, x);
    for (int s = 0; s < m - 1; ++s) axpy(rng.uniform(-0.3, 0.3), book.spine.basis[s], x);
    std::copy(along.begin(), along.end(), tangent.begin());
    for (int s = 0; s < m - 1; ++s) std::copy(book.spine.basis[s].begin(), book.spine.basis[s].end(), tangent.begin() + (s + 1) * d);
    t.add(x, handle_mass / kStrip, tangent);
  }
  return t;
}

// ------------------------------------------------------------- decomposition

DecompositionResult decomposition_check(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r,
                                        const DecompositionOptions& options) {
  cone.validate();
  if (!t.has_tangents()) fail(ErrorCode::MissingTangents, "current carries no tangents");
  const int nsheets = cone.sheet_count();
  const double opening = std::min(options.wedge_fraction * book_alpha(cone), 1.5);
  std::vector<Wedge> wedges;
  for (const auto& s : cone.sheets) wedges.push_back({cone.spine, s.normal, opening});

  DecompositionResult res;
  res.pieces.resize(nsheets);
  for (int k = 0; k < nsheets; ++k) {
    res.pieces[k].sheet = k;
    res.pieces[k].expected = cone.sheets[k].multiplicity;
    res.pieces[k].current.m = t.m;
    res.pieces[k].current.n = t.n;
    res.pieces[k].current.q = cone.sheets[k].multiplicity;
    res.pieces[k].current.measure.dim = t.ambient_dim();
    res.pieces[k].current.generator = "sheet_piece";
  }
  res.min_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CSpan x = t.measure.point(i);
    if (dist2(x, center) >= r * r) continue;
    const int k = cone.nearest_sheet(x);
    const double dv = cone.spine.distance(x);
    if (dv <= r / 8.0) {
      ++res.near_spine;
      res.pieces[k].current.add(x, t.measure.weights[i], t.tangent(i));
      continue;
    }
    const double margin = -wedge_defect(wedges[k], x) / dv;
    res.min_margin = std::min(res.min_margin, margin);
    if (margin <= 0.0) {
      res.bridges.push_back(i);
      continue;
    }
    res.pieces[k].current.add(x, t.measure.weights[i], t.tangent(i));
  }
  if (!std::isfinite(res.min_margin)) res.min_margin = 0.0;

  bool mult_ok = true;
  const Vec pc = circular_projection(cone.spine, center);
  for (auto& piece : res.pieces) {
    const DiscreteCurrent pf = pushforward_circular(piece.current, cone.spine);
    double mass = 0.0;
    for (std::size_t i = 0; i < pf.size(); ++i) {
      const CSpan y = pf.measure.point(i);
      if (y[y.size() - 1] > r / 8.0 && dist2(y, pc) < r * r) mass += pf.measure.weights[i];
    }
    const double area = sector_area(cone.spine, cone.sheets[piece.sheet].normal, center, r);
    piece.multiplicity = area > 0.0 ? mass / area : 0.0;
    if (std::abs(piece.multiplicity - piece.expected) > options.multiplicity_tolerance) mult_ok = false;
  }
  res.pass = res.bridges.empty() && res.min_margin > 0.0 && mult_ok;
  return res;
}

// ------------------------------------------------------------- normal map

HolderTable normal_map_holder(const DiscreteCurrent& t, const Spine& spine, const std::vector<Vec>& points,
                              const std::vector<double>& radii, int q, double alpha) {
  if (points.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two spine points");
  if (radii.empty()) fail(ErrorCode::InvalidArgument, "need at least one radius");
  std::vector<double> sorted = radii;
  std::sort(sorted.begin(), sorted.end());
  HolderTable tab;
  tab.alpha = alpha;
  for (const auto& p : points) {
    if (spine.distance(p) > 1e-9) fail(ErrorCode::InvalidArgument, "normal map points must lie on the spine");
    bool done = false;
    for (double r : sorted) {
      try {
        FitOptions fo;
        fo.q = q;
        FitResult fit = fit_open_book(t, spine, p, r, fo);
        tab.normals.push_back(std::move(fit.book));
        tab.fit_radius.push_back(r);
        done = true;
        break;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::TooFewSamples && e.code() != ErrorCode::MultiplicityMismatch) throw;
      }
    }
    if (!done) fail(ErrorCode::TooFewSamples, "no radius gave a fit at a spine point");
  }
  for (std::size_t i = 0; i < points.size(); ++i)
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      HolderEntry e;
      e.i = static_cast<int>(i);
      e.j = static_cast<int>(j);
      e.distance = book_distance(tab.normals[i], tab.normals[j]);
      e.separation = std::sqrt(dist2(points[i], points[j]));
      e.ratio = e.separation > 0.0 ? e.distance * e.distance / std::pow(e.separation, alpha) : 0.0;
      tab.max_ratio = std::max(tab.max_ratio, e.ratio);
      tab.entries.push_back(e);
    }
  return tab;
}

}  // namespace obl
