#include "openbook/measures.hpp"

#include <algorithm>
#include <array>
#include <limits>
#include <numeric>

namespace obl {

void DiscreteMeasure::add(CSpan p, double w) {
  points.insert(points.end(), p.begin(), p.end());
  weights.push_back(w);
}

double DiscreteMeasure::total_mass() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

void DiscreteMeasure::validate() const {
  if (points.size() != weights.size() * static_cast<std::size_t>(dim))
    fail(ErrorCode::InvalidArgument, "measure point buffer has wrong size");
  for (double w : weights)
    if (!(w > 0.0) || !std::isfinite(w)) fail(ErrorCode::InvalidArgument, "measure weights must be positive and finite");
}

void DiscreteCurrent::add(CSpan p, double w, CSpan tangent) {
  measure.add(p, w);
  tangents.insert(tangents.end(), tangent.begin(), tangent.end());
}

void DiscreteCurrent::validate() const {
  measure.validate();
  if (measure.dim != ambient_dim()) fail(ErrorCode::InvalidArgument, "current dimension mismatch");
  if (!has_tangents()) return;
  const int d = ambient_dim();
  if (tangents.size() != size() * static_cast<std::size_t>(m) * d)
    fail(ErrorCode::InvalidArgument, "tangent buffer has wrong size");
  for (std::size_t k = 0; k < size(); ++k) {
    const CSpan t = tangent(k);
    for (int i = 0; i < m; ++i)
      for (int j = i; j < m; ++j) {
        const double g = dot(t.subspan(static_cast<std::size_t>(i) * d, d), t.subspan(static_cast<std::size_t>(j) * d, d));
        if (std::abs(g - (i == j ? 1.0 : 0.0)) > 1e-10)
          fail(ErrorCode::InvalidArgument, "tangent frames must be orthonormal");
      }
  }
}

DiscreteCurrent DiscreteCurrent::restricted(CSpan center, double radius) const {
  DiscreteCurrent out;
  out.m = m;
  out.n = n;
  out.q = q;
  out.generator = generator;
  out.seed = seed;
  out.measure.dim = measure.dim;
  const double r2 = radius * radius;
  for (std::size_t i = 0; i < size(); ++i) {
    if (dist2(measure.point(i), center) >= r2) continue;
    out.measure.add(measure.point(i), measure.weights[i]);
    if (has_tangents()) {
      const CSpan t = tangent(i);
      out.tangents.insert(out.tangents.end(), t.begin(), t.end());
    }
  }
  return out;
}

Vec orthonormal_rows(CSpan rows, int m, int d) {
  Vec out(rows.begin(), rows.end());
  for (int i = 0; i < m; ++i) {
    MSpan ri(out.data() + static_cast<std::size_t>(i) * d, static_cast<std::size_t>(d));
    for (int j = 0; j < i; ++j) {
      CSpan rj(out.data() + static_cast<std::size_t>(j) * d, static_cast<std::size_t>(d));
      axpy(-dot(ri, rj), rj, ri);
    }
    const double nn = norm(ri);
    if (nn == 0.0) fail(ErrorCode::InvalidArgument, "degenerate tangent frame");
    for (auto& x : ri) x /= nn;
  }
  return out;
}

double mvector_inner(CSpan a, CSpan b, int m) {
  const int d = static_cast<int>(a.size()) / m;
  std::vector<double> g(static_cast<std::size_t>(m) * m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      g[i * m + j] = dot(a.subspan(static_cast<std::size_t>(i) * d, d), b.subspan(static_cast<std::size_t>(j) * d, d));
  return small_det(std::move(g), m);
}

Vec normal_component(CSpan tangent, int m, CSpan v) {
  const std::size_t d = v.size();
  Vec out(v.begin(), v.end());
  for (int i = 0; i < m; ++i) {
    const CSpan t = tangent.subspan(static_cast<std::size_t>(i) * d, d);
    axpy(-dot(v, t), t, out);
  }
  return out;
}

// ------------------------------------------------------------- sampling

namespace {

struct Layout {
  int m = 2;
  int radial = 1;   // strata in (|x|/r)^m
  int angular = 1;  // angular cells per stratum
  int jz = 1, jphi = 1;
  double cell_angle_measure = 0.0;
};

Layout make_layout(int m, int per_sheet) {
  Layout l;
  l.m = m;
  const double c = std::max(1, per_sheet);
  if (m == 2) {
    l.angular = std::max(1, static_cast<int>(std::lround(std::sqrt(c))));
    l.cell_angle_measure = std::numbers::pi / l.angular;
  } else if (m == 3) {
    l.jz = std::max(1, static_cast<int>(std::lround(std::sqrt(std::cbrt(c * c) / 4.0))));
    l.jphi = 4 * l.jz;
    l.angular = l.jz * l.jphi;
    l.cell_angle_measure = 2.0 * std::numbers::pi / l.angular;
  } else {
    l.angular = 1;
    // half of |S^{m-1}|
    l.cell_angle_measure = 0.5 * m * unit_ball_volume(m);
  }
  l.radial = std::max(1, static_cast<int>(std::ceil(c / l.angular)));
  return l;
}

// Unit direction in sheet coordinates (t, s_1, ..., s_{m-1}), t >= 0, from
// angular cell a and in-cell offsets.
void cell_direction(const Layout& l, int a, CSpan off, MSpan out) {
  if (l.m == 2) {
    const double th = (a + off[0]) * std::numbers::pi / l.angular;
    out[0] = std::sin(th);
    out[1] = std::cos(th);
  } else if (l.m == 3) {
    const int iz = a / l.jphi, ip = a % l.jphi;
    const double z = (iz + off[0]) / l.jz;
    const double ph = (ip + off[1]) * 2.0 * std::numbers::pi / l.jphi;
    const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
    out[0] = z;
    out[1] = s * std::cos(ph);
    out[2] = s * std::sin(ph);
  } else {
    // off holds a gaussian direction, folded into t >= 0
    double nn = 0.0;
    for (int i = 0; i < l.m; ++i) nn += off[i] * off[i];
    nn = std::sqrt(nn);
    for (int i = 0; i < l.m; ++i) out[i] = off[i] / nn;
    out[0] = std::abs(out[0]);
  }
}

struct Jitter {
  std::vector<double> radial;   // radial position in [0,1) per (k, a)
  std::vector<double> angular;  // per (k, a), l.m values
};

Jitter make_jitter(const Layout& l, std::uint64_t seed, bool jitter) {
  Jitter j;
  const std::size_t cells = static_cast<std::size_t>(l.radial) * l.angular;
  j.radial.resize(cells);
  j.angular.resize(cells * l.m);
  Rng rng(seed);
  std::vector<int> perm(static_cast<std::size_t>(l.angular));
  for (int k = 0; k < l.radial; ++k) {
    std::iota(perm.begin(), perm.end(), 0);
    if (jitter)
      for (int i = l.angular - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    for (int a = 0; a < l.angular; ++a) {
      const std::size_t c = static_cast<std::size_t>(k) * l.angular + a;
      const double sub = (perm[a] + (jitter ? rng.uniform() : 0.5)) / l.angular;
      j.radial[c] = (k + sub) / l.radial;
      for (int i = 0; i < l.m; ++i) {
        if (l.m <= 3)
          j.angular[c * l.m + i] = jitter ? rng.uniform() : 0.5;
        else
          j.angular[c * l.m + i] = rng.normal();
      }
    }
  }
  return j;
}

class SheetMap {
 public:
  SheetMap(const OpenBook& book, int sheet, const SheetFunction* g)
      : book_(book), nu_(book.sheets[sheet].normal), g_(g), q_(book.sheets[sheet].multiplicity) {
    d_ = book.ambient_dim();
    m_ = book.m();
    buf_.resize(static_cast<std::size_t>(q_) * d_);
  }

  int atoms() const { return q_; }
  int dim() const { return d_; }
  bool flat() const { return g_ == nullptr || !*g_; }

  // Base point of the sheet at coordinates y.
  void base(CSpan y, MSpan out) const {
    for (int i = 0; i < d_; ++i) out[i] = book_.spine.origin[i] + y[0] * nu_[i];
    for (int s = 0; s + 1 < m_; ++s) axpy(y[s + 1], book_.spine.basis[s], out);
  }

  // Lifted atom values at y, projected onto the orthogonal complement of the sheet.
  const std::vector<double>& lift(CSpan y) {
    std::fill(buf_.begin(), buf_.end(), 0.0);
    if (flat()) return buf_;
    (*g_)(y, buf_);
    for (int j = 0; j < q_; ++j) {
      MSpan a(buf_.data() + static_cast<std::size_t>(j) * d_, static_cast<std::size_t>(d_));
      axpy(-dot(a, nu_), nu_, a);
      for (const auto& b : book_.spine.basis) axpy(-dot(a, b), b, a);
    }
    return buf_;
  }

  void point(CSpan y, int atom, MSpan out) {
    base(y, out);
    const auto& l = lift(y);
    for (int i = 0; i < d_; ++i) out[i] += l[static_cast<std::size_t>(atom) * d_ + i];
  }

  double lift_norm2(CSpan y, int atom) {
    const auto& l = lift(y);
    return norm2(CSpan(l.data() + static_cast<std::size_t>(atom) * d_, static_cast<std::size_t>(d_)));
  }

  // Derivatives of the lift along (t, s_1, ...) as rows of a m x d buffer.
  // The base part of the Jacobian is the orthonormal sheet frame and is
  // handled exactly; differencing only the lift keeps roundoff at the
  // scale of the graph rather than of the point.
  void lift_jacobian(CSpan y, int atom, double step, MSpan rows) {
    Vec yp(y.begin(), y.end()), ym(y.begin(), y.end());
    const std::size_t off = static_cast<std::size_t>(atom) * d_;
    for (int c = 0; c < m_; ++c) {
      yp[c] = y[c] + step;
      ym[c] = y[c] - step;
      const auto& lp = lift(yp);
      const Vec fp(lp.begin() + static_cast<std::ptrdiff_t>(off), lp.begin() + static_cast<std::ptrdiff_t>(off + d_));
      const auto& fm = lift(ym);
      for (int i = 0; i < d_; ++i) rows[static_cast<std::size_t>(c) * d_ + i] = (fp[i] - fm[off + i]) / (2.0 * step);
      yp[c] = y[c];
      ym[c] = y[c];
    }
  }

  // Full Jacobian rows: sheet frame plus lift derivatives.
  void jacobian(CSpan y, int atom, double step, MSpan rows) {
    lift_jacobian(y, atom, step, rows);
    for (int i = 0; i < d_; ++i) rows[i] += nu_[i];
    for (int c = 1; c < m_; ++c)
      for (int i = 0; i < d_; ++i) rows[static_cast<std::size_t>(c) * d_ + i] += book_.spine.basis[c - 1][i];
  }

  // sqrt det(I + DL^T DL); the lift is orthogonal to the sheet, so the
  // cross terms with the base frame vanish.
  double area_factor(CSpan y, int atom, double step) {
    if (flat()) return 1.0;
    std::vector<double> rows(static_cast<std::size_t>(m_) * d_);
    lift_jacobian(y, atom, step, rows);
    std::vector<double> g(static_cast<std::size_t>(m_) * m_);
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        g[i * m_ + j] = (i == j ? 1.0 : 0.0) +
                        dot(CSpan(rows.data() + static_cast<std::size_t>(i) * d_, static_cast<std::size_t>(d_)),
                            CSpan(rows.data() + static_cast<std::size_t>(j) * d_, static_cast<std::size_t>(d_)));
    return std::sqrt(std::max(0.0, small_det(std::move(g), m_)));
  }

  // Base radius rho along direction w whose lifted point has ambient radius target.
  double solve_radius(CSpan w, int atom, double target) {
    if (flat() || target == 0.0) return target;
    Vec y(static_cast<std::size_t>(m_));
    auto ambient = [&](double rho) {
      for (int i = 0; i < m_; ++i) y[i] = rho * w[i];
      return std::sqrt(rho * rho + lift_norm2(y, atom)) - target;
    };
    if (ambient(target) <= 0.0) return target;
    double lo = 0.0, hi = target;
    double flo = -target, fhi = ambient(hi);
    int side = 0;
    for (int it = 0; it < 100; ++it) {
      double x = (lo * fhi - hi * flo) / (fhi - flo);
      if (!(x > lo && x < hi)) x = 0.5 * (lo + hi);
      const double fx = ambient(x);
      if (fx == 0.0) return x;
      if (fx < 0.0) {
        lo = x;
        flo = fx;
        if (side == -1) fhi *= 0.5;
        side = -1;
      } else {
        hi = x;
        fhi = fx;
        if (side == 1) flo *= 0.5;
        side = 1;
      }
      if (hi - lo <= 1e-15 * target) break;
    }
    return 0.5 * (lo + hi);
  }

 private:
  const OpenBook& book_;
  const Vec& nu_;
  const SheetFunction* g_;
  int q_;
  int d_ = 0, m_ = 0;
  std::vector<double> buf_;
};

constexpr std::array<double, 2> kGauss2x{-0.5773502691896257645, 0.5773502691896257645};
constexpr std::array<double, 3> kGauss3x{-0.7745966692414833770, 0.0, 0.7745966692414833770};
constexpr std::array<double, 3> kGauss3w{5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

}  // namespace

int radial_strata(int m, int per_sheet) { return make_layout(m, per_sheet).radial; }

DiscreteCurrent sample_graph_over_book(const OpenBook& book, const std::vector<SheetFunction>& g, double radius,
                                       int target_count, std::uint64_t seed, const SampleOptions& options) {
  book.validate();
  if (!(radius > 0.0)) fail(ErrorCode::InvalidArgument, "sampling radius must be positive");
  if (target_count < 100 && options.per_sheet_count <= 0) fail(ErrorCode::InvalidArgument, "target_count must be at least 100");
  if (!g.empty() && static_cast<int>(g.size()) != book.sheet_count())
    fail(ErrorCode::InvalidArgument, "one sheet function per sheet");
  const int m = book.m();
  const int d = book.ambient_dim();
  const int nsheets = book.sheet_count();
  const int per_sheet = options.per_sheet_count > 0 ? options.per_sheet_count
                                                    : (target_count + nsheets - 1) / nsheets;
  const Layout lay = make_layout(m, per_sheet);
  const Jitter jit = make_jitter(lay, seed, options.jitter);

  DiscreteCurrent out;
  out.m = m;
  out.n = d - m;
  out.q = book.total_multiplicity();
  out.seed = seed;
  out.generator = g.empty() ? "open_book" : "graph_over_book";
  out.measure.dim = d;

  const double fd_step = 1e-6 * radius;
  const double shell = 1.0 / lay.radial;
  Vec w(static_cast<std::size_t>(m)), y(static_cast<std::size_t>(m)), pos(static_cast<std::size_t>(d));
  std::vector<double> rows(static_cast<std::size_t>(m) * d);

  for (int si = 0; si < nsheets; ++si) {
    const SheetFunction* fn = g.empty() ? nullptr : &g[static_cast<std::size_t>(si)];
    SheetMap map(book, si, fn);
    const int q = map.atoms();
    if (!map.flat()) {
      // spine check
      for (int k = -4; k <= 4; ++k) {
        std::fill(y.begin(), y.end(), 0.0);
        if (m > 1) y[1] = radius * k / 4.0;
        const auto& l = map.lift(y);
        if (std::sqrt(norm2(l)) > 1e-9 * radius)
          fail(ErrorCode::NonVanishingOnSpine, "sheet function does not vanish on the spine");
      }
    }
    const Vec flat_tangent = sheet_tangent(book, si);

    for (int k = 0; k < lay.radial; ++k) {
      const double r_lo = radius * std::pow(k * shell, 1.0 / m);
      const double r_hi = radius * std::pow((k + 1) * shell, 1.0 / m);
      for (int a = 0; a < lay.angular; ++a) {
        const std::size_t c = static_cast<std::size_t>(k) * lay.angular + a;
        const CSpan off(jit.angular.data() + c * m, static_cast<std::size_t>(m));
        cell_direction(lay, a, off, w);
        const double target = radius * std::pow(jit.radial[c], 1.0 / m);

        if (map.flat()) {
          for (int i = 0; i < m; ++i) y[i] = target * w[i];
          map.base(y, pos);
          const double mass = q * lay.cell_angle_measure * (std::pow(r_hi, m) - std::pow(r_lo, m)) / m;
          out.add(pos, mass, flat_tangent);
          continue;
        }

        // Lifted atoms of this cell; coincident atoms are merged.
        std::vector<Vec> placed;
        std::vector<std::size_t> placed_index;
        for (int j = 0; j < q; ++j) {
          const double rho = map.solve_radius(w, j, target);
          for (int i = 0; i < m; ++i) y[i] = rho * w[i];
          map.point(y, j, pos);

          // cell mass by tensor Gauss quadrature over the angular cell and
          // the base-radius interval mapped from the ambient shell
          double mass = 0.0;
          std::array<double, 3> qoff{};
          Vec wq(static_cast<std::size_t>(m)), yq(static_cast<std::size_t>(m));
          auto radial_integral = [&](CSpan dir) {
            const double lo = map.solve_radius(dir, j, r_lo);
            const double hi = map.solve_radius(dir, j, r_hi);
            double acc = 0.0;
            for (int gq = 0; gq < 3; ++gq) {
              const double rho_q = 0.5 * (lo + hi) + 0.5 * (hi - lo) * kGauss3x[gq];
              for (int i = 0; i < m; ++i) yq[i] = rho_q * dir[i];
              acc += kGauss3w[gq] * map.area_factor(yq, j, fd_step) * std::pow(rho_q, m - 1);
            }
            return 0.5 * (hi - lo) * acc;
          };
          if (m == 2) {
            for (double gx : kGauss2x) {
              qoff[0] = 0.5 + 0.5 * gx;
              cell_direction(lay, a, qoff, wq);
              mass += 0.5 * radial_integral(wq);
            }
            mass *= lay.cell_angle_measure;
          } else if (m == 3) {
            for (double gz : kGauss2x)
              for (double gp : kGauss2x) {
                qoff[0] = 0.5 + 0.5 * gz;
                qoff[1] = 0.5 + 0.5 * gp;
                cell_direction(lay, a, qoff, wq);
                mass += 0.25 * radial_integral(wq);
              }
            mass *= lay.cell_angle_measure;
          } else {
            mass = lay.cell_angle_measure * radial_integral(w);
          }

          bool merged = false;
          for (std::size_t pi = 0; pi < placed.size(); ++pi)
            if (placed[pi] == pos) {
              out.measure.weights[placed_index[pi]] += mass;
              merged = true;
              break;
            }
          if (merged) continue;
          map.jacobian(y, j, fd_step, rows);
          const Vec frame = orthonormal_rows(rows, m, d);
          placed.push_back(pos);
          placed_index.push_back(out.size());
          out.add(pos, mass, frame);
        }
      }
    }
  }
  return out;
}

DiscreteCurrent sample_open_book(const OpenBook& book, double radius, int target_count, std::uint64_t seed,
                                 const SampleOptions& options) {
  return sample_graph_over_book(book, {}, radius, target_count, seed, options);
}

// ------------------------------------------------------------- densities

DensityValue density(const DiscreteCurrent& t, CSpan p, double r, const DensityOptions& options) {
  if (!(r > 0.0)) fail(ErrorCode::InvalidArgument, "radius must be positive");
  DensityValue v;
  const double r2 = r * r;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (dist2(t.measure.point(i), p) < r2) {
      v.mass += t.measure.weights[i];
      ++v.samples;
    }
  if (v.samples == 0) fail(ErrorCode::EmptyBall, "no samples inside the ball");
  v.low_sample_warning = v.samples < static_cast<std::size_t>(options.min_samples);
  const double factor = options.flavor == DensityFlavor::Interior
                            ? std::exp(options.c0 * options.a_sigma * options.a_sigma * r * r)
                            : std::exp(options.c0 * (options.a_sigma + options.a_gamma) * r);
  v.value = factor * v.mass / (unit_ball_volume(t.m) * std::pow(r, t.m));
  return v;
}

double DensityProfile::mean() const {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

DensityProfile density_profile(const DiscreteCurrent& t, CSpan p, const std::vector<double>& radii,
                               const DensityOptions& options) {
  for (std::size_t i = 1; i < radii.size(); ++i)
    if (!(radii[i] > radii[i - 1])) fail(ErrorCode::InvalidArgument, "radii must be strictly increasing");
  DensityProfile prof;
  prof.center.assign(p.begin(), p.end());
  prof.radii = radii;
  prof.flavor = options.flavor;
  for (double r : radii) {
    const DensityValue v = density(t, p, r, options);
    prof.values.push_back(v.value);
    prof.samples.push_back(v.samples);
    prof.low_sample_warning = prof.low_sample_warning || v.low_sample_warning;
  }
  for (std::size_t i = 0; i + 1 < prof.values.size(); ++i)
    prof.monotonicity_defect = std::max(prof.monotonicity_defect, prof.values[i] - prof.values[i + 1]);
  return prof;
}

MonotonicityTerms monotonicity_remainder(const DiscreteCurrent& t, CSpan p, double s, double r) {
  if (!t.has_tangents()) fail(ErrorCode::MissingTangents, "current carries no tangents");
  if (!(s > 0.0 && s < r)) fail(ErrorCode::InvalidArgument, "need 0 < s < r");
  const int m = t.m;
  const double rm = std::pow(r, m), sm = std::pow(s, m);
  double lhs = 0.0, rhs = 0.0, wmax = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CSpan x = t.measure.point(i);
    const double w = t.measure.weights[i];
    const Vec v = sub(x, p);
    const double d = norm(v);
    if (d >= r) continue;
    wmax = std::max(wmax, w);
    lhs += w / rm;
    if (d < s) {
      lhs -= w / sm;
      continue;
    }
    const Vec perp = normal_component(t.tangent(i), m, v);
    rhs += w * norm2(perp) / std::pow(d, m + 2);
  }
  const double om = unit_ball_volume(m);
  return {lhs / om, rhs / om, wmax * (1.0 / rm + 1.0 / sm) / om};
}

DiscreteCurrent pushforward_circular(const DiscreteCurrent& t, const Spine& spine, double spine_tol) {
  if (!t.has_tangents()) fail(ErrorCode::MissingTangents, "current carries no tangents");
  const int m = t.m;
  DiscreteCurrent out;
  out.m = m;
  out.n = 0;
  out.q = t.q;
  out.generator = "circular_pushforward(" + t.generator + ")";
  out.seed = t.seed;
  out.measure.dim = m;
  Vec up(static_cast<std::size_t>(m) * m, 0.0), down(static_cast<std::size_t>(m) * m, 0.0);
  // oriented as (radial, spine coordinates)
  up[m - 1] = 1.0;
  down[m - 1] = -1.0;
  for (int i = 1; i < m; ++i) {
    up[static_cast<std::size_t>(i) * m + (i - 1)] = 1.0;
    down[static_cast<std::size_t>(i) * m + (i - 1)] = 1.0;
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CSpan x = t.measure.point(i);
    if (spine.distance(x) <= spine_tol) continue;
    const double pair = calibration_pairing(spine, t.tangent(i), x, spine_tol);
    if (pair == 0.0) continue;
    out.add(circular_projection(spine, x), t.measure.weights[i] * std::abs(pair), pair > 0.0 ? up : down);
  }
  return out;
}

CalibrationDefect calibration_defect(const DiscreteCurrent& t, const Spine& spine, int q, double radius) {
  if (!t.has_tangents()) fail(ErrorCode::MissingTangents, "current carries no tangents");
  CalibrationDefect res;
  const double excl = 1e-6 * radius;
  const double r2 = radius * radius;
  double ball_mass = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const CSpan x = t.measure.point(i);
    if (dist2(x, spine.origin) >= r2) continue;
    const double w = t.measure.weights[i];
    ball_mass += w;
    if (spine.distance(x) <= excl) {
      ++res.excluded;
      continue;
    }
    const double pair = calibration_pairing(spine, t.tangent(i), x, excl);
    res.mass += w;
    res.paired_mass += w * pair;
    res.defect += w * (1.0 - pair);
  }
  const double norm_vol = unit_ball_volume(t.m) * std::pow(radius, t.m);
  res.density_gap = ball_mass / norm_vol - 0.5 * q - res.defect / norm_vol;
  return res;
}

}  // namespace obl
