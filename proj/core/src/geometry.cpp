#include "openbook/geometry.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "openbook/qvalued.hpp"

namespace obl {

Spine Spine::standard(int m, int n) {
  if (m < 2 || n < 0) fail(ErrorCode::InvalidArgument, "spine needs m >= 2 and n >= 0");
  Spine s;
  s.ambient_dim = m + n;
  s.origin.assign(static_cast<std::size_t>(m + n), 0.0);
  for (int i = 0; i < m - 1; ++i) s.basis.push_back(unit_vector(m + n, i));
  return s;
}

void Spine::validate() const {
  if (spine_dim() < 1) fail(ErrorCode::InvalidArgument, "spine dimension must be at least 1");
  if (static_cast<int>(origin.size()) != ambient_dim) fail(ErrorCode::InvalidArgument, "spine origin has wrong dimension");
  if (spine_dim() >= ambient_dim) fail(ErrorCode::InvalidArgument, "spine must have positive codimension");
  for (int i = 0; i < spine_dim(); ++i) {
    if (static_cast<int>(basis[i].size()) != ambient_dim) fail(ErrorCode::InvalidArgument, "spine basis vector has wrong dimension");
    for (int j = i; j < spine_dim(); ++j) {
      const double g = dot(basis[i], basis[j]);
      if (std::abs(g - (i == j ? 1.0 : 0.0)) > kGeomTol) fail(ErrorCode::InvalidArgument, "spine basis is not orthonormal");
    }
  }
}

Vec Spine::coords(CSpan p) const {
  const Vec d = sub(p, origin);
  Vec c(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) c[i] = dot(d, basis[i]);
  return c;
}

Vec Spine::project(CSpan p) const {
  const Vec c = coords(p);
  Vec out = origin;
  for (std::size_t i = 0; i < basis.size(); ++i) axpy(c[i], basis[i], out);
  return out;
}

Vec Spine::normal_part(CSpan p) const {
  Vec d = sub(p, origin);
  for (const auto& b : basis) axpy(-dot(d, b), b, d);
  return d;
}

Vec Spine::perp_direction(CSpan v) const {
  Vec d(v.begin(), v.end());
  for (const auto& b : basis) axpy(-dot(d, b), b, d);
  return d;
}

bool Spine::same_as(const Spine& other, double tol) const {
  if (ambient_dim != other.ambient_dim || spine_dim() != other.spine_dim()) return false;
  if (distance(other.origin) > tol) return false;
  for (const auto& b : other.basis)
    if (norm(perp_direction(b)) > tol) return false;
  return true;
}

void HalfPlane::validate() const {
  spine.validate();
  if (static_cast<int>(normal.size()) != spine.ambient_dim) fail(ErrorCode::InvalidArgument, "normal has wrong dimension");
  if (std::abs(norm(normal) - 1.0) > kGeomTol) fail(ErrorCode::InvalidArgument, "sheet normal must be a unit vector");
  for (const auto& b : spine.basis)
    if (std::abs(dot(normal, b)) > kGeomTol) fail(ErrorCode::InvalidArgument, "sheet normal must be orthogonal to the spine");
}

double HalfPlane::distance2(CSpan p) const {
  const Vec w = spine.normal_part(p);
  const double t = dot(w, normal);
  const double w2 = norm2(w);
  if (t <= 0.0) return w2;
  return std::max(0.0, w2 - t * t);
}

bool HalfPlane::contains(CSpan p, double tol) const { return distance2(p) <= tol * tol; }

int OpenBook::total_multiplicity() const {
  int q = 0;
  for (const auto& s : sheets) q += s.multiplicity;
  return q;
}

HalfPlane OpenBook::half_plane(int i) const { return HalfPlane{spine, sheets[static_cast<std::size_t>(i)].normal}; }

void OpenBook::validate() const {
  spine.validate();
  if (sheets.empty()) fail(ErrorCode::InvalidArgument, "open book needs at least one sheet");
  for (int i = 0; i < sheet_count(); ++i) {
    half_plane(i).validate();
    if (sheets[i].multiplicity <= 0) fail(ErrorCode::InvalidArgument, "multiplicities must be positive");
    for (int j = 0; j < i; ++j)
      if (angle_between(sheets[i].normal, sheets[j].normal) <= kGeomTol)
        fail(ErrorCode::DegenerateAngles, "two sheets coincide");
  }
}

double OpenBook::distance2(CSpan p) const {
  const Vec w = spine.normal_part(p);
  const double w2 = norm2(w);
  double best = w2;
  for (const auto& s : sheets) {
    const double t = dot(w, s.normal);
    if (t > 0.0) best = std::min(best, std::max(0.0, w2 - t * t));
  }
  return best;
}

int OpenBook::nearest_sheet(CSpan p) const {
  const Vec w = spine.normal_part(p);
  const double w2 = norm2(w);
  int arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < sheet_count(); ++i) {
    const double t = dot(w, sheets[i].normal);
    const double d = t > 0.0 ? std::max(0.0, w2 - t * t) : w2;
    if (d < best) {
      best = d;
      arg = i;
    }
  }
  return arg;
}

OpenBook OpenBook::planar(int m, int n, const std::vector<double>& angles, const std::vector<int>& multiplicities) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "planar books need n >= 1");
  if (angles.size() != multiplicities.size()) fail(ErrorCode::InvalidArgument, "one multiplicity per angle");
  OpenBook b;
  b.spine = Spine::standard(m, n);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    Vec nu(static_cast<std::size_t>(m + n), 0.0);
    nu[m - 1] = std::cos(angles[i]);
    nu[m] = std::sin(angles[i]);
    b.sheets.push_back({nu, multiplicities[i]});
  }
  return b;
}

Vec circular_projection(CSpan p, int m) {
  Vec out(static_cast<std::size_t>(m));
  for (int i = 0; i < m - 1; ++i) out[i] = p[i];
  double y2 = 0.0;
  for (std::size_t i = static_cast<std::size_t>(m - 1); i < p.size(); ++i) y2 += p[i] * p[i];
  out[m - 1] = std::sqrt(y2);
  return out;
}

Vec circular_projection(const Spine& spine, CSpan p) {
  Vec out = spine.coords(p);
  out.push_back(spine.distance(p));
  return out;
}

std::vector<double> sheet_angle_matrix(const OpenBook& book) {
  const int n = book.sheet_count();
  std::vector<double> a(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) a[i * n + j] = a[j * n + i] = angle_between(book.sheets[i].normal, book.sheets[j].normal);
  return a;
}

double book_angle(const OpenBook& book) {
  if (book.sheet_count() <= 1) return 1.0;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < book.sheet_count(); ++i)
    for (int j = i + 1; j < book.sheet_count(); ++j)
      best = std::min(best, angle_between(book.sheets[i].normal, book.sheets[j].normal));
  return best;
}

namespace {
QPoint normal_tuple(const OpenBook& b) {
  std::vector<Vec> atoms;
  for (const auto& s : b.sheets)
    for (int k = 0; k < s.multiplicity; ++k) atoms.push_back(s.normal);
  return QPoint::from_atoms(atoms);
}
}  // namespace

double book_distance(const OpenBook& a, const OpenBook& b) {
  if (a.total_multiplicity() != b.total_multiplicity()) fail(ErrorCode::MismatchedQ, "books have different total multiplicity");
  if (!a.spine.same_as(b.spine)) fail(ErrorCode::MismatchedSpine, "books do not share a spine");
  return q_metric(normal_tuple(a), normal_tuple(b));
}

double wedge_defect(const Wedge& w, CSpan p) {
  const Vec y = w.spine.normal_part(p);
  const double t = dot(y, w.axis);
  Vec r = y;
  axpy(-t, w.axis, r);
  return norm(r) - std::tan(w.opening) * t;
}

bool wedge_contains(const Wedge& w, CSpan p) { return wedge_defect(w, p) <= 0.0; }

double wedge_violation(const Wedge& w, const std::vector<Vec>& points) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& p : points) worst = std::max(worst, wedge_defect(w, p));
  return worst;
}

double calibration_pairing(const Spine& spine, CSpan tangent, CSpan p, double spine_tol) {
  const int m = spine.m();
  const int dim = spine.ambient_dim;
  Vec radial = spine.normal_part(p);
  const double r = norm(radial);
  if (r <= spine_tol) fail(ErrorCode::OnSpine, "point lies on the spine");
  for (auto& x : radial) x /= r;
  std::vector<double> mat(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    const CSpan t = tangent.subspan(static_cast<std::size_t>(j) * dim, static_cast<std::size_t>(dim));
    mat[0 * m + j] = dot(radial, t);
    for (int i = 1; i < m; ++i) mat[i * m + j] = dot(spine.basis[i - 1], t);
  }
  return small_det(std::move(mat), m);
}

double calibration_pairing(const Spine& spine, CSpan tangent, CSpan p) {
  return calibration_pairing(spine, tangent, p, kGeomTol);
}

Vec sigma_direction(const Spine& spine, CSpan p, double spine_tol) {
  const Vec y = spine.normal_part(p);
  const double r = norm(y);
  if (r <= spine_tol) fail(ErrorCode::OnSpine, "point lies on the spine");
  return scaled(y, 1.0 / r);
}

Vec sheet_tangent(const OpenBook& book, int sheet) {
  Vec t = book.sheets[static_cast<std::size_t>(sheet)].normal;
  for (const auto& b : book.spine.basis) t.insert(t.end(), b.begin(), b.end());
  return t;
}

// ---------------------------------------------------------------- layers

namespace {

struct LayerStats {
  double min_angle, max_angle, spread;
};

LayerStats layer_stats(const std::vector<double>& ang, int n, const std::vector<int>& layer) {
  LayerStats s{std::numeric_limits<double>::infinity(), 0.0, 0.0};
  for (std::size_t a = 0; a < layer.size(); ++a)
    for (std::size_t b = a + 1; b < layer.size(); ++b) {
      const double v = ang[layer[a] * n + layer[b]];
      s.min_angle = std::min(s.min_angle, v);
      s.max_angle = std::max(s.max_angle, v);
    }
  for (int i = 0; i < n; ++i) {
    double near = std::numeric_limits<double>::infinity();
    for (int j : layer) near = std::min(near, ang[i * n + j]);
    s.spread = std::max(s.spread, near);
  }
  return s;
}

// Single-linkage clusters of all sheets: i ~ j when angle < t.
std::vector<int> clusters_below(const std::vector<double>& ang, int n, double t) {
  std::vector<int> label(static_cast<std::size_t>(n));
  std::iota(label.begin(), label.end(), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (ang[i * n + j] < t && label[j] < label[i]) {
          label[i] = label[j];
          changed = true;
        }
  }
  return label;
}

std::optional<LayerDecomposition> try_layers(const OpenBook& book, const std::vector<double>& ang, double delta) {
  const int n = book.sheet_count();
  std::vector<int> all(static_cast<std::size_t>(n));
  std::iota(all.begin(), all.end(), 0);

  // Extreme pair realising M(0), lowest indices on ties.
  int ea = 0, eb = 1;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (ang[i * n + j] > ang[ea * n + eb]) {
        ea = i;
        eb = j;
      }

  std::vector<double> thresholds;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) thresholds.push_back(ang[i * n + j]);
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());

  LayerDecomposition out;
  out.delta = delta;
  out.index_sets.push_back(all);
  LayerStats cur = layer_stats(ang, n, all);
  out.min_angle.push_back(cur.min_angle);
  out.max_angle.push_back(cur.max_angle);
  out.spread.push_back(cur.spread);

  while (true) {
    const auto& prev = out.index_sets.back();
    bool advanced = false;
    for (double t : thresholds) {
      if (t <= 0.0 || t * delta < cur.min_angle) continue;
      // Linking below the smallest angle that may survive; every cluster
      // keeps one representative from the previous layer.
      const std::vector<int> label = clusters_below(ang, n, t);
      std::vector<int> next;
      std::vector<int> seen;
      for (int i : prev) {
        if (std::find(seen.begin(), seen.end(), label[i]) != seen.end()) continue;
        int rep = i;
        for (int j : prev)
          if (label[j] == label[i] && (j == ea || j == eb)) {
            rep = j;
            break;
          }
        seen.push_back(label[i]);
        next.push_back(rep);
      }
      std::sort(next.begin(), next.end());
      if (next.size() < 2 || next.size() >= prev.size()) continue;
      if (std::find(next.begin(), next.end(), ea) == next.end() || std::find(next.begin(), next.end(), eb) == next.end())
        continue;
      const LayerStats st = layer_stats(ang, n, next);
      if (st.spread > delta * st.min_angle) continue;
      if (cur.min_angle > delta * st.min_angle) continue;
      out.index_sets.push_back(next);
      out.min_angle.push_back(st.min_angle);
      out.max_angle.push_back(st.max_angle);
      out.spread.push_back(st.spread);
      cur = st;
      advanced = true;
      break;
    }
    if (!advanced) break;
  }
  out.kappa = static_cast<int>(out.index_sets.size()) - 1;

  // eta: largest value compatible with conditions (2) and (3).
  double eta = out.min_angle[out.kappa] / out.max_angle[out.kappa];
  for (int s = 1; s <= out.kappa; ++s)
    if (out.spread[s] > 0.0) eta = std::min(eta, out.min_angle[s - 1] / out.spread[s]);
  out.eta = eta;

  if (out.max_angle[out.kappa] < delta) {
    const int lowest = *std::min_element(out.index_sets.back().begin(), out.index_sets.back().end());
    out.index_sets.push_back({lowest});
    out.min_angle.push_back(0.0);
    out.max_angle.push_back(0.0);
    out.spread.push_back(layer_stats(ang, n, {lowest}).spread);
    out.extended = true;
  }

  // Multiplicities: each sheet of layer k hands its multiplicity to its
  // nearest sheet in layer k+1.
  std::vector<int> mult;
  for (const auto& s : book.sheets) mult.push_back(s.multiplicity);
  out.multiplicities.push_back(mult);
  for (std::size_t k = 0; k + 1 < out.index_sets.size(); ++k) {
    const auto& from = out.index_sets[k];
    const auto& to = out.index_sets[k + 1];
    std::vector<int> next(to.size(), 0);
    for (std::size_t a = 0; a < from.size(); ++a) {
      std::size_t arg = 0;
      for (std::size_t b = 1; b < to.size(); ++b)
        if (ang[from[a] * n + to[b]] < ang[from[a] * n + to[arg]]) arg = b;
      next[arg] += out.multiplicities[k][a];
    }
    out.multiplicities.push_back(next);
  }
  return out;
}

bool conditions_hold(const LayerDecomposition& d) {
  const int k = d.kappa;
  if (d.eta <= 0.0) return false;
  if (std::abs(d.max_angle[k] - d.max_angle[0]) > 1e-12) return false;
  if (d.eta * d.max_angle[k] > d.min_angle[k] * (1 + 1e-12)) return false;
  for (int s = 1; s <= k; ++s) {
    if (d.spread[s] > d.delta * d.min_angle[s] * (1 + 1e-12)) return false;
    if (d.eta * d.spread[s] > d.min_angle[s - 1] * (1 + 1e-12)) return false;
    if (d.min_angle[s - 1] > d.delta * d.min_angle[s] * (1 + 1e-12)) return false;
  }
  return true;
}

}  // namespace

LayerDecomposition layer_subdivision(const OpenBook& book, double delta) {
  if (book.sheet_count() < 2) fail(ErrorCode::InvalidArgument, "layer subdivision needs at least two sheets");
  if (!(delta > 0.0 && delta <= 1.0)) fail(ErrorCode::InvalidArgument, "delta must lie in (0, 1]");
  const auto ang = sheet_angle_matrix(book);
  const int n = book.sheet_count();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (ang[i * n + j] <= kGeomTol) fail(ErrorCode::DegenerateAngles, "two sheets coincide");
  double d = delta;
  for (int attempt = 0; attempt <= 10; ++attempt, d *= 0.5) {
    auto out = try_layers(book, ang, d);
    if (out && conditions_hold(*out)) return *out;
  }
  fail(ErrorCode::DegenerateAngles, "no layer subdivision passed verification");
}

}  // namespace obl
