#include "openbook/dirichlet.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <algorithm>
#include <limits>
#include <numeric>

namespace obl {

// ------------------------------------------------------------- grid

HalfBallGrid::HalfBallGrid(int m, double h) : m_(m), h_(h) {
  if (m != 2 && m != 3) fail(ErrorCode::InvalidArgument, "half-ball grids support m = 2 and m = 3");
  if (!(h > 0.0 && h <= 0.25)) fail(ErrorCode::InvalidArgument, "grid spacing must lie in (0, 1/4]");
  padded_ = 1.0 + std::sqrt(static_cast<double>(m)) * h;
  k_ = static_cast<int>(std::ceil(padded_ / h));
  const int side = 2 * k_ + 1;
  const std::size_t boxes = m == 2 ? static_cast<std::size_t>(side) * (k_ + 1)
                                   : static_cast<std::size_t>(side) * side * (k_ + 1);
  box_.assign(boxes, -1);
  const double lim2 = padded_ * padded_;
  Index idx{0, 0, 0};
  auto visit = [&]() {
    double r2 = 0.0;
    for (int a = 0; a < m_; ++a) r2 += (idx[a] * h_) * (idx[a] * h_);
    if (r2 > lim2) return;
    box_[box_offset(idx)] = static_cast<long>(index_.size());
    index_.push_back(idx);
  };
  if (m == 2) {
    for (int j = 0; j <= k_; ++j)
      for (int i = -k_; i <= k_; ++i) {
        idx = {i, j, 0};
        visit();
      }
  } else {
    for (int l = 0; l <= k_; ++l)
      for (int j = -k_; j <= k_; ++j)
        for (int i = -k_; i <= k_; ++i) {
          idx = {i, j, l};
          visit();
        }
  }
}

std::size_t HalfBallGrid::box_offset(const Index& idx) const {
  const std::size_t side = 2 * static_cast<std::size_t>(k_) + 1;
  if (m_ == 2) return static_cast<std::size_t>(idx[1]) * side + static_cast<std::size_t>(idx[0] + k_);
  return (static_cast<std::size_t>(idx[2]) * side + static_cast<std::size_t>(idx[1] + k_)) * side +
         static_cast<std::size_t>(idx[0] + k_);
}

long HalfBallGrid::find(const Index& idx) const {
  for (int a = 0; a < m_ - 1; ++a)
    if (idx[a] < -k_ || idx[a] > k_) return -1;
  if (idx[m_ - 1] < 0 || idx[m_ - 1] > k_) return -1;
  return box_[box_offset(idx)];
}

Vec HalfBallGrid::position(std::size_t node) const {
  Vec x(static_cast<std::size_t>(m_));
  for (int a = 0; a < m_; ++a) x[a] = index_[node][a] * h_;
  return x;
}

bool HalfBallGrid::inside(std::size_t node) const {
  if (on_flat(node)) return false;
  double r2 = 0.0;
  for (int a = 0; a < m_; ++a) r2 += (index_[node][a] * h_) * (index_[node][a] * h_);
  return r2 < 1.0;
}

// ------------------------------------------------------------- functions

QPoint QFunction::at(std::size_t node) const {
  const CSpan a = atoms(node);
  return QPoint(q, n, std::vector<double>(a.begin(), a.end()));
}

void QFunction::validate() const {
  if (!grid) fail(ErrorCode::InvalidArgument, "function has no grid");
  if (values.size() != grid->size() * static_cast<std::size_t>(q) * n)
    fail(ErrorCode::InvalidArgument, "value buffer does not match grid");
  if (zero_trace)
    for (std::size_t k = 0; k < grid->size(); ++k)
      if (grid->on_flat(k))
        for (double v : atoms(k))
          if (v != 0.0) fail(ErrorCode::InvalidArgument, "zero-trace function is nonzero on the flat face");
}

QFunction sample_qfunction(std::shared_ptr<const HalfBallGrid> grid, int q, int n, const QField& fn, bool zero_trace) {
  QFunction u;
  u.grid = std::move(grid);
  u.q = q;
  u.n = n;
  u.zero_trace = zero_trace;
  u.values.assign(u.grid->size() * static_cast<std::size_t>(q) * n, 0.0);
  for (std::size_t k = 0; k < u.grid->size(); ++k) {
    if (zero_trace && u.grid->on_flat(k)) continue;
    fn(u.grid->position(k), u.atoms(k));
  }
  return u;
}

QFunction linear_fixture(std::shared_ptr<const HalfBallGrid> grid, const LinearQMap& map) {
  map.validate();
  const int m = grid->m();
  return sample_qfunction(std::move(grid), map.q(), map.n(),
                          [&](CSpan x, MSpan out) {
                            const QPoint p = map.evaluate(x[m - 1]);
                            std::copy(p.data().begin(), p.data().end(), out.begin());
                          },
                          true);
}

QFunction homogeneous_fixture(std::shared_ptr<const HalfBallGrid> grid, int k, double amplitude) {
  if (grid->m() != 2) fail(ErrorCode::InvalidArgument, "homogeneous fixture is defined for m = 2");
  return sample_qfunction(std::move(grid), 1, 1,
                          [&](CSpan x, MSpan out) {
                            const double r = std::hypot(x[0], x[1]);
                            const double th = std::atan2(x[1], x[0]);
                            out[0] = amplitude * std::pow(r, k) * std::sin(k * th);
                          },
                          true);
}

QFunction branch_fixture(std::shared_ptr<const HalfBallGrid> grid, double amplitude) {
  if (grid->m() != 2) fail(ErrorCode::InvalidArgument, "branch fixture is defined for m = 2");
  return sample_qfunction(std::move(grid), 2, 1,
                          [&](CSpan x, MSpan out) {
                            const double r = std::hypot(x[0], x[1]);
                            const double th = std::atan2(x[1], x[0]);
                            const double v = amplitude * std::pow(r, 1.5) * std::sin(1.5 * th);
                            out[0] = v;
                            out[1] = -v;
                          },
                          false);
}

// ------------------------------------------------------------- selections

namespace {

using Index = HalfBallGrid::Index;

// Puts the atoms of `other` into the order that best matches `ref`.
// Fails with SheetAmbiguity when a genuinely different matching is nearly
// as good.
void match_into(CSpan ref, CSpan other, int q, int n, MSpan out) {
  if (q == 1 || n == 1) {
    std::copy(other.begin(), other.end(), out.begin());
    if (n == 1) std::sort(out.begin(), out.end());
    return;
  }
  std::vector<double> cost(static_cast<std::size_t>(q) * q);
  double scale = 0.0;
  for (int i = 0; i < q; ++i) {
    scale = std::max(scale, norm2(ref.subspan(static_cast<std::size_t>(i) * n, n)));
    for (int j = 0; j < q; ++j)
      cost[i * q + j] = dist2(ref.subspan(static_cast<std::size_t>(i) * n, n), other.subspan(static_cast<std::size_t>(j) * n, n));
  }
  const Matching best = min_cost_assignment(cost, q);
  if (q <= 6) {
    // second best over permutations that give a different selection
    std::vector<int> perm(q);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> inverse(q);
    for (int i = 0; i < q; ++i) inverse[best.perm[i]] = i;
    const double tiny = 1e-18 * std::max(scale, 1e-300);
    double second = std::numeric_limits<double>::infinity();
    do {
      double diff = 0.0, relabel = 0.0;
      for (int i = 0; i < q; ++i) {
        diff = std::max(diff, dist2(other.subspan(static_cast<std::size_t>(perm[i]) * n, n),
                                    other.subspan(static_cast<std::size_t>(best.perm[i]) * n, n)));
        // swaps among coincident reference atoms (e.g. on the zero-trace face) are not ambiguities
        relabel = std::max(relabel, dist2(ref.subspan(static_cast<std::size_t>(i) * n, n),
                                          ref.subspan(static_cast<std::size_t>(inverse[perm[i]]) * n, n)));
      }
      if (diff <= tiny || relabel <= tiny) continue;
      double c = 0.0;
      for (int i = 0; i < q; ++i) c += cost[i * q + perm[i]];
      second = std::min(second, c);
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (second < 2.0 * best.cost) fail(ErrorCode::SheetAmbiguity, "adjacent atoms admit two comparable matchings");
  }
  for (int i = 0; i < q; ++i)
    std::copy_n(other.begin() + static_cast<std::ptrdiff_t>(best.perm[i]) * n, n,
                out.begin() + static_cast<std::ptrdiff_t>(i) * n);
}

double separation(CSpan atoms, int q, int n) {
  double s = std::numeric_limits<double>::infinity();
  for (int i = 0; i < q; ++i)
    for (int j = i + 1; j < q; ++j)
      s = std::min(s, dist2(atoms.subspan(static_cast<std::size_t>(i) * n, n), atoms.subspan(static_cast<std::size_t>(j) * n, n)));
  return s;
}

// Corner values of one cell in a common sheet order: corners x q x n.
struct Cell {
  int m = 2;
  double h = 0.0;
  Vec origin;  // lower corner position
  std::vector<long> nodes;
  std::vector<double> values;
};

bool load_cell(const QFunction& u, const Index& lower, Cell& cell, bool select) {
  const HalfBallGrid& g = *u.grid;
  const int m = g.m();
  const int corners = 1 << m;
  cell.m = m;
  cell.h = g.h();
  cell.nodes.resize(corners);
  for (int b = 0; b < corners; ++b) {
    Index idx = lower;
    for (int a = 0; a < m; ++a) idx[a] += (b >> a) & 1;
    cell.nodes[b] = g.find(idx);
    if (cell.nodes[b] < 0) return false;
  }
  cell.origin.assign(m, 0.0);
  for (int a = 0; a < m; ++a) cell.origin[a] = lower[a] * g.h();
  const std::size_t len = static_cast<std::size_t>(u.q) * u.n;
  cell.values.resize(corners * len);
  if (!select) {
    for (int b = 0; b < corners; ++b) {
      const CSpan a = u.atoms(cell.nodes[b]);
      std::copy(a.begin(), a.end(), cell.values.begin() + b * len);
    }
    return true;
  }
  int ref = 0;
  if (u.q > 1 && u.n > 1) {
    double best = -1.0;
    for (int b = 0; b < corners; ++b) {
      const double s = separation(u.atoms(cell.nodes[b]), u.q, u.n);
      if (s > best) {
        best = s;
        ref = b;
      }
    }
  }
  const CSpan refatoms = u.atoms(cell.nodes[ref]);
  Vec sorted_ref(refatoms.begin(), refatoms.end());
  if (u.n == 1) std::sort(sorted_ref.begin(), sorted_ref.end());
  for (int b = 0; b < corners; ++b)
    match_into(sorted_ref, u.atoms(cell.nodes[b]), u.q, u.n, MSpan(cell.values.data() + b * len, len));
  return true;
}

// Multilinear shape weights and their gradients at local coordinates xi.
void shape(int m, double h, CSpan xi, MSpan w, MSpan dw) {
  const int corners = 1 << m;
  for (int b = 0; b < corners; ++b) {
    double prod = 1.0;
    for (int a = 0; a < m; ++a) prod *= ((b >> a) & 1) ? xi[a] : 1.0 - xi[a];
    w[b] = prod;
    for (int a = 0; a < m; ++a) {
      double d = ((b >> a) & 1) ? 1.0 / h : -1.0 / h;
      for (int c = 0; c < m; ++c)
        if (c != a) d *= ((b >> c) & 1) ? xi[c] : 1.0 - xi[c];
      dw[static_cast<std::size_t>(b) * m + a] = d;
    }
  }
}

constexpr double kG2 = 0.5773502691896257645;

struct CellPoint {
  Vec x;       // position
  Vec xi;      // local coordinates
  double w;    // quadrature weight
  double dist; // distance to the center
};

// Visits Gauss points of cells meeting B_r(center), refining cells that
// cross one of the given radii.
template <class Body>
void for_each_cell_point(const QFunction& u, CSpan center, double r, const std::vector<double>& kinks, bool select,
                         Body&& body) {
  const HalfBallGrid& g = *u.grid;
  const int m = g.m();
  const double h = g.h();
  Index lo{0, 0, 0}, hi{0, 0, 0};
  for (int a = 0; a < m; ++a) {
    lo[a] = static_cast<int>(std::floor((center[a] - r) / h)) - 1;
    hi[a] = static_cast<int>(std::floor((center[a] + r) / h)) + 1;
  }
  lo[m - 1] = std::max(lo[m - 1], 0);
  Cell cell;
  Index idx{0, 0, 0};
  const int corners = 1 << m;
  Vec w(corners), dw(static_cast<std::size_t>(corners) * m);
  CellPoint pt;
  pt.x.assign(m, 0.0);
  pt.xi.assign(m, 0.0);

  auto process = [&]() {
    // distance range of the cell
    double dmin2 = 0.0, dmax2 = 0.0;
    for (int a = 0; a < m; ++a) {
      const double c0 = idx[a] * h - center[a], c1 = c0 + h;
      const double near = (c0 > 0.0) ? c0 : (c1 < 0.0 ? -c1 : 0.0);
      const double far = std::max(std::abs(c0), std::abs(c1));
      dmin2 += near * near;
      dmax2 += far * far;
    }
    if (dmin2 >= r * r) return;
    const double dmin = std::sqrt(dmin2), dmax = std::sqrt(dmax2);
    bool cut = false;
    for (double k : kinks)
      if (k > dmin && k < dmax) cut = true;
    if (!load_cell(u, idx, cell, select)) return;
    const int sub = cut ? 4 : 1;
    const double wsub = std::pow(h / sub, m) / corners;
    const int total = static_cast<int>(std::pow(sub, m));
    for (int s = 0; s < total; ++s) {
      int rem = s;
      Index sidx{0, 0, 0};
      for (int a = 0; a < m; ++a) {
        sidx[a] = rem % sub;
        rem /= sub;
      }
      for (int b = 0; b < corners; ++b) {
        double d2 = 0.0;
        for (int a = 0; a < m; ++a) {
          const double loc = (sidx[a] + 0.5 + (((b >> a) & 1) ? kG2 : -kG2) * 0.5) / sub;
          pt.xi[a] = loc;
          pt.x[a] = cell.origin[a] + loc * h;
          d2 += (pt.x[a] - center[a]) * (pt.x[a] - center[a]);
        }
        pt.dist = std::sqrt(d2);
        if (pt.dist >= r) continue;
        pt.w = wsub;
        shape(m, h, pt.xi, w, dw);
        body(cell, pt, w, dw);
      }
    }
  };
  if (m == 2) {
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        idx = {i, j, 0};
        process();
      }
  } else {
    for (int l = lo[2]; l <= hi[2]; ++l)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) {
          idx = {i, j, l};
          process();
        }
  }
}

double gradient_energy(const QFunction& u, const Cell& cell, CSpan dw) {
  const int m = cell.m;
  const int corners = 1 << m;
  const std::size_t len = static_cast<std::size_t>(u.q) * u.n;
  double e = 0.0;
  for (std::size_t c = 0; c < len; ++c)
    for (int a = 0; a < m; ++a) {
      double g = 0.0;
      for (int b = 0; b < corners; ++b) g += cell.values[b * len + c] * dw[static_cast<std::size_t>(b) * m + a];
      e += g * g;
    }
  return e;
}

double value_norm2(const QFunction& u, const Cell& cell, CSpan w) {
  const int corners = 1 << cell.m;
  const std::size_t len = static_cast<std::size_t>(u.q) * u.n;
  double s = 0.0;
  for (std::size_t c = 0; c < len; ++c) {
    double v = 0.0;
    for (int b = 0; b < corners; ++b) v += cell.values[b * len + c] * w[b];
    s += v * v;
  }
  return s;
}

struct SpherePoint {
  Vec x;
  Vec normal;
  double w;
};

std::vector<SpherePoint> sphere_points(int m, CSpan center, double r, double h) {
  static constexpr double gx[4] = {-0.8611363115940526, -0.3399810435848563, 0.3399810435848563, 0.8611363115940526};
  static constexpr double gw[4] = {0.3478548451374538, 0.6521451548625461, 0.6521451548625461, 0.3478548451374538};
  std::vector<SpherePoint> pts;
  if (m == 2) {
    const int panels = std::max(16, 2 * static_cast<int>(std::ceil(std::numbers::pi * r / h)));
    const double dth = std::numbers::pi / panels;
    for (int p = 0; p < panels; ++p)
      for (int g = 0; g < 4; ++g) {
        const double th = (p + 0.5 + 0.5 * gx[g]) * dth;
        SpherePoint s;
        s.normal = {std::cos(th), std::sin(th)};
        s.x = {center[0] + r * s.normal[0], center[1] + r * s.normal[1]};
        s.w = r * 0.5 * dth * gw[g];
        pts.push_back(std::move(s));
      }
  } else {
    const int panels = std::max(8, 2 * static_cast<int>(std::ceil(0.5 * std::numbers::pi * r / h)));
    const int nphi = std::max(32, 4 * static_cast<int>(std::ceil(2.0 * std::numbers::pi * r / h)));
    const double dz = 1.0 / panels, dphi = 2.0 * std::numbers::pi / nphi;
    for (int p = 0; p < panels; ++p)
      for (int g = 0; g < 4; ++g) {
        const double z = (p + 0.5 + 0.5 * gx[g]) * dz;
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        for (int k = 0; k < nphi; ++k) {
          const double ph = (k + 0.5) * dphi;
          SpherePoint sp;
          sp.normal = {s * std::cos(ph), s * std::sin(ph), z};
          sp.x = {center[0] + r * sp.normal[0], center[1] + r * sp.normal[1], center[2] + r * sp.normal[2]};
          sp.w = r * r * 0.5 * dz * gw[g] * dphi;
          pts.push_back(std::move(sp));
        }
      }
  }
  return pts;
}

void check_ball(const QFunction& u, CSpan center, double r) {
  u.validate();
  const int m = u.grid->m();
  if (center.size() != static_cast<std::size_t>(m)) fail(ErrorCode::InvalidArgument, "center has wrong dimension");
  if (center[m - 1] != 0.0) fail(ErrorCode::InvalidArgument, "center must lie on the flat face");
  if (!(r > 0.0) || r > 1.0 - norm(center) + 1e-12) fail(ErrorCode::InvalidArgument, "need 0 < r <= 1 - |x|");
}

std::vector<double> norm2_field(const QFunction& u) {
  std::vector<double> f(u.grid->size());
  for (std::size_t k = 0; k < f.size(); ++k) f[k] = norm2(u.atoms(k));
  return f;
}

// Cell containing x; the lower corner is pulled inward so that all corners exist.
bool locate(const HalfBallGrid& g, CSpan x, Index& lower, Vec& xi) {
  const int m = g.m();
  xi.assign(m, 0.0);
  for (int a = 0; a < m; ++a) {
    const double s = x[a] / g.h();
    int i = static_cast<int>(std::floor(s));
    if (a == m - 1) i = std::max(i, 0);
    lower[a] = i;
  }
  for (int attempt = 0; attempt < 3; ++attempt) {
    bool ok = true;
    for (int b = 0; b < (1 << m) && ok; ++b) {
      Index idx = lower;
      for (int a = 0; a < m; ++a) idx[a] += (b >> a) & 1;
      ok = g.find(idx) >= 0;
    }
    if (ok) {
      for (int a = 0; a < m; ++a) xi[a] = std::clamp(x[a] / g.h() - lower[a], 0.0, 1.0);
      return true;
    }
    // step toward the origin
    for (int a = 0; a < m; ++a) {
      if (a == m - 1) {
        if (lower[a] > 0) --lower[a];
      } else if (lower[a] > 0) {
        --lower[a];
      } else if (lower[a] < -1) {
        ++lower[a];
      }
    }
  }
  return false;
}

}  // namespace

double interpolate_scalar(const HalfBallGrid& grid, const std::vector<double>& field, CSpan x) {
  const int m = grid.m();
  Index lower{0, 0, 0};
  Vec xi;
  if (!locate(grid, x, lower, xi)) fail(ErrorCode::InvalidArgument, "point lies outside the grid");
  double v = 0.0;
  for (int b = 0; b < (1 << m); ++b) {
    Index idx = lower;
    double wgt = 1.0;
    for (int a = 0; a < m; ++a) {
      const int bit = (b >> a) & 1;
      idx[a] += bit;
      wgt *= bit ? xi[a] : 1.0 - xi[a];
    }
    v += wgt * field[static_cast<std::size_t>(grid.find(idx))];
  }
  return v;
}

QPoint interpolate(const QFunction& u, CSpan x) {
  const HalfBallGrid& g = *u.grid;
  const int m = g.m();
  Index lower{0, 0, 0};
  Vec xi;
  if (!locate(g, x, lower, xi)) fail(ErrorCode::InvalidArgument, "point lies outside the grid");
  Cell cell;
  load_cell(u, lower, cell, true);
  const int corners = 1 << m;
  Vec w(corners), dw(static_cast<std::size_t>(corners) * m);
  shape(m, g.h(), xi, w, dw);
  const std::size_t len = static_cast<std::size_t>(u.q) * u.n;
  std::vector<double> out(len, 0.0);
  for (int b = 0; b < corners; ++b)
    for (std::size_t c = 0; c < len; ++c) out[c] += w[b] * cell.values[b * len + c];
  return QPoint(u.q, u.n, std::move(out));
}

double dirichlet_energy(const QFunction& u, CSpan center, double r) {
  check_ball(u, center, r);
  double e = 0.0;
  for_each_cell_point(u, center, r, {r}, true, [&](const Cell& cell, const CellPoint& p, CSpan, CSpan dw) {
    e += p.w * gradient_energy(u, cell, dw);
  });
  return e;
}

double volume_height(const QFunction& u, CSpan center, double r) {
  check_ball(u, center, r);
  double e = 0.0;
  for_each_cell_point(u, center, r, {r}, false, [&](const Cell& cell, const CellPoint& p, CSpan w, CSpan) {
    e += p.w * value_norm2(u, cell, w);
  });
  return e;
}

double spherical_height(const QFunction& u, CSpan center, double r) {
  check_ball(u, center, r);
  const std::vector<double> f = norm2_field(u);
  double s = 0.0;
  for (const SpherePoint& p : sphere_points(u.grid->m(), center, r, u.grid->h()))
    s += p.w * interpolate_scalar(*u.grid, f, p.x);
  return s;
}

FrequencyProfile frequency(const QFunction& u, CSpan center, const std::vector<double>& radii,
                           FrequencyVariant variant) {
  FrequencyProfile prof;
  prof.center.assign(center.begin(), center.end());
  prof.radii = radii;
  prof.variant = variant;
  prof.h = u.grid->h();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (k > 0 && !(radii[k] > radii[k - 1])) fail(ErrorCode::InvalidArgument, "radii must be strictly increasing");
    double d = 0.0, hh = 0.0;
    if (variant == FrequencyVariant::Sharp) {
      d = dirichlet_energy(u, center, radii[k]);
      hh = spherical_height(u, center, radii[k]);
    } else {
      const SmoothedFrequency s = smoothed_frequency(u, center, radii[k]);
      d = s.energy;
      hh = s.height;
    }
    if (!(hh > 0.0)) fail(ErrorCode::VanishingHeight, "height vanishes at a requested radius");
    prof.energy.push_back(d);
    prof.height.push_back(hh);
    prof.frequency.push_back(radii[k] * d / hh);
  }
  for (std::size_t k = 0; k + 1 < prof.frequency.size(); ++k)
    prof.monotonicity_defect = std::max(prof.monotonicity_defect, prof.frequency[k] - prof.frequency[k + 1]);
  return prof;
}

SmoothedFrequency smoothed_frequency(const QFunction& u, CSpan center, double r) {
  check_ball(u, center, r);
  SmoothedFrequency s;
  for_each_cell_point(u, center, r, {0.5 * r, r}, true, [&](const Cell& cell, const CellPoint& p, CSpan w, CSpan dw) {
    const double t = p.dist / r;
    const double phi = t <= 0.5 ? 1.0 : 2.0 * (1.0 - t);
    s.energy += p.w * phi * gradient_energy(u, cell, dw);
    if (t > 0.5) s.height += p.w * 2.0 * value_norm2(u, cell, w) / p.dist;
  });
  if (s.height <= 0.0) {
    s.vanishing = true;
    return s;
  }
  s.frequency = r * s.energy / s.height;
  return s;
}

// ------------------------------------------------------------- solver

QFunction solve_dirichlet(std::shared_ptr<const HalfBallGrid> grid, const std::vector<BoundaryData>& sheets,
                          const std::vector<int>& multiplicities, int n, SolveReport* report) {
  if (sheets.empty() || sheets.size() != multiplicities.size())
    fail(ErrorCode::InvalidArgument, "one multiplicity per sheet");
  for (int q : multiplicities)
    if (q <= 0) fail(ErrorCode::InvalidArgument, "multiplicities must be positive");
  const HalfBallGrid& g = *grid;
  const int m = g.m();
  const double h = g.h();
  const int nsheets = static_cast<int>(sheets.size());

  // separability on the sphere away from the flat face
  {
    Vec x(m), a(n), b(n);
    const int samples = 256;
    Rng rng(0x5e9a);
    for (int k = 0; k < samples; ++k) {
      if (m == 2) {
        const double th = 0.05 + (std::numbers::pi - 0.1) * (k + 0.5) / samples;
        x = {std::cos(th), std::sin(th)};
      } else {
        Vec v = rng.unit_sphere(3);
        v[2] = std::abs(v[2]);
        if (v[2] < 0.05) continue;
        x = v;
      }
      for (int i = 0; i < nsheets; ++i)
        for (int j = i + 1; j < nsheets; ++j) {
          sheets[i](x, a);
          sheets[j](x, b);
          if (dist2(a, b) < 1e-18) fail(ErrorCode::NonSeparableBoundary, "sheet data coincide on the boundary");
        }
    }
  }

  std::vector<long> unknown(g.size(), -1);
  std::vector<std::size_t> nodes;
  for (std::size_t k = 0; k < g.size(); ++k)
    if (g.inside(k)) {
      unknown[k] = static_cast<long>(nodes.size());
      nodes.push_back(k);
    }
  const std::size_t nu = nodes.size();

  // Shortley-Weller rows scaled by h^2 / 2; boundary contributions are
  // collected per sheet and component.
  struct Known {
    std::size_t row;
    double coeff;
    Vec point;  // on the unit sphere
  };
  std::vector<Eigen::Triplet<double>> trips;
  std::vector<Known> known;
  for (std::size_t row = 0; row < nu; ++row) {
    const std::size_t k = nodes[row];
    const Vec x = g.position(k);
    double diag = 0.0;
    for (int a = 0; a < m; ++a) {
      double dist[2];
      long nb[2];
      Vec bpt[2];
      for (int side = 0; side < 2; ++side) {
        const int sgn = side == 0 ? -1 : 1;
        Index idx = g.index(k);
        idx[a] += sgn;
        const long j = g.find(idx);
        nb[side] = -1;
        dist[side] = h;
        if (a == m - 1 && idx[a] == 0) continue;  // flat face, value 0
        if (j >= 0 && unknown[j] >= 0) {
          nb[side] = unknown[j];
          continue;
        }
        // crossing of the unit sphere along the axis
        const double xa = x[a];
        const double c = norm2(x) - 1.0;
        const double t = -sgn * xa + std::sqrt(xa * xa - c);
        dist[side] = std::clamp(t, 1e-12, h);
        bpt[side] = x;
        bpt[side][a] += sgn * dist[side];
        nb[side] = -2;
      }
      const double hl = dist[0], hr = dist[1];
      const double s = h * h / (hl + hr);
      const double cl = s / hl, cr = s / hr;
      diag -= cl + cr;
      const double cs[2] = {cl, cr};
      for (int side = 0; side < 2; ++side) {
        if (nb[side] >= 0)
          trips.emplace_back(static_cast<int>(row), static_cast<int>(nb[side]), cs[side]);
        else if (nb[side] == -2)
          known.push_back({row, cs[side], bpt[side]});
      }
    }
    trips.emplace_back(static_cast<int>(row), static_cast<int>(row), diag);
  }
  Eigen::SparseMatrix<double> A(static_cast<int>(nu), static_cast<int>(nu));
  A.setFromTriplets(trips.begin(), trips.end());
  A.makeCompressed();

  QFunction u;
  u.grid = grid;
  u.q = std::accumulate(multiplicities.begin(), multiplicities.end(), 0);
  u.n = n;
  u.zero_trace = true;
  u.values.assign(g.size() * static_cast<std::size_t>(u.q) * n, 0.0);

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  Eigen::BiCGSTAB<Eigen::SparseMatrix<double>, Eigen::IncompleteLUT<double>> iter;
  const bool direct = nu <= 40000;
  if (direct) {
    lu.compute(A);
    if (lu.info() != Eigen::Success) fail(ErrorCode::InvalidArgument, "factorization failed");
  } else {
    iter.setTolerance(1e-14);
    iter.setMaxIterations(20000);
    iter.compute(A);
  }

  double residual = 0.0;
  int slot = 0;
  Vec val(n);
  for (int i = 0; i < nsheets; ++i) {
    std::vector<Eigen::VectorXd> sol(n);
    for (int c = 0; c < n; ++c) {
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<int>(nu));
      for (const Known& kn : known) {
        sheets[i](kn.point, val);
        rhs[static_cast<int>(kn.row)] -= kn.coeff * val[c];
      }
      sol[c] = direct ? Eigen::VectorXd(lu.solve(rhs)) : Eigen::VectorXd(iter.solve(rhs));
      residual = std::max(residual, (A * sol[c] - rhs).cwiseAbs().maxCoeff());
    }
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g.on_flat(k)) continue;
      if (unknown[k] >= 0) {
        for (int c = 0; c < n; ++c) val[c] = sol[c][unknown[k]];
      } else {
        sheets[i](normalized(g.position(k)), val);  // padding: 0-homogeneous extension
      }
      for (int rep = 0; rep < multiplicities[i]; ++rep)
        std::copy(val.begin(), val.end(), u.atoms(k).begin() + static_cast<std::ptrdiff_t>(slot + rep) * n);
    }
    slot += multiplicities[i];
  }
  if (report != nullptr) {
    report->residual = residual;
    report->unknowns = nu;
  }
  return u;
}

// ------------------------------------------------------------- blowups, fits

QFunction blowup(const QFunction& u, CSpan y, double rho) {
  u.validate();
  const int m = u.grid->m();
  if (!(rho > 0.0) || rho + norm(y) > 1.0 + 1e-12) fail(ErrorCode::InvalidArgument, "need rho + |y| <= 1");
  const double dir = dirichlet_energy(u, y, rho);
  if (!(dir > 0.0)) fail(ErrorCode::ZeroEnergy, "no energy in the blowup ball");
  const double scale = std::pow(rho, 0.5 * (m - 2)) / std::sqrt(dir);
  QFunction out;
  out.grid = u.grid;
  out.q = u.q;
  out.n = u.n;
  out.zero_trace = u.zero_trace;
  out.values.assign(u.values.size(), 0.0);
  Vec p(m);
  for (std::size_t k = 0; k < u.grid->size(); ++k) {
    if (u.zero_trace && u.grid->on_flat(k)) continue;
    const Vec x = u.grid->position(k);
    for (int a = 0; a < m; ++a) p[a] = y[a] + rho * x[a];
    const QPoint v = interpolate(u, p);
    MSpan dst = out.atoms(k);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] = scale * v.data()[c];
  }
  return out;
}

std::vector<LinearFit> decay_to_linear(const QFunction& u, const std::vector<double>& radii) {
  u.validate();
  if (!u.zero_trace) fail(ErrorCode::InvalidArgument, "decay to linear maps needs zero trace");
  const HalfBallGrid& g = *u.grid;
  const int m = g.m(), q = u.q, n = u.n;
  const double cellv = std::pow(g.h(), m);
  std::vector<LinearFit> fits;
  for (double r : radii) {
    std::vector<std::size_t> nodes;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (!g.on_flat(k) && norm2(g.position(k)) < r * r) nodes.push_back(k);
    if (nodes.empty()) fail(ErrorCode::InvalidArgument, "radius below grid resolution");

    LinearFit fit;
    fit.radius = r;
    Vec avg(n, 0.0);
    double sxx = 0.0;
    std::size_t top = nodes.front();
    for (std::size_t k : nodes) {
      const double xm = g.position(k)[m - 1];
      const Vec a = q_average(u.at(k));
      axpy(xm, a, avg);
      sxx += xm * xm;
      if (xm > g.position(top)[m - 1] || (xm == g.position(top)[m - 1] && norm2(g.position(k)) < norm2(g.position(top))))
        top = k;
    }
    for (auto& v : avg) v /= sxx;
    fit.average_slope = norm(avg);

    // deviations w_i, initialized from the highest node
    std::vector<Vec> w(q, Vec(n, 0.0));
    {
      const double xm = g.position(top)[m - 1];
      const QPoint p = u.at(top);
      for (int i = 0; i < q; ++i)
        for (int c = 0; c < n; ++c) w[i][c] = p.atom(i)[c] / xm - avg[c];
    }
    std::vector<double> cost(static_cast<std::size_t>(q) * q);
    for (int it = 0; it < 10; ++it) {
      std::vector<Vec> acc(q, Vec(n, 0.0));
      for (std::size_t k : nodes) {
        const double xm = g.position(k)[m - 1];
        const CSpan at = u.atoms(k);
        for (int i = 0; i < q; ++i)
          for (int j = 0; j < q; ++j) {
            double c2 = 0.0;
            for (int c = 0; c < n; ++c) {
              const double d = at[static_cast<std::size_t>(j) * n + c] - avg[c] * xm - w[i][c] * xm;
              c2 += d * d;
            }
            cost[i * q + j] = c2;
          }
        const Matching mt = min_cost_assignment(cost, q);
        for (int i = 0; i < q; ++i)
          for (int c = 0; c < n; ++c) acc[i][c] += (at[static_cast<std::size_t>(mt.perm[i]) * n + c] - avg[c] * xm) * xm;
      }
      for (int i = 0; i < q; ++i)
        for (int c = 0; c < n; ++c) w[i][c] = acc[i][c] / sxx;
    }

    // group equal directions
    std::vector<Vec> dirs;
    for (int i = 0; i < q; ++i) dirs.push_back(add(avg, w[i]));
    std::vector<char> used(q, 0);
    double scale = 0.0;
    for (const auto& d : dirs) scale = std::max(scale, norm(d));
    for (int i = 0; i < q; ++i) {
      if (used[i]) continue;
      int mult = 1;
      for (int j = i + 1; j < q; ++j)
        if (!used[j] && std::sqrt(dist2(dirs[i], dirs[j])) <= 1e-9 * std::max(scale, 1e-300)) {
          used[j] = 1;
          ++mult;
        }
      fit.map.directions.push_back(dirs[i]);
      fit.map.multiplicities.push_back(mult);
    }
    double res = 0.0;
    for (std::size_t k : nodes) {
      const double xm = g.position(k)[m - 1];
      const double gq = q_metric(u.at(k), fit.map.evaluate(xm));
      res += cellv * gq * gq;
    }
    fit.residual = res / std::pow(r, m + 2);
    fit.alpha = fit.map.separation();
    fits.push_back(std::move(fit));
  }
  return fits;
}

DoublingReport energy_doubling_check(const QFunction& u, CSpan center, double r, double t) {
  if (!(r > 0.0 && r < t)) fail(ErrorCode::InvalidArgument, "need 0 < r < t");
  const int m = u.grid->m();
  DoublingReport rep;
  rep.r = r;
  rep.t = t;
  rep.height_r = spherical_height(u, center, r);
  rep.height_t = spherical_height(u, center, t);
  if (!(rep.height_r > 0.0 && rep.height_t > 0.0)) fail(ErrorCode::VanishingHeight, "height vanishes");
  rep.energy_r = dirichlet_energy(u, center, r);
  rep.energy_t = dirichlet_energy(u, center, t);
  rep.freq_r = r * rep.energy_r / rep.height_r;
  rep.freq_t = t * rep.energy_t / rep.height_t;
  const double ratio = r / t;
  const double hmid = rep.height_r / std::pow(r, m - 1);
  const double hlo = std::pow(ratio, 2.0 * rep.freq_t) * rep.height_t / std::pow(t, m - 1);
  const double hhi = std::pow(ratio, 2.0 * rep.freq_r) * rep.height_t / std::pow(t, m - 1);
  const double dmid = rep.energy_r / std::pow(r, m - 2);
  const double dlo = rep.freq_t > 0.0 ? (rep.freq_r / rep.freq_t) * std::pow(ratio, 2.0 * rep.freq_t) * rep.energy_t /
                                            std::pow(t, m - 2)
                                      : 0.0;
  const double dhi = std::pow(ratio, 2.0 * rep.freq_r) * rep.energy_t / std::pow(t, m - 2);
  rep.lower_mid_upper = {hlo, hmid, hhi, dlo, dmid, dhi};
  rep.slack = {(hmid - hlo) / hmid, (hhi - hmid) / hmid, dmid > 0.0 ? (dmid - dlo) / dmid : 0.0,
               dmid > 0.0 ? (dhi - dmid) / dmid : 0.0};
  return rep;
}

HeightDecayReport height_decay(const QFunction& u, double r, double alpha) {
  const int m = u.grid->m();
  const Vec zero(m, 0.0);
  HeightDecayReport rep;
  rep.alpha = alpha;
  rep.lhs = volume_height(u, zero, r);
  rep.rhs = std::pow(r, m + 2.0 * alpha) / (m + 1) * spherical_height(u, zero, 1.0);
  rep.slack = rep.rhs > 0.0 ? (rep.rhs - rep.lhs) / rep.rhs : (rep.lhs > 0.0 ? -1.0 : 0.0);
  return rep;
}

IdentityReport frequency_identities(const QFunction& u, CSpan center, double r) {
  check_ball(u, center, r);
  const HalfBallGrid& g = *u.grid;
  const int m = g.m(), q = u.q, n = u.n;
  const double h = g.h();
  const std::size_t len = static_cast<std::size_t>(q) * n;

  // nodal gradients of a local selection, needed only near the sphere
  const double band_lo = std::max(0.0, r - 2.0 * h), band_hi = r + 2.0 * h;
  std::vector<double> gten(g.size() * m * m, 0.0), wvec(g.size() * m, 0.0);
  Vec self(len), plus(len), minus(len), plus2(len);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double d = std::sqrt(dist2(g.position(k), center));
    if (d < band_lo || d > band_hi) continue;
    const CSpan own = u.atoms(k);
    std::copy(own.begin(), own.end(), self.begin());
    if (n == 1) std::sort(self.begin(), self.end());
    std::vector<double> grad(len * m, 0.0);
    for (int a = 0; a < m; ++a) {
      Index ip = g.index(k), im = g.index(k), ip2 = g.index(k);
      ++ip[a];
      --im[a];
      ip2[a] += 2;
      const long jp = g.find(ip), jm = g.find(im), jp2 = g.find(ip2);
      if (jp >= 0 && jm >= 0) {
        match_into(self, u.atoms(jp), q, n, plus);
        match_into(self, u.atoms(jm), q, n, minus);
        for (std::size_t c = 0; c < len; ++c) grad[c * m + a] = (plus[c] - minus[c]) / (2.0 * h);
      } else if (jp >= 0 && jp2 >= 0) {
        match_into(self, u.atoms(jp), q, n, plus);
        match_into(plus, u.atoms(jp2), q, n, plus2);
        for (std::size_t c = 0; c < len; ++c) grad[c * m + a] = (-3.0 * self[c] + 4.0 * plus[c] - plus2[c]) / (2.0 * h);
      } else if (jm >= 0) {
        match_into(self, u.atoms(jm), q, n, minus);
        for (std::size_t c = 0; c < len; ++c) grad[c * m + a] = (self[c] - minus[c]) / h;
      }
    }
    for (std::size_t c = 0; c < len; ++c)
      for (int a = 0; a < m; ++a) {
        wvec[k * m + a] += grad[c * m + a] * self[c];
        for (int b = 0; b < m; ++b) gten[(k * m + a) * m + b] += grad[c * m + a] * grad[c * m + b];
      }
  }

  // per-component node fields, interpolated at each sphere point
  const auto pts = sphere_points(m, center, r, h);
  std::vector<std::vector<double>> gfields(m * m, std::vector<double>(g.size())), wfields(m, std::vector<double>(g.size()));
  for (std::size_t k = 0; k < g.size(); ++k) {
    for (int a = 0; a < m * m; ++a) gfields[a][k] = gten[k * m * m + a];
    for (int a = 0; a < m; ++a) wfields[a][k] = wvec[k * m + a];
  }
  double full = 0.0, normal = 0.0, pairing = 0.0;
  for (const SpherePoint& p : pts) {
    double gm[9] = {0};
    for (int a = 0; a < m * m; ++a) gm[a] = interpolate_scalar(g, gfields[a], p.x);
    double tr = 0.0, nn = 0.0, wp = 0.0;
    for (int a = 0; a < m; ++a) {
      tr += gm[a * m + a];
      wp += interpolate_scalar(g, wfields[a], p.x) * p.normal[a];
      for (int b = 0; b < m; ++b) nn += p.normal[a] * gm[a * m + b] * p.normal[b];
    }
    full += p.w * tr;
    normal += p.w * nn;
    pairing += p.w * wp;
  }
  const double energy = dirichlet_energy(u, center, r);
  IdentityReport rep;
  rep.lhs_first = (m - 2) * energy;
  rep.rhs_first = r * full - 2.0 * r * normal;
  rep.error_first = std::abs(rep.lhs_first - rep.rhs_first) / std::max(r * full, 1e-300);
  rep.lhs_second = energy;
  rep.rhs_second = pairing;
  rep.error_second = std::abs(energy - pairing) / std::max(energy, 1e-300);
  return rep;
}

}  // namespace obl
