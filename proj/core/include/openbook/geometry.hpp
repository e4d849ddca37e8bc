#pragma once

#include <optional>
#include <utility>

#include "openbook/common.hpp"

namespace obl {

inline constexpr double kGeomTol = 1e-12;

// Affine (m-1)-plane V in R^{m+n}.
struct Spine {
  int ambient_dim = 0;
  Vec origin;
  std::vector<Vec> basis;

  int spine_dim() const { return static_cast<int>(basis.size()); }
  int m() const { return spine_dim() + 1; }
  int n() const { return ambient_dim - m(); }

  // origin 0, basis e_1..e_{m-1}
  static Spine standard(int m, int n);

  void validate() const;
  Vec coords(CSpan p) const;           // (p - origin) . b_i
  Vec project(CSpan p) const;          // p_V(p)
  Vec normal_part(CSpan p) const;      // p - p_V(p), lies in V-perp
  double distance(CSpan p) const { return norm(normal_part(p)); }
  double distance2(CSpan p) const { return norm2(normal_part(p)); }
  bool same_as(const Spine& other, double tol = 1e-9) const;
  // Projects a direction onto V-perp (origin ignored).
  Vec perp_direction(CSpan v) const;
};

struct HalfPlane {
  Spine spine;
  Vec normal;

  void validate() const;
  bool contains(CSpan p, double tol = 1e-9) const;
  double distance2(CSpan p) const;  // to the closed half-plane
};

struct Sheet {
  Vec normal;
  int multiplicity = 1;
};

// C = sum Q_i [[H_i]] with a common spine.
struct OpenBook {
  Spine spine;
  std::vector<Sheet> sheets;

  int sheet_count() const { return static_cast<int>(sheets.size()); }
  int total_multiplicity() const;
  int m() const { return spine.m(); }
  int ambient_dim() const { return spine.ambient_dim; }
  HalfPlane half_plane(int i) const;
  void validate() const;
  double distance2(CSpan p) const;           // to spt C (closed sheets)
  int nearest_sheet(CSpan p) const;          // lowest index on ties
  // Builds a book whose sheets make the given angles with e_m inside the
  // (e_m, e_{m+1}) plane of the standard spine.
  static OpenBook planar(int m, int n, const std::vector<double>& angles,
                         const std::vector<int>& multiplicities);
};

struct Wedge {
  Spine spine;
  Vec axis;
  double opening = 0.0;  // in (0, pi/2)
};

// (x, |y|) with x the first m-1 coordinates.
Vec circular_projection(CSpan p, int m);
// Same with respect to an arbitrary spine: (coords along V, |p_{V-perp}(p)|).
Vec circular_projection(const Spine& spine, CSpan p);

double book_angle(const OpenBook& book);
double book_distance(const OpenBook& a, const OpenBook& b);

bool wedge_contains(const Wedge& w, CSpan p);
double wedge_defect(const Wedge& w, CSpan p);
double wedge_violation(const Wedge& w, const std::vector<Vec>& points);

// Tangent is given by m orthonormal rows of length m+n (row-major).
double calibration_pairing(const Spine& spine, CSpan tangent, CSpan p);
double calibration_pairing(const Spine& spine, CSpan tangent, CSpan p, double spine_tol);
Vec sigma_direction(const Spine& spine, CSpan p, double spine_tol = kGeomTol);

// Oriented tangent frame of sheet i: rows (normal, b_1, ..., b_{m-1}).
Vec sheet_tangent(const OpenBook& book, int sheet);

struct LayerDecomposition {
  std::vector<std::vector<int>> index_sets;      // I(0) ... I(kappa_bar)
  std::vector<std::vector<int>> multiplicities;  // aligned with index_sets
  std::vector<double> min_angle;                 // m(s)
  std::vector<double> max_angle;                 // M(s)
  std::vector<double> spread;                    // d(s)
  int kappa = 0;
  bool extended = false;  // singleton layer appended
  double delta = 1.0;     // value actually used
  double eta = 0.0;       // largest eta satisfying conditions (2) and (3)
};

LayerDecomposition layer_subdivision(const OpenBook& book, double delta);

// Pairwise sheet angle matrix (row-major N x N).
std::vector<double> sheet_angle_matrix(const OpenBook& book);

}  // namespace obl
