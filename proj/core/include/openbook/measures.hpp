#pragma once

#include <cstdint>
#include <string>

#include "openbook/geometry.hpp"

namespace obl {

struct DiscreteMeasure {
  int dim = 0;
  std::vector<double> points;  // row-major, size() x dim
  std::vector<double> weights;

  DiscreteMeasure() = default;
  explicit DiscreteMeasure(int d) : dim(d) {}

  std::size_t size() const { return weights.size(); }
  CSpan point(std::size_t i) const { return {points.data() + i * dim, static_cast<std::size_t>(dim)}; }
  void add(CSpan p, double w);
  double total_mass() const;
  void validate() const;
};

struct DiscreteCurrent {
  int m = 0;
  int n = 0;
  int q = 0;
  DiscreteMeasure measure;
  std::vector<double> tangents;  // size() x m x (m+n), empty when absent
  std::string generator;
  std::uint64_t seed = 0;

  int ambient_dim() const { return m + n; }
  std::size_t size() const { return measure.size(); }
  bool has_tangents() const { return !tangents.empty(); }
  CSpan tangent(std::size_t i) const {
    const std::size_t len = static_cast<std::size_t>(m) * ambient_dim();
    return {tangents.data() + i * len, len};
  }
  void add(CSpan p, double w, CSpan tangent);
  void validate() const;
  DiscreteCurrent restricted(CSpan center, double radius) const;  // points with |x - center| < radius
};

// Per-sheet data for graphs over a book: y = (t, s_1, ..., s_{m-1}) are the
// sheet coordinates (t >= 0 along the normal, s along the spine basis); the
// callback writes Q_i atoms of length m+n into out (row-major). Components
// along the sheet are discarded.
using SheetFunction = std::function<void(CSpan y, MSpan out)>;

struct SampleOptions {
  int per_sheet_count = 0;  // overrides target_count / N when positive
  bool jitter = true;       // false places points at cell centres
};

// Cells are strata in (|x|/r)^m times equal-area angular cells; every sheet
// uses the same seeded layout so that samples of different books over the
// same spine line up point by point.
DiscreteCurrent sample_open_book(const OpenBook& book, double radius, int target_count, std::uint64_t seed,
                                 const SampleOptions& options = {});

// Number of radial strata per sheet; stratum k covers base radii between
// radius * (k/K)^{1/m} and radius * ((k+1)/K)^{1/m}.
int radial_strata(int m, int per_sheet);

// Empty entries in g mean "flat sheet".
DiscreteCurrent sample_graph_over_book(const OpenBook& book, const std::vector<SheetFunction>& g, double radius,
                                       int target_count, std::uint64_t seed, const SampleOptions& options = {});

enum class DensityFlavor { Interior, Boundary };

struct DensityOptions {
  DensityFlavor flavor = DensityFlavor::Boundary;
  double a_gamma = 0.0;
  double a_sigma = 0.0;
  double c0 = 1.0;
  int min_samples = 50;
};

struct DensityValue {
  double value = 0.0;
  double mass = 0.0;
  std::size_t samples = 0;
  bool low_sample_warning = false;
};

DensityValue density(const DiscreteCurrent& t, CSpan p, double r, const DensityOptions& options = {});

struct DensityProfile {
  Vec center;
  std::vector<double> radii;
  std::vector<double> values;
  std::vector<std::size_t> samples;
  DensityFlavor flavor = DensityFlavor::Boundary;
  double monotonicity_defect = 0.0;  // max (theta_k - theta_{k+1})_+
  bool low_sample_warning = false;

  double mean() const;
};

DensityProfile density_profile(const DiscreteCurrent& t, CSpan p, const std::vector<double>& radii,
                               const DensityOptions& options = {});

struct MonotonicityTerms {
  double lhs = 0.0;
  double rhs = 0.0;
  double noise_floor = 0.0;  // one-sample quantisation of lhs at both radii
};

// Flat case: r^{-m}|T|(B_r) - s^{-m}|T|(B_s) against the integral of
// |(x-p)^perp|^2/|x-p|^{m+2} over B_r \ B_s, both divided by omega_m.
MonotonicityTerms monotonicity_remainder(const DiscreteCurrent& t, CSpan p, double s, double r);

// Normal part of v relative to the oriented plane spanned by the tangent rows.
Vec normal_component(CSpan tangent, int m, CSpan v);

// Unit simple m-vector inner product of two orthonormal frames.
double mvector_inner(CSpan a, CSpan b, int m);

DiscreteCurrent pushforward_circular(const DiscreteCurrent& t, const Spine& spine, double spine_tol = 0.0);

struct CalibrationDefect {
  double defect = 0.0;
  double paired_mass = 0.0;  // integral of <omega, T>
  double mass = 0.0;         // mass over B_1 minus the spine neighbourhood
  std::size_t excluded = 0;
  double density_gap = 0.0;  // density(T,0,1) - Q/2 - defect/omega_m
};

CalibrationDefect calibration_defect(const DiscreteCurrent& t, const Spine& spine, int q, double radius = 1.0);

// Gram-Schmidt on m vectors of length d (row-major); keeps orientation.
Vec orthonormal_rows(CSpan rows, int m, int d);

}  // namespace obl
