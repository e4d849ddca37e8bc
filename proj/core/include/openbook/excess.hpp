#pragma once

#include <optional>
#include <string>

#include "openbook/transport.hpp"

namespace obl {

// r^{-(m+2)} sum over samples in B_r(p) of w * dist(x, C)^2.
double l2_excess(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r);

struct ReverseExcess {
  double value = 0.0;
  double bias = 0.0;  // same integral with the current's own nearest-neighbour spacing
};

// Bump-weighted integral over a cone sample of dist(y, spt T)^2.
ReverseExcess reverse_l2_excess(const DiscreteCurrent& t, const DiscreteCurrent& cone_sample, CSpan center, double r,
                                const BumpFunction& bump = {});
ReverseExcess reverse_l2_excess(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r,
                                const ConeSampling& sampling = {});

// (omega_m r^m)^{-1} sum of w |T - pi|^2 / 2 over B_r(p); plane is m orthonormal rows.
double tilt_excess(const DiscreteCurrent& t, CSpan plane, CSpan center, double r);

double amended_excess(double strong, double kappa, double a_gamma, double a_sigma, double r);

struct ExcessReport {
  double l2 = 0.0;
  double reverse_l2 = 0.0;
  std::optional<double> strong;
  std::optional<double> noise_floor;
  std::optional<double> tilt;
  double amended = 0.0;
  double kappa = 1.0, a_gamma = 0.0, a_sigma = 0.0;
  OpenBook cone;
  double radius = 1.0;
  Vec center;
};

struct FitOptions {
  int max_sheets = 8;
  int q = 0;                        // target total multiplicity, 0: use t.q
  double cluster_threshold = 0.05;  // radians; raised to 4x the measured angular noise
  std::size_t min_samples = 20;
};

struct FitResult {
  OpenBook book;
  double threshold = 0.0;  // threshold actually used
  double angular_noise = 0.0;
  std::vector<double> raw_multiplicity;  // cluster mass / sector area
  std::size_t samples = 0;
};

// Mass of the unit-multiplicity half-plane V + R^+ nu inside
// {|x - p| < r, dist(x, V) > r/8}.
double sector_area(const Spine& spine, CSpan nu, CSpan center, double r);

// Greedy angular clustering of sigma directions in {|x-p| < r, dist(x,V) > r/8}.
FitResult fit_open_book(const DiscreteCurrent& t, const Spine& spine, CSpan center, double r,
                        const FitOptions& options = {});

enum class ExcessEvaluator { Strong, L2 };

struct PruneOptions {
  ExcessEvaluator evaluator = ExcessEvaluator::Strong;
  ConeSampling sampling;
  SimplexOptions lp;
};

struct PruneStep {
  OpenBook cone;
  double excess = 0.0;
  double alpha = 0.0;
  double threshold = 0.0;  // eps_{N_k} alpha^2
  bool stop = false;
  int merged_into = -1;    // sheet i keeps its normal and absorbs sheet j
  int merged_from = -1;
};

struct PruneTrace {
  std::vector<PruneStep> steps;
  OpenBook final_cone;
  int final_sheets = 0;
  std::vector<std::vector<int>> partition;  // final sheet -> original sheets
  std::string evaluator;
  bool stopped = false;  // final step satisfied the stop rule
  std::vector<double> inflation;  // excess_{k+1} / excess_k per merge
};

// Merges the alpha-achieving pair until excess <= eps[N_k - 1] * alpha^2 or one
// sheet remains. eps holds eps_1..eps_Q.
PruneTrace prune(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r, const std::vector<double>& eps,
                 const PruneOptions& options = {});

// Sheet i absorbs sheet j.
OpenBook merge_sheets(const OpenBook& cone, int i, int j);

// Index pair realizing the book angle (lowest indices on ties).
std::pair<int, int> closest_sheets(const OpenBook& cone);

}  // namespace obl
