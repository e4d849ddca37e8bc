#pragma once

#include <iosfwd>
#include <optional>

#include "openbook/measures.hpp"
#include "openbook/network_simplex.hpp"

namespace obl {

struct TransportPlan {
  std::vector<Flow> pairs;
  std::vector<double> leftover_source;
  std::vector<double> leftover_target;
};

struct TransportResult {
  double cost = 0.0;
  TransportPlan plan;
  std::int64_t pivots = 0;
};

// Balanced squared-distance transport. Masses must agree to 1e-9.
TransportResult wasserstein2(const DiscreteMeasure& a, const DiscreteMeasure& b, const SimplexOptions& options = {});

// Each point may instead be created or destroyed at cost
// penalty_scale * dist(x, V)^2 per unit mass. Leftovers are nonnegative.
TransportResult unbalanced_distance(const DiscreteMeasure& a, const DiscreteMeasure& b, const Spine& spine,
                                    double penalty_scale = 1.0, const SimplexOptions& options = {});

// Recomputes the objective of a plan, summing pairs then leftovers.
double plan_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, const Spine& spine, const TransportPlan& plan,
                 double penalty_scale = 1.0);

// Radial cutoff: 1 on [0,1/2], cos^2(pi(t-1/2)) on [1/2,1], 0 beyond.
struct BumpFunction {
  double radius = 1.0;

  static double profile(double t);
  double operator()(CSpan x, CSpan center) const;
};

struct ConeSampling {
  int count = 0;          // 0: four times the current's samples inside the ball
  int per_sheet = 0;      // overrides count when positive
  std::uint64_t seed = 1;
  bool noise_floor = true;
};

struct StrongExcess {
  double value = 0.0;        // r^{-(m+2)} d(phi T, phi C)
  double l2_part = 0.0;      // r^{-(m+2)} int phi dist(x,C)^2 d|T|, bounded by the plan termwise
  double reverse_part = 0.0; // r^{-(m+2)} int phi dist(y, spt T u V)^2 d|C|, same
  double noise_floor = 0.0;  // value for an independent cone sample in place of T, 0 if skipped
  double radius = 1.0;
  std::size_t current_samples = 0;
  std::size_t cone_samples = 0;
  DiscreteMeasure source;    // phi-weighted current inside the ball
  DiscreteMeasure target;    // phi-weighted cone sample inside the ball
  TransportPlan plan;
};

// Samples the cone, then evaluates against it.
StrongExcess strong_excess(const DiscreteCurrent& t, const OpenBook& cone, CSpan center, double r,
                           const BumpFunction& bump, const ConeSampling& sampling = {},
                           const SimplexOptions& options = {});

// Uses a caller-provided cone sample (e.g. laid out like t) and an optional
// second cone sample for the noise floor.
StrongExcess strong_excess_against(const DiscreteCurrent& t, const DiscreteCurrent& cone_sample, const OpenBook& cone,
                                   CSpan center, double r, const BumpFunction& bump,
                                   const DiscreteCurrent* floor_sample = nullptr, const SimplexOptions& options = {});

// Samples C inside B_r(center) at roughly `count` points in the ball.
DiscreteCurrent sample_cone_ball(const OpenBook& cone, CSpan center, double r, int count, std::uint64_t seed,
                                 int per_sheet = 0);

// CSV with columns src,dst,mass,void; void arcs use -1 for the missing end.
void write_plan_csv(std::ostream& os, const TransportPlan& plan);

}  // namespace obl
