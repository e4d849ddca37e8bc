#pragma once

#include <cstdint>

#include "openbook/common.hpp"

namespace obl {

// Balanced transportation problem on the complete bipartite graph
// sources x targets, uncapacitated arcs.
struct TransportationProblem {
  int sources = 0;
  int targets = 0;
  std::vector<double> cost;    // sources x targets, row-major
  std::vector<double> supply;  // per source
  std::vector<double> demand;  // per target
};

struct Flow {
  int source;
  int target;
  double mass;
};

struct TransportationResult {
  double cost = 0.0;
  std::vector<Flow> flows;  // positive flows only, sorted by (source, target)
  std::int64_t pivots = 0;
};

struct SimplexOptions {
  double eps = 1e-10;  // reduced-cost tolerance, relative to the largest cost
  std::int64_t max_pivots = 0;  // 0 = automatic
};

// Primal network simplex with strongly feasible trees and block pricing.
TransportationResult solve_transportation(const TransportationProblem& problem, const SimplexOptions& options = {});

}  // namespace obl
