#pragma once

#include <string>
#include <vector>

#include "openbook/geometry.hpp"
#include "openbook/measures.hpp"

namespace obl::testing {

// Point masses whose weights are integer multiples of `unit`.
struct UnitInstance {
  int dim = 3;
  std::vector<Vec> a_points, b_points;
  std::vector<int> a_units, b_units;
  double unit = 0.125;

  DiscreteMeasure a() const;
  DiscreteMeasure b() const;
};

// Exhaustive optimum over every integral routing of the units; exact since
// transportation polytopes with integral margins have integral vertices.
double balanced_transport_oracle(const UnitInstance& inst);
// Same with creation and destruction at dist(x, V)^2 per unit mass.
double unbalanced_transport_oracle(const UnitInstance& inst, const Spine& spine);

// Verifies the layer subdivision conditions and the multiplicity hand-off
// from the book alone; returns one message per violation.
std::vector<std::string> check_layers(const OpenBook& book, const LayerDecomposition& layers);

// Uniform random open book with the standard spine; normals in V-perp with
// pairwise angles at least min_angle.
OpenBook random_book(Rng& rng, int m, int n, int sheets, int max_multiplicity, double min_angle = 0.05);

// Brute-force matching cost over all permutations.
double permutation_oracle(const std::vector<Vec>& a, const std::vector<Vec>& b);

}  // namespace obl::testing
