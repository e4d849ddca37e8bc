#pragma once

#include "openbook/common.hpp"

namespace obl {

// Unordered Q-tuple of vectors in R^n; atoms kept in lexicographic order.
class QPoint {
 public:
  QPoint() = default;
  QPoint(int q, int n);  // Q [[0]]
  QPoint(int q, int n, std::vector<double> atoms);
  static QPoint from_atoms(const std::vector<Vec>& atoms);

  int q() const { return q_; }
  int n() const { return n_; }
  CSpan atom(int i) const { return {data_.data() + static_cast<std::size_t>(i) * n_, static_cast<std::size_t>(n_)}; }
  const std::vector<double>& data() const { return data_; }
  std::vector<Vec> atoms() const;
  bool operator==(const QPoint& o) const { return q_ == o.q_ && n_ == o.n_ && data_ == o.data_; }

 private:
  void canonicalize();
  int q_ = 0;
  int n_ = 0;
  std::vector<double> data_;
};

struct Matching {
  std::vector<int> perm;  // atom i of a is matched to atom perm[i] of b
  double cost = 0.0;      // summed squared distances
};

// Optimal assignment for a Q x Q cost matrix (row-major). Exhaustive for
// Q <= 6, Hungarian above.
Matching min_cost_assignment(const std::vector<double>& cost, int q);
Matching exhaustive_assignment(const std::vector<double>& cost, int q);
Matching hungarian_assignment(const std::vector<double>& cost, int q);

// Second-best assignment cost (for ambiguity margins); exhaustive, Q <= 6.
double second_best_assignment_cost(const std::vector<double>& cost, int q, const std::vector<int>& best);

Matching q_matching(const QPoint& a, const QPoint& b);
double q_metric(const QPoint& a, const QPoint& b);
Vec q_average(const QPoint& a);
QPoint q_subtract_average(const QPoint& a);
QPoint q_translate(const QPoint& a, CSpan v);

// x -> sum Q_i [[v_i x_m]]
struct LinearQMap {
  std::vector<Vec> directions;
  std::vector<int> multiplicities;

  int q() const;
  int n() const { return directions.empty() ? 0 : static_cast<int>(directions.front().size()); }
  QPoint evaluate(double xm) const;
  double separation() const;  // min |v_i - v_j| over distinct pairs, 1 if single-valued
  void validate() const;
};

}  // namespace obl
