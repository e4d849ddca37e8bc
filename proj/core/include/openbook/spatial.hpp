#pragma once

#include "openbook/common.hpp"

namespace obl {

// Static k-d tree over a row-major point buffer. The buffer must outlive
// the index.
class PointIndex {
 public:
  PointIndex(CSpan points, int dim);

  std::size_t size() const { return order_.size(); }
  // Nearest point to q; skip excludes one index (use SIZE_MAX for none).
  // Returns the index and writes the squared distance.
  std::size_t nearest(CSpan q, double& d2, std::size_t skip = static_cast<std::size_t>(-1)) const;

 private:
  struct Node {
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    int left = -1, right = -1;
    std::size_t begin = 0, end = 0;
  };
  int build(std::size_t begin, std::size_t end, int depth);
  void search(int node, CSpan q, std::size_t skip, std::size_t& best, double& best_d2) const;
  CSpan point(std::size_t i) const { return points_.subspan(i * dim_, static_cast<std::size_t>(dim_)); }

  CSpan points_;
  int dim_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

}  // namespace obl
