#include "openbook/spatial.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace obl {

namespace {
constexpr std::size_t kLeafSize = 12;
}

PointIndex::PointIndex(CSpan points, int dim) : points_(points), dim_(dim) {
  if (dim <= 0 || points.size() % static_cast<std::size_t>(dim) != 0)
    fail(ErrorCode::InvalidArgument, "point buffer does not match dimension");
  order_.resize(points.size() / dim);
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!order_.empty()) build(0, order_.size(), 0);
}

int PointIndex::build(std::size_t begin, std::size_t end, int depth) {
  const int id = static_cast<int>(nodes_.size());
  nodes_.push_back({});
  nodes_[id].begin = begin;
  nodes_[id].end = end;
  if (end - begin <= kLeafSize) return id;

  // split along the axis of largest spread
  int axis = 0;
  double spread = -1.0;
  for (int a = 0; a < dim_; ++a) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (std::size_t k = begin; k < end; ++k) {
      const double v = points_[order_[k] * dim_ + a];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > spread) {
      spread = hi - lo;
      axis = a;
    }
  }
  if (spread <= 0.0) return id;
  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::size_t a, std::size_t b) {
                     const double va = points_[a * dim_ + axis], vb = points_[b * dim_ + axis];
                     return va < vb || (va == vb && a < b);
                   });
  const double split = points_[order_[mid] * dim_ + axis];
  const int left = build(begin, mid, depth + 1);
  const int right = build(mid, end, depth + 1);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void PointIndex::search(int node, CSpan q, std::size_t skip, std::size_t& best, double& best_d2) const {
  const Node& nd = nodes_[node];
  if (nd.axis < 0) {
    for (std::size_t k = nd.begin; k < nd.end; ++k) {
      const std::size_t i = order_[k];
      if (i == skip) continue;
      const double d2 = dist2(point(i), q);
      if (d2 < best_d2 || (d2 == best_d2 && i < best)) {
        best_d2 = d2;
        best = i;
      }
    }
    return;
  }
  const double diff = q[nd.axis] - nd.split;
  const int near = diff < 0.0 ? nd.left : nd.right;
  const int far = diff < 0.0 ? nd.right : nd.left;
  search(near, q, skip, best, best_d2);
  if (diff * diff <= best_d2) search(far, q, skip, best, best_d2);
}

std::size_t PointIndex::nearest(CSpan q, double& d2, std::size_t skip) const {
  std::size_t best = static_cast<std::size_t>(-1);
  d2 = std::numeric_limits<double>::infinity();
  if (!nodes_.empty()) search(0, q, skip, best, d2);
  return best;
}

}  // namespace obl
