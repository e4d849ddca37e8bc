#include "openbook/network_simplex.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace obl {

namespace {

class Simplex {
 public:
  Simplex(const TransportationProblem& p, const SimplexOptions& opt) : p_(p), opt_(opt) {
    ns_ = p.sources;
    nt_ = p.targets;
    nodes_ = ns_ + nt_;
    root_ = nodes_;
    real_arcs_ = static_cast<std::int64_t>(ns_) * nt_;
    total_arcs_ = real_arcs_ + nodes_;

    double cmax = 0.0;
    for (double c : p.cost) cmax = std::max(cmax, std::abs(c));
    scale_ = cmax > 0.0 ? 1.0 / cmax : 1.0;
    art_cost_ = (nodes_ + 1.0) * 2.0;  // scaled costs lie in [-1, 1]

    flow_.assign(static_cast<std::size_t>(total_arcs_), 0.0);
    in_tree_.assign(static_cast<std::size_t>(total_arcs_), 0);
    const std::size_t nn = static_cast<std::size_t>(nodes_) + 1;
    parent_.assign(nn, -1);
    pred_.assign(nn, -1);
    pi_.assign(nn, 0.0);
    first_child_.assign(nn, -1);
    next_sib_.assign(nn, -1);
    prev_sib_.assign(nn, -1);
    mark_.assign(nn, 0);
    supply_.assign(static_cast<std::size_t>(nodes_), 0.0);
    for (int i = 0; i < ns_; ++i) supply_[i] = p.supply[i];
    for (int j = 0; j < nt_; ++j) supply_[ns_ + j] = -p.demand[j];

    for (int v = 0; v < nodes_; ++v) {
      const std::int64_t a = real_arcs_ + v;
      in_tree_[a] = 1;
      parent_[v] = root_;
      pred_[v] = a;
      flow_[a] = std::abs(supply_[v]);
      // tree arcs have zero reduced cost
      pi_[v] = supply_[v] >= 0.0 ? -art_cost_ : art_cost_;
      attach(v, root_);
    }
    block_ = std::max<std::int64_t>(10, static_cast<std::int64_t>(std::sqrt(static_cast<double>(real_arcs_))));
  }

  TransportationResult run() {
    TransportationResult res;
    const std::int64_t cap = opt_.max_pivots > 0 ? opt_.max_pivots : 200 * (total_arcs_ + 1000);
    std::int64_t next_arc = 0;
    while (true) {
      const std::int64_t e = find_entering(next_arc);
      if (e < 0) break;
      pivot(e);
      if (++res.pivots > cap) fail(ErrorCode::InvalidArgument, "network simplex exceeded pivot limit");
    }
    for (int v = 0; v < nodes_; ++v) {
      const std::int64_t a = real_arcs_ + v;
      if (flow_[a] > 1e-9 * (1.0 + std::abs(supply_[v])))
        fail(ErrorCode::UnbalancedMass, "transportation problem is infeasible");
    }
    for (std::int64_t a = 0; a < real_arcs_; ++a) {
      if (!in_tree_[a] || flow_[a] <= 0.0) continue;
      const int i = static_cast<int>(a / nt_);
      const int j = static_cast<int>(a % nt_);
      res.flows.push_back({i, j, flow_[a]});
      res.cost += flow_[a] * p_.cost[a];
    }
    return res;
  }

 private:
  int src(std::int64_t a) const {
    if (a < real_arcs_) return static_cast<int>(a / nt_);
    const int v = static_cast<int>(a - real_arcs_);
    return supply_[v] >= 0.0 ? v : root_;
  }
  int tgt(std::int64_t a) const {
    if (a < real_arcs_) return ns_ + static_cast<int>(a % nt_);
    const int v = static_cast<int>(a - real_arcs_);
    return supply_[v] >= 0.0 ? root_ : v;
  }
  double cost(std::int64_t a) const { return a < real_arcs_ ? p_.cost[a] * scale_ : art_cost_; }
  double reduced(std::int64_t a) const { return cost(a) + pi_[src(a)] - pi_[tgt(a)]; }

  void attach(int v, int par) {
    prev_sib_[v] = -1;
    next_sib_[v] = first_child_[par];
    if (first_child_[par] >= 0) prev_sib_[first_child_[par]] = v;
    first_child_[par] = v;
  }
  void detach(int v) {
    const int par = parent_[v];
    if (prev_sib_[v] >= 0)
      next_sib_[prev_sib_[v]] = next_sib_[v];
    else
      first_child_[par] = next_sib_[v];
    if (next_sib_[v] >= 0) prev_sib_[next_sib_[v]] = prev_sib_[v];
    next_sib_[v] = prev_sib_[v] = -1;
  }

  std::int64_t find_entering(std::int64_t& next_arc) {
    const double tol = -opt_.eps;
    double best = 0.0;
    std::int64_t arg = -1;
    std::int64_t count = 0;
    for (std::int64_t k = 0; k < real_arcs_; ++k) {
      const std::int64_t a = next_arc;
      if (++next_arc == real_arcs_) next_arc = 0;
      if (!in_tree_[a]) {
        const int i = static_cast<int>(a / nt_);
        const double rc = p_.cost[a] * scale_ + pi_[i] - pi_[ns_ + (a % nt_)];
        if (rc < best) {
          best = rc;
          arg = a;
        }
      }
      if (++count == block_) {
        if (best < tol) return arg;
        count = 0;
      }
    }
    return best < tol ? arg : -1;
  }

  void pivot(std::int64_t e) {
    const int first = src(e);
    const int second = tgt(e);
    // join: lowest common ancestor
    ++stamp_;
    for (int u = first; u >= 0; u = parent_[u]) mark_[u] = stamp_;
    int join = second;
    while (mark_[join] != stamp_) join = parent_[join];

    // Leaving arc, strongly feasible rule: last blocking arc in cycle order.
    double delta = std::numeric_limits<double>::infinity();
    int u_out = -1;
    int side = 0;
    for (int u = first; u != join; u = parent_[u]) {
      const std::int64_t a = pred_[u];
      if (src(a) == u) {  // arc points up, flow decreases on this side
        if (flow_[a] < delta) {
          delta = flow_[a];
          u_out = u;
          side = 1;
        }
      }
    }
    for (int u = second; u != join; u = parent_[u]) {
      const std::int64_t a = pred_[u];
      if (src(a) != u) {  // arc points down, flow decreases on this side
        if (flow_[a] <= delta) {
          delta = flow_[a];
          u_out = u;
          side = 2;
        }
      }
    }
    if (u_out < 0) fail(ErrorCode::InvalidArgument, "unbounded transportation problem");

    // Augment.
    if (delta > 0.0) {
      flow_[e] += delta;
      for (int u = first; u != join; u = parent_[u]) {
        const std::int64_t a = pred_[u];
        flow_[a] += (src(a) == u) ? -delta : delta;
      }
      for (int u = second; u != join; u = parent_[u]) {
        const std::int64_t a = pred_[u];
        flow_[a] += (src(a) == u) ? delta : -delta;
      }
    }
    const std::int64_t leaving = pred_[u_out];
    flow_[leaving] = 0.0;

    // Re-hang the subtree below u_out from the entering arc.
    const int u_in = side == 1 ? first : second;
    const int v_in = side == 1 ? second : first;
    const double rc = reduced(e);
    stem_.clear();
    for (int u = u_in;; u = parent_[u]) {
      stem_.push_back(u);
      if (u == u_out) break;
    }
    old_pred_.assign(stem_.size(), -1);
    for (std::size_t i = 0; i < stem_.size(); ++i) old_pred_[i] = pred_[stem_[i]];
    for (int u : stem_) detach(u);
    for (std::size_t i = stem_.size() - 1; i >= 1; --i) {
      parent_[stem_[i]] = stem_[i - 1];
      pred_[stem_[i]] = old_pred_[i - 1];
      attach(stem_[i], stem_[i - 1]);
    }
    parent_[u_in] = v_in;
    pred_[u_in] = e;
    attach(u_in, v_in);
    in_tree_[leaving] = 0;
    in_tree_[e] = 1;

    const double shift = (u_in == src(e)) ? -rc : rc;
    stack_.clear();
    stack_.push_back(u_in);
    while (!stack_.empty()) {
      const int v = stack_.back();
      stack_.pop_back();
      pi_[v] += shift;
      for (int c = first_child_[v]; c >= 0; c = next_sib_[c]) stack_.push_back(c);
    }
  }

  const TransportationProblem& p_;
  SimplexOptions opt_;
  int ns_ = 0, nt_ = 0, nodes_ = 0, root_ = 0;
  std::int64_t real_arcs_ = 0, total_arcs_ = 0, block_ = 0;
  double scale_ = 1.0, art_cost_ = 1.0;
  std::vector<double> flow_;
  std::vector<char> in_tree_;
  std::vector<int> parent_;
  std::vector<std::int64_t> pred_;
  std::vector<double> pi_;
  std::vector<int> first_child_, next_sib_, prev_sib_;
  std::vector<std::uint32_t> mark_;
  std::uint32_t stamp_ = 0;
  std::vector<double> supply_;
  std::vector<int> stem_, stack_;
  std::vector<std::int64_t> old_pred_;
};

}  // namespace

TransportationResult solve_transportation(const TransportationProblem& problem, const SimplexOptions& options) {
  if (problem.sources <= 0 || problem.targets <= 0) fail(ErrorCode::InvalidArgument, "empty transportation problem");
  if (problem.cost.size() != static_cast<std::size_t>(problem.sources) * problem.targets ||
      problem.supply.size() != static_cast<std::size_t>(problem.sources) ||
      problem.demand.size() != static_cast<std::size_t>(problem.targets))
    fail(ErrorCode::InvalidArgument, "transportation problem has inconsistent sizes");
  const double a = std::accumulate(problem.supply.begin(), problem.supply.end(), 0.0);
  const double b = std::accumulate(problem.demand.begin(), problem.demand.end(), 0.0);
  if (std::abs(a - b) > 1e-9 * std::max(1.0, std::max(a, b))) fail(ErrorCode::UnbalancedMass, "supply and demand differ");
  for (double s : problem.supply)
    if (s < 0.0) fail(ErrorCode::InvalidArgument, "negative supply");
  for (double d : problem.demand)
    if (d < 0.0) fail(ErrorCode::InvalidArgument, "negative demand");
  Simplex s(problem, options);
  return s.run();
}

}  // namespace obl
