#include "quddpm/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace quddpm {

namespace {

constexpr double kMassScale = 1099511627776.0;  // 2^40

// Spanning-tree network simplex for an uncapacitated transportation problem,
// after the LEMON formulation (thread/parent tree with succ counts).
class NetworkSimplex {
 public:
  NetworkSimplex(const std::vector<std::int64_t>& supply, int n_sources,
                 const Eigen::MatrixXd& cost)
      : m_(n_sources),
        n_(static_cast<int>(supply.size()) - n_sources),
        node_num_(static_cast<int>(supply.size())),
        arc_num_(m_ * n_),
        all_arc_num_(arc_num_ + node_num_),
        root_(node_num_),
        costs_(cost) {
    source_.resize(all_arc_num_);
    target_.resize(all_arc_num_);
    cost_.resize(all_arc_num_);
    flow_.assign(all_arc_num_, 0);
    state_.assign(all_arc_num_, kStateLower);
    double max_cost = 0.0;
    for (int i = 0; i < m_; ++i) {
      for (int j = 0; j < n_; ++j) {
        const int e = i * n_ + j;
        source_[e] = i;
        target_[e] = m_ + j;
        cost_[e] = cost(i, j);
        max_cost = std::max(max_cost, std::abs(cost_[e]));
      }
    }
    eps_ = 1e-13 * (max_cost + 1.0);
    const double art_cost = (max_cost + 1.0) * (node_num_ + 1);

    const int nn = node_num_ + 1;
    parent_.assign(nn, 0);
    pred_.assign(nn, 0);
    thread_.assign(nn, 0);
    rev_thread_.assign(nn, 0);
    succ_num_.assign(nn, 0);
    last_succ_.assign(nn, 0);
    pred_dir_.assign(nn, 0);
    pi_.assign(nn, 0.0);

    std::int64_t sum_supply = 0;
    for (int u = 0; u < node_num_; ++u) sum_supply += supply[static_cast<std::size_t>(u)];
    if (sum_supply != 0) throw std::logic_error("NetworkSimplex: unbalanced supplies");

    parent_[root_] = -1;
    pred_[root_] = -1;
    thread_[root_] = 0;
    rev_thread_[0] = root_;
    succ_num_[root_] = node_num_ + 1;
    last_succ_[root_] = root_ - 1;
    pi_[root_] = 0.0;

    for (int u = 0, e = arc_num_; u != node_num_; ++u, ++e) {
      parent_[u] = root_;
      pred_[u] = e;
      thread_[u] = u + 1;
      rev_thread_[u + 1] = u;
      succ_num_[u] = 1;
      last_succ_[u] = u;
      state_[e] = kStateTree;
      const std::int64_t s = supply[static_cast<std::size_t>(u)];
      if (s >= 0) {
        pred_dir_[u] = kDirUp;
        pi_[u] = 0.0;
        source_[e] = u;
        target_[e] = root_;
        flow_[e] = s;
        cost_[e] = 0.0;
      } else {
        pred_dir_[u] = kDirDown;
        pi_[u] = art_cost;
        source_[e] = root_;
        target_[e] = u;
        flow_[e] = -s;
        cost_[e] = art_cost;
      }
    }
    block_size_ = std::max(static_cast<int>(std::sqrt(static_cast<double>(arc_num_))), 10);
  }

  long run() {
    long iterations = 0;
    while (find_entering_arc()) {
      find_join_node();
      const bool change = find_leaving_arc();
      if (delta_ == kInfinity) throw std::runtime_error("solve_transport: unbounded problem");
      change_flow(change);
      if (change) {
        update_tree_structure();
        update_potential();
      }
      ++iterations;
    }
    for (int e = arc_num_; e < all_arc_num_; ++e) {
      if (flow_[e] != 0) throw std::runtime_error("solve_transport: infeasible marginals");
    }
    return iterations;
  }

  [[nodiscard]] std::int64_t flow(int i, int j) const { return flow_[i * n_ + j]; }
  [[nodiscard]] double potential(int u) const { return pi_[u]; }

 private:
  static constexpr int kStateUpper = -1;
  static constexpr int kStateTree = 0;
  static constexpr int kStateLower = 1;
  static constexpr int kDirUp = 1;
  static constexpr int kDirDown = -1;
  static constexpr std::int64_t kInfinity = std::numeric_limits<std::int64_t>::max();

  [[nodiscard]] double reduced(int e) const {
    return state_[e] * (cost_[e] + pi_[source_[e]] - pi_[target_[e]]);
  }

  bool find_entering_arc() {
    double min = -eps_;
    int cnt = block_size_;
    int e = next_arc_;
    bool found = false;
    for (; e != arc_num_; ++e) {
      const double c = reduced(e);
      if (c < min) {
        min = c;
        in_arc_ = e;
        found = true;
      }
      if (--cnt == 0) {
        if (found) {
          next_arc_ = e + 1 == arc_num_ ? 0 : e + 1;
          return true;
        }
        cnt = block_size_;
      }
    }
    for (e = 0; e != next_arc_; ++e) {
      const double c = reduced(e);
      if (c < min) {
        min = c;
        in_arc_ = e;
        found = true;
      }
      if (--cnt == 0) {
        if (found) {
          next_arc_ = e + 1;
          return true;
        }
        cnt = block_size_;
      }
    }
    return found;
  }

  void find_join_node() {
    int u = source_[in_arc_];
    int v = target_[in_arc_];
    while (u != v) {
      if (succ_num_[u] < succ_num_[v]) {
        u = parent_[u];
      } else {
        v = parent_[v];
      }
    }
    join_ = u;
  }

  bool find_leaving_arc() {
    int first;
    int second;
    if (state_[in_arc_] == kStateLower) {
      first = source_[in_arc_];
      second = target_[in_arc_];
    } else {
      first = target_[in_arc_];
      second = source_[in_arc_];
    }
    delta_ = kInfinity;
    int result = 0;
    for (int u = first; u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kDirUp) {
        const std::int64_t d = flow_[pred_[u]];
        if (d < delta_) {
          delta_ = d;
          u_out_ = u;
          result = 1;
        }
      }
    }
    for (int u = second; u != join_; u = parent_[u]) {
      if (pred_dir_[u] == kDirDown) {
        const std::int64_t d = flow_[pred_[u]];
        if (d <= delta_) {
          delta_ = d;
          u_out_ = u;
          result = 2;
        }
      }
    }
    if (result == 1) {
      u_in_ = first;
      v_in_ = second;
    } else {
      u_in_ = second;
      v_in_ = first;
    }
    return result != 0;
  }

  void change_flow(bool change) {
    if (delta_ > 0) {
      const std::int64_t val = state_[in_arc_] * delta_;
      flow_[in_arc_] += val;
      for (int u = source_[in_arc_]; u != join_; u = parent_[u]) {
        flow_[pred_[u]] -= pred_dir_[u] * val;
      }
      for (int u = target_[in_arc_]; u != join_; u = parent_[u]) {
        flow_[pred_[u]] += pred_dir_[u] * val;
      }
    }
    if (change) {
      state_[in_arc_] = kStateTree;
      state_[pred_[u_out_]] = flow_[pred_[u_out_]] == 0 ? kStateLower : kStateUpper;
    } else {
      state_[in_arc_] = -state_[in_arc_];
    }
  }

  void update_tree_structure() {
    const int old_rev_thread = rev_thread_[u_out_];
    const int old_succ_num = succ_num_[u_out_];
    const int old_last_succ = last_succ_[u_out_];
    v_out_ = parent_[u_out_];

    if (u_in_ == u_out_) {
      parent_[u_in_] = v_in_;
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
      if (thread_[v_in_] != u_out_) {
        int after = thread_[old_last_succ];
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
        after = thread_[v_in_];
        thread_[v_in_] = u_out_;
        rev_thread_[u_out_] = v_in_;
        thread_[old_last_succ] = after;
        rev_thread_[after] = old_last_succ;
      }
    } else {
      const int thread_continue =
          old_rev_thread == v_in_ ? thread_[old_last_succ] : thread_[v_in_];

      // Re-hang the stem u_in .. u_out under v_in, reversing parent links.
      int stem = u_in_;
      int par_stem = v_in_;
      int last = last_succ_[u_in_];
      int after = thread_[last];
      thread_[v_in_] = u_in_;
      dirty_revs_.clear();
      dirty_revs_.push_back(v_in_);
      while (stem != u_out_) {
        const int next_stem = parent_[stem];
        thread_[last] = next_stem;
        dirty_revs_.push_back(last);

        const int before = rev_thread_[stem];
        thread_[before] = after;
        rev_thread_[after] = before;

        parent_[stem] = par_stem;
        par_stem = stem;
        stem = next_stem;

        last = last_succ_[stem] == last_succ_[par_stem] ? rev_thread_[par_stem] : last_succ_[stem];
        after = thread_[last];
      }
      parent_[u_out_] = par_stem;
      thread_[last] = thread_continue;
      rev_thread_[thread_continue] = last;
      last_succ_[u_out_] = last;

      if (old_rev_thread != v_in_) {
        thread_[old_rev_thread] = after;
        rev_thread_[after] = old_rev_thread;
      }
      for (int u : dirty_revs_) rev_thread_[thread_[u]] = u;

      int tmp_sc = 0;
      const int tmp_ls = last_succ_[u_out_];
      for (int u = u_out_, p = parent_[u]; u != u_in_; u = p, p = parent_[u]) {
        pred_[u] = pred_[p];
        pred_dir_[u] = -pred_dir_[p];
        tmp_sc += succ_num_[u] - succ_num_[p];
        succ_num_[u] = tmp_sc;
        last_succ_[p] = tmp_ls;
      }
      pred_[u_in_] = in_arc_;
      pred_dir_[u_in_] = u_in_ == source_[in_arc_] ? kDirUp : kDirDown;
      succ_num_[u_in_] = old_succ_num;
    }

    const int up_limit_out = last_succ_[join_] == v_in_ ? join_ : -1;
    const int last_succ_out = last_succ_[u_out_];
    for (int u = v_in_; u != -1 && last_succ_[u] == v_in_; u = parent_[u]) {
      last_succ_[u] = last_succ_out;
    }
    if (join_ != old_rev_thread && v_in_ != old_rev_thread) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = old_rev_thread;
      }
    } else if (last_succ_out != old_last_succ) {
      for (int u = v_out_; u != up_limit_out && last_succ_[u] == old_last_succ; u = parent_[u]) {
        last_succ_[u] = last_succ_out;
      }
    }
    for (int u = v_in_; u != join_; u = parent_[u]) succ_num_[u] += old_succ_num;
    for (int u = v_out_; u != join_; u = parent_[u]) succ_num_[u] -= old_succ_num;
  }

  void update_potential() {
    const double sigma = pi_[v_in_] - pi_[u_in_] - pred_dir_[u_in_] * cost_[in_arc_];
    const int end = thread_[last_succ_[u_in_]];
    for (int u = u_in_; u != end; u = thread_[u]) pi_[u] += sigma;
  }

  int m_;
  int n_;
  int node_num_;
  int arc_num_;
  int all_arc_num_;
  int root_;
  const Eigen::MatrixXd& costs_;
  double eps_ = 0.0;
  int block_size_ = 10;
  int next_arc_ = 0;

  std::vector<int> source_;
  std::vector<int> target_;
  std::vector<double> cost_;
  std::vector<std::int64_t> flow_;
  std::vector<signed char> state_;

  std::vector<int> parent_;
  std::vector<int> pred_;
  std::vector<int> thread_;
  std::vector<int> rev_thread_;
  std::vector<int> succ_num_;
  std::vector<int> last_succ_;
  std::vector<int> pred_dir_;
  std::vector<double> pi_;
  std::vector<int> dirty_revs_;

  int in_arc_ = 0;
  int join_ = 0;
  int u_in_ = 0;
  int v_in_ = 0;
  int u_out_ = 0;
  int v_out_ = 0;
  std::int64_t delta_ = 0;
};

std::vector<std::int64_t> quantize(const Eigen::VectorXd& w) {
  std::vector<std::int64_t> q(static_cast<std::size_t>(w.size()));
  std::int64_t total = 0;
  Eigen::Index largest = 0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    q[static_cast<std::size_t>(i)] = std::llround(w(i) / w.sum() * kMassScale);
    total += q[static_cast<std::size_t>(i)];
    if (w(i) > w(largest)) largest = i;
  }
  q[static_cast<std::size_t>(largest)] += static_cast<std::int64_t>(kMassScale) - total;
  return q;
}

}  // namespace

TransportResult solve_transport(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& cost, bool want_plan) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("solve_transport: empty marginal");
  if (cost.rows() != a.size() || cost.cols() != b.size()) {
    throw std::invalid_argument("solve_transport: cost matrix shape does not match marginals");
  }
  if ((a.array() < 0).any() || (b.array() < 0).any() || !(a.sum() > 0) || !(b.sum() > 0)) {
    throw std::invalid_argument("solve_transport: marginals must be non-negative with positive mass");
  }
  if (!cost.allFinite()) throw std::invalid_argument("solve_transport: non-finite cost");
  if (std::abs(a.sum() - b.sum()) > 1e-9 * std::max(a.sum(), b.sum())) {
    throw std::invalid_argument("solve_transport: marginals carry different total mass");
  }

  const auto qa = quantize(a);
  const auto qb = quantize(b);
  std::vector<std::int64_t> supply(qa);
  for (auto v : qb) supply.push_back(-v);
  const int m = static_cast<int>(a.size());
  const int n = static_cast<int>(b.size());

  NetworkSimplex solver(supply, m, cost);
  TransportResult out;
  out.iterations = solver.run();
  const double scale = a.sum() / kMassScale;
  out.source_potential.resize(m);
  out.sink_potential.resize(n);
  for (int i = 0; i < m; ++i) out.source_potential(i) = -solver.potential(i);
  for (int j = 0; j < n; ++j) out.sink_potential(j) = solver.potential(m + j);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::int64_t f = solver.flow(i, j);
      if (f == 0) continue;
      out.cost += static_cast<double>(f) * scale * cost(i, j);
      if (want_plan) out.plan.push_back({i, j, static_cast<double>(f) * scale});
    }
  }
  return out;
}

}  // namespace quddpm
