#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <vector>

namespace quddpm {

struct TransportFlow {
  int source;
  int sink;
  double mass;
};

struct TransportResult {
  double cost = 0.0;
  std::vector<TransportFlow> plan;  ///< nonzero entries only; filled when requested
  long iterations = 0;
  /// Optimal duals: u_i + v_j <= C_ij with equality on the support of the plan.
  Eigen::VectorXd source_potential;
  Eigen::VectorXd sink_potential;
};

/// Exact discrete optimal transport min <P, C> s.t. P 1 = a, P^T 1 = b, P >= 0.
///
/// Primal network simplex with block-search pivoting on the complete bipartite
/// graph. Masses are carried as integers on a 2^40 grid so the pivots are
/// exact; the marginals are therefore honoured to about 1e-12.
TransportResult solve_transport(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                const Eigen::MatrixXd& cost, bool want_plan = false);

}  // namespace quddpm
