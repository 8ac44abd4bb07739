#pragma once
/// @file bpm.hpp
/// Boundary particle method: a boundary-only solver for L{u} = f that
/// replaces the particular solution by a truncated series of higher-order
/// homogeneous solutions (multiple reciprocity).
///
/// With the kernel chain L{u#_m} = u#_{m-1}, every order shares the same
/// symmetric boundary matrix Q, so the recursion from order M down to 0
/// reuses one LU factorization:
///
///   order n >= 1:  Q beta^n = traces[L^{n-1} f] - sum_{m=n+1}^{M} traces[E(beta^m, u#_{m-n})]
///   order 0:       Q beta^0 = prescribed data  - sum_{m=1}^{M}   traces[E(beta^m, u#_m)]
///
/// where E(beta, u) is the Hermite expansion with coefficients beta and
/// kernel u. The solution is u = sum_n E(beta^n, u#_n).

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "rbfkit/bkm.hpp"
#include "rbfkit/error.hpp"
#include "rbfkit/field.hpp"
#include "rbfkit/geometry.hpp"
#include "rbfkit/kernels.hpp"
#include "rbfkit/linalg.hpp"
#include "rbfkit/operators.hpp"

namespace rbfkit {

inline constexpr int kDefaultBpmOrder = 3;

struct MrmProblem {
  OperatorSpec op;
  BoundaryData bc;
  /// [f, L{f}, L^2{f}, ...]; needs at least `truncation` entries.
  std::vector<ScalarField> f_chain;
  int truncation = kDefaultBpmOrder;
};

/// Q with its factorization, reusable across all recursion orders.
struct BpmMatrix {
  Eigen::MatrixXd q;
  std::vector<HermiteSource> sources;
  DenseSolver solver;
};

inline BpmMatrix assemble_Q(const NodeSet& nodes, const OperatorSpec& op, const RadialKernel& u_sharp_0,
                            double max_condition = kNoConditionLimit) {
  BkmSystem sys = assemble_symmetric_system(nodes, op, u_sharp_0);
  DenseSolver solver(sys.matrix, max_condition, "boundary particle");
  return {std::move(sys.matrix), std::move(sys.sources), std::move(solver)};
}

enum class FactorizationPolicy { reuse, refactor_each_order };

struct BpmSolution {
  std::vector<HermiteSource> sources;
  /// beta^0 ... beta^M.
  std::vector<Eigen::VectorXd> beta_by_order;
  /// u#_0 ... u#_M.
  std::vector<RadialKernel> kernel_chain;
  double condition_estimate = 1.0;

  int truncation() const { return static_cast<int>(beta_by_order.size()) - 1; }

  /// ||beta^M||_inf, the magnitude of the truncated tail.
  double tail_norm() const {
    return beta_by_order.empty() ? 0.0 : beta_by_order.back().cwiseAbs().maxCoeff();
  }
};

namespace detail {

inline Eigen::VectorXd expansion_traces(const RadialKernel& kernel, const std::vector<HermiteSource>& sources,
                                        const Eigen::VectorXd& coeffs) {
  const auto n = static_cast<Eigen::Index>(sources.size());
  Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (coeffs[j] != 0.0) {
        t[i] += coeffs[j] * hermite_trace(kernel, sources[static_cast<std::size_t>(i)],
                                          sources[static_cast<std::size_t>(j)]);
      }
    }
  }
  return t;
}

inline Eigen::VectorXd field_traces(const ScalarField& f, const std::vector<HermiteSource>& sources) {
  Eigen::VectorXd t(static_cast<Eigen::Index>(sources.size()));
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    t[static_cast<Eigen::Index>(i)] =
        s.kind == SourceKind::dirichlet ? f.value(s.position) : f.gradient(s.position).dot(s.normal);
  }
  return t;
}

}  // namespace detail

/// Reversal recursion beta^M -> ... -> beta^0 on a single factorization of
/// Q. `kernel_chain` must hold u#_0 ... u#_M. With
/// FactorizationPolicy::refactor_each_order the matrix is refactored per
/// order, which must give bit-identical results.
inline BpmSolution solve_bpm(const NodeSet& nodes, const MrmProblem& problem,
                             const std::vector<RadialKernel>& kernel_chain,
                             FactorizationPolicy policy = FactorizationPolicy::reuse,
                             double max_condition = kNoConditionLimit) {
  const int m_max = problem.truncation;
  if (m_max < 0) throw ConfigurationError("truncation order must be non-negative");
  if (static_cast<int>(problem.f_chain.size()) < m_max) {
    throw ConfigurationError("f_chain has " + std::to_string(problem.f_chain.size()) +
                             " entries but truncation order " + std::to_string(m_max) + " needs " +
                             std::to_string(m_max));
  }
  if (static_cast<int>(kernel_chain.size()) < m_max + 1) {
    throw ConfigurationError("kernel chain must provide orders 0.." + std::to_string(m_max));
  }
  detail::check_boundary_data(nodes, problem.bc);

  BpmMatrix qm = assemble_Q(nodes, problem.op, kernel_chain[0], max_condition);
  auto solve = [&](const Eigen::VectorXd& rhs) -> Eigen::VectorXd {
    if (policy == FactorizationPolicy::reuse) return qm.solver.solve(rhs);
    return DenseSolver(qm.q, max_condition, "boundary particle").solve(rhs);
  };

  BpmSolution sol;
  sol.sources = qm.sources;
  sol.kernel_chain.assign(kernel_chain.begin(), kernel_chain.begin() + m_max + 1);
  sol.beta_by_order.assign(static_cast<std::size_t>(m_max) + 1, Eigen::VectorXd());
  sol.condition_estimate = qm.solver.condition();

  for (int n = m_max; n >= 1; --n) {
    Eigen::VectorXd rhs = detail::field_traces(problem.f_chain[static_cast<std::size_t>(n - 1)], sol.sources);
    for (int m = n + 1; m <= m_max; ++m) {
      rhs -= detail::expansion_traces(sol.kernel_chain[static_cast<std::size_t>(m - n)], sol.sources,
                                      sol.beta_by_order[static_cast<std::size_t>(m)]);
    }
    sol.beta_by_order[static_cast<std::size_t>(n)] = solve(rhs);
  }
  Eigen::VectorXd rhs = detail::boundary_rhs(sol.sources, problem.bc, std::nullopt);
  for (int m = 1; m <= m_max; ++m) {
    rhs -= detail::expansion_traces(sol.kernel_chain[static_cast<std::size_t>(m)], sol.sources,
                                    sol.beta_by_order[static_cast<std::size_t>(m)]);
  }
  sol.beta_by_order[0] = solve(rhs);
  return sol;
}

inline double evaluate_bpm(const BpmSolution& sol, const Point& x) {
  double sum = 0.0;
  for (std::size_t n = 0; n < sol.beta_by_order.size(); ++n) {
    sum += hermite_expansion_value(sol.kernel_chain[n], sol.sources, sol.beta_by_order[n], x);
  }
  return sum;
}

inline Vector evaluate_bpm_gradient(const BpmSolution& sol, const Point& x) {
  Vector g = Vector::Zero();
  for (std::size_t n = 0; n < sol.beta_by_order.size(); ++n) {
    g += hermite_expansion_gradient(sol.kernel_chain[n], sol.sources, sol.beta_by_order[n], x);
  }
  return g;
}

}  // namespace rbfkit
