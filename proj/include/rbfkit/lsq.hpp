#pragma once
/// @file lsq.hpp
/// Least-squares RBF collocation: more field (collocation) points than
/// source (center) points, solved in the L2 sense.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbfkit/error.hpp"
#include "rbfkit/field.hpp"
#include "rbfkit/geometry.hpp"
#include "rbfkit/kernels.hpp"
#include "rbfkit/mkm.hpp"
#include "rbfkit/operators.hpp"

namespace rbfkit {

enum class RowKind { governing, dirichlet, neumann };

/// A collocation row: the equation type, where it is imposed and its
/// right-hand side.
struct FieldPoint {
  Point position;
  RowKind kind = RowKind::dirichlet;
  Vector normal = Vector::Zero();
  double rhs = 0.0;
};

enum class SourceRole { interior, dirichlet, neumann };

struct SourcePoint {
  Point position;
  SourceRole role = SourceRole::interior;
  Vector normal = Vector::Zero();
};

enum class LsqScheme { kansa_like, mkm_like };

struct OverdeterminedSystem {
  Eigen::MatrixXd g;
  Eigen::VectorXd b;

  Eigen::Index field_count() const { return g.rows(); }
  Eigen::Index source_count() const { return g.cols(); }
};

/// Sources in the column order used by assemble_kansa: interior nodes, then
/// boundary nodes in [Dirichlet | Neumann] order.
inline std::vector<SourcePoint> source_points(const NodeSet& nodes) {
  std::vector<SourcePoint> out;
  for (const auto& p : nodes.interior) out.push_back({p, SourceRole::interior, Vector::Zero()});
  for (auto i : nodes.dirichlet_idx) out.push_back({nodes.boundary[i], SourceRole::dirichlet, nodes.normals[i]});
  for (auto i : nodes.neumann_idx) out.push_back({nodes.boundary[i], SourceRole::neumann, nodes.normals[i]});
  return out;
}

/// Kansa-style rows: governing equation at interior nodes, boundary
/// conditions at boundary nodes. `f` is evaluated at interior nodes.
inline std::vector<FieldPoint> kansa_field_points(const NodeSet& nodes, const BoundaryData& bc,
                                                  const std::function<double(const Point&)>& f) {
  std::vector<FieldPoint> out;
  for (const auto& p : nodes.interior) out.push_back({p, RowKind::governing, Vector::Zero(), f(p)});
  for (std::size_t j = 0; j < nodes.dirichlet_idx.size(); ++j) {
    const auto i = nodes.dirichlet_idx[j];
    out.push_back({nodes.boundary[i], RowKind::dirichlet, nodes.normals[i], bc.dirichlet_values[j]});
  }
  for (std::size_t j = 0; j < nodes.neumann_idx.size(); ++j) {
    const auto i = nodes.neumann_idx[j];
    out.push_back({nodes.boundary[i], RowKind::neumann, nodes.normals[i], bc.neumann_values[j]});
  }
  return out;
}

/// Modified-Kansa rows: governing equation at every node, boundary
/// conditions again at boundary nodes.
inline std::vector<FieldPoint> mkm_field_points(const NodeSet& nodes, const BoundaryData& bc,
                                                const std::function<double(const Point&)>& f) {
  std::vector<FieldPoint> out;
  for (const auto& p : nodes.all_points()) out.push_back({p, RowKind::governing, Vector::Zero(), f(p)});
  auto bc_rows = kansa_field_points(nodes, bc, f);
  out.insert(out.end(), bc_rows.begin() + static_cast<std::ptrdiff_t>(nodes.interior_count()), bc_rows.end());
  return out;
}

/// Pure data-fitting rows: u = target at every point.
inline std::vector<FieldPoint> fitting_points(std::span<const Point> points,
                                              const std::function<double(const Point&)>& target) {
  std::vector<FieldPoint> out;
  for (const auto& p : points) out.push_back({p, RowKind::dirichlet, Vector::Zero(), target(p)});
  return out;
}

/// Number of unknowns generated by `sources` under `scheme`.
inline Eigen::Index lsq_column_count(std::span<const SourcePoint> sources, LsqScheme scheme) {
  Eigen::Index n = static_cast<Eigen::Index>(sources.size());
  if (scheme == LsqScheme::mkm_like) {
    for (const auto& s : sources) n += s.role != SourceRole::interior ? 1 : 0;
  }
  return n;
}

/// kansa_like: one column psi(x - x_k) per source. mkm_like: one column
/// L*{psi}(x - x_k) per source plus a Hermite column (psi, or its
/// source-side normal derivative) per boundary source, as in assemble_mkm.
inline OverdeterminedSystem assemble_overdetermined(std::span<const SourcePoint> sources,
                                                    std::span<const FieldPoint> field, const OperatorSpec& op,
                                                    const RadialKernel& psi, LsqScheme scheme) {
  const Eigen::Index n = lsq_column_count(sources, scheme);
  const auto m = static_cast<Eigen::Index>(field.size());
  if (n < 1) throw ShapeError("least-squares collocation needs at least one source");
  if (m < n) {
    throw ShapeError("least-squares collocation needs at least as many field rows (" + std::to_string(m) +
                     ") as unknowns (" + std::to_string(n) + ")");
  }
  if (scheme == LsqScheme::mkm_like) require_fourth_order_smoothness(psi);

  std::vector<HermiteSource> hermite;
  for (const auto& s : sources) {
    if (scheme == LsqScheme::mkm_like && s.role != SourceRole::interior) {
      hermite.push_back({s.position, s.normal, s.role == SourceRole::dirichlet ? SourceKind::dirichlet
                                                                               : SourceKind::neumann});
    }
  }
  const MkmBasis basis(op, psi);

  OverdeterminedSystem sys;
  sys.g.resize(m, n);
  sys.b.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& fp = field[static_cast<std::size_t>(i)];
    sys.b[i] = fp.rhs;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const Point& c = sources[k].position;
      double entry = 0.0;
      if (scheme == LsqScheme::kansa_like) {
        RadialCalculus rc(psi, fp.position - c);
        switch (fp.kind) {
          case RowKind::governing: entry = apply_operator(op, rc); break;
          case RowKind::dirichlet: entry = rc.value(); break;
          case RowKind::neumann: entry = rc.gradient().dot(fp.normal); break;
        }
      } else {
        switch (fp.kind) {
          case RowKind::governing: entry = basis.alpha_operator(fp.position, c); break;
          case RowKind::dirichlet: entry = basis.alpha_value(fp.position, c); break;
          case RowKind::neumann: entry = basis.alpha_gradient(fp.position, c).dot(fp.normal); break;
        }
      }
      sys.g(i, static_cast<Eigen::Index>(k)) = entry;
    }
    const auto offset = static_cast<Eigen::Index>(sources.size());
    for (std::size_t t = 0; t < hermite.size(); ++t) {
      double entry = 0.0;
      switch (fp.kind) {
        case RowKind::governing: entry = basis.beta_operator(fp.position, hermite[t]); break;
        case RowKind::dirichlet: entry = hermite_basis_value(psi, hermite[t], fp.position); break;
        case RowKind::neumann: entry = hermite_basis_gradient(psi, hermite[t], fp.position).dot(fp.normal); break;
      }
      sys.g(i, offset + static_cast<Eigen::Index>(t)) = entry;
    }
  }
  return sys;
}

enum class LsqMethod { normal_equations, orthogonal };

struct LeastSquaresResult {
  Eigen::VectorXd beta;
  /// Sum of squared row residuals.
  double sigma = 0.0;
  /// Set when the orthogonal path fell back to the minimum-norm solution.
  bool rank_deficient = false;
  double condition_estimate = 1.0;
};

inline constexpr double kNormalEquationConditionLimit = 1e14;

inline double residual_sum_of_squares(const OverdeterminedSystem& sys, const Eigen::VectorXd& beta) {
  return (sys.g * beta - sys.b).squaredNorm();
}

/// normal_equations solves (G^T G) beta = G^T b literally; orthogonal
/// minimizes |G beta - b|_2 by a complete orthogonal decomposition, which
/// returns the minimum-norm minimizer when G is rank deficient.
inline LeastSquaresResult solve_least_squares(const OverdeterminedSystem& sys,
                                              LsqMethod method = LsqMethod::orthogonal) {
  if (sys.g.rows() < sys.g.cols() || sys.g.cols() < 1) throw ShapeError("system must satisfy M >= N >= 1");
  LeastSquaresResult out;
  if (method == LsqMethod::normal_equations) {
    const Eigen::MatrixXd gram = sys.g.transpose() * sys.g;
    const Eigen::VectorXd rhs = sys.g.transpose() * sys.b;
    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const double rc = ldlt.rcond();
    out.condition_estimate = rc > 0.0 ? std::max(1.0, 1.0 / rc) : std::numeric_limits<double>::infinity();
    if (ldlt.info() != Eigen::Success || !(out.condition_estimate < kNormalEquationConditionLimit)) {
      throw RankError("normal equations are rank deficient or ill-conditioned (condition estimate " +
                      std::to_string(out.condition_estimate) + ")");
    }
    out.beta = ldlt.solve(rhs);
  } else {
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(sys.g);
    out.rank_deficient = cod.rank() < sys.g.cols();
    out.beta = cod.solve(sys.b);
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.g);
    const auto& sv = svd.singularValues();
    const double smin = sv[sv.size() - 1];
    out.condition_estimate = smin > 0.0 ? std::max(1.0, sv[0] / smin) : std::numeric_limits<double>::infinity();
  }
  out.sigma = residual_sum_of_squares(sys, out.beta);
  return out;
}

/// Evaluator for a least-squares solution built with assemble_overdetermined.
inline SolutionField lsq_solution_field(std::span<const SourcePoint> sources, const OperatorSpec& op,
                                        const RadialKernel& psi, LsqScheme scheme, const LeastSquaresResult& res) {
  SolutionField out;
  out.method = "lsq";
  out.coefficients = res.beta;
  out.condition_estimate = res.condition_estimate;
  std::vector<SourcePoint> src(sources.begin(), sources.end());
  out.evaluator = [src, basis = MkmBasis(op, psi), scheme, beta = res.beta](const Point& x) {
    double sum = 0.0;
    Eigen::Index col = 0;
    for (const auto& s : src) {
      const double c = beta[col++];
      if (c == 0.0) continue;
      sum += c * (scheme == LsqScheme::kansa_like ? RadialCalculus(basis.phi(), x - s.position).value()
                                                  : basis.alpha_value(x, s.position));
    }
    if (scheme == LsqScheme::mkm_like) {
      for (const auto& s : src) {
        if (s.role == SourceRole::interior) continue;
        const double c = beta[col++];
        const HermiteSource h{s.position, s.normal,
                              s.role == SourceRole::dirichlet ? SourceKind::dirichlet : SourceKind::neumann};
        if (c != 0.0) sum += c * hermite_basis_value(basis.phi(), h, x);
      }
    }
    return sum;
  };
  return out;
}

}  // namespace rbfkit
