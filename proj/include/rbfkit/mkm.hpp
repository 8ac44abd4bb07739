#pragma once
/// @file mkm.hpp
/// Modified Kansa method and the classical Kansa baseline.
///
/// MKM ansatz over N interior and L boundary nodes:
///   u(x) = sum_k alpha_k L*{phi}(x - x_k)            (all N + L nodes)
///        + sum_{s in S_u} beta_s phi(x - x_s)
///        + sum_{s in S_Gamma} beta_s dphi/dn_s(x - x_s)   (source-side)
/// The governing equation is collocated at every node, boundary nodes
/// included, and the boundary conditions once more at the boundary nodes.
/// Unknowns are ordered [alpha | beta_D | beta_N] and rows
/// [governing | Dirichlet | Neumann], which makes the matrix symmetric
/// whenever L* is the formal adjoint of L.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbfkit/error.hpp"
#include "rbfkit/field.hpp"
#include "rbfkit/geometry.hpp"
#include "rbfkit/kernels.hpp"
#include "rbfkit/linalg.hpp"
#include "rbfkit/operators.hpp"

namespace rbfkit {

/// Throws KernelSmoothnessError unless phi has finite derivatives up to
/// fourth order at the origin with vanishing odd ones, as needed for
/// L L* phi on the diagonal.
inline void require_fourth_order_smoothness(const RadialKernel& phi) {
  if (phi.singular_at_origin()) {
    throw KernelSmoothnessError("kernel '" + phi.name() + "' is singular at the origin");
  }
  const RadialJet j = phi.jet(0.0);
  for (double v : j) {
    if (!std::isfinite(v)) throw KernelSmoothnessError("kernel '" + phi.name() + "' is not C4 at the origin");
  }
  if (j[1] != 0.0 || j[3] != 0.0) {
    throw KernelSmoothnessError("kernel '" + phi.name() + "' has a cusp at the origin");
  }
}

/// Operator images of the MKM basis functions and their traces.
class MkmBasis {
 public:
  MkmBasis(const OperatorSpec& op, const RadialKernel& phi) : op_(op), adjoint_(adjoint_of(op)), phi_(phi) {}

  /// alpha-column basis L*{phi}(x - x_k) at x.
  double alpha_value(const Point& x, const Point& center) const {
    return apply_operator(adjoint_, RadialCalculus(phi_, x - center));
  }

  Vector alpha_gradient(const Point& x, const Point& center) const {
    return operator_gradient(adjoint_, RadialCalculus(phi_, x - center));
  }

  /// L applied to the alpha basis.
  double alpha_operator(const Point& x, const Point& center) const {
    return apply_operator_product(op_, RadialCalculus(phi_, x - center));
  }

  /// L applied to a Hermite (beta) basis function.
  double beta_operator(const Point& x, const HermiteSource& s) const {
    RadialCalculus rc(phi_, x - s.position);
    if (s.kind == SourceKind::dirichlet) return apply_operator(op_, rc);
    return -operator_gradient(op_, rc).dot(s.normal);
  }

  const OperatorSpec& op() const { return op_; }
  const OperatorSpec& adjoint() const { return adjoint_; }
  const RadialKernel& phi() const { return phi_; }

 private:
  OperatorSpec op_;
  OperatorSpec adjoint_;
  RadialKernel phi_;
};

struct MkmSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  /// All N + L nodes (NodeSet::all_points order); alpha centers.
  std::vector<Point> centers;
  /// Boundary sources in [Dirichlet | Neumann] order; beta centers.
  std::vector<HermiteSource> sources;
  OperatorSpec op;
  RadialKernel phi;

  Eigen::Index alpha_count() const { return static_cast<Eigen::Index>(centers.size()); }
};

inline MkmSystem assemble_mkm(const NodeSet& nodes, const OperatorSpec& op, const BoundaryData& bc,
                              std::span<const double> f_samples, const RadialKernel& phi) {
  require_fourth_order_smoothness(phi);
  if (bc.dirichlet_values.size() != nodes.dirichlet_idx.size() ||
      bc.neumann_values.size() != nodes.neumann_idx.size()) {
    throw ParameterError("boundary data counts do not match the Dirichlet/Neumann partition");
  }
  if (f_samples.size() != nodes.total_count()) throw ParameterError("f_samples must have one value per node");

  MkmSystem sys{.matrix = {}, .rhs = {}, .centers = nodes.all_points(), .sources = hermite_sources(nodes),
                .op = op, .phi = phi};
  const MkmBasis basis(op, phi);
  const auto na = sys.alpha_count();
  const auto nb = static_cast<Eigen::Index>(sys.sources.size());
  const auto size = na + nb;
  sys.matrix.resize(size, size);
  sys.rhs.resize(size);

  for (Eigen::Index i = 0; i < na; ++i) {
    const Point& x = sys.centers[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < na; ++k) {
      sys.matrix(i, k) = basis.alpha_operator(x, sys.centers[static_cast<std::size_t>(k)]);
    }
    for (Eigen::Index s = 0; s < nb; ++s) {
      sys.matrix(i, na + s) = basis.beta_operator(x, sys.sources[static_cast<std::size_t>(s)]);
    }
    sys.rhs[i] = f_samples[static_cast<std::size_t>(i)];
  }
  const std::size_t nd = bc.dirichlet_values.size();
  for (Eigen::Index s = 0; s < nb; ++s) {
    const auto& row = sys.sources[static_cast<std::size_t>(s)];
    for (Eigen::Index k = 0; k < na; ++k) {
      const Point& c = sys.centers[static_cast<std::size_t>(k)];
      sys.matrix(na + s, k) = row.kind == SourceKind::dirichlet ? basis.alpha_value(row.position, c)
                                                                : basis.alpha_gradient(row.position, c).dot(row.normal);
    }
    for (Eigen::Index t = 0; t < nb; ++t) {
      sys.matrix(na + s, na + t) = hermite_trace(phi, row, sys.sources[static_cast<std::size_t>(t)]);
    }
    const auto si = static_cast<std::size_t>(s);
    sys.rhs[na + s] = si < nd ? bc.dirichlet_values[si] : bc.neumann_values[si - nd];
  }
  return sys;
}

namespace detail {

inline double relative_residual(const Eigen::MatrixXd& a, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double scale = b.size() ? b.cwiseAbs().maxCoeff() : 0.0;
  const double res = b.size() ? (a * x - b).cwiseAbs().maxCoeff() : 0.0;
  return scale > 0.0 ? res / scale : res;
}

}  // namespace detail

inline SolutionField solve_mkm(const MkmSystem& system, double max_condition = kNoConditionLimit) {
  DenseSolver solver(system.matrix, max_condition, "modified Kansa");
  Eigen::VectorXd coeffs = solver.solve(system.rhs);

  SolutionField out;
  out.method = "mkm";
  out.coefficients = coeffs;
  out.condition_estimate = solver.condition();
  out.relative_residual = detail::relative_residual(system.matrix, coeffs, system.rhs);
  out.evaluator = [basis = MkmBasis(system.op, system.phi), centers = system.centers, sources = system.sources,
                   coeffs](const Point& x) {
    const auto na = static_cast<Eigen::Index>(centers.size());
    double sum = 0.0;
    for (Eigen::Index k = 0; k < na; ++k) {
      if (coeffs[k] != 0.0) sum += coeffs[k] * basis.alpha_value(x, centers[static_cast<std::size_t>(k)]);
    }
    return sum + hermite_expansion_value(basis.phi(), sources, Eigen::VectorXd(coeffs.tail(coeffs.size() - na)), x);
  };
  return out;
}

/// Square unsymmetric Kansa matrix. Columns are phi(x - x_k) over all N + L
/// nodes in NodeSet::all_points order with boundary nodes in
/// [Dirichlet | Neumann] order; rows are the governing equation at interior
/// nodes, then Dirichlet values, then field normal derivatives.
struct KansaSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
  std::vector<Point> centers;
};

inline KansaSystem assemble_kansa(const NodeSet& nodes, const OperatorSpec& op, const BoundaryData& bc,
                                  std::span<const double> f_samples, const RadialKernel& phi) {
  if (bc.dirichlet_values.size() != nodes.dirichlet_idx.size() ||
      bc.neumann_values.size() != nodes.neumann_idx.size()) {
    throw ParameterError("boundary data counts do not match the Dirichlet/Neumann partition");
  }
  if (f_samples.size() != nodes.total_count()) throw ParameterError("f_samples must have one value per node");
  const auto sources = hermite_sources(nodes);
  KansaSystem sys;
  sys.centers = nodes.interior;
  for (const auto& s : sources) sys.centers.push_back(s.position);
  const auto n = static_cast<Eigen::Index>(sys.centers.size());
  const auto ni = static_cast<Eigen::Index>(nodes.interior_count());
  sys.matrix.resize(n, n);
  sys.rhs.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Point& x = sys.centers[static_cast<std::size_t>(i)];
    for (Eigen::Index k = 0; k < n; ++k) {
      RadialCalculus rc(phi, x - sys.centers[static_cast<std::size_t>(k)]);
      if (i < ni) {
        sys.matrix(i, k) = apply_operator(op, rc);
      } else {
        const auto& s = sources[static_cast<std::size_t>(i - ni)];
        sys.matrix(i, k) = s.kind == SourceKind::dirichlet ? rc.value() : rc.gradient().dot(s.normal);
      }
    }
  }
  for (Eigen::Index i = 0; i < ni; ++i) sys.rhs[i] = f_samples[static_cast<std::size_t>(i)];
  const std::size_t nd = bc.dirichlet_values.size();
  for (std::size_t s = 0; s < sources.size(); ++s) {
    sys.rhs[ni + static_cast<Eigen::Index>(s)] = s < nd ? bc.dirichlet_values[s] : bc.neumann_values[s - nd];
  }
  return sys;
}

inline SolutionField solve_kansa_baseline(const NodeSet& nodes, const OperatorSpec& op, const BoundaryData& bc,
                                          std::span<const double> f_samples, const RadialKernel& phi,
                                          double max_condition = kNoConditionLimit) {
  KansaSystem sys = assemble_kansa(nodes, op, bc, f_samples, phi);
  DenseSolver solver(sys.matrix, max_condition, "Kansa");
  Eigen::VectorXd coeffs = solver.solve(sys.rhs);
  SolutionField out;
  out.method = "kansa";
  out.coefficients = coeffs;
  out.condition_estimate = solver.condition();
  out.relative_residual = detail::relative_residual(sys.matrix, coeffs, sys.rhs);
  out.evaluator = [phi, centers = std::move(sys.centers), coeffs](const Point& x) {
    double sum = 0.0;
    for (std::size_t k = 0; k < centers.size(); ++k) {
      const double c = coeffs[static_cast<Eigen::Index>(k)];
      if (c != 0.0) sum += c * RadialCalculus(phi, x - centers[k]).value();
    }
    return sum;
  };
  return out;
}

}  // namespace rbfkit
