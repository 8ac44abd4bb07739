#pragma once
/// @file bkm.hpp
/// Symmetric boundary knot method, indirect and direct.
///
/// u = u_h + u_p. The particular part is an RBF expansion whose operator
/// image interpolates f at all N + L nodes. The homogeneous part is a
/// Hermite expansion in a nonsingular general solution over the boundary
/// knots: Dirichlet knots contribute u#(r), Neumann knots the source-side
/// normal derivative. Collocating Dirichlet values and Neumann fluxes on the
/// boundary then gives a symmetric system.

#include <algorithm>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "rbfkit/error.hpp"
#include "rbfkit/field.hpp"
#include "rbfkit/geometry.hpp"
#include "rbfkit/kernels.hpp"
#include "rbfkit/linalg.hpp"
#include "rbfkit/operators.hpp"

namespace rbfkit {

inline constexpr double kParticularConditionLimit = 1e14;
inline constexpr double kGeneralSolutionTolerance = 1e-4;

struct ParticularSolution {
  std::vector<Point> centers;
  Eigen::VectorXd alpha;
  RadialKernel phi;
  double condition_estimate = 1.0;

  double value(const Point& x) const {
    double sum = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      sum += alpha[static_cast<Eigen::Index>(j)] * RadialCalculus(phi, x - centers[j]).value();
    }
    return sum;
  }

  Vector gradient(const Point& x) const {
    Vector g = Vector::Zero();
    for (std::size_t j = 0; j < centers.size(); ++j) {
      g += alpha[static_cast<Eigen::Index>(j)] * RadialCalculus(phi, x - centers[j]).gradient();
    }
    return g;
  }
};

/// Solves A alpha = f with A_ij = L{phi}(|x_i - x_j|) over all N + L nodes
/// (NodeSet::all_points order); u_p = sum_j alpha_j phi(|x - x_j|).
inline ParticularSolution fit_particular(const NodeSet& nodes, std::span<const double> f_samples,
                                         const OperatorSpec& op, const RadialKernel& phi,
                                         double max_condition = kParticularConditionLimit) {
  const auto centers = nodes.all_points();
  if (centers.empty()) throw ParameterError("particular fit needs at least one node");
  if (f_samples.size() != centers.size()) throw ParameterError("f_samples must have one value per node");
  const auto n = static_cast<Eigen::Index>(centers.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      a(i, j) = apply_radial_operator(op, phi, centers[static_cast<std::size_t>(i)],
                                      centers[static_cast<std::size_t>(j)]);
    }
  }
  DenseSolver solver(a, max_condition, "particular-solution");
  Eigen::VectorXd f = Eigen::Map<const Eigen::VectorXd>(f_samples.data(), n);
  return {centers, solver.solve(f), phi, solver.condition()};
}

/// The symmetric Hermite boundary matrix, rows and columns ordered
/// [Dirichlet | Neumann].
struct BkmSystem {
  Eigen::MatrixXd matrix;
  std::vector<HermiteSource> sources;
};

inline BkmSystem assemble_symmetric_system(const NodeSet& nodes, const OperatorSpec& op,
                                           const RadialKernel& u_sharp) {
  const double residual = general_solution_residual(op, u_sharp);
  if (!(residual <= kGeneralSolutionTolerance)) {
    throw InvalidKernelError("kernel '" + u_sharp.name() + "' is not a general solution of " + op.name());
  }
  BkmSystem sys;
  sys.sources = hermite_sources(nodes);
  sys.matrix = assemble_hermite_matrix(u_sharp, sys.sources);
  return sys;
}

namespace detail {

inline bool all_zero(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

inline void check_boundary_data(const NodeSet& nodes, const BoundaryData& bc) {
  if (bc.dirichlet_values.size() != nodes.dirichlet_idx.size() ||
      bc.neumann_values.size() != nodes.neumann_idx.size()) {
    throw ParameterError("boundary data counts do not match the Dirichlet/Neumann partition");
  }
}

/// Prescribed traces minus the particular solution's traces, in source order.
inline Eigen::VectorXd boundary_rhs(const std::vector<HermiteSource>& sources, const BoundaryData& bc,
                                    const std::optional<ParticularSolution>& particular) {
  const auto n = static_cast<Eigen::Index>(sources.size());
  Eigen::VectorXd b(n);
  const std::size_t nd = bc.dirichlet_values.size();
  for (std::size_t i = 0; i < sources.size(); ++i) {
    const auto& s = sources[i];
    double v = i < nd ? bc.dirichlet_values[i] : bc.neumann_values[i - nd];
    if (particular) {
      v -= s.kind == SourceKind::dirichlet ? particular->value(s.position)
                                           : particular->gradient(s.position).dot(s.normal);
    }
    b[static_cast<Eigen::Index>(i)] = v;
  }
  return b;
}

inline std::optional<ParticularSolution> maybe_fit_particular(const NodeSet& nodes,
                                                              std::span<const double> f_samples,
                                                              const OperatorSpec& op,
                                                              const std::optional<RadialKernel>& phi) {
  if (f_samples.empty() || all_zero(f_samples)) return std::nullopt;
  if (!phi) throw ParameterError("an inhomogeneous problem needs a particular-solution kernel");
  return fit_particular(nodes, f_samples, op, *phi);
}

}  // namespace detail

struct BkmSolution {
  std::vector<HermiteSource> sources;
  RadialKernel u_sharp;
  Eigen::VectorXd lambda;
  /// Absent when f is identically zero.
  std::optional<ParticularSolution> particular;
  /// u at the interior nodes, evaluated after the boundary solve.
  std::vector<double> interior_values;
  double condition_estimate = 1.0;

  Eigen::VectorXd alpha() const { return particular ? particular->alpha : Eigen::VectorXd(); }

  double homogeneous_value(const Point& x) const {
    return hermite_expansion_value(u_sharp, sources, lambda, x);
  }

  double value(const Point& x) const {
    return homogeneous_value(x) + (particular ? particular->value(x) : 0.0);
  }

  Vector gradient(const Point& x) const {
    Vector g = hermite_expansion_gradient(u_sharp, sources, lambda, x);
    if (particular) g += particular->gradient(x);
    return g;
  }

  double operator()(const Point& x) const { return value(x); }
};

/// Indirect symmetric BKM. `f_samples` holds f at all N + L nodes, or is
/// empty for a homogeneous problem, in which case no particular solution is
/// fitted and `phi` may be omitted.
inline BkmSolution solve_indirect(const NodeSet& nodes, const OperatorSpec& op, const BoundaryData& bc,
                                  std::span<const double> f_samples, const std::optional<RadialKernel>& phi,
                                  const RadialKernel& u_sharp, double max_condition = kNoConditionLimit) {
  detail::check_boundary_data(nodes, bc);
  BkmSolution sol{.sources = {}, .u_sharp = u_sharp, .lambda = {}, .particular = {}, .interior_values = {}};
  sol.particular = detail::maybe_fit_particular(nodes, f_samples, op, phi);
  BkmSystem sys = assemble_symmetric_system(nodes, op, u_sharp);
  DenseSolver solver(sys.matrix, max_condition, "boundary knot");
  sol.sources = std::move(sys.sources);
  sol.lambda = solver.solve(detail::boundary_rhs(sol.sources, bc, sol.particular));
  sol.condition_estimate = solver.condition();
  if (sol.particular) sol.condition_estimate = std::max(sol.condition_estimate, sol.particular->condition_estimate);
  sol.interior_values.reserve(nodes.interior_count());
  for (const auto& p : nodes.interior) sol.interior_values.push_back(sol.value(p));
  return sol;
}

/// Unknown boundary traces: du/dn on the Dirichlet part and u on the
/// Neumann part, aligned with dirichlet_idx and neumann_idx.
struct RecoveredTraces {
  Eigen::VectorXd neumann_on_dirichlet;
  Eigen::VectorXd dirichlet_on_neumann;
  double condition_estimate = 1.0;
};

/// Traces of an indirect solution, for comparison with solve_direct.
inline RecoveredTraces complementary_traces(const BkmSolution& sol) {
  RecoveredTraces out;
  std::vector<double> nd, dn;
  for (const auto& s : sol.sources) {
    if (s.kind == SourceKind::dirichlet) {
      nd.push_back(sol.gradient(s.position).dot(s.normal));
    } else {
      dn.push_back(sol.value(s.position));
    }
  }
  out.neumann_on_dirichlet = Eigen::Map<Eigen::VectorXd>(nd.data(), static_cast<Eigen::Index>(nd.size()));
  out.dirichlet_on_neumann = Eigen::Map<Eigen::VectorXd>(dn.data(), static_cast<Eigen::Index>(dn.size()));
  out.condition_estimate = sol.condition_estimate;
  return out;
}

/// Direct BKM: the map T = B A^{-1} takes the known traces {D_u; N_Gamma}
/// to the unknown traces {N_u; D_Gamma} without exposing the expansion
/// coefficients. Both sides are shifted by the particular solution.
inline RecoveredTraces solve_direct(const NodeSet& nodes, const OperatorSpec& op, const BoundaryData& bc,
                                    std::span<const double> f_samples, const std::optional<RadialKernel>& phi,
                                    const RadialKernel& u_sharp, double max_condition = kNoConditionLimit) {
  detail::check_boundary_data(nodes, bc);
  const auto particular = detail::maybe_fit_particular(nodes, f_samples, op, phi);
  BkmSystem sys = assemble_symmetric_system(nodes, op, u_sharp);
  const auto n = static_cast<Eigen::Index>(sys.sources.size());
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      b(i, j) = hermite_complementary_trace(u_sharp, sys.sources[static_cast<std::size_t>(i)],
                                            sys.sources[static_cast<std::size_t>(j)]);
    }
  }
  DenseSolver solver(sys.matrix, max_condition, "boundary knot");
  const Eigen::MatrixXd a_inv = solver.solve(Eigen::MatrixXd(Eigen::MatrixXd::Identity(n, n)));
  const Eigen::MatrixXd transfer = b * a_inv;
  Eigen::VectorXd unknown = transfer * detail::boundary_rhs(sys.sources, bc, particular);

  if (particular) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto& s = sys.sources[static_cast<std::size_t>(i)];
      unknown[i] += s.kind == SourceKind::dirichlet ? particular->gradient(s.position).dot(s.normal)
                                                    : particular->value(s.position);
    }
  }
  const auto nd = static_cast<Eigen::Index>(nodes.dirichlet_idx.size());
  RecoveredTraces out;
  out.neumann_on_dirichlet = unknown.head(nd);
  out.dirichlet_on_neumann = unknown.tail(n - nd);
  out.condition_estimate = solver.condition();
  if (particular) out.condition_estimate = std::max(out.condition_estimate, particular->condition_estimate);
  return out;
}

}  // namespace rbfkit
