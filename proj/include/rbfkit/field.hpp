#pragma once
/// @file field.hpp
/// Callable scalar fields, boundary data and the type-erased solution field
/// returned by the domain-type solvers.

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbfkit/geometry.hpp"

namespace rbfkit {

/// A scalar function with its gradient. The Laplacian is optional and only
/// used for manufactured-solution consistency checks.
struct ScalarField {
  std::function<double(const Point&)> value;
  std::function<Vector(const Point&)> gradient;
  std::function<double(const Point&)> laplacian;

  static ScalarField zero() {
    return {[](const Point&) { return 0.0; }, [](const Point&) { return Vector(Vector::Zero()); },
            [](const Point&) { return 0.0; }};
  }

  static ScalarField constant(double c) {
    return {[c](const Point&) { return c; }, [](const Point&) { return Vector(Vector::Zero()); },
            [](const Point&) { return 0.0; }};
  }

  double operator()(const Point& x) const { return value(x); }
};

/// Prescribed data, aligned with NodeSet::dirichlet_idx and
/// NodeSet::neumann_idx respectively.
struct BoundaryData {
  std::vector<double> dirichlet_values;
  std::vector<double> neumann_values;
};

/// Samples R = u and N = du/dn of a known field at the partitioned nodes.
inline BoundaryData sample_boundary_data(const NodeSet& nodes, const ScalarField& u) {
  BoundaryData bc;
  for (auto i : nodes.dirichlet_idx) bc.dirichlet_values.push_back(u.value(nodes.boundary[i]));
  for (auto i : nodes.neumann_idx) bc.neumann_values.push_back(u.gradient(nodes.boundary[i]).dot(nodes.normals[i]));
  return bc;
}

/// Samples a field at all N + L nodes in NodeSet::all_points order.
inline std::vector<double> sample_at_nodes(const NodeSet& nodes, const std::function<double(const Point&)>& f) {
  std::vector<double> out;
  out.reserve(nodes.total_count());
  for (const auto& p : nodes.interior) out.push_back(f(p));
  for (const auto& p : nodes.boundary) out.push_back(f(p));
  return out;
}

/// Expansion coefficients plus an evaluator over the domain.
struct SolutionField {
  std::string method;
  Eigen::VectorXd coefficients;
  std::function<double(const Point&)> evaluator;
  double condition_estimate = 1.0;
  /// max |M c - b| / max |b| of the collocation system that produced it.
  double relative_residual = 0.0;

  double operator()(const Point& x) const { return evaluator(x); }
};

}  // namespace rbfkit
