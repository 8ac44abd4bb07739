#pragma once
/// @file operators.hpp
/// Analytic application of differential operators and normal derivatives to
/// translates h(y) = phi(|y|), y = x - x_s, of a radial kernel.
///
/// Everything here is templated on the kernel type; any type exposing
/// `RadialJet jet(double r) const` works (tests use plain polynomials).
/// Below r = 1e-8 the analytic r -> 0 limits are used. Those limits need
/// phi'(0) = 0 (and phi'''(0) = 0 for the third and fourth order terms);
/// otherwise a SingularityError is raised.

#include <cmath>
#include <concepts>

#include <Eigen/Dense>

#include "rbfkit/error.hpp"
#include "rbfkit/geometry.hpp"
#include "rbfkit/kernels.hpp"
#include "rbfkit/operator_spec.hpp"

namespace rbfkit {

template <class K>
concept RadialFunction = requires(const K& k, double r) {
  { k.jet(r) } -> std::convertible_to<RadialJet>;
};

inline constexpr double kOriginRadius = 1e-8;

/// Derivatives of h(y) = phi(|y|) at a fixed offset y.
class RadialCalculus {
 public:
  template <RadialFunction K>
  RadialCalculus(const K& kernel, const Vector& y) : r_(y.norm()) {
    jet_ = kernel.jet(r_ < kOriginRadius ? 0.0 : r_);
    origin_ = r_ < kOriginRadius;
    if (!origin_) e_ = y / r_;
  }

  double r() const { return r_; }
  bool at_origin() const { return origin_; }
  const RadialJet& jet() const { return jet_; }

  double value() const { return finite(jet_[0], "value"); }

  /// Zero at the origin: radial kernels are spherically symmetric.
  Vector gradient() const {
    if (origin_) {
      finite(jet_[1], "first derivative");
      return Vector::Zero();
    }
    return finite(jet_[1], "first derivative") * e_;
  }

  /// phi'(r)/r, or phi''(0) at the origin.
  double first_over_r() const {
    if (origin_) return smooth_limit(2, "phi'/r");
    return finite(jet_[1], "first derivative") / r_;
  }

  double second() const {
    if (origin_) return smooth_limit(2, "second derivative");
    return finite(jet_[2], "second derivative");
  }

  Eigen::Matrix2d hessian() const {
    if (origin_) return smooth_limit(2, "hessian") * Eigen::Matrix2d::Identity();
    const double a = jet_[2];
    const double b = jet_[1] / r_;
    Eigen::Matrix2d h = b * Eigen::Matrix2d::Identity() + (a - b) * (e_ * e_.transpose());
    if (!h.allFinite()) throw SingularityError("hessian of radial kernel is undefined here");
    return h;
  }

  /// -n_a^T H n_b, written as a scalar formula so that swapping the two
  /// arguments together with y -> -y reproduces the same bits.
  double mixed(const Vector& n_a, const Vector& n_b) const {
    if (origin_) return -smooth_limit(2, "mixed second derivative") * n_a.dot(n_b);
    const double a = e_.dot(n_a);
    const double b = e_.dot(n_b);
    const double ab = a * b;
    return -finite(jet_[2] * ab + (jet_[1] / r_) * (n_a.dot(n_b) - ab), "mixed second derivative");
  }

  double laplacian() const {
    if (origin_) return 2.0 * smooth_limit(2, "laplacian");
    return finite(jet_[2] + jet_[1] / r_, "laplacian");
  }

  /// grad(Laplacian h)(y).
  Vector grad_laplacian() const {
    if (origin_) {
      smooth_limit(3, "gradient of laplacian");
      return Vector::Zero();
    }
    const double d = jet_[3] + jet_[2] / r_ - jet_[1] / (r_ * r_);
    return finite(d, "gradient of laplacian") * e_;
  }

  double bilaplacian() const {
    if (origin_) return 8.0 / 3.0 * smooth_limit(4, "bilaplacian");
    const double r2 = r_ * r_;
    return finite(jet_[4] + 2.0 * jet_[3] / r_ - jet_[2] / r2 + jet_[1] / (r2 * r_), "bilaplacian");
  }

 private:
  static double finite(double v, const char* what) {
    if (!std::isfinite(v)) throw SingularityError(std::string("radial kernel ") + what + " is not finite");
    return v;
  }

  /// Returns phi^{(order)}(0) after checking that the odd derivatives below
  /// it vanish, so that the even extension is smooth enough.
  double smooth_limit(int order, const char* what) const {
    for (int odd = 1; odd < order; odd += 2) {
      if (jet_[odd] != 0.0) {
        throw SingularityError(std::string("radial kernel ") + what + " has no limit at r = 0");
      }
    }
    return finite(jet_[order], what);
  }

  double r_ = 0.0;
  bool origin_ = false;
  Vector e_ = Vector::Zero();
  RadialJet jet_{};
};

/// L{h}(y) = D Lap h + c0 h - v . grad h.
inline double apply_operator(const OperatorSpec& op, const RadialCalculus& rc) {
  double out = op.diffusion() * rc.laplacian();
  if (op.reaction() != 0.0) out += op.reaction() * rc.value();
  if (!op.self_adjoint()) out -= op.drift().dot(rc.gradient());
  return out;
}

/// grad(L{h})(y) = D grad(Lap h) + c0 grad h - H v.
inline Vector operator_gradient(const OperatorSpec& op, const RadialCalculus& rc) {
  Vector g = op.diffusion() * rc.grad_laplacian();
  if (op.reaction() != 0.0) g += op.reaction() * rc.gradient();
  if (!op.self_adjoint()) g -= rc.hessian() * op.drift();
  return g;
}

/// L{L*{h}}(y) = D^2 Lap^2 h + 2 D c0 Lap h + c0^2 h - v^T H v.
inline double apply_operator_product(const OperatorSpec& op, const RadialCalculus& rc) {
  const double d = op.diffusion();
  const double c0 = op.reaction();
  double out = d * d * rc.bilaplacian();
  if (c0 != 0.0) out += 2.0 * d * c0 * rc.laplacian() + c0 * c0 * rc.value();
  if (!op.self_adjoint()) out -= op.drift().dot(rc.hessian() * op.drift());
  return out;
}

/// L applied in x to phi(|x - x_s|).
template <RadialFunction K>
double apply_radial_operator(const OperatorSpec& op, const K& kernel, const Point& x, const Point& x_s) {
  return apply_operator(op, RadialCalculus(kernel, x - x_s));
}

enum class DerivativeSide { field, source };

/// Normal derivative of phi(|x - x_s|) along n, taken with respect to the
/// field point x or the source point x_s. The two sides differ exactly in
/// sign. Throws at coincident points, where the direction is undefined; the
/// Hermite assembly below uses the radial limits instead.
template <RadialFunction K>
double normal_derivative(const K& kernel, const Point& x, const Point& x_s, const Vector& n,
                         DerivativeSide side) {
  if ((x - x_s).norm() < kOriginRadius) throw SingularityError("normal derivative at coincident points");
  const double d = RadialCalculus(kernel, x - x_s).gradient().dot(n);
  return side == DerivativeSide::field ? d : -d;
}

/// d/dn_x of the source-side normal derivative along n_s.
template <RadialFunction K>
double mixed_normal_second_derivative(const K& kernel, const Point& x, const Point& x_s, const Vector& n_x,
                                      const Vector& n_s) {
  if ((x - x_s).norm() < kOriginRadius) throw SingularityError("mixed normal derivative at coincident points");
  return RadialCalculus(kernel, x - x_s).mixed(n_x, n_s);
}

/// Relative residual |L{phi}(r)| over the magnitude of its terms, sampled at
/// a few radii. A general solution of `op` gives values near rounding.
template <RadialFunction K>
double general_solution_residual(const OperatorSpec& op, const K& kernel) {
  double worst = 0.0;
  for (double r : {0.3, 1.0, 2.5}) {
    RadialCalculus rc(kernel, Vector(r, 0.0));
    const double res = std::abs(apply_operator(op, rc));
    const double scale = op.diffusion() * (std::abs(rc.second()) + std::abs(rc.first_over_r())) +
                         std::abs(op.reaction() * rc.value()) + op.drift().norm() * rc.gradient().norm();
    worst = std::max(worst, res / std::max(scale, 1e-300));
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Hermite basis shared by the boundary-type and Hermite collocation solvers.

enum class SourceKind { dirichlet, neumann };

/// A boundary source of the Hermite expansion. Dirichlet sources contribute
/// phi(|x - x_s|); Neumann sources contribute the source-side normal
/// derivative along their normal.
struct HermiteSource {
  Point position;
  Vector normal;
  SourceKind kind;
};

/// Boundary nodes ordered [Dirichlet | Neumann]; also the row order of the
/// symmetric boundary systems.
inline std::vector<HermiteSource> hermite_sources(const NodeSet& nodes) {
  std::vector<HermiteSource> out;
  out.reserve(nodes.boundary_count());
  for (auto i : nodes.dirichlet_idx) out.push_back({nodes.boundary[i], nodes.normals[i], SourceKind::dirichlet});
  for (auto i : nodes.neumann_idx) out.push_back({nodes.boundary[i], nodes.normals[i], SourceKind::neumann});
  return out;
}

template <RadialFunction K>
double hermite_basis_value(const K& kernel, const HermiteSource& s, const Point& x) {
  RadialCalculus rc(kernel, x - s.position);
  return s.kind == SourceKind::dirichlet ? rc.value() : -rc.gradient().dot(s.normal);
}

template <RadialFunction K>
Vector hermite_basis_gradient(const K& kernel, const HermiteSource& s, const Point& x) {
  RadialCalculus rc(kernel, x - s.position);
  return s.kind == SourceKind::dirichlet ? rc.gradient() : Vector(-(rc.hessian() * s.normal));
}

/// Trace functional of a boundary row: value for Dirichlet rows, field
/// normal derivative for Neumann rows.
template <RadialFunction K>
double hermite_trace(const K& kernel, const HermiteSource& row, const HermiteSource& col) {
  RadialCalculus rc(kernel, row.position - col.position);
  if (row.kind == SourceKind::dirichlet) {
    return col.kind == SourceKind::dirichlet ? rc.value() : -rc.gradient().dot(col.normal);
  }
  if (col.kind == SourceKind::dirichlet) return rc.gradient().dot(row.normal);
  return rc.mixed(row.normal, col.normal);
}

/// Complementary trace: field normal derivative on Dirichlet rows, value on
/// Neumann rows.
template <RadialFunction K>
double hermite_complementary_trace(const K& kernel, const HermiteSource& row, const HermiteSource& col) {
  HermiteSource flipped = row;
  flipped.kind = row.kind == SourceKind::dirichlet ? SourceKind::neumann : SourceKind::dirichlet;
  return hermite_trace(kernel, flipped, col);
}

template <RadialFunction K>
Eigen::MatrixXd assemble_hermite_matrix(const K& kernel, const std::vector<HermiteSource>& sources) {
  const auto n = static_cast<Eigen::Index>(sources.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = hermite_trace(kernel, sources[i], sources[j]);
  }
  return a;
}

template <RadialFunction K>
double hermite_expansion_value(const K& kernel, const std::vector<HermiteSource>& sources,
                               const Eigen::VectorXd& coeffs, const Point& x) {
  double sum = 0.0;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const double c = coeffs[static_cast<Eigen::Index>(s)];
    if (c != 0.0) sum += c * hermite_basis_value(kernel, sources[s], x);
  }
  return sum;
}

template <RadialFunction K>
Vector hermite_expansion_gradient(const K& kernel, const std::vector<HermiteSource>& sources,
                                  const Eigen::VectorXd& coeffs, const Point& x) {
  Vector sum = Vector::Zero();
  for (std::size_t s = 0; s < sources.size(); ++s) {
    const double c = coeffs[static_cast<Eigen::Index>(s)];
    if (c != 0.0) sum += c * hermite_basis_gradient(kernel, sources[s], x);
  }
  return sum;
}

}  // namespace rbfkit
