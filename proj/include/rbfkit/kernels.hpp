#pragma once
/// @file kernels.hpp
/// Radial kernels: generic RBFs, general and fundamental solutions, and the
/// constructions that build new kernels from old ones (r^{2m} augmentation,
/// higher-order solutions, shape-parameter substitution).
///
/// Every kernel is an immutable value. `jet(r)` returns phi and its first
/// four radial derivatives; derivatives that do not exist at r = 0 come back
/// as NaN and are rejected by the consumers in operators.hpp.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbfkit/error.hpp"
#include "rbfkit/geometry.hpp"
#include "rbfkit/operator_spec.hpp"

namespace rbfkit {

enum class KernelFamily {
  mq,
  imq,
  gaussian,
  tps,
  exp_decay,
  laplace_fs_1d,
  laplace_fs_2d,
  laplace_fs_3d,
  helmholtz_gs_2d,
  helmholtz_gs_3d,
  helmholtz_fs_2d,
  mod_helmholtz_gs_2d,
  augmented,
  higher_order,
  substituted,
};

inline constexpr std::array<std::string_view, 15> kKernelFamilyNames = {
    "mq",            "imq",           "gaussian",        "tps",
    "exp_decay",     "laplace_fs_1d", "laplace_fs_2d",   "laplace_fs_3d",
    "helmholtz_gs_2d", "helmholtz_gs_3d", "helmholtz_fs_2d", "mod_helmholtz_gs_2d",
    "augmented",     "higher_order",  "substituted",
};

inline std::string_view family_name(KernelFamily f) {
  return kKernelFamilyNames[static_cast<std::size_t>(f)];
}

inline std::optional<KernelFamily> family_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kKernelFamilyNames.size(); ++i) {
    if (kKernelFamilyNames[i] == name) return static_cast<KernelFamily>(i);
  }
  return std::nullopt;
}

/// Parameters shared by the catalog. Each family reads the fields it needs:
/// `shape` (c) for mq/imq/gaussian, `wavenumber` (k) for the Bessel-type
/// solutions, `decay` (omega) for exp_decay.
struct KernelParams {
  double shape = 1.0;
  double wavenumber = 1.0;
  double decay = 1.0;
};

/// phi(r), phi'(r), phi''(r), phi'''(r), phi''''(r).
using RadialJet = std::array<double, 5>;

struct KernelValues {
  double value;
  double first;
  double second;
};

namespace detail {

inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

inline double binomial(int n, int k) {
  double b = 1.0;
  for (int i = 1; i <= k; ++i) b = b * (n - k + i) / i;
  return b;
}

inline double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

/// Integer-order Bessel functions extended to negative orders.
inline double bessel_j(int n, double z) {
  const double v = std::cyl_bessel_j(static_cast<double>(std::abs(n)), z);
  return (n < 0 && (-n) % 2 == 1) ? -v : v;
}

inline double bessel_y(int n, double z) {
  const double v = std::cyl_neumann(static_cast<double>(std::abs(n)), z);
  return (n < 0 && (-n) % 2 == 1) ? -v : v;
}

inline double bessel_i(int n, double z) { return std::cyl_bessel_i(static_cast<double>(std::abs(n)), z); }

/// Derivatives d^j/dz^j of C_n(z) for j = 0..4 via
/// C_n' = (C_{n-1} +/- C_{n+1}) / 2 (minus for J and Y, plus for I).
template <class F>
RadialJet bessel_jet(F&& c, int n, double z, bool modified) {
  std::array<double, 9> vals{};
  for (int o = -4; o <= 4; ++o) vals[o + 4] = c(n + o, z);
  RadialJet out{};
  for (int j = 0; j <= 4; ++j) {
    double sum = 0.0;
    for (int i = 0; i <= j; ++i) {
      const double sign = (!modified && i % 2 == 1) ? -1.0 : 1.0;
      sum += sign * binomial(j, i) * vals[-j + 2 * i + 4];
    }
    out[j] = std::ldexp(sum, -j);
  }
  return out;
}

/// Scale a jet in z = k r to a jet in r.
inline RadialJet chain_scale(RadialJet jz, double k) {
  double f = 1.0;
  for (auto& v : jz) {
    v *= f;
    f *= k;
  }
  return jz;
}

/// Radial derivatives of phi(r) = F(r^2 + s0) given F and its first four
/// derivatives evaluated at r^2 + s0.
inline RadialJet even_compose(const RadialJet& f, double r) {
  const double r2 = r * r;
  return {f[0], 2.0 * r * f[1], 4.0 * r2 * f[2] + 2.0 * f[1], 8.0 * r2 * r * f[3] + 12.0 * r * f[2],
          16.0 * r2 * r2 * f[4] + 48.0 * r2 * f[3] + 12.0 * f[2]};
}

inline RadialJet power_jet(double s, double beta) {
  RadialJet f{};
  double coeff = 1.0;
  for (int n = 0; n <= 4; ++n) {
    f[n] = coeff * std::pow(s, beta - n);
    coeff *= (beta - n);
  }
  return f;
}

/// Derivatives of r^p (a ln r + b) for integer p >= 0.
inline RadialJet log_power_jet(double r, int p, double a, double b) {
  RadialJet out{};
  double fall = 1.0;  // p (p-1) ... (p-n+1)
  double dfall = 0.0; // derivative of the falling factorial with respect to p
  for (int n = 0; n <= 4; ++n) {
    if (r == 0.0) {
      out[n] = (p - n > 0) ? 0.0 : kNaN;
    } else {
      out[n] = std::pow(r, p - n) * (a * (fall * std::log(r) + dfall) + b * fall);
    }
    dfall = dfall * (p - n) + fall;
    fall *= (p - n);
  }
  return out;
}

/// Derivatives of sin(z)/z, with a Taylor series near the origin.
inline RadialJet sinc_jet(double z) {
  RadialJet out{};
  if (z < 1.0) {
    for (int n = 0; n <= 4; ++n) {
      double sum = 0.0;
      for (int k = 0; k <= 14; ++k) {
        if (2 * k < n) continue;
        const double term = factorial(2 * k) / factorial(2 * k - n) / factorial(2 * k + 1);
        sum += ((k % 2) ? -term : term) * std::pow(z, 2 * k - n);
      }
      out[n] = sum;
    }
    return out;
  }
  const double s = std::sin(z), c = std::cos(z);
  const std::array<double, 4> sin_derivs = {s, c, -s, -c};
  for (int n = 0; n <= 4; ++n) {
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) {
      const int m = n - i;
      const double inv = ((m % 2) ? -1.0 : 1.0) * factorial(m) / std::pow(z, m + 1);
      sum += binomial(n, i) * sin_derivs[i % 4] * inv;
    }
    out[n] = sum;
  }
  return out;
}

}  // namespace detail

class RadialKernel;
RadialKernel build_kernel(KernelFamily family, const KernelParams& params = {});
RadialKernel augment_r2m(const RadialKernel& base, int m);
RadialKernel shape_substitute(const RadialKernel& base, double c);
RadialKernel higher_order_solution(const OperatorSpec& op, int order);

class RadialKernel {
 public:
  KernelFamily family() const { return family_; }
  const KernelParams& params() const { return params_; }
  /// Augmentation exponent m for `augmented` kernels.
  int augmentation() const { return augmentation_; }
  /// Chain order for `higher_order` kernels.
  int order() const { return order_; }
  bool singular_at_origin() const { return singular_; }
  const RadialKernel* base() const { return base_.get(); }

  std::string name() const { return std::string(family_name(family_)); }

  /// The shape parameter c when the family has one, 0 otherwise.
  double shape_parameter() const {
    switch (family_) {
      case KernelFamily::mq:
      case KernelFamily::imq:
      case KernelFamily::gaussian:
      case KernelFamily::substituted: return params_.shape;
      case KernelFamily::augmented: return base_->shape_parameter();
      default: return 0.0;
    }
  }

  /// Wavenumber k for Bessel-type families, 0 otherwise.
  double wavenumber() const {
    switch (family_) {
      case KernelFamily::helmholtz_gs_2d:
      case KernelFamily::helmholtz_gs_3d:
      case KernelFamily::helmholtz_fs_2d:
      case KernelFamily::mod_helmholtz_gs_2d: return params_.wavenumber;
      case KernelFamily::higher_order: return chain_laplace_ ? 0.0 : params_.wavenumber;
      case KernelFamily::augmented:
      case KernelFamily::substituted: return base_->wavenumber();
      default: return 0.0;
    }
  }

  RadialJet jet(double r) const {
    if (!(r >= 0.0)) throw ParameterError("kernel evaluated at negative or NaN distance");
    if (r == 0.0 && singular_) {
      throw SingularityError("kernel '" + name() + "' has a pole at r = 0");
    }
    return raw_jet(r);
  }

  double value(double r) const { return jet(r)[0]; }

  KernelValues eval_with_derivatives(double r) const {
    const auto j = jet(r);
    return {j[0], j[1], j[2]};
  }

 private:
  friend RadialKernel build_kernel(KernelFamily, const KernelParams&);
  friend RadialKernel augment_r2m(const RadialKernel&, int);
  friend RadialKernel shape_substitute(const RadialKernel&, double);
  friend RadialKernel higher_order_solution(const OperatorSpec&, int);

  RadialJet raw_jet(double r) const {
    using namespace detail;
    const double c = params_.shape;
    const double k = params_.wavenumber;
    switch (family_) {
      case KernelFamily::mq: return even_compose(power_jet(r * r + c * c, 0.5), r);
      case KernelFamily::imq: return even_compose(power_jet(r * r + c * c, -0.5), r);
      case KernelFamily::gaussian: {
        const double e = std::exp(-(r * r) / (c * c));
        const double a = -1.0 / (c * c);
        return even_compose({e, a * e, a * a * e, a * a * a * e, a * a * a * a * e}, r);
      }
      case KernelFamily::tps: return log_power_jet(r, 2, 1.0, 0.0);
      case KernelFamily::exp_decay: {
        const double w = params_.decay;
        const double e = std::exp(-w * r);
        return {e, -w * e, w * w * e, -w * w * w * e, w * w * w * w * e};
      }
      case KernelFamily::laplace_fs_1d: return {0.5 * r, 0.5, 0.0, 0.0, 0.0};
      case KernelFamily::laplace_fs_2d:
        return log_power_jet(r, 0, -1.0 / (2.0 * std::numbers::pi), 0.0);
      case KernelFamily::laplace_fs_3d: {
        RadialJet out{};
        for (int n = 0; n <= 4; ++n) {
          out[n] = ((n % 2) ? -1.0 : 1.0) * factorial(n) / (4.0 * std::numbers::pi * std::pow(r, n + 1));
        }
        return out;
      }
      case KernelFamily::helmholtz_gs_2d:
        return chain_scale(bessel_jet(bessel_j, 0, k * r, false), k);
      case KernelFamily::helmholtz_gs_3d: return chain_scale(sinc_jet(k * r), k);
      case KernelFamily::helmholtz_fs_2d: {
        auto out = chain_scale(bessel_jet(bessel_y, 0, k * r, false), k);
        for (auto& v : out) v *= 0.25;
        return out;
      }
      case KernelFamily::mod_helmholtz_gs_2d:
        return chain_scale(bessel_jet(bessel_i, 0, k * r, true), k);
      case KernelFamily::higher_order: return higher_order_jet(r);
      case KernelFamily::augmented: return augmented_jet(r);
      case KernelFamily::substituted: return substituted_jet(r);
    }
    throw UnsupportedError("unknown kernel family");
  }

  RadialJet higher_order_jet(double r) const {
    using namespace detail;
    if (chain_laplace_) return log_power_jet(r, 2 * order_, chain_log_, chain_const_);
    // u_m = r^m J_m(kr) / ((2k)^m m!)
    const double k = params_.wavenumber;
    const int m = order_;
    const RadialJet bj = chain_scale(bessel_jet(bessel_j, m, k * r, false), k);
    const double cm = 1.0 / (std::pow(2.0 * k, m) * factorial(m));
    RadialJet out{};
    for (int n = 0; n <= 4; ++n) {
      double sum = 0.0;
      for (int i = 0; i <= std::min(n, m); ++i) {
        const double rp = factorial(m) / factorial(m - i) * std::pow(r, m - i);
        sum += binomial(n, i) * rp * bj[n - i];
      }
      out[n] = cm * sum;
    }
    return out;
  }

  RadialJet augmented_jet(double r) const {
    using namespace detail;
    const int p = 2 * augmentation_;
    if (r == 0.0 && base_->singular_) {
      RadialJet out{};
      for (int n = 0; n <= 4; ++n) out[n] = (n < p - base_->pole_order_) ? 0.0 : kNaN;
      return out;
    }
    const RadialJet b = base_->raw_jet(r);
    RadialJet out{};
    for (int n = 0; n <= 4; ++n) {
      double sum = 0.0;
      for (int i = 0; i <= std::min(n, p); ++i) {
        if (r == 0.0 && i != p) continue;
        const double rp = factorial(p) / factorial(p - i) * std::pow(r, p - i);
        sum += binomial(n, i) * rp * b[n - i];
      }
      out[n] = sum;
    }
    return out;
  }

  RadialJet substituted_jet(double r) const {
    const double c = params_.shape;
    if (c == 0.0) return base_->raw_jet(r);
    const double rho = std::sqrt(r * r + c * c);
    const RadialJet f = base_->raw_jet(rho);
    const double c2 = c * c;
    const double g1 = r / rho;
    const double g2 = c2 / (rho * rho * rho);
    const double g3 = -3.0 * c2 * r / std::pow(rho, 5);
    const double g4 = -3.0 * c2 * (rho * rho - 5.0 * r * r) / std::pow(rho, 7);
    return {f[0], f[1] * g1, f[2] * g1 * g1 + f[1] * g2,
            f[3] * g1 * g1 * g1 + 3.0 * f[2] * g1 * g2 + f[1] * g3,
            f[4] * g1 * g1 * g1 * g1 + 6.0 * f[3] * g1 * g1 * g2 + f[2] * (3.0 * g2 * g2 + 4.0 * g1 * g3) +
                f[1] * g4};
  }

  KernelFamily family_ = KernelFamily::mq;
  KernelParams params_{};
  int augmentation_ = 0;
  int order_ = 0;
  bool singular_ = false;
  // Growth r^{-pole_order} at the origin; logarithmic poles count as 0.
  int pole_order_ = 0;
  bool chain_laplace_ = false;
  double chain_log_ = 0.0;
  double chain_const_ = 0.0;
  std::shared_ptr<const RadialKernel> base_;
};

inline RadialKernel build_kernel(KernelFamily family, const KernelParams& params) {
  auto require_positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ParameterError(std::string(what) + " must be positive");
  };
  RadialKernel kern;
  kern.family_ = family;
  kern.params_ = params;
  switch (family) {
    case KernelFamily::mq:
    case KernelFamily::imq:
      if (!(params.shape >= 0.0) || !std::isfinite(params.shape)) {
        throw ParameterError("shape parameter must be non-negative");
      }
      if (family == KernelFamily::imq && params.shape == 0.0) {
        kern.singular_ = true;
        kern.pole_order_ = 1;
      }
      break;
    case KernelFamily::gaussian: require_positive(params.shape, "gaussian shape parameter"); break;
    case KernelFamily::exp_decay: require_positive(params.decay, "decay rate"); break;
    case KernelFamily::laplace_fs_2d: kern.singular_ = true; break;
    case KernelFamily::laplace_fs_3d:
      kern.singular_ = true;
      kern.pole_order_ = 1;
      break;
    case KernelFamily::helmholtz_fs_2d:
      require_positive(params.wavenumber, "wavenumber");
      kern.singular_ = true;
      break;
    case KernelFamily::helmholtz_gs_2d:
    case KernelFamily::helmholtz_gs_3d:
    case KernelFamily::mod_helmholtz_gs_2d: require_positive(params.wavenumber, "wavenumber"); break;
    case KernelFamily::tps:
    case KernelFamily::laplace_fs_1d: break;
    case KernelFamily::augmented:
    case KernelFamily::higher_order:
    case KernelFamily::substituted:
      throw UnsupportedError("composite kernel '" + std::string(family_name(family)) +
                             "' must be built with its construction function");
  }
  return kern;
}

inline RadialKernel build_kernel(std::string_view name, const KernelParams& params = {}) {
  const auto family = family_from_name(name);
  if (!family) throw ParameterError("unknown kernel family '" + std::string(name) + "'");
  return build_kernel(*family, params);
}

/// phi_new(r) = r^{2m} phi_base(r).
inline RadialKernel augment_r2m(const RadialKernel& base, int m) {
  if (m < 0) throw ParameterError("augmentation order must be non-negative");
  RadialKernel kern;
  kern.family_ = KernelFamily::augmented;
  kern.params_ = base.params_;
  kern.augmentation_ = m;
  kern.singular_ = base.singular_ && 2 * m <= base.pole_order_;
  kern.pole_order_ = base.pole_order_ - 2 * m;
  kern.base_ = std::make_shared<const RadialKernel>(base);
  return kern;
}

/// phi_new(r) = phi_base(sqrt(r^2 + c^2)).
inline RadialKernel shape_substitute(const RadialKernel& base, double c) {
  if (!(c >= 0.0) || !std::isfinite(c)) throw ParameterError("shape parameter must be non-negative");
  RadialKernel kern;
  kern.family_ = KernelFamily::substituted;
  kern.params_ = base.params_;
  kern.params_.shape = c;
  kern.singular_ = c > 0.0 ? false : base.singular_;
  kern.pole_order_ = base.pole_order_;
  kern.base_ = std::make_shared<const RadialKernel>(base);
  return kern;
}

inline constexpr int kMaxSolutionOrder = 4;

/// Order-m member of the chain L{u_m} = u_{m-1}. For Helmholtz the chain
/// starts from J0(kr) and u_m = r^m J_m(kr) / ((2k)^m m!). For Laplace it
/// starts from the fundamental solution -ln(r)/(2 pi) and
/// u_m = r^{2m} (a_m ln r + b_m).
inline RadialKernel higher_order_solution(const OperatorSpec& op, int order) {
  if (order < 0 || order > kMaxSolutionOrder) {
    throw UnsupportedError("higher-order solutions are implemented for orders 0.." +
                           std::to_string(kMaxSolutionOrder));
  }
  if (op.kind == OperatorKind::helmholtz_2d) {
    KernelParams p;
    p.wavenumber = op.wavenumber;
    if (order == 0) return build_kernel(KernelFamily::helmholtz_gs_2d, p);
    RadialKernel kern;
    kern.family_ = KernelFamily::higher_order;
    kern.params_ = p;
    kern.order_ = order;
    return kern;
  }
  if (op.kind == OperatorKind::laplace_2d) {
    if (order == 0) return build_kernel(KernelFamily::laplace_fs_2d);
    double a = -1.0 / (2.0 * std::numbers::pi);
    double b = 0.0;
    for (int m = 1; m <= order; ++m) {
      const double q = 4.0 * m * m;
      a = a / q;
      b = (b - 4.0 * m * a) / q;
    }
    RadialKernel kern;
    kern.family_ = KernelFamily::higher_order;
    kern.order_ = order;
    kern.chain_laplace_ = true;
    kern.chain_log_ = a;
    kern.chain_const_ = b;
    return kern;
  }
  throw UnsupportedError("higher-order solutions are implemented for helmholtz_2d and laplace_2d only");
}

/// The chain for orders 0..max_order.
inline std::vector<RadialKernel> solution_chain(const OperatorSpec& op, int max_order) {
  std::vector<RadialKernel> chain;
  for (int m = 0; m <= max_order; ++m) chain.push_back(higher_order_solution(op, m));
  return chain;
}

/// Nonsingular radial general solution of L{u} = 0 in 2D.
inline RadialKernel general_solution(const OperatorSpec& op) {
  KernelParams p;
  p.wavenumber = op.wavenumber;
  switch (op.kind) {
    case OperatorKind::helmholtz_2d: return build_kernel(KernelFamily::helmholtz_gs_2d, p);
    case OperatorKind::mod_helmholtz_2d: return build_kernel(KernelFamily::mod_helmholtz_gs_2d, p);
    default:
      throw UnsupportedError("operator '" + op.name() + "' has no nonsingular radial general solution");
  }
}

/// First-order regulation: |phi'(r)| stays below 1e6 at r = 1e-2 ... 1e-8
/// and does not grow by a factor of 10 or more between successive samples.
inline bool check_regulation(const RadialKernel& kernel) {
  constexpr double cap = 1e6;
  double prev = -1.0;
  for (double r : {1e-2, 1e-4, 1e-6, 1e-8}) {
    const double d = std::abs(kernel.jet(r)[1]);
    if (!std::isfinite(d) || d > cap) return false;
    if (prev > 0.0 && d / prev >= 10.0) return false;
    prev = d;
  }
  return true;
}

/// Twice the mean nearest-neighbour spacing of the node cloud.
inline double default_shape_parameter(std::span<const Point> points) {
  return 2.0 * mean_nearest_neighbor_spacing(points);
}

}  // namespace rbfkit
