#pragma once
/// @file bench.hpp
/// Manufactured benchmark problems, error metrics, the run/convergence
/// drivers and the CSV writer behind the rbfbench tool.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <numbers>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rbfkit/bkm.hpp"
#include "rbfkit/bpm.hpp"
#include "rbfkit/error.hpp"
#include "rbfkit/field.hpp"
#include "rbfkit/geometry.hpp"
#include "rbfkit/kernels.hpp"
#include "rbfkit/lsq.hpp"
#include "rbfkit/mkm.hpp"
#include "rbfkit/operator_spec.hpp"

namespace rbfkit::bench {

struct BenchmarkProblem {
  std::string name;
  DomainSpec domain;
  OperatorSpec op;
  ScalarField exact;
  std::function<double(const Point&)> f;
  /// f, L{f}, L^2{f}, ... for the boundary particle method. Empty when the
  /// chain is not available in closed form.
  std::vector<ScalarField> f_chain;
  std::vector<ParamInterval> dirichlet;
  /// Data-fitting stress case: no PDE, the target is fitted directly.
  bool fitting = false;
  bool homogeneous = false;
};

/// Max over `count` Halton probes of |L{u} - f| relative to max(1, |f|).
inline double manufactured_defect(const BenchmarkProblem& p, std::size_t count = 100) {
  const auto probes = generate_nodes(p.domain, 4, count, 3).interior;
  double worst = 0.0;
  for (const auto& x : probes) {
    const double lu = p.op.diffusion() * p.exact.laplacian(x) + p.op.reaction() * p.exact.value(x) -
                      p.op.drift().dot(p.exact.gradient(x));
    const double fx = p.f(x);
    worst = std::max(worst, std::abs(lu - fx) / std::max(1.0, std::abs(fx)));
  }
  return worst;
}

inline constexpr double kManufacturedTolerance = 1e-8;

inline std::vector<std::string> problem_names() {
  return {"helmholtz_disk", "poisson_square", "poisson_square_source", "helmholtz_disk_source", "step_fit"};
}

/// Builds a registered problem and checks that L{u} = f holds for the
/// manufactured solution.
inline BenchmarkProblem make_problem(std::string_view name) {
  BenchmarkProblem p;
  p.name = std::string(name);
  if (name == "helmholtz_disk") {
    const double k = 2.0;
    p.domain = DomainSpec::unit_disk();
    p.op = OperatorSpec::helmholtz(k);
    p.exact = {[k](const Point& x) { return std::sin(k * x.x()); },
               [k](const Point& x) { return Vector(k * std::cos(k * x.x()), 0.0); },
               [k](const Point& x) { return -k * k * std::sin(k * x.x()); }};
    p.f = [](const Point&) { return 0.0; };
    p.dirichlet = {{0.0, 0.5}};
    p.homogeneous = true;
  } else if (name == "poisson_square") {
    p.domain = DomainSpec::rectangle(1.0, 1.0);
    p.op = OperatorSpec::laplace();
    p.exact = {[](const Point& x) { return std::exp(x.x()) * std::sin(x.y()); },
               [](const Point& x) {
                 return Vector(std::exp(x.x()) * std::sin(x.y()), std::exp(x.x()) * std::cos(x.y()));
               },
               [](const Point&) { return 0.0; }};
    p.f = [](const Point&) { return 0.0; };
    p.dirichlet = {{0.0, 0.5}};
    p.homogeneous = true;
  } else if (name == "poisson_square_source") {
    p.domain = DomainSpec::rectangle(1.0, 1.0);
    p.op = OperatorSpec::laplace();
    p.exact = {[](const Point& x) { return x.x() * x.x() * x.y(); },
               [](const Point& x) { return Vector(2.0 * x.x() * x.y(), x.x() * x.x()); },
               [](const Point& x) { return 2.0 * x.y(); }};
    p.f = [](const Point& x) { return 2.0 * x.y(); };
    p.dirichlet = {{0.0, 0.5}};
  } else if (name == "helmholtz_disk_source") {
    const double k = 1.0;
    p.domain = DomainSpec::unit_disk();
    p.op = OperatorSpec::helmholtz(k);
    p.exact = {[k](const Point& x) { return std::sin(x.x()) + 1.0 / (k * k); },
               [](const Point& x) { return Vector(std::cos(x.x()), 0.0); },
               [](const Point& x) { return -std::sin(x.x()); }};
    p.f = [](const Point&) { return 1.0; };
    double c = 1.0;
    for (int n = 0; n <= kMaxSolutionOrder; ++n) {
      p.f_chain.push_back(ScalarField::constant(c));
      c *= k * k;
    }
    p.dirichlet = {{0.0, 1.0}};
  } else if (name == "step_fit") {
    p.domain = DomainSpec::rectangle(1.0, 1.0);
    p.op = OperatorSpec::laplace();
    p.exact = {[](const Point& x) { return x.x() >= 0.5 ? 1.0 : 0.0; },
               [](const Point&) { return Vector(Vector::Zero()); }, [](const Point&) { return 0.0; }};
    p.f = p.exact.value;
    p.fitting = true;
    return p;
  } else {
    throw ConfigurationError("unknown problem '" + std::string(name) + "'");
  }
  if (p.homogeneous) {
    for (int n = 0; n <= kMaxSolutionOrder; ++n) p.f_chain.push_back(ScalarField::zero());
  }
  const double defect = manufactured_defect(p);
  if (!(defect <= kManufacturedTolerance)) {
    throw ConfigurationError("problem '" + p.name + "' fails the manufactured-solution check");
  }
  return p;
}

struct ErrorMetrics {
  double l2_rel_err = 0.0;
  double max_err = 0.0;
  double boundary_band_err = 0.0;
  /// Set when the exact solution vanishes on the probes and l2_rel_err is
  /// the absolute norm.
  bool absolute = false;
};

inline ErrorMetrics compute_errors(const std::function<double(const Point&)>& u,
                                   const std::function<double(const Point&)>& exact, std::span<const Point> probes,
                                   const DomainSpec& domain) {
  if (probes.empty()) throw ParameterError("probe grid is empty");
  ErrorMetrics m;
  double num = 0.0, den = 0.0;
  for (const auto& x : probes) {
    const double ex = exact(x);
    const double e = std::abs(u(x) - ex);
    num += e * e;
    den += ex * ex;
    m.max_err = std::max(m.max_err, e);
    if (in_boundary_band(domain, x)) m.boundary_band_err = std::max(m.boundary_band_err, e);
  }
  if (den > 0.0) {
    m.l2_rel_err = std::sqrt(num / den);
  } else {
    m.l2_rel_err = std::sqrt(num);
    m.absolute = true;
  }
  return m;
}

enum class Method { bkm, bkm_direct, bpm, mkm, kansa, lsq };

inline constexpr std::array<std::string_view, 6> kMethodNames = {"bkm", "bkm_direct", "bpm", "mkm", "kansa", "lsq"};

inline std::string_view method_name(Method m) { return kMethodNames[static_cast<std::size_t>(m)]; }

inline std::optional<Method> method_from_name(std::string_view s) {
  for (std::size_t i = 0; i < kMethodNames.size(); ++i) {
    if (kMethodNames[i] == s) return static_cast<Method>(i);
  }
  return std::nullopt;
}

/// A kernel as named in a config. Shape-type kernels without an explicit
/// shape get the default rule from the node cloud at run time.
struct KernelSpec {
  KernelFamily family = KernelFamily::mq;
  KernelParams params;
  bool shape_given = false;
  /// augmented: r^{2m} base; substituted: base(sqrt(r^2 + c^2)) with c = params.shape.
  std::shared_ptr<KernelSpec> base;
  int m = 0;

  std::string label() const { return std::string(family_name(family)); }

  RadialKernel build(std::span<const Point> points) const {
    switch (family) {
      case KernelFamily::augmented: return augment_r2m(base->build(points), m);
      case KernelFamily::substituted:
        return shape_substitute(base->build(points), shape_given ? params.shape : default_shape_parameter(points));
      case KernelFamily::higher_order:
        throw ConfigurationError("kernel 'higher_order' is derived from the operator and cannot be configured");
      default: break;
    }
    KernelParams p = params;
    const bool has_shape =
        family == KernelFamily::mq || family == KernelFamily::imq || family == KernelFamily::gaussian;
    if (has_shape && !shape_given) p.shape = default_shape_parameter(points);
    return build_kernel(family, p);
  }
};

struct BenchConfig {
  std::vector<std::string> problems;
  std::vector<Method> methods;
  std::vector<KernelSpec> kernels;
  std::vector<std::size_t> n_boundary;
  std::vector<std::size_t> n_interior;
  std::uint64_t seed = 0;
  int bpm_order = kDefaultBpmOrder;
  /// Off by default so that identical configs give byte-identical CSV.
  bool timing = false;
};

struct ResultRow {
  std::string method;
  std::string kernel;
  std::string op;
  std::string domain;
  std::size_t n_boundary = 0;
  std::size_t n_interior = 0;
  double shape_param = 0.0;
  double wavenumber = 0.0;
  int M_order = 0;
  double l2_rel_err = 0.0;
  double max_err = 0.0;
  double boundary_band_err = 0.0;
  double cond_est = 1.0;
  double runtime_ms = 0.0;
  std::uint64_t seed = 0;
  /// Only written by the convergence study.
  int ladder_index = -1;
  /// Not part of the CSV.
  std::string problem;
};

struct RunReport {
  std::vector<ResultRow> rows;
  /// One message per solve that raised an error.
  std::vector<std::string> failures;
  /// Method/problem pairs that were skipped as inapplicable.
  std::vector<std::string> skipped;

  bool ok() const { return failures.empty(); }
};

/// Why `method` cannot run on `problem`, or empty when it can.
inline std::string inapplicable_reason(const BenchmarkProblem& p, Method method, int bpm_order) {
  const bool has_general_solution =
      p.op.kind == OperatorKind::helmholtz_2d || p.op.kind == OperatorKind::mod_helmholtz_2d;
  switch (method) {
    case Method::bkm:
    case Method::bkm_direct:
      if (p.fitting) return "data-fitting problem";
      if (!has_general_solution) return "operator " + p.op.name() + " has no nonsingular general solution";
      return {};
    case Method::bpm:
      if (p.fitting) return "data-fitting problem";
      if (p.op.kind != OperatorKind::helmholtz_2d) return "no nonsingular higher-order chain for " + p.op.name();
      if (static_cast<int>(p.f_chain.size()) < bpm_order) return "no closed-form f chain";
      return {};
    case Method::mkm:
      if (p.fitting) return "data-fitting problem";
      return {};
    case Method::kansa:
    case Method::lsq: return {};
  }
  return {};
}

/// True when the method ignores the configured kernel on this problem, so
/// a single row per node count is emitted.
inline bool kernel_independent(const BenchmarkProblem& p, Method method) {
  return method == Method::bpm || ((method == Method::bkm || method == Method::bkm_direct) && p.homogeneous);
}

namespace detail {

struct Outcome {
  ErrorMetrics err;
  double cond = 1.0;
  double runtime_ms = 0.0;
  std::string kernel;
  double shape = 0.0;
  int order = 0;
};

using Clock = std::chrono::steady_clock;

inline double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

inline NodeSet problem_nodes(const BenchmarkProblem& p, std::size_t nb, std::size_t ni, std::uint64_t seed) {
  NodeSet nodes = generate_nodes(p.domain, nb, ni, seed);
  if (!p.fitting) nodes = partition_boundary(nodes, std::span<const ParamInterval>(p.dirichlet));
  return nodes;
}

/// Errors of the recovered traces against the exact traces. Every trace
/// lives on the boundary, so the band error equals the max error.
inline ErrorMetrics trace_errors(const BenchmarkProblem& p, const NodeSet& nodes, const RecoveredTraces& tr) {
  ErrorMetrics m;
  double num = 0.0, den = 0.0;
  auto add = [&](double got, double want) {
    const double e = std::abs(got - want);
    num += e * e;
    den += want * want;
    m.max_err = std::max(m.max_err, e);
  };
  for (std::size_t j = 0; j < nodes.dirichlet_idx.size(); ++j) {
    const auto i = nodes.dirichlet_idx[j];
    add(tr.neumann_on_dirichlet[static_cast<Eigen::Index>(j)], p.exact.gradient(nodes.boundary[i]).dot(nodes.normals[i]));
  }
  for (std::size_t j = 0; j < nodes.neumann_idx.size(); ++j) {
    add(tr.dirichlet_on_neumann[static_cast<Eigen::Index>(j)], p.exact.value(nodes.boundary[nodes.neumann_idx[j]]));
  }
  m.boundary_band_err = m.max_err;
  m.l2_rel_err = den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
  m.absolute = !(den > 0.0);
  return m;
}

inline Outcome run_one(const BenchmarkProblem& p, Method method, const KernelSpec& kspec, std::size_t nb,
                       std::size_t ni, std::uint64_t seed, int bpm_order) {
  const NodeSet nodes = problem_nodes(p, nb, ni, seed);
  const auto points = nodes.all_points();
  const auto probes = probe_grid(p.domain);
  Outcome out;
  const auto t0 = Clock::now();

  if (method == Method::bpm) {
    MrmProblem prob{p.op, sample_boundary_data(nodes, p.exact), p.f_chain, bpm_order};
    const auto chain = solution_chain(p.op, bpm_order);
    const BpmSolution sol = solve_bpm(nodes, prob, chain);
    out.runtime_ms = elapsed_ms(t0);
    out.err = compute_errors([&](const Point& x) { return evaluate_bpm(sol, x); }, p.exact.value, probes, p.domain);
    out.cond = sol.condition_estimate;
    out.kernel = chain.back().name();
    out.order = bpm_order;
    return out;
  }

  if (method == Method::bkm || method == Method::bkm_direct) {
    const RadialKernel gs = general_solution(p.op);
    std::optional<RadialKernel> phi;
    std::vector<double> f;
    if (!p.homogeneous) {
      phi = kspec.build(points);
      f = sample_at_nodes(nodes, p.f);
      out.kernel = kspec.label();
      out.shape = phi->shape_parameter();
    } else {
      out.kernel = gs.name();
    }
    const BoundaryData bc = sample_boundary_data(nodes, p.exact);
    if (method == Method::bkm) {
      const BkmSolution sol = solve_indirect(nodes, p.op, bc, f, phi, gs);
      out.runtime_ms = elapsed_ms(t0);
      out.err = compute_errors([&](const Point& x) { return sol.value(x); }, p.exact.value, probes, p.domain);
      out.cond = sol.condition_estimate;
    } else {
      const RecoveredTraces tr = solve_direct(nodes, p.op, bc, f, phi, gs);
      out.runtime_ms = elapsed_ms(t0);
      out.err = trace_errors(p, nodes, tr);
      out.cond = tr.condition_estimate;
    }
    return out;
  }

  const RadialKernel phi = kspec.build(points);
  out.kernel = kspec.label();
  out.shape = phi.shape_parameter();
  SolutionField sol;
  if (p.fitting) {
    // Interpolation (kansa) uses every node once; least squares keeps the
    // same sources and fits twice as many field points.
    std::vector<SourcePoint> sources;
    for (const auto& x : points) sources.push_back({x, SourceRole::interior, Vector::Zero()});
    std::vector<FieldPoint> field;
    if (method == Method::kansa) {
      field = fitting_points(points, p.exact.value);
    } else {
      const auto dense = generate_nodes(p.domain, 2 * nb, 2 * ni, seed).all_points();
      field = fitting_points(dense, p.exact.value);
    }
    const auto sys = assemble_overdetermined(sources, field, p.op, phi, LsqScheme::kansa_like);
    const auto res = solve_least_squares(sys, LsqMethod::orthogonal);
    sol = lsq_solution_field(sources, p.op, phi, LsqScheme::kansa_like, res);
    if (method == Method::kansa) sol.method = "kansa";
  } else {
    const BoundaryData bc = sample_boundary_data(nodes, p.exact);
    const auto f = sample_at_nodes(nodes, p.f);
    switch (method) {
      case Method::mkm: sol = solve_mkm(assemble_mkm(nodes, p.op, bc, f, phi)); break;
      case Method::kansa: sol = solve_kansa_baseline(nodes, p.op, bc, f, phi); break;
      case Method::lsq: {
        const auto sources = source_points(nodes);
        const NodeSet dense = problem_nodes(p, 2 * nb, 2 * ni, seed);
        const auto field = kansa_field_points(dense, sample_boundary_data(dense, p.exact), p.f);
        const auto sys = assemble_overdetermined(sources, field, p.op, phi, LsqScheme::kansa_like);
        sol = lsq_solution_field(sources, p.op, phi, LsqScheme::kansa_like,
                                 solve_least_squares(sys, LsqMethod::orthogonal));
        break;
      }
      default: break;
    }
  }
  out.runtime_ms = elapsed_ms(t0);
  out.err = compute_errors(sol.evaluator, p.exact.value, probes, p.domain);
  out.cond = sol.condition_estimate;
  return out;
}

}  // namespace detail

/// Runs every (problem, method, kernel, node count) combination in config
/// order. n_boundary and n_interior are paired index by index; a single
/// value is broadcast against a longer list.
inline RunReport run_benchmark(const BenchConfig& cfg) {
  const std::size_t counts = std::max(cfg.n_boundary.size(), cfg.n_interior.size());
  auto pick = [](const std::vector<std::size_t>& v, std::size_t i) { return v.size() == 1 ? v[0] : v[i]; };
  if (cfg.n_boundary.empty() || cfg.n_interior.empty()) throw ConfigurationError("n_boundary and n_interior are required");
  if ((cfg.n_boundary.size() != 1 && cfg.n_boundary.size() != counts) ||
      (cfg.n_interior.size() != 1 && cfg.n_interior.size() != counts)) {
    throw ConfigurationError("n_boundary and n_interior lists must have equal length or length 1");
  }

  RunReport report;
  for (const auto& pname : cfg.problems) {
    const BenchmarkProblem p = make_problem(pname);
    for (Method method : cfg.methods) {
      const std::string why = inapplicable_reason(p, method, cfg.bpm_order);
      if (!why.empty()) {
        report.skipped.push_back(std::string(method_name(method)) + " on " + p.name + ": " + why);
        continue;
      }
      const std::size_t nk = kernel_independent(p, method) ? std::min<std::size_t>(1, cfg.kernels.size()) : cfg.kernels.size();
      for (std::size_t k = 0; k < nk; ++k) {
        for (std::size_t c = 0; c < counts; ++c) {
          const std::size_t nb = pick(cfg.n_boundary, c);
          const std::size_t ni = pick(cfg.n_interior, c);
          try {
            const auto o = detail::run_one(p, method, cfg.kernels[k], nb, ni, cfg.seed, cfg.bpm_order);
            ResultRow row;
            row.method = std::string(method_name(method));
            row.kernel = o.kernel;
            row.op = p.fitting ? "fit" : p.op.name();
            row.domain = domain_name(p.domain);
            row.n_boundary = nb;
            row.n_interior = ni;
            row.shape_param = o.shape;
            row.wavenumber = p.op.wavenumber;
            row.M_order = o.order;
            row.l2_rel_err = o.err.l2_rel_err;
            row.max_err = o.err.max_err;
            row.boundary_band_err = o.err.boundary_band_err;
            row.cond_est = o.cond;
            row.runtime_ms = cfg.timing ? o.runtime_ms : 0.0;
            row.seed = cfg.seed;
            row.problem = p.name;
            report.rows.push_back(std::move(row));
          } catch (const std::exception& e) {
            report.failures.push_back(std::string(method_name(method)) + " on " + p.name + " (" +
                                      cfg.kernels[k].label() + ", n_boundary=" + std::to_string(nb) +
                                      ", n_interior=" + std::to_string(ni) + "): " + e.what());
          }
        }
      }
    }
  }
  return report;
}

struct ConvergenceSummary {
  std::string label;
  bool improved = false;
};

/// Runs the config once per ladder entry with n_boundary set to that entry
/// and n_interior held at its first configured value.
inline RunReport convergence_study(const BenchConfig& cfg, std::span<const std::size_t> ladder,
                                   std::vector<ConvergenceSummary>* summary = nullptr) {
  if (ladder.size() < 3) throw ConfigurationError("ladder needs at least 3 node counts");
  for (std::size_t i = 1; i < ladder.size(); ++i) {
    if (ladder[i] <= ladder[i - 1]) throw ConfigurationError("ladder must be strictly increasing");
  }
  if (cfg.n_interior.empty()) throw ConfigurationError("n_interior is required");
  RunReport all;
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    BenchConfig step = cfg;
    step.n_boundary = {ladder[i]};
    step.n_interior = {cfg.n_interior.front()};
    RunReport r = run_benchmark(step);
    for (auto& row : r.rows) {
      row.ladder_index = static_cast<int>(i);
      all.rows.push_back(std::move(row));
    }
    all.failures.insert(all.failures.end(), r.failures.begin(), r.failures.end());
    if (i == 0) all.skipped = r.skipped;
  }
  if (summary) {
    summary->clear();
    const int last = static_cast<int>(ladder.size()) - 1;
    for (const auto& first : all.rows) {
      if (first.ladder_index != 0) continue;
      for (const auto& fin : all.rows) {
        if (fin.ladder_index == last && fin.problem == first.problem && fin.method == first.method &&
            fin.kernel == first.kernel && fin.shape_param == first.shape_param) {
          summary->push_back({first.problem + "/" + first.method + "/" + first.kernel,
                              fin.l2_rel_err < first.l2_rel_err});
          break;
        }
      }
    }
  }
  return all;
}

inline constexpr std::string_view kCsvHeader =
    "method,kernel,operator,domain,n_boundary,n_interior,shape_param,wavenumber,M_order,l2_rel_err,max_err,"
    "boundary_band_err,cond_est,runtime_ms,seed";

/// Shortest decimal string that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline void write_csv(std::ostream& os, std::span<const ResultRow> rows, bool with_ladder = false) {
  if (with_ladder) os << "ladder_index,";
  os << kCsvHeader << '\n';
  for (const auto& r : rows) {
    if (with_ladder) os << r.ladder_index << ',';
    os << r.method << ',' << r.kernel << ',' << r.op << ',' << r.domain << ',' << r.n_boundary << ','
       << r.n_interior << ',' << format_double(r.shape_param) << ',' << format_double(r.wavenumber) << ','
       << r.M_order << ',' << format_double(r.l2_rel_err) << ',' << format_double(r.max_err) << ','
       << format_double(r.boundary_band_err) << ',' << format_double(r.cond_est) << ','
       << format_double(r.runtime_ms) << ',' << r.seed << '\n';
  }
}

}  // namespace rbfkit::bench
