#pragma once
/// @file config.hpp
/// JSON benchmark configuration. Needs nlohmann/json on the include path.

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "rbfkit/bench.hpp"

namespace rbfkit::bench {

namespace detail {

inline std::vector<std::size_t> parse_counts(const nlohmann::json& v, const char* key) {
  std::vector<std::size_t> out;
  auto one = [&](const nlohmann::json& x) {
    if (!x.is_number_integer() || x.get<long long>() < 0) {
      throw ConfigurationError(std::string("'") + key + "' must hold non-negative integers");
    }
    out.push_back(x.get<std::size_t>());
  };
  if (v.is_array()) {
    for (const auto& x : v) one(x);
  } else {
    one(v);
  }
  if (out.empty()) throw ConfigurationError(std::string("'") + key + "' is empty");
  return out;
}

inline double number_field(const nlohmann::json& obj, const std::string& key, const std::string& where) {
  const auto& v = obj.at(key);
  if (!v.is_number()) throw ConfigurationError("kernel '" + where + "': '" + key + "' must be a number");
  return v.get<double>();
}

inline KernelSpec parse_kernel(const nlohmann::json& v) {
  std::string name;
  if (v.is_string()) {
    name = v.get<std::string>();
  } else if (v.is_object() && v.contains("name") && v.at("name").is_string()) {
    name = v.at("name").get<std::string>();
  } else {
    throw ConfigurationError("kernel entries must be names or objects with a 'name' key");
  }
  const auto family = family_from_name(name);
  if (!family) throw ConfigurationError("unknown kernel '" + name + "'");
  KernelSpec spec;
  spec.family = *family;
  if (!v.is_object()) {
    if (*family == KernelFamily::augmented || *family == KernelFamily::substituted) {
      throw ConfigurationError("kernel '" + name + "' needs a 'base' kernel");
    }
    return spec;
  }
  for (const auto& [key, val] : v.items()) {
    if (key == "name") continue;
    if (key == "shape" || key == "c") {
      spec.params.shape = number_field(v, key, name);
      spec.shape_given = true;
    } else if (key == "wavenumber" || key == "k") {
      spec.params.wavenumber = number_field(v, key, name);
    } else if (key == "decay" || key == "omega") {
      spec.params.decay = number_field(v, key, name);
    } else if (key == "m") {
      if (!val.is_number_integer()) throw ConfigurationError("kernel '" + name + "': 'm' must be an integer");
      spec.m = val.get<int>();
    } else if (key == "base") {
      spec.base = std::make_shared<KernelSpec>(parse_kernel(val));
    } else {
      throw ConfigurationError("kernel '" + name + "': unknown parameter '" + key + "'");
    }
  }
  if ((*family == KernelFamily::augmented || *family == KernelFamily::substituted) && !spec.base) {
    throw ConfigurationError("kernel '" + name + "' needs a 'base' kernel");
  }
  return spec;
}

}  // namespace detail

inline BenchConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigurationError("config must be a JSON object");
  BenchConfig cfg;
  bool have_problems = false, have_methods = false, have_kernels = false, have_nb = false, have_ni = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "problems") {
      if (!v.is_array()) throw ConfigurationError("'problems' must be an array");
      for (const auto& p : v) {
        if (!p.is_string()) throw ConfigurationError("'problems' entries must be strings");
        const auto name = p.get<std::string>();
        const auto known = problem_names();
        if (std::find(known.begin(), known.end(), name) == known.end()) {
          throw ConfigurationError("unknown problem '" + name + "'");
        }
        cfg.problems.push_back(name);
      }
      have_problems = true;
    } else if (key == "methods") {
      if (!v.is_array()) throw ConfigurationError("'methods' must be an array");
      for (const auto& m : v) {
        const auto name = m.is_string() ? m.get<std::string>() : m.dump();
        const auto method = method_from_name(name);
        if (!method) throw ConfigurationError("unknown method '" + name + "'");
        cfg.methods.push_back(*method);
      }
      have_methods = true;
    } else if (key == "kernels") {
      if (!v.is_array()) throw ConfigurationError("'kernels' must be an array");
      for (const auto& k : v) cfg.kernels.push_back(detail::parse_kernel(k));
      have_kernels = true;
    } else if (key == "n_boundary") {
      cfg.n_boundary = detail::parse_counts(v, "n_boundary");
      have_nb = true;
    } else if (key == "n_interior") {
      cfg.n_interior = detail::parse_counts(v, "n_interior");
      have_ni = true;
    } else if (key == "seed") {
      if (!v.is_number_integer() || v.get<long long>() < 0) {
        throw ConfigurationError("'seed' must be a non-negative integer");
      }
      cfg.seed = v.get<std::uint64_t>();
    } else if (key == "bpm_order") {
      if (!v.is_number_integer() || v.get<int>() < 0 || v.get<int>() > kMaxSolutionOrder) {
        throw ConfigurationError("'bpm_order' must be an integer in 0.." + std::to_string(kMaxSolutionOrder));
      }
      cfg.bpm_order = v.get<int>();
    } else if (key == "timing") {
      if (!v.is_boolean()) throw ConfigurationError("'timing' must be a boolean");
      cfg.timing = v.get<bool>();
    } else {
      throw ConfigurationError("unknown config key '" + key + "'");
    }
  }
  if (!have_problems) throw ConfigurationError("missing key 'problems'");
  if (!have_methods) throw ConfigurationError("missing key 'methods'");
  if (!have_kernels) throw ConfigurationError("missing key 'kernels'");
  if (!have_nb) throw ConfigurationError("missing key 'n_boundary'");
  if (!have_ni) throw ConfigurationError("missing key 'n_interior'");
  if (cfg.kernels.empty()) throw ConfigurationError("'kernels' is empty");
  return cfg;
}

inline BenchConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigurationError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline BenchConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace rbfkit::bench
