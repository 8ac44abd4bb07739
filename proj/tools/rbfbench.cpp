// rbfbench: run benchmark configs and convergence ladders, list kernels.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rbfkit/bench.hpp"
#include "rbfkit/config.hpp"

namespace {

std::vector<std::size_t> parse_ladder(const std::string& text) {
  std::vector<std::size_t> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(item, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != item.size()) {
      throw rbfkit::ConfigurationError("ladder entry '" + item + "' is not a node count");
    }
    out.push_back(v);
  }
  return out;
}

void write_file(const std::string& path, const std::vector<rbfkit::bench::ResultRow>& rows, bool ladder) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw rbfkit::ConfigurationError("cannot write '" + path + "'");
  rbfkit::bench::write_csv(out, rows, ladder);
}

int report(const rbfkit::bench::RunReport& r) {
  for (const auto& s : r.skipped) std::cerr << "skipped: " << s << '\n';
  for (const auto& f : r.failures) std::cerr << "error: " << f << '\n';
  return r.ok() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial basis function solver benchmarks"};
  app.require_subcommand(1);

  std::string config_path, out_path, ladder_text;
  bool timing = false;

  auto* run = app.add_subcommand("run", "Run every combination in a config and write CSV");
  run->add_option("--config", config_path, "JSON config")->required();
  run->add_option("--out", out_path, "CSV output path")->required();
  run->add_flag("--timing", timing, "Record solve wall-clock time in runtime_ms");

  auto* converge = app.add_subcommand("converge", "Run a boundary node-count ladder and write CSV");
  converge->add_option("--config", config_path, "JSON config")->required();
  converge->add_option("--ladder", ladder_text, "Comma-separated boundary node counts")->required();
  converge->add_option("--out", out_path, "CSV output path")->required();
  converge->add_flag("--timing", timing, "Record solve wall-clock time in runtime_ms");

  auto* kernels = app.add_subcommand("kernels", "Kernel catalog");
  kernels->require_subcommand(1);
  auto* list = kernels->add_subcommand("list", "Print catalog kernel names");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list->parsed()) {
      for (auto name : rbfkit::kKernelFamilyNames) std::cout << name << '\n';
      return 0;
    }
    auto cfg = rbfkit::bench::load_config(config_path);
    if (timing) cfg.timing = true;
    if (run->parsed()) {
      const auto r = rbfkit::bench::run_benchmark(cfg);
      write_file(out_path, r.rows, false);
      return report(r);
    }
    const auto ladder = parse_ladder(ladder_text);
    std::vector<rbfkit::bench::ConvergenceSummary> summary;
    const auto r = rbfkit::bench::convergence_study(cfg, ladder, &summary);
    write_file(out_path, r.rows, true);
    for (const auto& s : summary) {
      std::cout << s.label << ": final l2_rel_err " << (s.improved ? "below" : "not below") << " first\n";
    }
    return report(r);
  } catch (const rbfkit::ConfigurationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
