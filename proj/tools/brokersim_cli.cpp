// Command-line front end: simulate, sweep, validate.

#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "brokersim/brokersim.hpp"

namespace {

using namespace brokersim;

std::string cell(const std::optional<std::int64_t>& v) { return v ? std::to_string(*v) : "-"; }

void print_summary(const Scenario& s, const RunResult& r) {
  const Summary sum = r.summary();
  std::cout << "scenario " << s.name << ": broker=" << to_string(s.broker.policy)
            << " lb=" << to_string(s.lb_policy) << " dcs=";
  for (std::size_t i = 0; i < s.dc_placement.size(); ++i) std::cout << (i ? "+" : "") << region_name(s.dc_placement[i]);
  std::cout << "\n\nresponse time (ms)\n";
  std::cout << "id\trequests\tavg\tmin\tmax\n";
  for (const auto& row : sum.user_bases)
    std::cout << row.label << '\t' << row.requests << '\t' << cell(row.avg_ms) << '\t' << cell(row.min_ms) << '\t'
              << cell(row.max_ms) << '\n';
  const auto& o = sum.overall;
  std::cout << o.label << '\t' << o.requests << '\t' << cell(o.avg_ms) << '\t' << cell(o.min_ms) << '\t'
            << cell(o.max_ms) << "\n\nprocessing time (ms)\n";
  for (const auto& row : sum.data_centers)
    std::cout << row.label << '\t' << row.requests << '\t' << cell(row.avg_ms) << '\t' << cell(row.min_ms) << '\t'
              << cell(row.max_ms) << '\n';
  std::cout << "\ncloudlets " << r.stats.cloudlets_completed << "/" << r.stats.cloudlets_emitted << ", events "
            << r.stats.events_processed << ", end clock " << r.stats.end_clock << " ms\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-region cloud request routing simulator"};
  app.require_subcommand(1);

  std::string config;
  auto* simulate = app.add_subcommand("simulate", "Run one scenario and print its summary");
  simulate->add_option("config", config, "Scenario JSON file")->required();

  std::string out_path;
  unsigned parallel = 0;
  auto* sweep = app.add_subcommand("sweep", "Run the policy/placement grid and write a CSV report");
  sweep->add_option("config", config, "Scenario JSON file with optional sweep section")->required();
  sweep->add_option("--parallel", parallel, "Worker threads (default: $BROKERSIM_PARALLELISM or core count)");
  sweep->add_option("--out", out_path, "CSV destination (default: stdout)");

  auto* validate = app.add_subcommand("validate", "Check a scenario file and report the first problem");
  validate->add_option("config", config, "Scenario JSON file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto doc = read_document(config);
    if (*validate) {
      const SweepGrid grid = load_sweep_grid(doc);
      std::cout << "ok: " << grid.base.name << " (" << grid.cell_count() << " sweep cells)\n";
      return 0;
    }
    if (*simulate) {
      const Scenario s = load_scenario(doc);
      print_summary(s, run(s));
      return 0;
    }
    const SweepGrid grid = load_sweep_grid(doc);
    const auto rows = run_sweep(grid, parallel ? parallel : default_parallelism());
    if (out_path.empty()) {
      emit_report(grid.base.name, rows, std::cout);
    } else {
      std::ofstream out(out_path);
      if (!out) throw std::runtime_error("cannot open " + out_path);
      emit_report(grid.base.name, rows, out);
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
