// neusim-cli: run, sweep, compile, validate and generate workloads.
//
// Every failure prints one line `error[E_CODE]: message` on stderr and exits
// with the code's status (see exit_status below).

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "neusim/error.hpp"
#include "neusim/report.hpp"
#include "neusim/simulator.hpp"
#include "neusim/sweep.hpp"
#include "neusim/workload/compiler.hpp"
#include "neusim/workload/models.hpp"

namespace {

using namespace neusim;
namespace fs = std::filesystem;

int exit_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return 2;
    case ErrorCode::Io: return 3;
    case ErrorCode::Config: return 4;
    case ErrorCode::Workload: return 5;
    case ErrorCode::Deadlock: return 6;
    case ErrorCode::Simulation: return 7;
    case ErrorCode::Power: return 8;
    case ErrorCode::Internal: return 70;
  }
  return 70;
}

int fail(ErrorCode code, const std::string& msg) {
  std::cerr << "error[" << to_string(code) << "]: " << msg << '\n';
  return exit_status(code);
}

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("neusim");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("NEUSIM_LOG")) {
    const auto level = spdlog::level::from_str(env);
    if (level == spdlog::level::off && std::string(env) != "off") {
      spdlog::warn("NEUSIM_LOG='{}' is not a log level; keeping 'warn'", env);
    } else {
      spdlog::set_level(level);
    }
  }
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  return out;
}

struct Common {
  std::vector<std::string> configs;
  std::vector<std::string> overrides;
  bool power = false;
  std::optional<std::uint64_t> pti;
  std::string trace;
  std::string report;
  std::string power_trace;
};

// Flags that shadow config keys become overrides so runs and sweeps share one
// override language.
config::SimConfig load(const Common& c) {
  std::vector<fs::path> paths(c.configs.begin(), c.configs.end());
  auto cfg = config::load_config(paths);
  auto ov = c.overrides;
  if (c.power) ov.push_back("sim.power_enabled=true");
  if (c.pti) ov.push_back("sim.pti_cycles=" + std::to_string(*c.pti));
  if (!c.trace.empty()) ov.push_back("sim.trace_path=" + c.trace);
  if (!c.report.empty()) ov.push_back("sim.report_path=" + c.report);
  if (!c.power_trace.empty()) ov.push_back("sim.power_path=" + c.power_trace);
  return ov.empty() ? cfg : config::apply_overrides(cfg, ov);
}

void add_config_flags(CLI::App* app, Common& c, bool outputs) {
  app->add_option("-c,--config", c.configs, "Configuration file (repeatable, later files win)")->required();
  app->add_option("-O,--override", c.overrides, "Dotted key=value override (repeatable)");
  if (!outputs) return;
  app->add_flag("--power", c.power, "Enable the power trace (sim.power_enabled)");
  app->add_option("--pti", c.pti, "Power-trace interval in reference cycles (sim.pti_cycles)");
  app->add_option("--trace", c.trace, "Timeline JSON path (sim.trace_path)");
  app->add_option("--report", c.report, "Summary CSV path (sim.report_path)");
  app->add_option("--power-trace", c.power_trace, "Power CSV path (sim.power_path)");
}

int cmd_run(const Common& c, const std::string& workload_path) {
  const auto cfg = load(c);
  spdlog::info("loading workload {}", workload_path);
  const auto graph = workload::load_workload(workload_path, cfg.platform);
  spdlog::info("{} tasks, {} barriers", graph.tasks.size(), graph.barriers.size());
  const auto run = simulate(cfg, graph);
  spdlog::info("finished at {} cycles after {} kernel events", run.cycles, run.fired_events);
  const auto power = report::evaluate_power(cfg, run);
  const auto summary = report::summarize(cfg, run, power ? &*power : nullptr);

  const fs::path trace = cfg.sim.trace_path.empty() ? "timeline.json" : cfg.sim.trace_path;
  const fs::path csv = cfg.sim.report_path.empty() ? "summary.csv" : cfg.sim.report_path;
  auto t = open_out(trace);
  report::write_timeline(t, run.trace, run.reference_mhz);
  auto s = open_out(csv);
  report::write_summary_csv(s, summary);
  if (power) {
    const fs::path pcsv = cfg.sim.power_path.empty() ? "power.csv" : cfg.sim.power_path;
    auto p = open_out(pcsv);
    report::write_power_csv(p, *power);
  }
  std::cout << "latency " << run.cycles << " cycles (" << summary.find("latency_ms")->value << " ms)";
  if (power) std::cout << ", average power " << summary.find("power_avg_w")->value << " W";
  std::cout << '\n';
  return 0;
}

int cmd_sweep(const std::string& spec_path, std::optional<unsigned> jobs, const std::string& out_path) {
  auto spec = report::load_sweep_spec(spec_path);
  if (jobs) spec.jobs = *jobs;
  spdlog::info("sweep over {} workload(s), {} job(s)", spec.workloads.size(), spec.jobs);
  const auto rows = report::run_sweep(spec);
  std::size_t failed = 0;
  for (const auto& r : rows) {
    if (!r.ok) {
      ++failed;
      spdlog::warn("point {} failed: {}", r.point, r.error);
    }
  }
  if (out_path.empty()) {
    report::write_sweep_csv(std::cout, spec, rows);
  } else {
    auto out = open_out(out_path);
    report::write_sweep_csv(out, spec, rows);
  }
  if (failed) {
    std::cerr << "warning: " << failed << " of " << rows.size() << " sweep point(s) failed\n";
    return 1;
  }
  return 0;
}

int cmd_compile(const Common& c, const std::string& in, const std::string& out) {
  const auto cfg = load(c);
  const auto graph = workload::compile_reference(workload::load_op_list(in), cfg.platform);
  auto f = open_out(out);
  f << workload::to_json(graph).dump(1) << '\n';
  std::cout << "wrote " << graph.tasks.size() << " tasks, " << graph.barriers.size() << " barriers to " << out << '\n';
  return 0;
}

int cmd_validate(const std::string& in) {
  const auto graph = workload::load_task_graph(in);  // validates
  std::cout << "ok: " << graph.tasks.size() << " tasks, " << graph.barriers.size() << " barriers\n";
  return 0;
}

int cmd_generate(const std::string& model, const std::string& out, std::uint32_t layers) {
  workload::OpList ops;
  if (model == "resnet50") {
    ops = workload::resnet50_like();
  } else if (model == "conv-stack") {
    ops = workload::conv_stack(layers);
  } else if (model == "memory-bound") {
    ops = workload::memory_bound(layers);
  } else {
    throw Error(ErrorCode::Usage, "unknown model '" + model + "' (resnet50, conv-stack, memory-bound)");
  }
  auto f = open_out(out);
  f << workload::to_json(ops).dump(1) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Cycle-approximate NPU performance and power simulator"};
  app.require_subcommand(1);

  Common common;
  std::string workload_path;
  auto* run = app.add_subcommand("run", "Simulate one workload");
  add_config_flags(run, common, true);
  run->add_option("-w,--workload", workload_path, "Task graph or operator list (JSON)")->required();

  std::string spec_path;
  std::string sweep_out;
  std::optional<unsigned> jobs;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("spec", spec_path, "Sweep file (YAML)")->required();
  sweep->add_option("-j,--jobs", jobs, "Parallel points");
  sweep->add_option("--report", sweep_out, "Sweep CSV path (default: stdout)");

  std::string compile_in;
  std::string compile_out;
  auto* compile = app.add_subcommand("compile", "Tile an operator list into a task graph");
  add_config_flags(compile, common, false);
  compile->add_option("-w,--workload", compile_in, "Operator list (JSON)")->required();
  compile->add_option("-o,--output", compile_out, "Task graph output path")->required();

  std::string validate_in;
  auto* validate = app.add_subcommand("validate", "Check a task graph");
  validate->add_option("graph", validate_in, "Task graph (JSON)")->required();

  std::string model;
  std::string gen_out;
  std::uint32_t layers = 10;
  auto* generate = app.add_subcommand("generate", "Write a synthetic operator list");
  generate->add_option("model", model, "resnet50 | conv-stack | memory-bound")->required();
  generate->add_option("-o,--output", gen_out, "Operator list output path")->required();
  generate->add_option("--layers", layers, "Layer count for conv-stack and memory-bound");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorCode::Usage, e.what());
  }

  try {
    if (*run) return cmd_run(common, workload_path);
    if (*sweep) return cmd_sweep(spec_path, jobs, sweep_out);
    if (*compile) return cmd_compile(common, compile_in, compile_out);
    if (*validate) return cmd_validate(validate_in);
    if (*generate) return cmd_generate(model, gen_out, layers);
  } catch (const Error& e) {
    return fail(e.code(), e.what());
  } catch (const std::exception& e) {
    return fail(ErrorCode::Internal, e.what());
  }
  return fail(ErrorCode::Usage, "no subcommand");
}
