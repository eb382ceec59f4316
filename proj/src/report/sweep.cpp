#include "neusim/sweep.hpp"

#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <thread>

#include "neusim/error.hpp"
#include "neusim/workload/compiler.hpp"

namespace neusim::report {

namespace {

namespace fs = std::filesystem;

std::vector<std::string> scalars(const YAML::Node& n, const std::string& key) {
  std::vector<std::string> out;
  if (!n) return out;
  if (!n.IsSequence()) throw ConfigError("sweep key '" + key + "': expected a list");
  for (const auto& v : n) {
    if (!v.IsScalar()) throw ConfigError("sweep key '" + key + "': expected scalar entries");
    out.push_back(v.Scalar());
  }
  return out;
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() ? (base / path).lexically_normal() : path;
}

// Metrics copied into the sweep table, in column order.
const std::vector<std::string>& sweep_metrics() {
  static const std::vector<std::string> names{"latency_cycles", "latency_ms",  "fps",         "ddr_bw_achieved",
                                              "mac_utilization", "power_avg_w", "power_peak_w", "energy_j"};
  return names;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

}  // namespace

SweepSpec load_sweep_spec(const fs::path& path) {
  YAML::Node doc;
  try {
    doc = YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw IoError("cannot open sweep file '" + path.string() + "'");
  } catch (const YAML::Exception& e) {
    throw ConfigError("sweep file '" + path.string() + "': " + e.what());
  }
  const auto base = path.parent_path();
  SweepSpec spec;
  for (const auto& c : scalars(doc["configs"], "configs")) spec.configs.push_back(resolve(base, c));
  spec.overrides = scalars(doc["overrides"], "overrides");
  for (const auto& w : scalars(doc["workloads"], "workloads")) spec.workloads.push_back(resolve(base, w));
  if (doc["outputs"]) spec.outputs = resolve(base, doc["outputs"].as<std::string>());
  if (doc["jobs"]) spec.jobs = doc["jobs"].as<unsigned>();
  if (const auto axes = doc["axes"]) {
    if (!axes.IsSequence()) throw ConfigError("sweep key 'axes': expected a list");
    for (std::size_t i = 0; i < axes.size(); ++i) {
      const auto a = axes[i];
      const auto where = "axes." + std::to_string(i);
      SweepAxis axis;
      if (a["key"]) {
        axis.keys = {a["key"].as<std::string>()};
        for (const auto& v : scalars(a["values"], where + ".values")) axis.values.push_back({v});
      } else {
        axis.keys = scalars(a["keys"], where + ".keys");
        const auto vals = a["values"];
        if (!vals || !vals.IsSequence()) throw ConfigError("sweep key '" + where + ".values': expected a list");
        for (std::size_t j = 0; j < vals.size(); ++j) {
          axis.values.push_back(scalars(vals[j], where + ".values." + std::to_string(j)));
        }
      }
      if (axis.keys.empty()) throw ConfigError("sweep key '" + where + "' names no keys");
      for (const auto& v : axis.values) {
        if (v.size() != axis.keys.size()) {
          throw ConfigError("sweep key '" + where + ".values': each entry needs one value per key");
        }
      }
      spec.axes.push_back(std::move(axis));
    }
  }
  if (spec.configs.empty()) throw ConfigError("sweep key 'configs' must list at least one file");
  if (spec.workloads.empty()) throw ConfigError("sweep key 'workloads' must list at least one file");
  return spec;
}

std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
  // Every override key must exist before anything runs.
  const auto base = config::load_config(spec.configs);
  std::vector<std::string> probe = spec.overrides;
  for (const auto& axis : spec.axes) {
    for (std::size_t k = 0; k < axis.keys.size(); ++k) {
      if (!axis.values.empty()) probe.push_back(axis.keys[k] + "=" + axis.values.front()[k]);
    }
  }
  config::apply_overrides(base, probe);

  // Enumerate points: workloads outermost, last axis fastest.
  std::size_t combos = 1;
  for (const auto& axis : spec.axes) combos *= axis.values.size();
  std::vector<SweepRow> rows(spec.workloads.size() * combos);
  for (std::size_t w = 0; w < spec.workloads.size(); ++w) {
    for (std::size_t c = 0; c < combos; ++c) {
      auto& row = rows[w * combos + c];
      row.point = w * combos + c;
      row.workload = spec.workloads[w].string();
      std::size_t rem = c;
      std::vector<std::string> values;
      for (std::size_t a = spec.axes.size(); a-- > 0;) {
        const auto& axis = spec.axes[a];
        const auto& v = axis.values[rem % axis.values.size()];
        rem /= axis.values.size();
        values.insert(values.begin(), v.begin(), v.end());
      }
      row.values = std::move(values);
    }
  }

  auto run_point = [&](SweepRow& row) {
    try {
      std::vector<std::string> ov = spec.overrides;
      std::size_t i = 0;
      for (const auto& axis : spec.axes) {
        for (const auto& key : axis.keys) ov.push_back(key + "=" + row.values[i++]);
      }
      const auto cfg = config::apply_overrides(base, ov);
      const auto graph = workload::load_workload(row.workload, cfg.platform);
      const auto run = simulate(cfg, graph);
      const auto power = evaluate_power(cfg, run);
      row.summary = summarize(cfg, run, power ? &*power : nullptr);
      if (!spec.outputs.empty()) {
        const auto dir = spec.outputs / ("point" + std::to_string(row.point));
        fs::create_directories(dir);
        std::ofstream t(dir / "timeline.json");
        write_timeline(t, run.trace, run.reference_mhz);
        std::ofstream s(dir / "summary.csv");
        write_summary_csv(s, row.summary);
        if (power) {
          std::ofstream p(dir / "power.csv");
          write_power_csv(p, *power);
        }
        if (!t || !s) throw IoError("cannot write artifacts under '" + dir.string() + "'");
      }
      row.ok = true;
    } catch (const Error& e) {
      row.error = std::string(to_string(e.code())) + ": " + e.what();
    } catch (const std::exception& e) {
      row.error = std::string(to_string(ErrorCode::Internal)) + ": " + e.what();
    }
  };

  const unsigned jobs = std::max(1u, std::min<unsigned>(spec.jobs, static_cast<unsigned>(rows.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < rows.size();) run_point(rows[i]);
  };
  std::vector<std::thread> pool;
  for (unsigned j = 1; j < jobs; ++j) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return rows;
}

void write_sweep_csv(std::ostream& out, const SweepSpec& spec, const std::vector<SweepRow>& rows) {
  out << "point,workload";
  for (const auto& axis : spec.axes) {
    for (const auto& key : axis.keys) out << ',' << csv_field(key);
  }
  out << ",status";
  for (const auto& m : sweep_metrics()) out << ',' << m;
  out << ",error\n";
  for (const auto& row : rows) {
    out << row.point << ',' << csv_field(row.workload);
    for (const auto& v : row.values) out << ',' << csv_field(v);
    out << ',' << (row.ok ? "ok" : "failed");
    for (const auto& m : sweep_metrics()) {
      const auto* metric = row.ok ? row.summary.find(m) : nullptr;
      out << ',' << (metric ? metric->value : "");
    }
    out << ',' << csv_field(row.error) << '\n';
  }
}

}  // namespace neusim::report
