#include "neusim/config.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "neusim/error.hpp"
#include "neusim/power/model.hpp"

namespace neusim::config {

std::string_view to_string(EngineClass c) {
  switch (c) {
    case EngineClass::Reference: return "reference";
    case EngineClass::Dpu: return "dpu";
    case EngineClass::Dsp: return "dsp";
    case EngineClass::Dma: return "dma";
    case EngineClass::Noc: return "noc";
    case EngineClass::Cb: return "cb";
    case EngineClass::Ddr: return "ddr";
  }
  return "reference";
}

std::optional<EngineClass> engine_class_from_string(std::string_view s) {
  for (auto c : {EngineClass::Reference, EngineClass::Dpu, EngineClass::Dsp, EngineClass::Dma, EngineClass::Noc,
                 EngineClass::Cb, EngineClass::Ddr}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

double Frequencies::of(EngineClass c) const {
  switch (c) {
    case EngineClass::Reference: return reference;
    case EngineClass::Dpu: return dpu;
    case EngineClass::Dsp: return dsp;
    case EngineClass::Dma: return dma;
    case EngineClass::Noc: return noc;
    case EngineClass::Cb: return cb;
    case EngineClass::Ddr: return ddr;
  }
  return reference;
}

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

std::string scalar_text(const YAML::Node& n) {
  if (n.IsScalar()) return n.Scalar();
  std::ostringstream os;
  os << n;
  return os.str();
}

template <typename T>
T convert(const YAML::Node& n, const std::string& path);

template <>
std::uint64_t convert<std::uint64_t>(const YAML::Node& n, const std::string& path) {
  const std::string text = n.IsScalar() ? n.Scalar() : std::string{};
  std::uint64_t value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (!n.IsScalar() || text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    throw ConfigError("key '" + path + "': expected unsigned integer, got '" + scalar_text(n) + "'");
  }
  return value;
}

template <>
std::uint32_t convert<std::uint32_t>(const YAML::Node& n, const std::string& path) {
  auto v = convert<std::uint64_t>(n, path);
  if (v > 0xFFFFFFFFull) throw ConfigError("key '" + path + "': value out of range");
  return static_cast<std::uint32_t>(v);
}

template <>
double convert<double>(const YAML::Node& n, const std::string& path) {
  try {
    if (!n.IsScalar()) throw YAML::BadConversion(n.Mark());
    return n.as<double>();
  } catch (const YAML::Exception&) {
    throw ConfigError("key '" + path + "': expected number, got '" + scalar_text(n) + "'");
  }
}

template <>
bool convert<bool>(const YAML::Node& n, const std::string& path) {
  try {
    if (!n.IsScalar()) throw YAML::BadConversion(n.Mark());
    return n.as<bool>();
  } catch (const YAML::Exception&) {
    throw ConfigError("key '" + path + "': expected boolean, got '" + scalar_text(n) + "'");
  }
}

template <>
std::string convert<std::string>(const YAML::Node& n, const std::string& path) {
  if (!n.IsScalar()) throw ConfigError("key '" + path + "': expected string");
  return n.Scalar();
}

/// Map node viewed at a dotted key path. Tracks consumed keys so unknown keys
/// can be rejected.
class Reader {
 public:
  Reader(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (node_ && !node_.IsMap()) throw ConfigError("key '" + (path_.empty() ? "<root>" : path_) + "': expected a map");
  }

  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return node_ && node_[key] && !node_[key].IsNull(); }

  YAML::Node raw(const std::string& key) {
    seen_.insert(key);
    return node_ ? node_[key] : YAML::Node{};
  }

  template <typename T>
  T req(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError("missing required key '" + join(path_, key) + "'");
    return convert<T>(node_[key], join(path_, key));
  }

  template <typename T>
  T opt(const std::string& key, T fallback) {
    seen_.insert(key);
    if (!has(key)) return fallback;
    return convert<T>(node_[key], join(path_, key));
  }

  template <typename T>
  std::optional<T> maybe(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) return std::nullopt;
    return convert<T>(node_[key], join(path_, key));
  }

  Reader child(const std::string& key) {
    seen_.insert(key);
    if (!has(key)) throw ConfigError("missing required key '" + join(path_, key) + "'");
    return Reader(node_[key], join(path_, key));
  }

  void reject_unknown() const {
    if (!node_) return;
    for (const auto& kv : node_) {
      const auto key = kv.first.Scalar();
      if (!seen_.count(key)) throw ConfigError("unknown key '" + join(path_, key) + "'");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

std::vector<double> parse_number_list(const YAML::Node& n, const std::string& path) {
  if (!n || !n.IsSequence()) throw ConfigError("key '" + path + "': expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < n.size(); ++i) out.push_back(convert<double>(n[i], path + "." + std::to_string(i)));
  return out;
}

power::LeakageLut parse_lut(const YAML::Node& n, const std::string& path) {
  Reader r(n, path);
  power::LeakageLut lut;
  lut.temps_c = parse_number_list(r.raw("temps_c"), join(path, "temps_c"));
  lut.voltages_v = parse_number_list(r.raw("voltages_v"), join(path, "voltages_v"));
  auto rows = r.raw("ratios");
  if (!rows || !rows.IsSequence()) throw ConfigError("key '" + join(path, "ratios") + "': expected a list of rows");
  for (std::size_t i = 0; i < rows.size(); ++i) {
    lut.ratios.push_back(parse_number_list(rows[i], join(path, "ratios") + "." + std::to_string(i)));
  }
  r.reject_unknown();
  return lut;
}

std::vector<power::VfPoint> parse_vf_points(const YAML::Node& n, const std::string& path) {
  if (!n || !n.IsSequence()) throw ConfigError("key '" + path + "': expected a list of [freq_hz, volts] pairs");
  std::vector<power::VfPoint> points;
  for (std::size_t i = 0; i < n.size(); ++i) {
    auto p = parse_number_list(n[i], path + "." + std::to_string(i));
    if (p.size() != 2) throw ConfigError("key '" + path + "." + std::to_string(i) + "': expected [freq_hz, volts]");
    points.push_back({p[0], p[1]});
  }
  return points;
}

power::VfCurve parse_vf_curve(const YAML::Node& n, const std::string& path) {
  Reader r(n, path);
  power::VfCurve curve;
  if (r.has("points")) {
    curve.charts.push_back({r.opt<double>("temp_c", 25.0), parse_vf_points(r.raw("points"), join(path, "points"))});
  } else if (r.has("by_temp")) {
    auto charts = r.raw("by_temp");
    if (!charts.IsSequence()) throw ConfigError("key '" + join(path, "by_temp") + "': expected a list");
    for (std::size_t i = 0; i < charts.size(); ++i) {
      const auto cpath = join(path, "by_temp") + "." + std::to_string(i);
      Reader c(charts[i], cpath);
      curve.charts.push_back({c.req<double>("temp_c"), parse_vf_points(c.raw("points"), join(cpath, "points"))});
      c.reject_unknown();
    }
  } else {
    throw ConfigError("missing required key '" + join(path, "points") + "'");
  }
  r.reject_unknown();
  return curve;
}

struct PowerLibrary {
  std::map<std::string, power::VfCurve> curves;
  std::map<std::string, power::LeakageLut> luts;
};

struct Inherited {
  std::optional<double> temp0_c;
  std::optional<double> voltage0_v;
  std::optional<power::LeakageLut> lut;
  std::optional<power::VfCurve> vf;
  std::optional<std::string> clock;
};

power::PowerNode parse_power_node(const YAML::Node& n, const std::string& path, const PowerLibrary& lib,
                                  const Inherited& parent) {
  Reader r(n, path);
  power::PowerNode node;
  node.name = r.req<std::string>("name");
  node.leakage.p_lkg0_w = r.req<double>("p_lkg0_w");
  node.cdyn_idle_f = r.req<double>("cdyn_idle_f");
  node.cdyn_active_f = r.req<double>("cdyn_active_f");

  Inherited mine = parent;
  if (auto t = r.maybe<double>("temp0_c")) mine.temp0_c = *t;
  if (auto v = r.maybe<double>("voltage0_v")) mine.voltage0_v = *v;
  if (auto c = r.maybe<std::string>("clock")) mine.clock = *c;
  if (r.has("lkg_lut")) {
    auto raw = r.raw("lkg_lut");
    if (raw.IsScalar()) {
      auto it = lib.luts.find(raw.Scalar());
      if (it == lib.luts.end()) throw ConfigError("key '" + join(path, "lkg_lut") + "': unknown table '" + raw.Scalar() + "'");
      mine.lut = it->second;
    } else {
      mine.lut = parse_lut(raw, join(path, "lkg_lut"));
    }
  }
  if (r.has("vf_curve")) {
    auto raw = r.raw("vf_curve");
    if (raw.IsScalar()) {
      auto it = lib.curves.find(raw.Scalar());
      if (it == lib.curves.end()) throw ConfigError("key '" + join(path, "vf_curve") + "': unknown curve '" + raw.Scalar() + "'");
      mine.vf = it->second;
    } else {
      mine.vf = parse_vf_curve(raw, join(path, "vf_curve"));
    }
  }
  if (!mine.temp0_c) throw ConfigError("missing required key '" + join(path, "temp0_c") + "'");
  if (!mine.voltage0_v) throw ConfigError("missing required key '" + join(path, "voltage0_v") + "'");
  if (!mine.lut) throw ConfigError("missing required key '" + join(path, "lkg_lut") + "'");
  if (!mine.vf) throw ConfigError("missing required key '" + join(path, "vf_curve") + "'");
  if (!mine.clock) throw ConfigError("missing required key '" + join(path, "clock") + "'");
  node.leakage.temp0_c = *mine.temp0_c;
  node.leakage.voltage0_v = *mine.voltage0_v;
  node.leakage.lut = *mine.lut;
  node.vf_curve = *mine.vf;
  node.clock = *mine.clock;
  node.binding = r.maybe<std::string>("binding");

  if (r.has("children")) {
    auto kids = r.raw("children");
    if (!kids.IsSequence()) throw ConfigError("key '" + join(path, "children") + "': expected a list");
    for (std::size_t i = 0; i < kids.size(); ++i) {
      node.children.push_back(parse_power_node(kids[i], join(path, "children") + "." + std::to_string(i), lib, mine));
    }
  } else {
    r.raw("children");
  }
  r.reject_unknown();
  return node;
}

power::PowerConfig parse_power(Reader r) {
  PowerLibrary lib;
  if (r.has("vf_curves")) {
    Reader curves(r.raw("vf_curves"), join(r.path(), "vf_curves"));
    for (const auto& kv : r.raw("vf_curves")) {
      const auto name = kv.first.Scalar();
      lib.curves[name] = parse_vf_curve(curves.raw(name), join(curves.path(), name));
    }
  } else {
    r.raw("vf_curves");
  }
  if (r.has("lkg_luts")) {
    Reader luts(r.raw("lkg_luts"), join(r.path(), "lkg_luts"));
    for (const auto& kv : r.raw("lkg_luts")) {
      const auto name = kv.first.Scalar();
      lib.luts[name] = parse_lut(luts.raw(name), join(luts.path(), name));
    }
  } else {
    r.raw("lkg_luts");
  }
  power::PowerConfig cfg;
  cfg.temp_c = r.req<double>("temp_c");
  if (!r.has("tree")) throw ConfigError("missing required key '" + join(r.path(), "tree") + "'");
  cfg.root = parse_power_node(r.raw("tree"), join(r.path(), "tree"), lib, Inherited{});
  r.reject_unknown();
  return cfg;
}

PlatformConfig parse_platform(Reader& doc) {
  PlatformConfig p;
  p.tiles = doc.req<std::uint32_t>("tiles");
  p.dpus_per_tile = doc.req<std::uint32_t>("dpus_per_tile");
  p.dsps_per_tile = doc.req<std::uint32_t>("dsps_per_tile");

  auto arr = doc.child("dpu_array");
  p.dpu_array.rows = arr.req<std::uint32_t>("rows");
  p.dpu_array.cols = arr.req<std::uint32_t>("cols");
  p.dpu_array.macs_per_cell = arr.opt<std::uint32_t>("macs_per_cell", 16);
  p.dpu_array.ppe_throughput = arr.opt<std::uint32_t>("ppe_throughput", 0);
  p.dpu_array.block_buffer_bytes = arr.req<std::uint64_t>("block_buffer_bytes");
  arr.reject_unknown();

  auto stencils = doc.raw("stencil_set");
  if (!stencils || stencils.IsNull()) throw ConfigError("missing required key 'stencil_set'");
  if (!stencils.IsSequence()) throw ConfigError("key 'stencil_set': expected a list");
  for (std::size_t i = 0; i < stencils.size(); ++i) {
    Reader s(stencils[i], "stencil_set." + std::to_string(i));
    p.stencil_set.push_back(
        {s.req<std::uint32_t>("tile_x"), s.req<std::uint32_t>("tile_y"), s.req<std::uint32_t>("tile_oc")});
    s.reject_unknown();
  }

  auto dsp = doc.child("dsp");
  p.dsp.simd_width = dsp.req<std::uint32_t>("simd_width");
  p.dsp.unroll_block = dsp.req<std::uint32_t>("unroll_block");
  p.dsp.pipeline_block = dsp.req<std::uint32_t>("pipeline_block");
  dsp.reject_unknown();

  auto cb = doc.child("cb");
  p.cb.size_bytes = cb.req<std::uint64_t>("size_bytes");
  p.cb.ports = cb.req<std::uint32_t>("ports");
  p.cb.bw_bytes_per_cycle = cb.req<double>("bw_bytes_per_cycle");
  p.cb.latency = cb.req<std::uint64_t>("latency");
  cb.reject_unknown();

  auto ddr = doc.child("ddr");
  p.ddr.bw_bytes_per_cycle = ddr.req<double>("bw_bytes_per_cycle");
  p.ddr.banks = ddr.req<std::uint32_t>("banks");
  p.ddr.page_bytes = ddr.req<std::uint64_t>("page_bytes");
  p.ddr.tCL = ddr.req<std::uint64_t>("tCL");
  p.ddr.tRCD = ddr.req<std::uint64_t>("tRCD");
  p.ddr.tRP = ddr.req<std::uint64_t>("tRP");
  p.ddr.burst_bytes = ddr.req<std::uint64_t>("burst_bytes");
  p.ddr.refresh_interval = ddr.req<std::uint64_t>("refresh_interval");
  p.ddr.refresh_penalty = ddr.req<std::uint64_t>("refresh_penalty");
  const auto policy = ddr.req<std::string>("page_policy");
  if (policy == "open") {
    p.ddr.page_policy = PagePolicy::Open;
  } else if (policy == "closed") {
    p.ddr.page_policy = PagePolicy::Closed;
  } else {
    throw ConfigError("key 'ddr.page_policy': expected 'open' or 'closed', got '" + policy + "'");
  }
  ddr.reject_unknown();

  auto dma = doc.child("dma");
  p.dma.channels = dma.req<std::uint32_t>("channels");
  p.dma.max_request_bytes = dma.opt<std::uint64_t>("max_request_bytes", 4096);
  p.dma.outstanding = dma.opt<std::uint32_t>("outstanding", 8);
  p.dma.bw_bytes_per_cycle = dma.req<double>("bw_bytes_per_cycle");
  dma.reject_unknown();

  auto noc = doc.child("noc");
  p.noc.port_latency = noc.req<std::uint64_t>("port_latency");
  p.noc.port_bw_bytes_per_cycle = noc.req<double>("port_bw_bytes_per_cycle");
  noc.reject_unknown();

  auto sched = doc.child("scheduler");
  p.scheduler.fifo_depth = sched.req<std::uint32_t>("fifo_depth");
  p.scheduler.barrier_slots = sched.opt<std::uint32_t>("barrier_slots", 64);
  sched.reject_unknown();

  auto f = doc.child("freq_mhz");
  p.freq_mhz.reference = f.req<double>("reference");
  p.freq_mhz.dpu = f.req<double>("dpu");
  p.freq_mhz.dsp = f.req<double>("dsp");
  p.freq_mhz.dma = f.req<double>("dma");
  p.freq_mhz.noc = f.req<double>("noc");
  p.freq_mhz.cb = f.req<double>("cb");
  p.freq_mhz.ddr = f.req<double>("ddr");
  f.reject_unknown();

  p.dsp_kernels = doc.opt<std::string>("dsp_kernels", "");
  return p;
}

SimOptions parse_sim(Reader r) {
  SimOptions s;
  s.trace_path = r.opt<std::string>("trace_path", "");
  s.report_path = r.opt<std::string>("report_path", "");
  s.power_path = r.opt<std::string>("power_path", "");
  s.run_limit = r.maybe<std::uint64_t>("run_limit");
  s.power_enabled = r.opt<bool>("power_enabled", false);
  s.pti_cycles = r.opt<std::uint64_t>("pti_cycles", 0);
  r.reject_unknown();
  return s;
}

void require_positive(double v, const char* key) {
  if (!(v > 0.0) || std::isnan(v)) throw ConfigError(std::string("key '") + key + "' must be > 0");
}

void require_count(std::uint64_t v, const char* key) {
  if (v < 1) throw ConfigError(std::string("key '") + key + "' must be >= 1");
}

YAML::Node emit_lut(const power::LeakageLut& lut) {
  YAML::Node n;
  for (double t : lut.temps_c) n["temps_c"].push_back(t);
  for (double v : lut.voltages_v) n["voltages_v"].push_back(v);
  for (const auto& row : lut.ratios) {
    YAML::Node r;
    for (double x : row) r.push_back(x);
    n["ratios"].push_back(r);
  }
  return n;
}

YAML::Node emit_node(const power::PowerNode& node) {
  YAML::Node n;
  n["name"] = node.name;
  n["p_lkg0_w"] = node.leakage.p_lkg0_w;
  n["temp0_c"] = node.leakage.temp0_c;
  n["voltage0_v"] = node.leakage.voltage0_v;
  n["lkg_lut"] = emit_lut(node.leakage.lut);
  n["cdyn_idle_f"] = node.cdyn_idle_f;
  n["cdyn_active_f"] = node.cdyn_active_f;
  YAML::Node vf;
  for (const auto& chart : node.vf_curve.charts) {
    YAML::Node c;
    c["temp_c"] = chart.temp_c;
    for (const auto& p : chart.points) {
      YAML::Node pair;
      pair.push_back(p.freq_hz);
      pair.push_back(p.volts);
      c["points"].push_back(pair);
    }
    vf["by_temp"].push_back(c);
  }
  n["vf_curve"] = vf;
  n["clock"] = node.clock;
  if (node.binding) n["binding"] = *node.binding;
  for (const auto& child : node.children) n["children"].push_back(emit_node(child));
  return n;
}

YAML::Node load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path.string() + "'");
  YAML::Node doc;
  try {
    doc = YAML::Load(in);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config file '" + path.string() + "': " + e.what());
  }
  if (doc.IsNull()) return YAML::Node(YAML::NodeType::Map);
  if (!doc.IsMap()) throw ConfigError("config file '" + path.string() + "': top level must be a map");
  // Relative table paths resolve against the file that names them.
  if (doc["dsp_kernels"] && doc["dsp_kernels"].IsScalar()) {
    std::filesystem::path p = doc["dsp_kernels"].Scalar();
    if (!p.empty() && p.is_relative()) {
      doc["dsp_kernels"] = (path.parent_path() / p).lexically_normal().string();
    }
  }
  return doc;
}

}  // namespace

YAML::Node deep_merge(const YAML::Node& base, const YAML::Node& overlay) {
  if (!base || !base.IsMap() || !overlay || !overlay.IsMap()) return YAML::Clone(overlay);
  YAML::Node out = YAML::Clone(base);
  for (const auto& kv : overlay) {
    const auto key = kv.first.Scalar();
    if (out[key] && out[key].IsMap() && kv.second.IsMap()) {
      out[key] = deep_merge(out[key], kv.second);
    } else {
      out[key] = YAML::Clone(kv.second);
    }
  }
  return out;
}

SimConfig parse_config(const YAML::Node& doc) {
  Reader root(doc, "");
  SimConfig cfg;
  cfg.platform = parse_platform(root);
  cfg.sim = root.has("sim") ? parse_sim(root.child("sim")) : (root.raw("sim"), SimOptions{});
  if (root.has("power")) {
    cfg.power = parse_power(root.child("power"));
  } else {
    root.raw("power");
  }
  root.reject_unknown();
  validate(cfg);
  return cfg;
}

void validate(const SimConfig& cfg) {
  const auto& p = cfg.platform;
  require_count(p.tiles, "tiles");
  require_count(p.dpus_per_tile, "dpus_per_tile");
  require_count(p.dsps_per_tile, "dsps_per_tile");
  require_count(p.dpu_array.rows, "dpu_array.rows");
  require_count(p.dpu_array.cols, "dpu_array.cols");
  require_count(p.dpu_array.macs_per_cell, "dpu_array.macs_per_cell");
  require_count(p.dpu_array.block_buffer_bytes, "dpu_array.block_buffer_bytes");
  if (p.stencil_set.empty()) throw ConfigError("key 'stencil_set' must list at least one stencil");
  for (std::size_t i = 0; i < p.stencil_set.size(); ++i) {
    const auto& s = p.stencil_set[i];
    const auto key = "stencil_set." + std::to_string(i);
    if (s.tile_x < 1 || s.tile_y < 1 || s.tile_oc < 1) throw ConfigError("key '" + key + "': extents must be >= 1");
    if (std::uint64_t{s.tile_x} * s.tile_y > std::uint64_t{p.dpu_array.rows} * p.dpu_array.cols) {
      throw ConfigError("key '" + key + "': tile_x*tile_y exceeds the PE array");
    }
  }
  require_count(p.dsp.simd_width, "dsp.simd_width");
  require_count(p.dsp.unroll_block, "dsp.unroll_block");
  require_count(p.dsp.pipeline_block, "dsp.pipeline_block");
  require_count(p.cb.size_bytes, "cb.size_bytes");
  require_count(p.cb.ports, "cb.ports");
  require_positive(p.cb.bw_bytes_per_cycle, "cb.bw_bytes_per_cycle");
  require_positive(p.ddr.bw_bytes_per_cycle, "ddr.bw_bytes_per_cycle");
  require_count(p.ddr.banks, "ddr.banks");
  require_count(p.ddr.page_bytes, "ddr.page_bytes");
  require_count(p.ddr.burst_bytes, "ddr.burst_bytes");
  if (p.ddr.page_bytes % p.ddr.burst_bytes != 0) {
    throw ConfigError("key 'ddr.page_bytes' must be a multiple of 'ddr.burst_bytes'");
  }
  if (p.ddr.refresh_interval > 0 && p.ddr.refresh_penalty >= p.ddr.refresh_interval) {
    throw ConfigError("key 'ddr.refresh_penalty' must be smaller than 'ddr.refresh_interval'");
  }
  require_count(p.dma.channels, "dma.channels");
  require_count(p.dma.max_request_bytes, "dma.max_request_bytes");
  require_count(p.dma.outstanding, "dma.outstanding");
  require_positive(p.dma.bw_bytes_per_cycle, "dma.bw_bytes_per_cycle");
  require_positive(p.noc.port_bw_bytes_per_cycle, "noc.port_bw_bytes_per_cycle");
  require_count(p.scheduler.fifo_depth, "scheduler.fifo_depth");
  require_count(p.scheduler.barrier_slots, "scheduler.barrier_slots");
  require_positive(p.freq_mhz.reference, "freq_mhz.reference");
  require_positive(p.freq_mhz.dpu, "freq_mhz.dpu");
  require_positive(p.freq_mhz.dsp, "freq_mhz.dsp");
  require_positive(p.freq_mhz.dma, "freq_mhz.dma");
  require_positive(p.freq_mhz.noc, "freq_mhz.noc");
  require_positive(p.freq_mhz.cb, "freq_mhz.cb");
  require_positive(p.freq_mhz.ddr, "freq_mhz.ddr");

  if (cfg.sim.power_enabled) {
    if (cfg.sim.pti_cycles < 1) throw ConfigError("key 'sim.pti_cycles' must be >= 1 when power is enabled");
    if (!cfg.power) throw ConfigError("missing required key 'power' (power is enabled)");
  }
  if (cfg.power) {
    try {
      power::validate(*cfg.power);
    } catch (const PowerError& e) {
      throw ConfigError(std::string("power configuration: ") + e.what());
    }
  }
}

YAML::Node to_yaml(const SimConfig& cfg) {
  const auto& p = cfg.platform;
  YAML::Node n;
  n["tiles"] = p.tiles;
  n["dpus_per_tile"] = p.dpus_per_tile;
  n["dsps_per_tile"] = p.dsps_per_tile;
  n["dpu_array"]["rows"] = p.dpu_array.rows;
  n["dpu_array"]["cols"] = p.dpu_array.cols;
  n["dpu_array"]["macs_per_cell"] = p.dpu_array.macs_per_cell;
  n["dpu_array"]["ppe_throughput"] = p.dpu_array.ppe_throughput;
  n["dpu_array"]["block_buffer_bytes"] = p.dpu_array.block_buffer_bytes;
  for (const auto& s : p.stencil_set) {
    YAML::Node sn;
    sn["tile_x"] = s.tile_x;
    sn["tile_y"] = s.tile_y;
    sn["tile_oc"] = s.tile_oc;
    n["stencil_set"].push_back(sn);
  }
  n["dsp"]["simd_width"] = p.dsp.simd_width;
  n["dsp"]["unroll_block"] = p.dsp.unroll_block;
  n["dsp"]["pipeline_block"] = p.dsp.pipeline_block;
  n["cb"]["size_bytes"] = p.cb.size_bytes;
  n["cb"]["ports"] = p.cb.ports;
  n["cb"]["bw_bytes_per_cycle"] = p.cb.bw_bytes_per_cycle;
  n["cb"]["latency"] = p.cb.latency;
  n["ddr"]["bw_bytes_per_cycle"] = p.ddr.bw_bytes_per_cycle;
  n["ddr"]["banks"] = p.ddr.banks;
  n["ddr"]["page_bytes"] = p.ddr.page_bytes;
  n["ddr"]["tCL"] = p.ddr.tCL;
  n["ddr"]["tRCD"] = p.ddr.tRCD;
  n["ddr"]["tRP"] = p.ddr.tRP;
  n["ddr"]["burst_bytes"] = p.ddr.burst_bytes;
  n["ddr"]["refresh_interval"] = p.ddr.refresh_interval;
  n["ddr"]["refresh_penalty"] = p.ddr.refresh_penalty;
  n["ddr"]["page_policy"] = p.ddr.page_policy == PagePolicy::Open ? "open" : "closed";
  n["dma"]["channels"] = p.dma.channels;
  n["dma"]["max_request_bytes"] = p.dma.max_request_bytes;
  n["dma"]["outstanding"] = p.dma.outstanding;
  n["dma"]["bw_bytes_per_cycle"] = p.dma.bw_bytes_per_cycle;
  n["noc"]["port_latency"] = p.noc.port_latency;
  n["noc"]["port_bw_bytes_per_cycle"] = p.noc.port_bw_bytes_per_cycle;
  n["scheduler"]["fifo_depth"] = p.scheduler.fifo_depth;
  n["scheduler"]["barrier_slots"] = p.scheduler.barrier_slots;
  for (auto c : {EngineClass::Reference, EngineClass::Dpu, EngineClass::Dsp, EngineClass::Dma, EngineClass::Noc,
                 EngineClass::Cb, EngineClass::Ddr}) {
    n["freq_mhz"][std::string(to_string(c))] = p.freq_mhz.of(c);
  }
  n["dsp_kernels"] = p.dsp_kernels;

  n["sim"]["trace_path"] = cfg.sim.trace_path;
  n["sim"]["report_path"] = cfg.sim.report_path;
  n["sim"]["power_path"] = cfg.sim.power_path;
  if (cfg.sim.run_limit) {
    n["sim"]["run_limit"] = *cfg.sim.run_limit;
  } else {
    n["sim"]["run_limit"] = YAML::Node(YAML::NodeType::Null);
  }
  n["sim"]["power_enabled"] = cfg.sim.power_enabled;
  n["sim"]["pti_cycles"] = cfg.sim.pti_cycles;

  if (cfg.power) {
    n["power"]["temp_c"] = cfg.power->temp_c;
    n["power"]["tree"] = emit_node(cfg.power->root);
  }
  return n;
}

std::string serialize(const SimConfig& cfg) {
  YAML::Emitter out;
  out.SetDoublePrecision(17);
  out << to_yaml(cfg);
  return out.c_str();
}

SimConfig load_config(std::span<const std::filesystem::path> paths) {
  if (paths.empty()) throw ConfigError("no configuration files given");
  YAML::Node merged(YAML::NodeType::Map);
  for (const auto& path : paths) merged = deep_merge(merged, load_file(path));
  return parse_config(merged);
}

SimConfig apply_overrides(const SimConfig& cfg, std::span<const std::string> overrides) {
  YAML::Node doc = to_yaml(cfg);
  for (const auto& spec : overrides) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw ConfigError("override '" + spec + "': expected dotted.key=value");
    }
    const std::string key = spec.substr(0, eq);
    const std::string value = spec.substr(eq + 1);

    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string part; std::getline(ss, part, '.');) parts.push_back(part);

    // yaml-cpp nodes are handles; walking with operator= would rebind, so keep
    // the chain of parents and assign into the last one.
    YAML::Node parent = doc;
    for (std::size_t i = 0; i < parts.size(); ++i) {
      const auto& part = parts[i];
      YAML::Node next;
      if (parent.IsMap()) {
        if (!parent[part]) throw ConfigError("override '" + spec + "': unknown key '" + key + "'");
        next = parent[part];
      } else if (parent.IsSequence()) {
        std::size_t idx = 0;
        auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), idx);
        if (ec != std::errc{} || ptr != part.data() + part.size() || idx >= parent.size()) {
          throw ConfigError("override '" + spec + "': unknown key '" + key + "'");
        }
        next = parent[idx];
      } else {
        throw ConfigError("override '" + spec + "': unknown key '" + key + "'");
      }
      if (i + 1 == parts.size()) {
        YAML::Node replacement;
        if (next.IsScalar() || next.IsNull()) {
          replacement = YAML::Node(value);
        } else {
          try {
            replacement = YAML::Load(value);
          } catch (const YAML::Exception& e) {
            throw ConfigError("override '" + spec + "': unparsable value: " + e.what());
          }
        }
        if (parent.IsMap()) {
          parent[part] = replacement;
        } else {
          parent[std::stoul(part)] = replacement;
        }
      } else {
        parent.reset(next);
      }
    }
  }
  return parse_config(doc);
}

}  // namespace neusim::config
