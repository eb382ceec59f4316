#include "neusim/workload/task_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "neusim/error.hpp"

namespace neusim::workload {

using json = nlohmann::ordered_json;

std::uint64_t volume(const Dims& d) {
  return std::uint64_t{d[0]} * d[1] * d[2] * d[3];
}

std::uint64_t compressed_bytes(std::uint64_t bytes, double ratio) {
  if (bytes == 0) return 0;
  const auto c = static_cast<std::uint64_t>(std::floor(static_cast<double>(bytes) * ratio));
  return std::max<std::uint64_t>(1, c);
}

std::uint64_t TensorDesc::storage_bytes() const {
  return compressed ? compressed_bytes(bytes(), compression_ratio) : bytes();
}

std::array<std::uint64_t, 4> TensorDesc::strides() const {
  std::array<std::uint64_t, 4> s{};
  s[kC] = elem_bytes;
  s[kW] = s[kC] * dims[kC];
  s[kH] = s[kW] * dims[kW];
  s[kN] = s[kH] * dims[kH];
  return s;
}

std::uint64_t DmaDescriptor::pattern_bytes() const {
  if (dims.empty()) return 0;
  return std::accumulate(dims.begin(), dims.end(), std::uint64_t{1}, std::multiplies<>());
}

std::string_view to_string(Opcode op) {
  switch (op) {
    case Opcode::Conv2D: return "Conv2D";
    case Opcode::DepthwiseConv2D: return "DepthwiseConv2D";
    case Opcode::MatMul: return "MatMul";
    case Opcode::Eltwise: return "Eltwise";
    case Opcode::Activation: return "Activation";
    case Opcode::Pool: return "Pool";
    case Opcode::Softmax: return "Softmax";
  }
  return "?";
}

std::string_view to_string(EngineKind e) { return e == EngineKind::Dpu ? "dpu" : "dsp"; }

std::string_view to_string(FusedPost f) {
  switch (f) {
    case FusedPost::None: return "none";
    case FusedPost::Activation: return "activation";
    case FusedPost::EltwiseAdd: return "eltwise_add";
    case FusedPost::BatchNorm: return "batch_norm";
  }
  return "none";
}

std::optional<Opcode> opcode_from_string(std::string_view s) {
  for (auto op : {Opcode::Conv2D, Opcode::DepthwiseConv2D, Opcode::MatMul, Opcode::Eltwise, Opcode::Activation,
                  Opcode::Pool, Opcode::Softmax}) {
    if (to_string(op) == s) return op;
  }
  return std::nullopt;
}

EngineKind affinity_of(Opcode op) {
  switch (op) {
    case Opcode::Conv2D:
    case Opcode::DepthwiseConv2D:
    case Opcode::MatMul: return EngineKind::Dpu;
    default: return EngineKind::Dsp;
  }
}

std::optional<std::size_t> TaskGraph::find_tensor(std::string_view id) const {
  for (std::size_t i = 0; i < tensors.size(); ++i) {
    if (tensors[i].id == id) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> TaskGraph::find_operator(std::string_view id) const {
  for (std::size_t i = 0; i < operators.size(); ++i) {
    if (operators[i].id == id) return i;
  }
  return std::nullopt;
}

std::uint32_t input_span(std::uint32_t out_extent, std::uint32_t kernel, std::uint32_t stride, std::uint32_t in_dim) {
  if (out_extent == 0) return 0;
  const std::uint64_t span = std::uint64_t{out_extent - 1} * stride + kernel;
  return static_cast<std::uint32_t>(std::min<std::uint64_t>(span, in_dim));
}

std::uint32_t input_row_begin(std::uint32_t out_row, std::uint32_t stride, std::uint32_t pad) {
  const std::uint64_t pos = std::uint64_t{out_row} * stride;
  return pos > pad ? static_cast<std::uint32_t>(pos - pad) : 0;
}

OpCount op_compute_count(const std::vector<TensorDesc>& tensors, const Operator& op, const Region& region) {
  OpCount count;
  const std::uint64_t n = region.size();
  if (n == 0) return count;
  switch (op.opcode) {
    case Opcode::Conv2D: {
      const std::uint64_t ic = tensors.at(op.inputs.at(0)).dims[kC];
      count.macs = n * op.kx * op.ky * ic;
      break;
    }
    case Opcode::DepthwiseConv2D: count.macs = n * op.kx * op.ky; break;
    case Opcode::MatMul: {
      const std::uint64_t k = tensors.at(op.inputs.at(0)).dims[kC];
      count.macs = n * k;
      break;
    }
    case Opcode::Eltwise:
    case Opcode::Activation:
    case Opcode::Pool:
    case Opcode::Softmax: count.elems = n; break;
  }
  return count;
}

// ---------------------------------------------------------------------------
// JSON parsing

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw WorkloadError(where + ": " + what);
}

const json& field(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
  const auto& v = field(obj, key, where);
  try {
    if constexpr (std::is_unsigned_v<T>) {
      if (!v.is_number_unsigned()) fail(where, std::string("field '") + key + "' must be a nonnegative integer");
    }
    return v.get<T>();
  } catch (const nlohmann::json::exception& e) {
    fail(where, std::string("field '") + key + "': " + e.what());
  }
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback, const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
  return get<T>(obj, key, where);
}

Dims parse_dims(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty() || v.size() > 4) fail(where, "dims must list 1 to 4 extents");
  Dims d{1, 1, 1, 1};
  // Fewer than four extents are right-aligned (innermost = C).
  const std::size_t skip = 4 - v.size();
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number_unsigned()) fail(where, "dims must be nonnegative integers");
    d[skip + i] = v[i].get<std::uint32_t>();
  }
  return d;
}

TensorDesc parse_tensor(const json& t, const std::string& where) {
  TensorDesc d;
  d.id = get<std::string>(t, "id", where);
  d.dims = parse_dims(field(t, "dims", where), where + " '" + d.id + "'");
  d.elem_bytes = get_or<std::uint32_t>(t, "elem_bytes", 1, where);
  if (t.contains("location")) {
    const auto& loc = t.at("location");
    if (loc.is_string() && loc.get<std::string>() == "ddr") {
      d.location = {Location::Kind::Ddr, 0};
    } else if (loc.is_object() && loc.contains("cb")) {
      d.location = {Location::Kind::Cb, get<std::uint32_t>(loc, "cb", where)};
    } else {
      fail(where + " '" + d.id + "'", "location must be \"ddr\" or {\"cb\": tile}");
    }
  }
  d.base_addr = get_or<std::uint64_t>(t, "base_addr", 0, where);
  d.sparsity_density = get_or<double>(t, "sparsity_density", 1.0, where);
  d.compressed = get_or<bool>(t, "compressed", false, where);
  d.compression_ratio = get_or<double>(t, "compression_ratio", 1.0, where);
  return d;
}

json tensor_to_json(const TensorDesc& d) {
  json t;
  t["id"] = d.id;
  t["dims"] = d.dims;
  t["elem_bytes"] = d.elem_bytes;
  if (d.location.kind == Location::Kind::Ddr) {
    t["location"] = "ddr";
  } else {
    t["location"] = {{"cb", d.location.tile}};
  }
  t["base_addr"] = d.base_addr;
  if (d.sparsity_density != 1.0) t["sparsity_density"] = d.sparsity_density;
  if (d.compressed) {
    t["compressed"] = true;
    t["compression_ratio"] = d.compression_ratio;
  }
  return t;
}

using IdIndex = std::map<std::string, std::size_t, std::less<>>;

std::size_t resolve(const IdIndex& index, const std::string& id, const std::string& where, const char* kind) {
  auto it = index.find(id);
  if (it == index.end()) fail(where, std::string("dangling ") + kind + " reference '" + id + "'");
  return it->second;
}

std::string default_dsp_kernel(const Operator& op) {
  switch (op.opcode) {
    case Opcode::Eltwise: return "eltwise_add";
    case Opcode::Pool: return "pool";
    case Opcode::Softmax: return "softmax";
    default: return {};
  }
}

Operator parse_operator(const json& o, const IdIndex& tensors, const std::string& where) {
  Operator op;
  op.id = get<std::string>(o, "id", where);
  const auto here = where + " '" + op.id + "'";
  const auto opcode = get<std::string>(o, "opcode", here);
  auto parsed = opcode_from_string(opcode);
  if (!parsed) fail(here, "unsupported opcode '" + opcode + "'");
  op.opcode = *parsed;
  if (o.contains("kernel")) {
    const auto& k = o.at("kernel");
    op.kx = get<std::uint32_t>(k, "kx", here);
    op.ky = get<std::uint32_t>(k, "ky", here);
  }
  op.stride = get_or<std::uint32_t>(o, "stride", 1, here);
  op.pad = get_or<std::uint32_t>(o, "pad", 0, here);
  const auto post = get_or<std::string>(o, "fused_post", "none", here);
  bool found = false;
  for (auto f : {FusedPost::None, FusedPost::Activation, FusedPost::EltwiseAdd, FusedPost::BatchNorm}) {
    if (to_string(f) == post) {
      op.fused_post = f;
      found = true;
    }
  }
  if (!found) fail(here, "unknown fused_post '" + post + "'");
  op.kernel = get_or<std::string>(o, "dsp_kernel", default_dsp_kernel(op), here);
  for (const auto& in : field(o, "inputs", here)) op.inputs.push_back(resolve(tensors, in.get<std::string>(), here, "tensor"));
  if (o.contains("weights") && !o.at("weights").is_null()) {
    op.weights = resolve(tensors, o.at("weights").get<std::string>(), here, "tensor");
  }
  for (const auto& out : field(o, "outputs", here)) op.outputs.push_back(resolve(tensors, out.get<std::string>(), here, "tensor"));
  return op;
}

json operator_to_json(const Operator& op, const std::vector<TensorDesc>& tensors) {
  json o;
  o["id"] = op.id;
  o["opcode"] = to_string(op.opcode);
  if (op.kx != 1 || op.ky != 1) o["kernel"] = {{"kx", op.kx}, {"ky", op.ky}};
  if (op.stride != 1) o["stride"] = op.stride;
  if (op.pad != 0) o["pad"] = op.pad;
  if (op.fused_post != FusedPost::None) o["fused_post"] = to_string(op.fused_post);
  if (!op.kernel.empty()) o["dsp_kernel"] = op.kernel;
  o["inputs"] = json::array();
  for (auto i : op.inputs) o["inputs"].push_back(tensors[i].id);
  if (op.weights) o["weights"] = tensors[*op.weights].id;
  o["outputs"] = json::array();
  for (auto i : op.outputs) o["outputs"].push_back(tensors[i].id);
  return o;
}

void parse_tensors_and_ops(const json& doc, std::vector<TensorDesc>& tensors, std::vector<Operator>& ops,
                           IdIndex& tensor_index, IdIndex& op_index) {
  const auto& tlist = field(doc, "tensors", "document");
  if (!tlist.is_array()) fail("document", "'tensors' must be a list");
  for (std::size_t i = 0; i < tlist.size(); ++i) {
    auto t = parse_tensor(tlist[i], "tensors[" + std::to_string(i) + "]");
    if (!tensor_index.emplace(t.id, tensors.size()).second) fail("tensors", "duplicate tensor id '" + t.id + "'");
    tensors.push_back(std::move(t));
  }
  const auto& olist = field(doc, "operators", "document");
  if (!olist.is_array()) fail("document", "'operators' must be a list");
  for (std::size_t i = 0; i < olist.size(); ++i) {
    auto op = parse_operator(olist[i], tensor_index, "operators[" + std::to_string(i) + "]");
    if (!op_index.emplace(op.id, ops.size()).second) fail("operators", "duplicate operator id '" + op.id + "'");
    ops.push_back(std::move(op));
  }
}

void check_format(const json& doc, std::string_view expected) {
  if (!doc.is_object()) fail("document", "top level must be an object");
  const auto fmt = get_or<std::string>(doc, "format", "", "document");
  if (fmt != expected) {
    fail("document", "format must be \"" + std::string(expected) + "\", got \"" + fmt + "\"");
  }
}

InlineOp parse_inline_op(const std::string& s, const std::string& where) {
  if (s == "none") return InlineOp::None;
  if (s == "decompress") return InlineOp::Decompress;
  if (s == "compress") return InlineOp::Compress;
  if (s == "transpose") return InlineOp::Transpose;
  fail(where, "unknown inline_op '" + s + "'");
}

std::string_view inline_op_name(InlineOp op) {
  switch (op) {
    case InlineOp::None: return "none";
    case InlineOp::Decompress: return "decompress";
    case InlineOp::Compress: return "compress";
    case InlineOp::Transpose: return "transpose";
  }
  return "none";
}


}  // namespace

TaskGraph parse_task_graph(const json& doc) {
  check_format(doc, kTaskGraphFormat);
  TaskGraph g;
  IdIndex tensor_index, op_index;
  parse_tensors_and_ops(doc, g.tensors, g.operators, tensor_index, op_index);

  std::map<std::uint32_t, std::size_t> barrier_index;
  for (const auto& b : field(doc, "barriers", "document")) {
    BarrierDef def;
    def.id = get<std::uint32_t>(b, "id", "barriers");
    def.producer_count = get<std::uint32_t>(b, "producers", "barrier " + std::to_string(def.id));
    def.consumer_count = get<std::uint32_t>(b, "consumers", "barrier " + std::to_string(def.id));
    if (!barrier_index.emplace(def.id, g.barriers.size()).second) {
      fail("barriers", "duplicate barrier id " + std::to_string(def.id));
    }
    g.barriers.push_back(def);
  }

  auto barrier_refs = [&](const json& t, const char* key, const std::string& where) {
    std::vector<std::size_t> out;
    if (!t.contains(key)) return out;
    for (const auto& id : t.at(key)) {
      if (!id.is_number_unsigned()) fail(where, std::string("'") + key + "' must list barrier ids");
      auto it = barrier_index.find(id.get<std::uint32_t>());
      if (it == barrier_index.end()) fail(where, "dangling barrier reference " + std::to_string(id.get<std::uint32_t>()));
      out.push_back(it->second);
    }
    return out;
  };

  std::set<std::string> task_ids;
  for (const auto& t : field(doc, "tasks", "document")) {
    Task task;
    task.id = get<std::string>(t, "id", "tasks");
    const auto here = "task '" + task.id + "'";
    if (!task_ids.insert(task.id).second) fail("tasks", "duplicate task id '" + task.id + "'");
    const auto type = get<std::string>(t, "type", here);
    if (type == "compute") {
      ComputeTask c;
      const auto engine = get<std::string>(t, "engine", here);
      if (engine == "dpu") {
        c.engine = EngineKind::Dpu;
      } else if (engine == "dsp") {
        c.engine = EngineKind::Dsp;
      } else {
        fail(here, "engine must be \"dpu\" or \"dsp\"");
      }
      c.tile = get<std::uint32_t>(t, "tile", here);
      c.unit = get_or<std::uint32_t>(t, "unit", 0, here);
      c.op = resolve(op_index, get<std::string>(t, "operator", here), here, "operator");
      const auto& r = field(t, "region", here);
      c.region.offset = parse_dims(field(r, "offset", here), here);
      c.region.extent = parse_dims(field(r, "extent", here), here);
      task.body = c;
    } else if (type == "dma") {
      DmaTask d;
      d.channel = get<std::uint32_t>(t, "channel", here);
      for (const auto& dj : field(t, "descriptors", here)) {
        DmaDescriptor desc;
        desc.src = resolve(tensor_index, get<std::string>(dj, "src", here), here, "tensor");
        desc.dst = resolve(tensor_index, get<std::string>(dj, "dst", here), here, "tensor");
        desc.src_offset = get_or<std::uint64_t>(dj, "src_offset", 0, here);
        desc.dst_offset = get_or<std::uint64_t>(dj, "dst_offset", 0, here);
        desc.dims = get<std::vector<std::uint64_t>>(dj, "dims", here);
        desc.src_strides = get_or<std::vector<std::uint64_t>>(dj, "src_strides", {}, here);
        desc.dst_strides = get_or<std::vector<std::uint64_t>>(dj, "dst_strides", {}, here);
        desc.broadcast = get_or<std::vector<std::uint32_t>>(dj, "broadcast", {}, here);
        desc.inline_op = parse_inline_op(get_or<std::string>(dj, "inline_op", "none", here), here);
        desc.ratio = get_or<double>(dj, "ratio", 1.0, here);
        d.descriptors.push_back(std::move(desc));
      }
      task.body = std::move(d);
    } else {
      fail(here, "type must be \"compute\" or \"dma\"");
    }
    task.wait = barrier_refs(t, "wait", here);
    task.update = barrier_refs(t, "update", here);
    g.tasks.push_back(std::move(task));
  }
  validate(g);
  return g;
}

nlohmann::ordered_json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open workload file '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw WorkloadError("workload file '" + path.string() + "': " + e.what());
  }
}

TaskGraph load_task_graph(const std::filesystem::path& path) { return parse_task_graph(read_json_file(path)); }

json to_json(const TaskGraph& g) {
  json doc;
  doc["format"] = kTaskGraphFormat;
  doc["tensors"] = json::array();
  for (const auto& t : g.tensors) doc["tensors"].push_back(tensor_to_json(t));
  doc["operators"] = json::array();
  for (const auto& op : g.operators) doc["operators"].push_back(operator_to_json(op, g.tensors));
  doc["barriers"] = json::array();
  for (const auto& b : g.barriers) {
    doc["barriers"].push_back({{"id", b.id}, {"producers", b.producer_count}, {"consumers", b.consumer_count}});
  }
  doc["tasks"] = json::array();
  auto ids = [&](const std::vector<std::size_t>& v) {
    json a = json::array();
    for (auto i : v) a.push_back(g.barriers[i].id);
    return a;
  };
  for (const auto& task : g.tasks) {
    json t;
    t["id"] = task.id;
    if (task.is_compute()) {
      const auto& c = task.compute();
      t["type"] = "compute";
      t["engine"] = to_string(c.engine);
      t["tile"] = c.tile;
      t["unit"] = c.unit;
      t["operator"] = g.operators[c.op].id;
      t["region"] = {{"offset", c.region.offset}, {"extent", c.region.extent}};
    } else {
      const auto& d = task.dma();
      t["type"] = "dma";
      t["channel"] = d.channel;
      t["descriptors"] = json::array();
      for (const auto& desc : d.descriptors) {
        json dj;
        dj["src"] = g.tensors[desc.src].id;
        dj["dst"] = g.tensors[desc.dst].id;
        dj["src_offset"] = desc.src_offset;
        dj["dst_offset"] = desc.dst_offset;
        dj["dims"] = desc.dims;
        if (!desc.src_strides.empty()) dj["src_strides"] = desc.src_strides;
        if (!desc.dst_strides.empty()) dj["dst_strides"] = desc.dst_strides;
        if (!desc.broadcast.empty()) dj["broadcast"] = desc.broadcast;
        if (desc.inline_op != InlineOp::None) {
          dj["inline_op"] = inline_op_name(desc.inline_op);
          dj["ratio"] = desc.ratio;
        }
        t["descriptors"].push_back(dj);
      }
    }
    t["wait"] = ids(task.wait);
    t["update"] = ids(task.update);
    doc["tasks"].push_back(t);
  }
  return doc;
}

OpList parse_op_list(const json& doc) {
  check_format(doc, kOpListFormat);
  OpList ops;
  IdIndex tensor_index, op_index;
  parse_tensors_and_ops(doc, ops.tensors, ops.operators, tensor_index, op_index);
  return ops;
}

OpList load_op_list(const std::filesystem::path& path) { return parse_op_list(read_json_file(path)); }

json to_json(const OpList& ops) {
  json doc;
  doc["format"] = kOpListFormat;
  doc["tensors"] = json::array();
  for (const auto& t : ops.tensors) doc["tensors"].push_back(tensor_to_json(t));
  doc["operators"] = json::array();
  for (const auto& op : ops.operators) doc["operators"].push_back(operator_to_json(op, ops.tensors));
  return doc;
}

// ---------------------------------------------------------------------------
// Validation

namespace {

bool overlaps(const Region& a, const Region& b) {
  for (std::size_t d = 0; d < 4; ++d) {
    const auto a0 = a.offset[d], a1 = a.offset[d] + a.extent[d];
    const auto b0 = b.offset[d], b1 = b.offset[d] + b.extent[d];
    if (a1 <= b0 || b1 <= a0) return false;
  }
  return true;
}

void validate_tensor(const TensorDesc& t) {
  const auto here = "tensor '" + t.id + "'";
  for (auto e : t.dims) {
    if (e < 1) fail(here, "extents must be >= 1");
  }
  if (t.elem_bytes < 1) fail(here, "elem_bytes must be >= 1");
  if (!(t.sparsity_density > 0.0 && t.sparsity_density <= 1.0)) fail(here, "sparsity_density must be in (0, 1]");
  if (!(t.compression_ratio > 0.0 && t.compression_ratio <= 1.0)) fail(here, "compression_ratio must be in (0, 1]");
}

void validate_operator(const Operator& op, const std::vector<TensorDesc>& tensors) {
  const auto here = "operator '" + op.id + "'";
  if (op.inputs.empty()) fail(here, "needs at least one input");
  if (op.outputs.size() != 1) fail(here, "must have exactly one output");
  if (op.kx < 1 || op.ky < 1 || op.stride < 1) fail(here, "kernel extents and stride must be >= 1");
  const bool dpu = op.affinity() == EngineKind::Dpu;
  if (!dpu && op.fused_post != FusedPost::None) fail(here, "fused_post is only supported on DPU operators");
  if (!dpu && op.weights) fail(here, "weights are only supported on DPU operators");
  if (!dpu && op.kernel.empty()) fail(here, "DSP operator needs a 'dsp_kernel' name");
  if ((op.opcode == Opcode::Conv2D || op.opcode == Opcode::MatMul) && !op.weights) fail(here, "needs a weights tensor");
  if (op.opcode == Opcode::Eltwise && op.inputs.size() < 2) fail(here, "Eltwise needs two inputs");
  (void)tensors;
}

std::uint64_t pattern_span(const std::vector<std::uint64_t>& dims, const std::vector<std::uint64_t>& strides) {
  // Last byte touched + 1 by the strided pattern.
  std::uint64_t span = dims.back();
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) span += (dims[i] - 1) * strides[i];
  return span;
}

void validate_descriptor(const DmaDescriptor& d, const TaskGraph& g, const std::string& here) {
  if (d.dims.empty() || d.dims.size() > 4) fail(here, "descriptor dims must have 1 to 4 entries");
  for (auto e : d.dims) {
    if (e < 1) fail(here, "descriptor extents must be >= 1");
  }
  const auto outer = d.dims.size() - 1;
  if (!d.src_strides.empty() && d.src_strides.size() != outer) fail(here, "src_strides must cover the outer dims");
  if (!d.dst_strides.empty() && d.dst_strides.size() != outer) fail(here, "dst_strides must cover the outer dims");
  const auto& src = g.tensors[d.src];
  const auto& dst = g.tensors[d.dst];
  if (!d.broadcast.empty()) {
    if (dst.location.kind != Location::Kind::Cb) fail(here, "broadcast requires a CB destination");
    std::set<std::uint32_t> uniq(d.broadcast.begin(), d.broadcast.end());
    if (uniq.size() != d.broadcast.size()) fail(here, "broadcast tiles must be unique");
  }
  if (d.inline_op == InlineOp::Decompress || d.inline_op == InlineOp::Compress) {
    if (!(d.ratio > 0.0 && d.ratio <= 1.0)) fail(here, "inline compression ratio must be in (0, 1]");
  }
  auto contiguous_strides = [&]() {
    std::vector<std::uint64_t> s(outer);
    std::uint64_t acc = d.dims.back();
    for (std::size_t i = outer; i-- > 0;) {
      s[i] = acc;
      acc *= d.dims[i];
    }
    return s;
  };
  const auto ss = d.src_strides.empty() ? contiguous_strides() : d.src_strides;
  const auto ds = d.dst_strides.empty() ? contiguous_strides() : d.dst_strides;
  const auto bytes = d.pattern_bytes();
  const auto scaled = compressed_bytes(bytes, d.ratio);
  const std::uint64_t src_end =
      d.src_offset + (d.inline_op == InlineOp::Decompress ? scaled : pattern_span(d.dims, ss));
  const std::uint64_t dst_end = d.dst_offset + (d.inline_op == InlineOp::Compress ? scaled : pattern_span(d.dims, ds));
  const auto src_cap = d.inline_op == InlineOp::Decompress ? src.storage_bytes() : src.bytes();
  const auto dst_cap = d.inline_op == InlineOp::Compress ? dst.storage_bytes() : dst.bytes();
  if (src_end > src_cap) fail(here, "source pattern exceeds tensor '" + src.id + "'");
  if (dst_end > dst_cap) fail(here, "destination pattern exceeds tensor '" + dst.id + "'");
}

void check_acyclic(const TaskGraph& g) {
  // Bipartite graph: task -> barrier (update), barrier -> task (wait).
  const std::size_t nt = g.tasks.size();
  const std::size_t nb = g.barriers.size();
  std::vector<std::vector<std::size_t>> succ(nt + nb);
  std::vector<std::size_t> indeg(nt + nb, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    for (auto b : g.tasks[t].update) {
      succ[t].push_back(nt + b);
      ++indeg[nt + b];
    }
    for (auto b : g.tasks[t].wait) {
      succ[nt + b].push_back(t);
      ++indeg[t];
    }
  }
  std::vector<std::size_t> ready;
  for (std::size_t v = 0; v < nt + nb; ++v) {
    if (indeg[v] == 0) ready.push_back(v);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto v = ready.back();
    ready.pop_back();
    ++visited;
    for (auto w : succ[v]) {
      if (--indeg[w] == 0) ready.push_back(w);
    }
  }
  if (visited != nt + nb) {
    for (std::size_t b = 0; b < nb; ++b) {
      if (indeg[nt + b] > 0) {
        fail("barriers", "cyclic dependency through barrier " + std::to_string(g.barriers[b].id));
      }
    }
    fail("tasks", "cyclic dependency");
  }
}

}  // namespace

void validate(const TaskGraph& g) {
  for (const auto& t : g.tensors) validate_tensor(t);
  for (const auto& op : g.operators) validate_operator(op, g.tensors);
  for (const auto& b : g.barriers) {
    if (b.producer_count < 1 || b.consumer_count < 1) {
      fail("barrier " + std::to_string(b.id), "producer and consumer counts must be >= 1");
    }
  }

  std::vector<std::vector<Region>> regions(g.operators.size());
  for (const auto& task : g.tasks) {
    const auto here = "task '" + task.id + "'";
    for (auto b : task.wait) {
      if (b >= g.barriers.size()) fail(here, "dangling barrier reference");
    }
    for (auto b : task.update) {
      if (b >= g.barriers.size()) fail(here, "dangling barrier reference");
    }
    if (task.is_compute()) {
      const auto& c = task.compute();
      if (c.op >= g.operators.size()) fail(here, "dangling operator reference");
      const auto& op = g.operators[c.op];
      if (c.engine != op.affinity()) {
        fail(here, "operator '" + op.id + "' must run on " + std::string(to_string(op.affinity())));
      }
      const auto& out = g.tensors[op.outputs.front()].dims;
      for (std::size_t d = 0; d < 4; ++d) {
        if (std::uint64_t{c.region.offset[d]} + c.region.extent[d] > out[d]) fail(here, "region exceeds operator output");
      }
      regions[c.op].push_back(c.region);
    } else {
      const auto& d = task.dma();
      if (d.descriptors.empty()) fail(here, "DMA task needs at least one descriptor");
      for (std::size_t i = 0; i < d.descriptors.size(); ++i) {
        validate_descriptor(d.descriptors[i], g, here + " descriptor " + std::to_string(i));
      }
    }
  }

  // Barrier counts must match the tasks that reference them.
  std::vector<std::uint32_t> producers(g.barriers.size(), 0), consumers(g.barriers.size(), 0);
  for (const auto& task : g.tasks) {
    for (auto b : task.update) ++producers[b];
    for (auto b : task.wait) ++consumers[b];
  }
  check_acyclic(g);
  for (std::size_t b = 0; b < g.barriers.size(); ++b) {
    const auto& def = g.barriers[b];
    const auto here = "barrier " + std::to_string(def.id);
    if (producers[b] != def.producer_count) {
      fail(here, "count mismatch: " + std::to_string(producers[b]) + " producing tasks, producer_count " +
                     std::to_string(def.producer_count));
    }
    if (consumers[b] != def.consumer_count) {
      fail(here, "count mismatch: " + std::to_string(consumers[b]) + " waiting tasks, consumer_count " +
                     std::to_string(def.consumer_count));
    }
  }

  for (std::size_t o = 0; o < g.operators.size(); ++o) {
    auto& rs = regions[o];
    if (rs.empty()) continue;
    const auto& op = g.operators[o];
    std::uint64_t covered = 0;
    for (const auto& r : rs) covered += r.size();
    rs.erase(std::remove_if(rs.begin(), rs.end(), [](const Region& r) { return r.empty(); }), rs.end());
    std::sort(rs.begin(), rs.end(), [](const Region& a, const Region& b) { return a.offset < b.offset; });
    for (std::size_t i = 0; i < rs.size(); ++i) {
      for (std::size_t j = i + 1; j < rs.size(); ++j) {
        if (overlaps(rs[i], rs[j])) fail("operator '" + op.id + "'", "task regions overlap");
      }
    }
    if (covered != volume(g.tensors[op.outputs.front()].dims)) {
      fail("operator '" + op.id + "'", "task regions leave a gap in the output");
    }
  }
}

}  // namespace neusim::workload
