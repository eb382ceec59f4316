#include "neusim/workload/compiler.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "neusim/error.hpp"

namespace neusim::workload {

namespace {

constexpr std::uint64_t kDdrAlign = 4096;
constexpr std::uint64_t kCbAlign = 64;

std::uint64_t align_up(std::uint64_t v, std::uint64_t a) { return (v + a - 1) / a * a; }

struct Slab {
  std::uint32_t out_begin = 0;
  std::uint32_t out_rows = 0;
};

std::vector<Slab> slabs(std::uint32_t height, std::uint32_t tiles) {
  const std::uint32_t per = (height + tiles - 1) / tiles;
  std::vector<Slab> out;
  for (std::uint32_t r = 0; r < height; r += per) out.push_back({r, std::min(per, height - r)});
  return out;
}

// Input rows [begin, end) feeding output rows of `slab`.
std::pair<std::uint32_t, std::uint32_t> input_rows(const Operator& op, const Slab& slab, std::uint32_t in_h) {
  const std::uint32_t begin = std::min(input_row_begin(slab.out_begin, op.stride, op.pad), in_h - 1);
  const std::int64_t last =
      std::int64_t{slab.out_begin + slab.out_rows - 1} * op.stride - op.pad + op.ky;
  const auto end = static_cast<std::uint32_t>(std::clamp<std::int64_t>(last, begin + 1, in_h));
  return {begin, end};
}

// Rows [r0, r0+rows) of a dense NHWC tensor as an [N, rows, row_bytes] pattern.
DmaDescriptor row_copy(const TensorDesc& ddr, std::size_t ddr_index, std::size_t cb_index, std::uint32_t r0,
                       std::uint32_t rows, bool to_cb) {
  const auto s = ddr.strides();
  const std::uint64_t row_bytes = s[kH];
  DmaDescriptor d;
  d.dims = {ddr.dims[kN], rows, row_bytes};
  const std::vector<std::uint64_t> ddr_strides{s[kN], s[kH]};
  const std::vector<std::uint64_t> cb_strides{rows * row_bytes, row_bytes};
  const std::uint64_t ddr_offset = r0 * row_bytes;
  const std::uint64_t pattern = d.pattern_bytes();
  if (to_cb) {
    d.src = ddr_index;
    d.dst = cb_index;
    d.src_strides = ddr_strides;
    d.dst_strides = cb_strides;
    d.src_offset = ddr_offset;
  } else {
    d.src = cb_index;
    d.dst = ddr_index;
    d.src_strides = cb_strides;
    d.dst_strides = ddr_strides;
    d.dst_offset = ddr_offset;
  }
  if (ddr.compressed) {
    // The compressed side is a contiguous stream; place it proportionally.
    d.inline_op = to_cb ? InlineOp::Decompress : InlineOp::Compress;
    d.ratio = ddr.compression_ratio;
    const auto size = compressed_bytes(pattern, d.ratio);
    const auto start = static_cast<std::uint64_t>(std::floor(static_cast<double>(ddr_offset) * d.ratio));
    const auto offset = std::min(start, ddr.storage_bytes() - size);
    (to_cb ? d.src_offset : d.dst_offset) = offset;
  }
  return d;
}

}  // namespace

std::vector<std::size_t> topological_order(const OpList& ops) {
  const std::size_t n = ops.operators.size();
  std::map<std::size_t, std::size_t> producer;
  for (std::size_t i = 0; i < n; ++i) {
    for (auto t : ops.operators[i].outputs) {
      if (!producer.emplace(t, i).second) {
        throw WorkloadError("tensor '" + ops.tensors[t].id + "' is produced by more than one operator");
      }
    }
  }
  std::vector<std::set<std::size_t>> deps(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (auto t : ops.operators[i].inputs) {
      auto it = producer.find(t);
      if (it != producer.end()) deps[i].insert(it->second);
    }
  }
  std::vector<std::size_t> order;
  std::vector<bool> done(n, false);
  while (order.size() < n) {
    bool progressed = false;
    for (std::size_t i = 0; i < n; ++i) {
      if (done[i]) continue;
      if (std::all_of(deps[i].begin(), deps[i].end(), [&](std::size_t d) { return done[d]; })) {
        done[i] = true;
        order.push_back(i);
        progressed = true;
        break;
      }
    }
    if (!progressed) throw WorkloadError("operator list has a cyclic tensor dependency");
  }
  return order;
}

TaskGraph compile_reference(const OpList& ops, const config::PlatformConfig& cfg) {
  TaskGraph g;
  g.tensors = ops.tensors;
  g.operators = ops.operators;

  std::uint64_t next_addr = 0;
  for (auto& t : g.tensors) {
    if (t.location.kind != Location::Kind::Ddr) continue;
    t.base_addr = next_addr;
    next_addr = align_up(next_addr + t.storage_bytes(), kDdrAlign);
  }

  std::map<std::size_t, std::size_t> producer;
  for (std::size_t i = 0; i < g.operators.size(); ++i) {
    for (auto t : g.operators[i].outputs) producer[t] = i;
  }

  auto add_tensor = [&](TensorDesc t) {
    g.tensors.push_back(std::move(t));
    return g.tensors.size() - 1;
  };
  auto add_barrier = [&](std::uint32_t producers, std::uint32_t consumers) {
    const auto id = static_cast<std::uint32_t>(g.barriers.size());
    g.barriers.push_back({id, producers, consumers});
    return g.barriers.size() - 1;
  };

  std::uint32_t dma_rr = 0;
  std::uint32_t dpu_rr = 0;
  std::uint32_t dsp_rr = 0;
  // Output DMA task indices per operator, and pending edge barriers per consumer op.
  std::map<std::size_t, std::vector<std::size_t>> out_dmas;

  for (auto oi : topological_order(ops)) {
    const Operator& op = g.operators[oi];
    const TensorDesc out = g.tensors[op.outputs.front()];
    const auto parts = slabs(out.dims[kH], cfg.tiles);
    const auto nparts = static_cast<std::uint32_t>(parts.size());
    const bool dpu = op.affinity() == EngineKind::Dpu;
    const std::uint32_t unit = dpu ? dpu_rr++ % cfg.dpus_per_tile : dsp_rr++ % cfg.dsps_per_tile;

    std::vector<std::size_t> activations;
    for (auto t : op.inputs) {
      if (std::find(activations.begin(), activations.end(), t) == activations.end()) activations.push_back(t);
    }
    for (auto t : activations) {
      if (g.tensors[t].location.kind != Location::Kind::Ddr) {
        throw WorkloadError("operator '" + op.id + "': reference compiler expects DDR-resident inputs");
      }
    }

    // Edge barriers: each distinct producing operator releases our input DMAs.
    std::vector<std::size_t> edge_barriers;
    std::set<std::size_t> producers_seen;
    for (auto t : activations) {
      auto it = producer.find(t);
      if (it == producer.end() || !producers_seen.insert(it->second).second) continue;
      const auto& prior = out_dmas.at(it->second);
      const auto b = add_barrier(static_cast<std::uint32_t>(prior.size()), nparts);
      for (auto task : prior) g.tasks[task].update.push_back(b);
      edge_barriers.push_back(b);
    }

    // CB layout: weights at 0, then inputs, then outputs.
    std::uint64_t weight_bytes = 0;
    std::size_t weight_cb = 0;
    if (op.weights) {
      const auto& w = g.tensors[*op.weights];
      weight_bytes = w.bytes();
      TensorDesc cbw{op.id + "." + w.id + "@cb", w.dims, w.elem_bytes, {Location::Kind::Cb, 0}, 0};
      weight_cb = add_tensor(cbw);
    }
    const auto b_w = op.weights ? std::optional(add_barrier(1, nparts)) : std::nullopt;
    const auto b_in = add_barrier(nparts, nparts);
    const auto b_out = add_barrier(nparts, nparts);

    if (op.weights) {
      const auto& w = g.tensors[*op.weights];
      DmaDescriptor d;
      d.src = *op.weights;
      d.dst = weight_cb;
      d.dims = {w.bytes()};
      for (std::uint32_t t = 0; t < nparts; ++t) d.broadcast.push_back(t);
      if (w.compressed) {
        d.inline_op = InlineOp::Decompress;
        d.ratio = w.compression_ratio;
      }
      g.tasks.push_back({op.id + "/w", DmaTask{dma_rr++ % cfg.dma.channels, {d}}, {}, {*b_w}});
    }

    std::vector<std::size_t> out_cb(nparts);
    for (std::uint32_t t = 0; t < nparts; ++t) {
      std::uint64_t addr = align_up(weight_bytes, kCbAlign);
      DmaTask in{dma_rr++ % cfg.dma.channels, {}};
      for (auto a : activations) {
        const auto src = g.tensors[a];
        const auto [r0, r1] = input_rows(op, parts[t], src.dims[kH]);
        TensorDesc slab{op.id + "." + src.id + "@t" + std::to_string(t),
                        {src.dims[kN], r1 - r0, src.dims[kW], src.dims[kC]},
                        src.elem_bytes,
                        {Location::Kind::Cb, t},
                        addr};
        addr = align_up(addr + slab.bytes(), kCbAlign);
        const auto cb = add_tensor(slab);
        in.descriptors.push_back(row_copy(src, a, cb, r0, r1 - r0, true));
      }
      TensorDesc oslab{op.id + "." + out.id + "@t" + std::to_string(t),
                       {out.dims[kN], parts[t].out_rows, out.dims[kW], out.dims[kC]},
                       out.elem_bytes,
                       {Location::Kind::Cb, t},
                       addr};
      const auto end = addr + oslab.bytes();
      if (end > cfg.cb.size_bytes) {
        throw WorkloadError("operator '" + op.id + "' is unschedulable: tile " + std::to_string(t) + " needs " +
                            std::to_string(end) + " CB bytes, capacity is " + std::to_string(cfg.cb.size_bytes));
      }
      out_cb[t] = add_tensor(oslab);
      g.tasks.push_back({op.id + "/in" + std::to_string(t), std::move(in), edge_barriers, {b_in}});
    }

    for (std::uint32_t t = 0; t < nparts; ++t) {
      ComputeTask c;
      c.engine = op.affinity();
      c.tile = t;
      c.unit = unit;
      c.op = oi;
      c.region.offset = {0, parts[t].out_begin, 0, 0};
      c.region.extent = {out.dims[kN], parts[t].out_rows, out.dims[kW], out.dims[kC]};
      std::vector<std::size_t> wait{b_in};
      if (b_w) wait.insert(wait.begin(), *b_w);
      g.tasks.push_back({op.id + "/t" + std::to_string(t), c, wait, {b_out}});
    }

    auto& outs = out_dmas[oi];
    for (std::uint32_t t = 0; t < nparts; ++t) {
      const auto d = row_copy(out, op.outputs.front(), out_cb[t], parts[t].out_begin, parts[t].out_rows, false);
      outs.push_back(g.tasks.size());
      g.tasks.push_back({op.id + "/out" + std::to_string(t), DmaTask{dma_rr++ % cfg.dma.channels, {d}}, {b_out}, {}});
    }
  }

  validate(g);
  return g;
}

}  // namespace neusim::workload

namespace neusim::workload {

TaskGraph load_workload(const std::filesystem::path& path, const config::PlatformConfig& cfg) {
  const auto doc = read_json_file(path);
  const auto format = doc.is_object() && doc.contains("format") && doc["format"].is_string()
                          ? doc["format"].get<std::string>()
                          : std::string();
  if (format == kOpListFormat) return compile_reference(parse_op_list(doc), cfg);
  if (format == kTaskGraphFormat) return parse_task_graph(doc);
  throw WorkloadError("workload file '" + path.string() + "': unknown format '" + format + "' (expected '" +
                      std::string(kTaskGraphFormat) + "' or '" + std::string(kOpListFormat) + "')");
}

}  // namespace neusim::workload
