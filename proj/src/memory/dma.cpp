#include "neusim/memory/dma.hpp"

#include <algorithm>
#include <cmath>

#include "neusim/error.hpp"

namespace neusim::memory {

using workload::InlineOp;
using workload::Location;

namespace {

std::vector<std::uint64_t> strides_or_dense(const std::vector<std::uint64_t>& given,
                                            const std::vector<std::uint64_t>& dims) {
  if (!given.empty()) return given;
  std::vector<std::uint64_t> s(dims.size() - 1);
  std::uint64_t acc = dims.back();
  for (std::size_t i = s.size(); i-- > 0;) {
    s[i] = acc;
    acc *= dims[i];
  }
  return s;
}

}  // namespace

std::vector<DmaRequest> dma_split_descriptor(const workload::DmaDescriptor& d, std::uint64_t max_request_bytes) {
  const std::uint64_t total = d.pattern_bytes();
  if (total == 0) throw WorkloadError("DMA descriptor moves zero bytes");
  const auto ss = strides_or_dense(d.src_strides, d.dims);
  const auto ds = strides_or_dense(d.dst_strides, d.dims);
  const bool src_stream = d.inline_op == InlineOp::Decompress;
  const bool dst_stream = d.inline_op == InlineOp::Compress;

  // Merge inner dims that are contiguous on both (strided) sides.
  std::size_t outer = d.dims.size() - 1;
  std::uint64_t run = d.dims.back();
  while (outer > 0 && (src_stream || ss[outer - 1] == run) && (dst_stream || ds[outer - 1] == run)) {
    run *= d.dims[outer - 1];
    --outer;
  }

  auto packed = [&](std::uint64_t u) {
    return u == total ? workload::compressed_bytes(total, d.ratio)
                      : static_cast<std::uint64_t>(std::floor(static_cast<double>(u) * d.ratio));
  };

  std::vector<DmaRequest> out;
  std::vector<std::uint64_t> idx(outer, 0);
  std::uint64_t u = 0;
  while (true) {
    std::uint64_t src_base = d.src_offset;
    std::uint64_t dst_base = d.dst_offset;
    for (std::size_t i = 0; i < outer; ++i) {
      src_base += idx[i] * ss[i];
      dst_base += idx[i] * ds[i];
    }
    for (std::uint64_t c = 0; c < run; c += max_request_bytes) {
      const std::uint64_t len = std::min(max_request_bytes, run - c);
      DmaRequest r{src_base + c, dst_base + c, len, len};
      if (src_stream) {
        r.src_offset = d.src_offset + packed(u);
        r.src_bytes = packed(u + len) - packed(u);
      }
      if (dst_stream) {
        r.dst_offset = d.dst_offset + packed(u);
        r.dst_bytes = packed(u + len) - packed(u);
      }
      out.push_back(r);
      u += len;
    }
    std::size_t i = outer;
    while (i > 0 && ++idx[i - 1] == d.dims[i - 1]) idx[--i] = 0;
    if (i == 0) break;
  }
  return out;
}

std::vector<std::uint32_t> dma_destinations(const workload::DmaDescriptor& d, const workload::TensorDesc& dst) {
  if (!d.broadcast.empty()) return d.broadcast;
  return {dst.location.tile};
}

struct Dma::Channel {
  Channel(sim::Environment& env, std::uint32_t outstanding) : slots(env, outstanding) {}
  sim::SharedCounter slots;
  std::size_t model = 0;
};

struct Dma::Request {
  Request(sim::Environment& env) : all_done(env) {}
  // Shared by every request of one task.
  std::uint32_t channel = 0;
  DmaResult* result = nullptr;
  std::uint64_t remaining = 0;
  bool issuing = true;
  sim::Signal all_done;
};

Dma::Dma(sim::Environment& env, const config::PlatformConfig& cfg, const workload::TaskGraph& graph, Noc& noc,
         Ddr& ddr, std::vector<ComputeBuffer>& cbs, ActivityLog* log)
    : env_(&env),
      cfg_(&cfg),
      graph_(&graph),
      noc_(&noc),
      ddr_(&ddr),
      cbs_(&cbs),
      log_(log),
      clock_(cfg.freq_mhz.dma, cfg.freq_mhz.reference),
      ddr_port_(noc.master("ddr")) {
  for (std::uint32_t t = 0; t < cfg.tiles; ++t) cb_ports_.push_back(noc.master("cb" + std::to_string(t)));
  for (std::uint32_t c = 0; c < cfg.dma.channels; ++c) {
    auto ch = std::make_unique<Channel>(env, cfg.dma.outstanding);
    if (log_) {
      ch->model = log_->add_model("dma" + std::to_string(c), config::EngineClass::Dma, cfg.dma.bw_bytes_per_cycle,
                                  cfg.freq_mhz.dma);
    }
    channels_.push_back(std::move(ch));
  }
}

Dma::~Dma() = default;

sim::SimTime Dma::issue_cycles(std::uint64_t bytes) const { return clock_.transfer(bytes, cfg_->dma.bw_bytes_per_cycle); }

namespace {

// One in-flight request with everything it needs to run on its own.
struct Flight {
  std::uint64_t src_addr = 0;
  std::uint64_t dst_addr = 0;
  std::uint64_t src_bytes = 0;
  std::uint64_t dst_bytes = 0;
  Location src;
  Location::Kind dst_kind = Location::Kind::Ddr;
  std::vector<std::uint32_t> dst_tiles;
  sim::SimTime issue = 0;
  sim::SimTime slot = 0;
};

}  // namespace

sim::Task Dma::execute(const workload::DmaTask& task, std::string name, DmaResult& result) {
  auto shared = std::make_shared<Request>(*env_);
  shared->channel = task.channel;
  shared->result = &result;
  auto& channel = *channels_.at(task.channel);
  result = DmaResult{};
  bool first = true;
  std::uint64_t index = 0;

  for (const auto& desc : task.descriptors) {
    const auto& src = graph_->tensors[desc.src];
    const auto& dst = graph_->tensors[desc.dst];
    const auto tiles = dma_destinations(desc, dst);
    for (const auto& r : dma_split_descriptor(desc, cfg_->dma.max_request_bytes)) {
      co_await channel.slots.get(1);
      const auto now = env_->now();
      if (first) {
        result.first_issue = now;
        result.last_completion = now;
        first = false;
      }
      const auto payload = std::max(r.src_bytes, r.dst_bytes);
      const auto slot = issue_cycles(payload);
      if (log_) log_->record(channel.model, now, now + slot, payload);

      auto flight = std::make_shared<Flight>();
      flight->src_addr = src.base_addr + r.src_offset;
      flight->dst_addr = dst.base_addr + r.dst_offset;
      flight->src_bytes = r.src_bytes;
      flight->dst_bytes = r.dst_bytes;
      flight->src = src.location;
      flight->dst_kind = dst.location.kind;
      flight->dst_tiles = tiles;
      flight->issue = now;
      flight->slot = slot;
      ++shared->remaining;
      ++result.requests;
      result.src_bytes += r.src_bytes;
      result.dst_bytes += r.dst_bytes;

      env_->spawn(name + "#" + std::to_string(index++), [](Dma* self, std::shared_ptr<Request> req,
                                                            std::shared_ptr<Flight> f) -> sim::Task {
        auto& env = *self->env_;
        sim::SimTime ready;
        if (f->src.kind == Location::Kind::Ddr) {
          ready = self->ddr_->access(f->src_addr, f->src_bytes, env.now()).done;
        } else {
          ready = self->cbs_->at(f->src.tile).access_any(env.now(), f->src_bytes).ready;
        }
        co_await env.until(ready);

        std::vector<Noc::TicketPtr> tickets;
        for (auto t : f->dst_tiles) {
          const auto port = f->dst_kind == Location::Kind::Ddr ? self->ddr_port_ : self->cb_ports_.at(t);
          tickets.push_back(self->noc_->submit(port, req->channel, f->dst_bytes));
        }
        sim::SimTime done = f->issue + f->slot;
        for (std::size_t i = 0; i < tickets.size(); ++i) {
          co_await tickets[i]->done.wait();
          const auto at = tickets[i]->delivered;
          if (f->dst_kind == Location::Kind::Ddr) {
            done = std::max(done, self->ddr_->access(f->dst_addr, f->dst_bytes, at).done);
          } else {
            done = std::max(done, self->cbs_->at(f->dst_tiles[i]).access_any(at, f->dst_bytes).ready);
          }
        }
        co_await env.until(done);
        req->result->last_completion = std::max(req->result->last_completion, env.now());
        co_await self->channels_[req->channel]->slots.put(1);
        if (--req->remaining == 0 && !req->issuing) req->all_done.fire();
      }(this, shared, flight));

      co_await env_->timeout(slot);
    }
  }
  shared->issuing = false;
  if (shared->remaining > 0) co_await shared->all_done.wait();
}

}  // namespace neusim::memory
