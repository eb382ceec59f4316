#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "neusim/sim/kernel.hpp"

namespace neusim {

enum class TraceKind { Compute, Dma, BarrierFire, Stall };

std::string_view to_string(TraceKind k);

struct TraceEvent {
  sim::SimTime t_start = 0;
  sim::SimTime t_end = 0;
  std::size_t track = 0;  // index into Trace::tracks
  std::string task;       // task id, or "barrier <id>"
  TraceKind kind = TraceKind::Compute;
  std::vector<std::pair<std::string, std::string>> meta;
};

struct Trace {
  std::vector<std::string> tracks;  // engine instance paths, e.g. "tile0/dpu0"
  std::vector<TraceEvent> events;

  std::size_t track(const std::string& name);
};

}  // namespace neusim
