#include "neusim/trace.hpp"

#include <algorithm>

namespace neusim {

std::string_view to_string(TraceKind k) {
  switch (k) {
    case TraceKind::Compute: return "compute";
    case TraceKind::Dma: return "dma";
    case TraceKind::BarrierFire: return "barrier-fire";
    case TraceKind::Stall: return "stall";
  }
  return "?";
}

std::size_t Trace::track(const std::string& name) {
  auto it = std::find(tracks.begin(), tracks.end(), name);
  if (it != tracks.end()) return static_cast<std::size_t>(it - tracks.begin());
  tracks.push_back(name);
  return tracks.size() - 1;
}

}  // namespace neusim
