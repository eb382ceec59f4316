#include "neusim/activity.hpp"

#include <stdexcept>

namespace neusim {

std::size_t ActivityLog::add_model(std::string id, config::EngineClass cls, double capability, double own_mhz) {
  models_.push_back({std::move(id), cls, capability, own_mhz, 0, {}});
  return models_.size() - 1;
}

void ActivityLog::record(std::size_t model, sim::SimTime t0, sim::SimTime t1, std::uint64_t amount) {
  if (t1 < t0) throw std::logic_error("activity record ends before it starts");
  auto& m = models_.at(model);
  m.total += amount;
  if (!keep_records_ || amount == 0) return;
  if (!m.records.empty()) {
    auto& last = m.records.back();
    const auto d_last = last.t1 - last.t0;
    const auto d_new = t1 - t0;
    if (last.t1 == t0 && d_last > 0 && d_new > 0 &&
        static_cast<unsigned __int128>(last.amount) * d_new == static_cast<unsigned __int128>(amount) * d_last) {
      last.t1 = t1;
      last.amount += amount;
      return;
    }
  }
  m.records.push_back({t0, t1, amount});
}

const ActivityModel* ActivityLog::find(const std::string& id) const {
  for (const auto& m : models_) {
    if (m.id == id) return &m;
  }
  return nullptr;
}

}  // namespace neusim
