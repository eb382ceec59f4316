#pragma once

// Per-hardware-model activity log (bytes moved or operations performed over
// time windows). Feeds both the summary report and the power trace.

#include <cstdint>
#include <string>
#include <vector>

#include "neusim/config.hpp"
#include "neusim/sim/kernel.hpp"

namespace neusim {

struct ActivityRecord {
  sim::SimTime t0 = 0;
  sim::SimTime t1 = 0;
  std::uint64_t amount = 0;
};

struct ActivityModel {
  std::string id;  // e.g. "tile0/dpu1", "dma3", "noc/cb0", "ddr"
  config::EngineClass engine_class = config::EngineClass::Reference;
  double capability = 0.0;  // activity units per own-clock cycle
  double own_mhz = 0.0;
  std::uint64_t total = 0;
  std::vector<ActivityRecord> records;
};

class ActivityLog {
 public:
  explicit ActivityLog(bool keep_records = true) : keep_records_(keep_records) {}

  std::size_t add_model(std::string id, config::EngineClass cls, double capability, double own_mhz);

  /// Appends `amount` spread uniformly over [t0, t1]. A record that continues
  /// the previous one at the same rate is merged into it.
  void record(std::size_t model, sim::SimTime t0, sim::SimTime t1, std::uint64_t amount);

  const std::vector<ActivityModel>& models() const { return models_; }
  const ActivityModel* find(const std::string& id) const;

 private:
  bool keep_records_;
  std::vector<ActivityModel> models_;
};

}  // namespace neusim
