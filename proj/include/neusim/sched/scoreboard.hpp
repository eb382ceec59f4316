#pragma once

// Barrier scoreboard: logical barriers multiplexed onto a fixed number of
// physical slots. Logical barriers take slot (k mod slots) where k is their
// first-use rank in task-list order; a slot serves its queued logical
// barriers one at a time and moves on once the live one is fully consumed.

#include <cstdint>
#include <deque>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "neusim/sim/kernel.hpp"
#include "neusim/workload/task_graph.hpp"

namespace neusim::sched {

class BarrierScoreboard {
 public:
  BarrierScoreboard(sim::Environment& env, const std::vector<workload::BarrierDef>& barriers,
                    const std::vector<workload::Task>& tasks, std::uint32_t slots);

  std::uint32_t slot_of(std::size_t barrier) const { return state_.at(barrier).slot; }
  bool live(std::size_t barrier) const;
  bool fired(std::size_t barrier) const { return state_.at(barrier).fired->fired(); }
  std::optional<sim::SimTime> fire_time(std::size_t barrier) const { return state_.at(barrier).fire_time; }
  std::uint32_t producers_remaining(std::size_t barrier) const { return state_.at(barrier).producers; }
  std::uint32_t consumers_remaining(std::size_t barrier) const { return state_.at(barrier).consumers; }

  /// Suspends until the barrier owns its slot, then decrements its producer
  /// count; the barrier fires when the count reaches zero. Producing an
  /// already-fired barrier throws SimulationError.
  sim::Task produce(std::size_t barrier);
  /// Suspends until the barrier has fired (returns at once if it already has).
  sim::Task wait(std::size_t barrier);
  /// Decrements the consumer count of a fired barrier; at zero the slot passes
  /// to the next queued logical barrier.
  void consume(std::size_t barrier);

  void set_on_fire(std::function<void(std::size_t)> fn) { on_fire_ = std::move(fn); }

 private:
  struct Logical {
    std::uint32_t slot = 0;
    std::uint32_t producers = 0;
    std::uint32_t consumers = 0;
    std::unique_ptr<sim::Signal> owns_slot;
    std::unique_ptr<sim::Signal> fired;
    std::optional<sim::SimTime> fire_time;
  };

  sim::Environment* env_;
  const std::vector<workload::BarrierDef>* defs_;
  std::vector<Logical> state_;
  std::vector<std::deque<std::size_t>> slots_;
  std::function<void(std::size_t)> on_fire_;
};

}  // namespace neusim::sched
