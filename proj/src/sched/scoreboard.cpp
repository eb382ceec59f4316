#include "neusim/sched/scoreboard.hpp"

#include "neusim/error.hpp"

namespace neusim::sched {

BarrierScoreboard::BarrierScoreboard(sim::Environment& env, const std::vector<workload::BarrierDef>& barriers,
                                     const std::vector<workload::Task>& tasks, std::uint32_t slots)
    : env_(&env), defs_(&barriers), state_(barriers.size()), slots_(slots) {
  if (slots == 0) throw SimulationError("barrier scoreboard needs at least one physical slot");
  std::vector<bool> seen(barriers.size(), false);
  std::uint64_t rank = 0;
  auto assign = [&](std::size_t b) {
    if (seen[b]) return;
    seen[b] = true;
    auto& s = state_[b];
    s.slot = static_cast<std::uint32_t>(rank++ % slots);
    s.producers = barriers[b].producer_count;
    s.consumers = barriers[b].consumer_count;
    s.owns_slot = std::make_unique<sim::Signal>(env);
    s.fired = std::make_unique<sim::Signal>(env);
    if (slots_[s.slot].empty()) s.owns_slot->fire();
    slots_[s.slot].push_back(b);
  };
  for (const auto& t : tasks) {
    for (auto b : t.wait) assign(b);
    for (auto b : t.update) assign(b);
  }
  for (std::size_t b = 0; b < barriers.size(); ++b) assign(b);
}

bool BarrierScoreboard::live(std::size_t barrier) const {
  const auto& q = slots_[state_.at(barrier).slot];
  return !q.empty() && q.front() == barrier;
}

sim::Task BarrierScoreboard::produce(std::size_t barrier) {
  auto& s = state_.at(barrier);
  co_await s.owns_slot->wait();
  if (s.producers == 0) {
    throw SimulationError("barrier " + std::to_string((*defs_)[barrier].id) + " produced more often than its producer_count");
  }
  if (--s.producers == 0) {
    s.fire_time = env_->now();
    s.fired->fire();
    if (on_fire_) on_fire_(barrier);
  }
}

sim::Task BarrierScoreboard::wait(std::size_t barrier) { co_await state_.at(barrier).fired->wait(); }

void BarrierScoreboard::consume(std::size_t barrier) {
  auto& s = state_.at(barrier);
  const auto id = std::to_string((*defs_)[barrier].id);
  if (!s.fired->fired()) throw SimulationError("barrier " + id + " consumed before it fired");
  if (s.consumers == 0) throw SimulationError("barrier " + id + " consumed more often than its consumer_count");
  if (--s.consumers > 0) return;
  auto& q = slots_[s.slot];
  q.pop_front();
  if (!q.empty()) state_[q.front()].owns_slot->fire();
}

}  // namespace neusim::sched
