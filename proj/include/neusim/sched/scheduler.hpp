#pragma once

// Central scheduler: walks the task list in order and pushes each task into
// the bounded FIFO of its engine. Every engine pops tasks in order, waits for
// and consumes the task's wait barriers, runs it, then produces its update
// barriers.

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "neusim/sched/scoreboard.hpp"
#include "neusim/sim/kernel.hpp"
#include "neusim/trace.hpp"
#include "neusim/workload/task_graph.hpp"

namespace neusim::sched {

using Meta = std::vector<std::pair<std::string, std::string>>;

/// Engine behaviour behind a task; lets tests plug in fake engines.
class TaskExecutor {
 public:
  virtual ~TaskExecutor() = default;
  virtual sim::Task execute(std::size_t task, Meta& meta) = 0;
};

struct TaskTiming {
  std::optional<sim::SimTime> start;
  std::optional<sim::SimTime> end;
};

class Scheduler {
 public:
  /// `engine_of[i]` is the engine index (into `engines`) of task i.
  Scheduler(sim::Environment& env, const workload::TaskGraph& graph, std::vector<std::string> engines,
            std::vector<std::size_t> engine_of, TaskExecutor& executor, std::uint32_t fifo_depth,
            std::uint32_t barrier_slots, Trace* trace = nullptr);
  ~Scheduler();

  /// Spawns the scheduler process and one process per engine.
  void start();

  bool complete() const { return completed_ == graph_->tasks.size(); }
  std::size_t completed() const { return completed_; }
  /// Throws DeadlockError naming incomplete tasks and unfired barriers.
  void check_complete() const;

  const std::vector<TaskTiming>& timings() const { return timings_; }
  const BarrierScoreboard& scoreboard() const { return scoreboard_; }
  sim::SimTime last_completion() const { return last_end_; }

 private:
  enum class Status { Listed, Queued, Waiting, Running, Producing, Done };
  struct Engine;

  sim::Task feed();
  sim::Task engine_loop(std::size_t engine);

  sim::Environment* env_;
  const workload::TaskGraph* graph_;
  std::vector<std::string> names_;
  std::vector<std::size_t> engine_of_;
  TaskExecutor* executor_;
  BarrierScoreboard scoreboard_;
  Trace* trace_;
  std::vector<std::unique_ptr<Engine>> engines_;
  std::vector<std::size_t> tracks_;
  std::vector<Status> status_;
  std::vector<std::size_t> waiting_on_;
  std::vector<TaskTiming> timings_;
  std::size_t completed_ = 0;
  sim::SimTime last_end_ = 0;
};

}  // namespace neusim::sched
