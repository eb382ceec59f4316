#include "neusim/sched/scheduler.hpp"

#include <sstream>

#include "neusim/error.hpp"

namespace neusim::sched {

struct Scheduler::Engine {
  Engine(sim::Environment& env, std::size_t depth) : fifo(env, depth) {}
  sim::BoundedFifo<std::size_t> fifo;
};

Scheduler::Scheduler(sim::Environment& env, const workload::TaskGraph& graph, std::vector<std::string> engines,
                     std::vector<std::size_t> engine_of, TaskExecutor& executor, std::uint32_t fifo_depth,
                     std::uint32_t barrier_slots, Trace* trace)
    : env_(&env),
      graph_(&graph),
      names_(std::move(engines)),
      engine_of_(std::move(engine_of)),
      executor_(&executor),
      scoreboard_(env, graph.barriers, graph.tasks, barrier_slots),
      trace_(trace),
      status_(graph.tasks.size(), Status::Listed),
      waiting_on_(graph.tasks.size(), 0),
      timings_(graph.tasks.size()) {
  if (engine_of_.size() != graph.tasks.size()) throw SimulationError("scheduler: engine map does not cover every task");
  for (std::size_t i = 0; i < names_.size(); ++i) {
    engines_.push_back(std::make_unique<Engine>(env, fifo_depth));
    tracks_.push_back(trace_ ? trace_->track(names_[i]) : 0);
  }
  if (trace_) {
    const auto barrier_track = trace_->track("barriers");
    scoreboard_.set_on_fire([this, barrier_track](std::size_t b) {
      const auto t = env_->now();
      trace_->events.push_back(
          {t, t, barrier_track, "barrier " + std::to_string(graph_->barriers[b].id), TraceKind::BarrierFire, {}});
    });
  }
}

Scheduler::~Scheduler() = default;

void Scheduler::start() {
  env_->spawn("scheduler", feed());
  for (std::size_t e = 0; e < engines_.size(); ++e) env_->spawn(names_[e], engine_loop(e));
}

sim::Task Scheduler::feed() {
  for (std::size_t i = 0; i < graph_->tasks.size(); ++i) {
    status_[i] = Status::Queued;
    co_await engines_[engine_of_[i]]->fifo.put(i);
  }
}

sim::Task Scheduler::engine_loop(std::size_t e) {
  auto& engine = *engines_[e];
  while (true) {
    const std::size_t i = co_await engine.fifo.get();
    const auto& task = graph_->tasks[i];
    status_[i] = Status::Waiting;
    const auto arrived = env_->now();
    for (auto b : task.wait) {
      waiting_on_[i] = b;
      co_await scoreboard_.wait(b);
    }
    for (auto b : task.wait) scoreboard_.consume(b);
    const auto start = env_->now();
    if (trace_ && start > arrived) {
      trace_->events.push_back({arrived, start, tracks_[e], task.id, TraceKind::Stall, {}});
    }
    status_[i] = Status::Running;
    timings_[i].start = start;
    Meta meta;
    co_await executor_->execute(i, meta);
    const auto end = env_->now();
    timings_[i].end = end;
    if (trace_) {
      trace_->events.push_back(
          {start, end, tracks_[e], task.id, task.is_compute() ? TraceKind::Compute : TraceKind::Dma, std::move(meta)});
    }
    status_[i] = Status::Producing;
    for (auto b : task.update) {
      waiting_on_[i] = b;
      co_await scoreboard_.produce(b);
    }
    status_[i] = Status::Done;
    ++completed_;
    last_end_ = std::max(last_end_, end);
  }
}

void Scheduler::check_complete() const {
  if (complete()) return;
  std::ostringstream os;
  os << "deadlock at t=" << env_->now() << ": " << graph_->tasks.size() - completed_ << " task(s) incomplete";
  std::size_t listed = 0;
  std::size_t shown = 0;
  for (std::size_t i = 0; i < graph_->tasks.size(); ++i) {
    const auto& t = graph_->tasks[i];
    const auto barrier_id = [&] { return graph_->barriers[waiting_on_[i]].id; };
    switch (status_[i]) {
      case Status::Waiting:
        os << (shown++ ? "; " : ": ") << "'" << t.id << "' on " << names_[engine_of_[i]] << " waits for barrier "
           << barrier_id();
        break;
      case Status::Producing:
        os << (shown++ ? "; " : ": ") << "'" << t.id << "' waits for the slot of barrier " << barrier_id();
        break;
      case Status::Queued:
        os << (shown++ ? "; " : ": ") << "'" << t.id << "' queued behind a blocked task on " << names_[engine_of_[i]];
        break;
      case Status::Running:
        os << (shown++ ? "; " : ": ") << "'" << t.id << "' still running on " << names_[engine_of_[i]];
        break;
      case Status::Listed: ++listed; break;
      case Status::Done: break;
    }
  }
  if (listed) os << "; " << listed << " task(s) never enqueued";
  std::string unfired;
  for (std::size_t b = 0; b < graph_->barriers.size(); ++b) {
    if (!scoreboard_.fired(b)) unfired += (unfired.empty() ? "" : ", ") + std::to_string(graph_->barriers[b].id);
  }
  if (!unfired.empty()) os << "; unfired barriers: " << unfired;
  throw DeadlockError(os.str());
}

}  // namespace neusim::sched
