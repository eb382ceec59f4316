#include "neusim/sim/kernel.hpp"

#include <string>

#include "neusim/error.hpp"

namespace neusim::sim {

ProcessId process_of(Task::Handle h) noexcept {
  auto* state = h.promise().process;
  return state ? state->id : kKernelPid;
}

std::coroutine_handle<> Task::FinalAwaiter::await_suspend(Handle h) noexcept {
  auto& promise = h.promise();
  if (promise.continuation) return promise.continuation;
  if (promise.process) promise.process->environment->on_process_exit(*promise.process, promise.error);
  return std::noop_coroutine();
}

void Signal::fire() {
  if (fired_) throw std::logic_error("signal fired twice without re-arming");
  fired_ = true;
  auto waiters = std::move(waiters_);
  waiters_.clear();
  for (const auto& w : waiters) env_->schedule_resume(env_->now(), w.handle, w.pid, EventKind::Wake);
}

void Signal::reset() {
  if (!waiters_.empty()) throw std::logic_error("cannot re-arm a signal with pending waiters");
  fired_ = false;
}

Environment::~Environment() {
  for (auto& p : processes_) {
    if (p && p->handle) p->handle.destroy();
  }
}

ProcessHandle Environment::spawn(std::string name, Task body) {
  if (finished_) throw SimulationError("cannot spawn process '" + name + "': environment already finished");
  auto pid = static_cast<ProcessId>(processes_.size() + 1);
  auto state = std::make_unique<detail::ProcessState>(*this, pid, std::move(name));
  state->handle = body.release();
  if (!state->handle) throw std::invalid_argument("spawn requires a coroutine body");
  state->handle.promise().process = state.get();
  schedule_resume(now_, state->handle, pid, EventKind::Start);
  ProcessHandle handle(state.get());
  processes_.push_back(std::move(state));
  return handle;
}

const std::string& Environment::process_name(ProcessId pid) const {
  static const std::string kernel = "kernel";
  if (pid == kKernelPid || pid > processes_.size()) return kernel;
  return processes_[pid - 1]->name;
}

void Environment::schedule_resume(SimTime at, std::coroutine_handle<> h, ProcessId pid, EventKind kind) {
  queue_.push(Event{at, next_seq_++, h, {}, pid, kind});
}

void Environment::schedule_callback(SimTime at, std::function<void()> fn) {
  queue_.push(Event{at, next_seq_++, {}, std::move(fn), kKernelPid, EventKind::Callback});
}

void Environment::on_process_exit(detail::ProcessState& state, std::exception_ptr error) {
  if (error && !failure_) failure_.emplace(state.id, error);
  exited_.push_back(state.id);
  state.done.fire();
}

void Environment::reap() {
  for (auto pid : exited_) {
    auto& state = processes_[pid - 1];
    if (state->handle) {
      state->handle.destroy();
      state->handle = {};
    }
  }
  exited_.clear();
}

namespace {
[[noreturn]] void rethrow_as_process_failure(const std::string& name, ProcessId pid, SimTime now,
                                             std::exception_ptr error) {
  const std::string where = "process '" + name + "' (pid " + std::to_string(pid) + ") failed at t=" +
                            std::to_string(now) + ": ";
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    throw Error(e.code(), where + e.what());
  } catch (const std::exception& e) {
    throw SimulationError(where + e.what());
  } catch (...) {
    throw SimulationError(where + "unknown exception");
  }
}
}  // namespace

SimTime Environment::run_until(std::optional<SimTime> limit) {
  while (!queue_.empty()) {
    if (limit && queue_.top().time > *limit) break;
    Event ev = queue_.top();
    queue_.pop();
    now_ = ev.time;
    ++fired_;
    if (observer_) observer_(ev.time, ev.pid, ev.kind);
    if (ev.handle) {
      ev.handle.resume();
    } else {
      try {
        ev.callback();
      } catch (...) {
        rethrow_as_process_failure("kernel", kKernelPid, now_, std::current_exception());
      }
    }
    if (failure_) {
      auto [pid, error] = *failure_;
      failure_.reset();
      reap();
      rethrow_as_process_failure(process_name(pid), pid, now_, error);
    }
    if (!exited_.empty()) reap();
  }
  if (limit) {
    if (*limit > now_) now_ = *limit;
  } else {
    finished_ = true;
  }
  return now_;
}

SharedCounter::SharedCounter(Environment& env, std::uint64_t initial, std::optional<std::uint64_t> capacity)
    : env_(&env), level_(initial), capacity_(capacity) {
  if (capacity_ && initial > *capacity_) throw std::invalid_argument("SharedCounter initial level exceeds capacity");
}

bool SharedCounter::can_put(std::uint64_t amount) const noexcept {
  return !capacity_ || level_ + amount <= *capacity_;
}

bool SharedCounter::Request::await_ready() {
  auto& c = *counter;
  if (is_put) {
    if (c.putters_.empty() && c.can_put(amount)) {
      c.level_ += amount;
      c.settle();
      return true;
    }
  } else if (c.getters_.empty() && c.level_ >= amount) {
    c.level_ -= amount;
    c.settle();
    return true;
  }
  return false;
}

void SharedCounter::Request::await_suspend(Task::Handle h) {
  handle = h;
  pid = process_of(h);
  (is_put ? counter->putters_ : counter->getters_).push_back(this);
}

void SharedCounter::settle() {
  bool progress = true;
  while (progress) {
    progress = false;
    while (!getters_.empty() && level_ >= getters_.front()->amount) {
      auto* r = getters_.front();
      getters_.pop_front();
      level_ -= r->amount;
      env_->schedule_resume(env_->now(), r->handle, r->pid, EventKind::Wake);
      progress = true;
    }
    while (!putters_.empty() && can_put(putters_.front()->amount)) {
      auto* r = putters_.front();
      putters_.pop_front();
      level_ += r->amount;
      env_->schedule_resume(env_->now(), r->handle, r->pid, EventKind::Wake);
      progress = true;
    }
  }
}

}  // namespace neusim::sim
