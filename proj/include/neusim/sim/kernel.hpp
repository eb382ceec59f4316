#pragma once

// Deterministic discrete-event kernel.
//
// Processes are C++20 coroutines returning `Task`. A process suspends on
// awaitables (timeouts, signals, FIFOs, counters) and the environment resumes
// it when the awaited event fires. Events are ordered by (time, sequence);
// the sequence number is a global insertion counter, so equal-time events fire
// in the order they were scheduled.

#include <coroutine>
#include <cstdint>
#include <deque>
#include <exception>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace neusim::sim {

using SimTime = std::uint64_t;
using ProcessId = std::uint32_t;

/// Owner id used for kernel callbacks that do not belong to a process.
inline constexpr ProcessId kKernelPid = 0;

enum class EventKind : std::uint8_t { Start, Timeout, Wake, Callback };

class Environment;

namespace detail {
struct ProcessState;
}

/// Coroutine type for simulation processes and for sub-routines they await.
class [[nodiscard]] Task {
 public:
  struct promise_type;
  using Handle = std::coroutine_handle<promise_type>;

  struct FinalAwaiter {
    bool await_ready() const noexcept { return false; }
    std::coroutine_handle<> await_suspend(Handle h) noexcept;
    void await_resume() const noexcept {}
  };

  struct promise_type {
    std::coroutine_handle<> continuation;
    std::exception_ptr error;
    detail::ProcessState* process = nullptr;

    Task get_return_object() { return Task{Handle::from_promise(*this)}; }
    std::suspend_always initial_suspend() const noexcept { return {}; }
    FinalAwaiter final_suspend() const noexcept { return {}; }
    void return_void() const noexcept {}
    void unhandled_exception() noexcept { error = std::current_exception(); }
  };

  Task() = default;
  explicit Task(Handle h) : handle_(h) {}
  Task(Task&& other) noexcept : handle_(std::exchange(other.handle_, {})) {}
  Task& operator=(Task&& other) noexcept {
    if (this != &other) {
      if (handle_) handle_.destroy();
      handle_ = std::exchange(other.handle_, {});
    }
    return *this;
  }
  Task(const Task&) = delete;
  Task& operator=(const Task&) = delete;
  ~Task() {
    if (handle_) handle_.destroy();
  }

  // Awaiting a Task runs it as a sub-routine of the awaiting process.
  bool await_ready() const noexcept { return !handle_ || handle_.done(); }
  std::coroutine_handle<> await_suspend(Handle parent) noexcept {
    handle_.promise().continuation = parent;
    handle_.promise().process = parent.promise().process;
    return handle_;
  }
  void await_resume() const {
    if (handle_ && handle_.promise().error) std::rethrow_exception(handle_.promise().error);
  }

  Handle release() noexcept { return std::exchange(handle_, {}); }

 private:
  Handle handle_;
};

ProcessId process_of(Task::Handle h) noexcept;

struct Waiter {
  std::coroutine_handle<> handle;
  ProcessId pid = kKernelPid;
};

/// One-shot, level-sensitive event. Waiters registered before `fire` resume in
/// registration order; waiting on an already-fired signal does not suspend.
class Signal {
 public:
  explicit Signal(Environment& env) : env_(&env) {}
  Signal(const Signal&) = delete;
  Signal& operator=(const Signal&) = delete;

  bool fired() const noexcept { return fired_; }
  std::size_t waiting() const noexcept { return waiters_.size(); }

  /// Throws std::logic_error when fired twice without `reset`.
  void fire();
  void reset();

  struct Awaiter {
    Signal* signal;
    bool await_ready() const noexcept { return signal->fired_; }
    void await_suspend(Task::Handle h) { signal->waiters_.push_back({h, process_of(h)}); }
    void await_resume() const noexcept {}
  };
  Awaiter wait() noexcept { return Awaiter{this}; }

 private:
  Environment* env_;
  bool fired_ = false;
  std::vector<Waiter> waiters_;
};

namespace detail {
struct ProcessState {
  ProcessState(Environment& env, ProcessId pid, std::string n)
      : id(pid), name(std::move(n)), done(env), environment(&env) {}
  ProcessId id;
  std::string name;
  Task::Handle handle;
  Signal done;
  Environment* environment;
};
}  // namespace detail

class ProcessHandle {
 public:
  ProcessHandle() = default;
  ProcessHandle(detail::ProcessState* state) : state_(state) {}

  ProcessId id() const noexcept { return state_->id; }
  const std::string& name() const noexcept { return state_->name; }
  bool done() const noexcept { return state_->done.fired(); }
  Signal& completion() const noexcept { return state_->done; }

 private:
  detail::ProcessState* state_ = nullptr;
};

class Environment {
 public:
  using Observer = std::function<void(SimTime, ProcessId, EventKind)>;

  Environment() = default;
  Environment(const Environment&) = delete;
  Environment& operator=(const Environment&) = delete;
  ~Environment();

  SimTime now() const noexcept { return now_; }
  bool finished() const noexcept { return finished_; }
  bool idle() const noexcept { return queue_.empty(); }
  std::uint64_t fired_events() const noexcept { return fired_; }

  /// Schedules `body` to start at the current time.
  ProcessHandle spawn(std::string name, Task body);

  /// Fires every event with time <= limit (all events when no limit is given)
  /// and returns the final simulated time. With a limit, `now` advances to the
  /// limit even if the queue drains earlier. Running to exhaustion finishes the
  /// environment; later spawns are rejected.
  SimTime run_until(std::optional<SimTime> limit = std::nullopt);
  SimTime run() { return run_until(std::nullopt); }

  void schedule_resume(SimTime at, std::coroutine_handle<> h, ProcessId pid, EventKind kind);
  void schedule_callback(SimTime at, std::function<void()> fn);

  void set_observer(Observer observer) { observer_ = std::move(observer); }
  const std::string& process_name(ProcessId pid) const;

  struct Timeout {
    Environment* env;
    SimTime delay;
    bool await_ready() const noexcept { return false; }
    void await_suspend(Task::Handle h) const {
      env->schedule_resume(env->now_ + delay, h, process_of(h), EventKind::Timeout);
    }
    void await_resume() const noexcept {}
  };
  Timeout timeout(SimTime delay) noexcept { return Timeout{this, delay}; }

  /// Suspends until absolute time `at` (no-op delay when `at` is in the past).
  Timeout until(SimTime at) noexcept { return Timeout{this, at > now_ ? at - now_ : 0}; }

 private:
  friend struct Task::FinalAwaiter;

  struct Event {
    SimTime time;
    std::uint64_t seq;
    std::coroutine_handle<> handle;
    std::function<void()> callback;
    ProcessId pid;
    EventKind kind;
  };
  struct Later {
    bool operator()(const Event& a, const Event& b) const noexcept {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  void on_process_exit(detail::ProcessState& state, std::exception_ptr error);
  void reap();

  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;
  std::uint64_t fired_ = 0;
  bool finished_ = false;
  std::priority_queue<Event, std::vector<Event>, Later> queue_;
  std::vector<std::unique_ptr<detail::ProcessState>> processes_;
  std::vector<ProcessId> exited_;
  std::optional<std::pair<ProcessId, std::exception_ptr>> failure_;
  Observer observer_;
};

/// Bounded FIFO store: `put` suspends while full, `get` suspends while empty.
template <typename T>
class BoundedFifo {
 public:
  BoundedFifo(Environment& env, std::size_t capacity) : env_(&env), capacity_(capacity) {
    if (capacity == 0) throw std::invalid_argument("BoundedFifo capacity must be positive");
  }
  BoundedFifo(const BoundedFifo&) = delete;
  BoundedFifo& operator=(const BoundedFifo&) = delete;

  std::size_t size() const noexcept { return items_.size(); }
  std::size_t capacity() const noexcept { return capacity_; }
  bool empty() const noexcept { return items_.empty(); }

  struct PutAwaiter {
    BoundedFifo* fifo;
    T item;
    std::coroutine_handle<> handle{};
    ProcessId pid = kKernelPid;

    bool await_ready() {
      if (!fifo->getters_.empty()) {
        // Items must be empty while getters are blocked: hand off directly.
        auto* getter = fifo->getters_.front();
        fifo->getters_.pop_front();
        getter->slot.emplace(std::move(item));
        fifo->env_->schedule_resume(fifo->env_->now(), getter->handle, getter->pid, EventKind::Wake);
        return true;
      }
      if (fifo->putters_.empty() && fifo->items_.size() < fifo->capacity_) {
        fifo->items_.push_back(std::move(item));
        return true;
      }
      return false;
    }
    void await_suspend(Task::Handle h) {
      handle = h;
      pid = process_of(h);
      fifo->putters_.push_back(this);
    }
    void await_resume() const noexcept {}
  };

  struct GetAwaiter {
    BoundedFifo* fifo;
    std::optional<T> slot{};
    std::coroutine_handle<> handle{};
    ProcessId pid = kKernelPid;

    bool await_ready() {
      if (fifo->items_.empty()) return false;
      slot.emplace(std::move(fifo->items_.front()));
      fifo->items_.pop_front();
      if (!fifo->putters_.empty()) {
        auto* putter = fifo->putters_.front();
        fifo->putters_.pop_front();
        fifo->items_.push_back(std::move(putter->item));
        fifo->env_->schedule_resume(fifo->env_->now(), putter->handle, putter->pid, EventKind::Wake);
      }
      return true;
    }
    void await_suspend(Task::Handle h) {
      handle = h;
      pid = process_of(h);
      fifo->getters_.push_back(this);
    }
    T await_resume() { return std::move(*slot); }
  };

  PutAwaiter put(T item) { return PutAwaiter{this, std::move(item)}; }
  GetAwaiter get() { return GetAwaiter{this}; }

 private:
  Environment* env_;
  std::size_t capacity_;
  std::deque<T> items_;
  std::deque<PutAwaiter*> putters_;
  std::deque<GetAwaiter*> getters_;
};

/// Shared level with optional capacity. Requests are served strictly in
/// arrival order per direction.
class SharedCounter {
 public:
  SharedCounter(Environment& env, std::uint64_t initial, std::optional<std::uint64_t> capacity = std::nullopt);
  SharedCounter(const SharedCounter&) = delete;
  SharedCounter& operator=(const SharedCounter&) = delete;

  std::uint64_t level() const noexcept { return level_; }
  std::optional<std::uint64_t> capacity() const noexcept { return capacity_; }

  struct Request {
    SharedCounter* counter;
    std::uint64_t amount;
    bool is_put;
    std::coroutine_handle<> handle{};
    ProcessId pid = kKernelPid;

    bool await_ready();
    void await_suspend(Task::Handle h);
    void await_resume() const noexcept {}
  };

  Request put(std::uint64_t amount) { return Request{this, amount, true}; }
  Request get(std::uint64_t amount) { return Request{this, amount, false}; }

 private:
  bool can_put(std::uint64_t amount) const noexcept;
  void settle();

  Environment* env_;
  std::uint64_t level_;
  std::optional<std::uint64_t> capacity_;
  std::deque<Request*> putters_;
  std::deque<Request*> getters_;
};

}  // namespace neusim::sim
