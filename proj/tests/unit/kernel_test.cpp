#include <string>
#include <vector>

#include "doctest.h"
#include "neusim/error.hpp"
#include "neusim/sim/kernel.hpp"

using namespace neusim::sim;

TEST_CASE("timeouts advance simulated time") {
  Environment env;
  std::vector<SimTime> seen;
  env.spawn("p", [](Environment& e, std::vector<SimTime>& out) -> Task {
    co_await e.timeout(5);
    out.push_back(e.now());
    co_await e.timeout(0);
    out.push_back(e.now());
    co_await e.until(12);
    out.push_back(e.now());
    co_await e.until(3);
    out.push_back(e.now());
  }(env, seen));
  CHECK(env.run() == 12);
  CHECK(seen == std::vector<SimTime>{5, 5, 12, 12});
  CHECK(env.idle());
}

TEST_CASE("same-time events run in scheduling order") {
  Environment env;
  std::string order;
  for (char c : std::string("abc")) {
    env.spawn(std::string(1, c), [](Environment& e, std::string& o, char ch) -> Task {
      co_await e.timeout(1);
      o.push_back(ch);
    }(env, order, c));
  }
  env.run();
  CHECK(order == "abc");
}

TEST_CASE("run_until stops at the limit and resumes later") {
  Environment env;
  int ticks = 0;
  env.spawn("ticker", [](Environment& e, int& n) -> Task {
    for (int i = 0; i < 10; ++i) {
      co_await e.timeout(10);
      ++n;
    }
  }(env, ticks));
  env.run_until(35);
  CHECK(ticks == 3);
  env.run();
  CHECK(ticks == 10);
  CHECK(env.now() == 100);
}

TEST_CASE("signals wake every waiter once") {
  Environment env;
  Signal sig(env);
  int woken = 0;
  for (int i = 0; i < 3; ++i) {
    env.spawn("w", [](Signal& s, int& n) -> Task {
      co_await s.wait();
      ++n;
    }(sig, woken));
  }
  env.spawn("firer", [](Environment& e, Signal& s) -> Task {
    co_await e.timeout(7);
    s.fire();
  }(env, sig));
  env.run();
  CHECK(woken == 3);
  CHECK(sig.fired());
  CHECK(env.now() == 7);
}

TEST_CASE("bounded fifo blocks producers at capacity") {
  Environment env;
  BoundedFifo<int> fifo(env, 2);
  std::vector<std::pair<SimTime, int>> got;
  env.spawn("producer", [](BoundedFifo<int>& f) -> Task {
    for (int i = 0; i < 4; ++i) co_await f.put(i);
  }(fifo));
  env.spawn("consumer", [](Environment& e, BoundedFifo<int>& f, std::vector<std::pair<SimTime, int>>& out) -> Task {
    for (int i = 0; i < 4; ++i) {
      co_await e.timeout(10);
      out.emplace_back(e.now(), co_await f.get());
    }
  }(env, fifo, got));
  env.run();
  REQUIRE(got.size() == 4);
  for (int i = 0; i < 4; ++i) CHECK(got[i].second == i);
  CHECK(got.back().first == 40);
  CHECK_THROWS(BoundedFifo<int>(env, 0));
}

TEST_CASE("shared counter serves requests in arrival order") {
  Environment env;
  SharedCounter credits(env, 1, 2);
  std::vector<SimTime> acquired;
  for (int i = 0; i < 3; ++i) {
    env.spawn("user", [](Environment& e, SharedCounter& c, std::vector<SimTime>& out) -> Task {
      co_await c.get(1);
      out.push_back(e.now());
      co_await e.timeout(4);
      co_await c.put(1);
    }(env, credits, acquired));
  }
  env.run();
  CHECK(acquired == std::vector<SimTime>{0, 4, 8});
  CHECK(credits.level() == 1);
}

TEST_CASE("nested tasks propagate exceptions to the caller") {
  Environment env;
  bool caught = false;
  env.spawn("outer", [](Environment& e, bool& c) -> Task {
    auto inner = [](Environment& en) -> Task {
      co_await en.timeout(1);
      throw std::runtime_error("boom");
    };
    try {
      co_await inner(e);
    } catch (const std::runtime_error&) {
      c = true;
    }
  }(env, caught));
  env.run();
  CHECK(caught);
}

TEST_CASE("observer sees every fired event") {
  Environment env;
  std::size_t events = 0;
  env.set_observer([&](SimTime, ProcessId, EventKind) { ++events; });
  env.spawn("p", [](Environment& e) -> Task { co_await e.timeout(2); }(env));
  env.schedule_callback(1, [] {});
  env.run();
  CHECK(events == env.fired_events());
  CHECK(events >= 3);
}
