#include <algorithm>
#include <random>

#include "acceptance/criteria.hpp"
#include "neusim/error.hpp"
#include "neusim/simulator.hpp"
#include "support.hpp"

namespace neusim::acceptance {

namespace {

using workload::Opcode;

// A random DAG over `n` tasks listed in a topological order. Each task is a
// small DMA, DPU or DSP job; edges point from earlier to later tasks and are
// carried by fan-out barriers (one producer) or join barriers (one consumer).
workload::TaskGraph random_dag(std::mt19937_64& rng, std::size_t n, const config::PlatformConfig& p) {
  auto pick = [&](std::uint64_t lo, std::uint64_t hi) {
    return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
  };
  test::GraphBuilder b;
  const auto ddr_buf = b.ddr("buf", {1, 1, 1, 4096}, 0);
  std::vector<std::size_t> cb_buf;
  for (std::uint32_t t = 0; t < p.tiles; ++t) cb_buf.push_back(b.cb("buf@t" + std::to_string(t), {1, 1, 1, 4096}, t, 0));

  std::vector<std::vector<std::size_t>> preds(n);
  for (std::size_t j = 1; j < n; ++j) {
    const auto k = pick(0, std::min<std::uint64_t>(3, j));
    for (std::uint64_t e = 0; e < k; ++e) {
      const auto i = pick(0, j - 1);
      if (std::find(preds[j].begin(), preds[j].end(), i) == preds[j].end()) preds[j].push_back(i);
    }
  }

  // Barrier assignment: a task with several predecessors sometimes gets a
  // join barrier; every other edge goes through its producer's fan-out barrier.
  std::vector<std::vector<std::size_t>> wait(n), update(n);
  std::vector<std::optional<std::size_t>> fanout(n);
  for (std::size_t j = 0; j < n; ++j) {
    if (preds[j].size() >= 2 && pick(0, 2) == 0) {
      const auto bar = b.barrier(static_cast<std::uint32_t>(preds[j].size()), 1);
      for (auto i : preds[j]) update[i].push_back(bar);
      wait[j].push_back(bar);
      continue;
    }
    for (auto i : preds[j]) {
      if (!fanout[i]) {
        fanout[i] = b.barrier(1, 0);
        update[i].push_back(*fanout[i]);
      }
      ++b.g.barriers[*fanout[i]].consumer_count;
      wait[j].push_back(*fanout[i]);
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const auto id = "t" + std::to_string(j);
    const auto tile = static_cast<std::uint32_t>(pick(0, p.tiles - 1));
    switch (pick(0, 2)) {
      case 0: {
        const auto src = pick(0, 1) ? ddr_buf : cb_buf[pick(0, p.tiles - 1)];
        workload::DmaDescriptor d;
        d.src = src;
        d.dst = cb_buf[tile];
        d.dims = {pick(1, 4096)};
        b.g.tasks.push_back(
            {id, workload::DmaTask{static_cast<std::uint32_t>(pick(0, p.dma.channels - 1)), {d}}, wait[j], update[j]});
        break;
      }
      case 1: {
        const std::uint32_t c = 16 * static_cast<std::uint32_t>(pick(1, 4));
        const auto x = b.cb(id + ".x", {1, 8, 8, c}, tile, 0);
        const auto w = b.cb(id + ".w", {c, 1, 1, c}, tile, 0);
        const auto y = b.cb(id + ".y", {1, 8, 8, c}, tile, 0);
        workload::Operator op;
        op.id = id;
        op.opcode = Opcode::Conv2D;
        op.inputs = {x};
        op.weights = w;
        op.outputs = {y};
        const auto o = b.op(op);
        b.compute(id, o, tile, static_cast<std::uint32_t>(pick(0, p.dpus_per_tile - 1)), wait[j], update[j]);
        break;
      }
      default: {
        const auto x = b.cb(id + ".x", {1, 4, 4, 64}, tile, 0);
        const auto y = b.cb(id + ".y", {1, 4, 4, 64}, tile, 0);
        workload::Operator op;
        op.id = id;
        op.opcode = Opcode::Activation;
        op.kernel = "relu";
        op.inputs = {x};
        op.outputs = {y};
        const auto o = b.op(op);
        b.compute(id, o, tile, static_cast<std::uint32_t>(pick(0, p.dsps_per_tile - 1)), wait[j], update[j]);
      }
    }
  }

  workload::validate(b.g);
  return b.g;
}

// Two tasks on the same DPU listed consumer-first: the first blocks the
// engine's queue waiting for a barrier only the second can produce.
workload::TaskGraph crafted_deadlock() {
  test::GraphBuilder b;
  std::size_t ops[2];
  for (int i = 0; i < 2; ++i) {
    const auto id = std::string(i ? "producer" : "consumer");
    workload::Operator op;
    op.id = id;
    op.opcode = Opcode::Conv2D;
    op.inputs = {b.cb(id + ".x", {1, 8, 8, 16}, 0, 0)};
    op.weights = b.cb(id + ".w", {16, 1, 1, 16}, 0, 0);
    op.outputs = {b.cb(id + ".y", {1, 8, 8, 16}, 0, 0)};
    ops[i] = b.op(op);
  }
  const auto bar = b.barrier();
  b.compute("consumer", ops[0], 0, 0, {bar}, {});
  b.compute("producer", ops[1], 0, 0, {}, {bar});
  workload::validate(b.g);
  return b.g;
}

}  // namespace

Outcome barrier_semantics() {
  const auto cfg = test::platform();
  std::mt19937_64 rng(7);
  int completed = 0;
  int ordering_violations = 0;
  std::size_t edges = 0;
  for (int g = 0; g < 100; ++g) {
    const auto graph = random_dag(rng, 50, cfg.platform);
    const auto run = simulate(cfg, graph);
    bool all_done = true;
    for (std::size_t i = 0; i < graph.tasks.size(); ++i) {
      const auto& t = run.timings[i];
      if (!t.start || !t.end) {
        all_done = false;
        continue;
      }
      for (auto b : graph.tasks[i].wait) {
        ++edges;
        const auto& fire = run.barrier_fire[b];
        if (!fire || *t.start < *fire) ++ordering_violations;
      }
    }
    completed += all_done;
  }

  std::string diagnostic;
  try {
    simulate(cfg, crafted_deadlock());
  } catch (const DeadlockError& e) {
    diagnostic = e.what();
  }
  Verdict v;
  v << completed << "/100 graphs completed, " << edges << " waits checked, " << ordering_violations
    << " started before their barrier fired; crafted graph: "
    << (diagnostic.empty() ? std::string("no deadlock reported") : diagnostic);
  v.require(completed == 100, "a random graph did not complete");
  v.require(ordering_violations == 0, "start-after-fire violated");
  v.require(diagnostic.find("barrier 0") != std::string::npos && diagnostic.find("consumer") != std::string::npos,
            "deadlock diagnostic missing or incomplete");
  return v.outcome();
}

}  // namespace neusim::acceptance
