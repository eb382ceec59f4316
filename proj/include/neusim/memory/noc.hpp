#pragma once

// Single central router. Master ports are memory endpoints ("ddr", "cb0",
// "cb1", ...); slave ports are the DMA channels issuing requests. Each master
// port serializes one transfer at a time at the port bandwidth and arbitrates
// round-robin among slaves with queued requests. Delivery happens
// port_latency cycles after serialization ends.

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "neusim/activity.hpp"
#include "neusim/config.hpp"
#include "neusim/sim/kernel.hpp"
#include "neusim/timebase.hpp"

namespace neusim::memory {

class Noc {
 public:
  struct Ticket {
    explicit Ticket(sim::Environment& env) : done(env) {}
    std::uint32_t slave = 0;
    std::uint64_t bytes = 0;
    sim::SimTime granted = 0;
    sim::SimTime delivered = 0;
    sim::Signal done;
  };
  using TicketPtr = std::shared_ptr<Ticket>;

  Noc(sim::Environment& env, const config::NocParams& params, Clock clock, std::vector<std::string> masters,
      std::uint32_t slaves, ActivityLog* log = nullptr);

  /// Master port index by name; throws SimulationError for unmapped names.
  std::size_t master(const std::string& name) const;
  std::size_t masters() const { return ports_.size(); }

  /// Queues a transfer; await `ticket->done.wait()` for delivery.
  TicketPtr submit(std::size_t master, std::uint32_t slave, std::uint64_t bytes);

  /// Uncontended delivery time of one transfer.
  sim::SimTime unicast_cycles(std::uint64_t bytes) const { return serialize(bytes) + latency_; }
  sim::SimTime serialize(std::uint64_t bytes) const { return clock_.transfer(bytes, params_.port_bw_bytes_per_cycle); }

 private:
  struct Port {
    std::string name;
    std::vector<std::deque<TicketPtr>> queues;
    std::uint32_t rr_next = 0;
    sim::SimTime busy_until = 0;
    bool pending = false;
    std::size_t model = 0;
  };

  void arbitrate(std::size_t port);
  void schedule(std::size_t port, sim::SimTime at);

  sim::Environment* env_;
  config::NocParams params_;
  Clock clock_;
  sim::SimTime latency_;
  std::vector<Port> ports_;
  ActivityLog* log_;
};

}  // namespace neusim::memory
