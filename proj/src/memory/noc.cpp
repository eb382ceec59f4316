#include "neusim/memory/noc.hpp"

#include <algorithm>

#include "neusim/error.hpp"

namespace neusim::memory {

Noc::Noc(sim::Environment& env, const config::NocParams& params, Clock clock, std::vector<std::string> masters,
         std::uint32_t slaves, ActivityLog* log)
    : env_(&env), params_(params), clock_(clock), latency_(clock.cycles(params.port_latency)), log_(log) {
  for (auto& name : masters) {
    Port p;
    p.queues.resize(slaves);
    if (log_) {
      p.model = log_->add_model("noc/" + name, config::EngineClass::Noc, params.port_bw_bytes_per_cycle, clock.own_mhz());
    }
    p.name = std::move(name);
    ports_.push_back(std::move(p));
  }
}

std::size_t Noc::master(const std::string& name) const {
  for (std::size_t i = 0; i < ports_.size(); ++i) {
    if (ports_[i].name == name) return i;
  }
  throw SimulationError("NOC has no master port mapped for '" + name + "'");
}

Noc::TicketPtr Noc::submit(std::size_t master, std::uint32_t slave, std::uint64_t bytes) {
  auto& port = ports_.at(master);
  auto ticket = std::make_shared<Ticket>(*env_);
  ticket->slave = slave;
  ticket->bytes = bytes;
  port.queues.at(slave).push_back(ticket);
  if (!port.pending) schedule(master, std::max(env_->now(), port.busy_until));
  return ticket;
}

void Noc::schedule(std::size_t port, sim::SimTime at) {
  ports_[port].pending = true;
  env_->schedule_callback(at, [this, port] { arbitrate(port); });
}

void Noc::arbitrate(std::size_t index) {
  auto& port = ports_[index];
  port.pending = false;
  const auto n = static_cast<std::uint32_t>(port.queues.size());
  for (std::uint32_t k = 0; k < n; ++k) {
    const std::uint32_t s = (port.rr_next + k) % n;
    if (port.queues[s].empty()) continue;
    auto ticket = port.queues[s].front();
    port.queues[s].pop_front();
    port.rr_next = (s + 1) % n;
    const auto start = env_->now();
    const auto end = start + serialize(ticket->bytes);
    port.busy_until = end;
    if (log_) log_->record(port.model, start, end, ticket->bytes);
    ticket->granted = start;
    ticket->delivered = end + latency_;
    env_->schedule_callback(ticket->delivered, [ticket] { ticket->done.fire(); });
    const bool more = std::any_of(port.queues.begin(), port.queues.end(), [](const auto& q) { return !q.empty(); });
    if (more) schedule(index, end);
    return;
  }
}

}  // namespace neusim::memory
