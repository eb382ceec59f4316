#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace neusim {

/// Machine-readable failure category. Surfaces on the CLI as `error[<code>]`.
enum class ErrorCode {
  Usage,
  Io,
  Config,
  Workload,
  Deadlock,
  Simulation,
  Power,
  Internal,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Usage: return "E_USAGE";
    case ErrorCode::Io: return "E_IO";
    case ErrorCode::Config: return "E_CONFIG";
    case ErrorCode::Workload: return "E_WORKLOAD";
    case ErrorCode::Deadlock: return "E_DEADLOCK";
    case ErrorCode::Simulation: return "E_SIM";
    case ErrorCode::Power: return "E_POWER";
    case ErrorCode::Internal: return "E_INTERNAL";
  }
  return "E_INTERNAL";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::Config, what) {}
};

class WorkloadError : public Error {
 public:
  explicit WorkloadError(const std::string& what) : Error(ErrorCode::Workload, what) {}
};

class DeadlockError : public Error {
 public:
  explicit DeadlockError(const std::string& what) : Error(ErrorCode::Deadlock, what) {}
};

class SimulationError : public Error {
 public:
  explicit SimulationError(const std::string& what) : Error(ErrorCode::Simulation, what) {}
};

class PowerError : public Error {
 public:
  explicit PowerError(const std::string& what) : Error(ErrorCode::Power, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::Io, what) {}
};

}  // namespace neusim
