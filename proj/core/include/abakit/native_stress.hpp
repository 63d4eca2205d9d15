#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "abakit/aba_register.hpp"
#include "abakit/history.hpp"
#include "abakit/llsc.hpp"
#include "abakit/types.hpp"

namespace abakit {

enum class StressObject : std::uint8_t { AbaRegister, Llsc, AbaFromLlsc };

std::string_view stress_object_name(StressObject o);

// Histories of native runs are checked in windows: every thread performs
// `ops_per_round` operations, then all threads meet at a barrier and the
// window is checked, continuing from every spec state the previous windows
// could have ended in.
struct StressOptions {
  std::size_t threads = 4;
  std::uint64_t rounds = 10'000;
  std::size_t ops_per_round = 2;
  std::uint64_t seed = 1;
  unsigned value_bits = 8;
  // DWrite/SC arguments are drawn from [0, value_range); a small range makes
  // equal-value rewrites (the ABA pattern) frequent.
  std::uint64_t value_range = 4;
  // Chance (in percent) of yielding the CPU before each shared step, to force
  // interleavings on machines with few cores.
  unsigned yield_percent = 25;
  LlscOptions llsc;
};

// Windows larger than this are rejected to keep the checker tractable.
inline constexpr std::size_t kMaxStressWindow = 12;

struct StressSummary {
  std::uint64_t rounds = 0;
  std::uint64_t ops = 0;
  std::uint64_t violations = 0;
  // Windows in which at least two operations overlapped in real time.
  std::uint64_t overlapping_windows = 0;
  std::optional<std::uint64_t> first_violation_round;
  History violating_window;
  double seconds = 0;
};

// The operation stream thread p executes; a pure function of the options.
std::vector<Operation> stress_program(StressObject object, const StressOptions& options,
                                      ProcessId p);

// Throws ConfigError for an invalid configuration; stops at the first
// violating window.
StressSummary run_stress(StressObject object, const StressOptions& options);

}  // namespace abakit
