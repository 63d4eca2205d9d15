#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace abakit {

using ProcessId = std::uint32_t;

// A register value. std::nullopt is the bottom value held before any write.
using Value = std::optional<std::uint64_t>;

// Errors raised by the library. All derive from abakit::Error so callers can
// catch the family; the CLI maps specific kinds onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WidthOverflow : public Error {
 public:
  using Error::Error;
};
class UnknownCell : public Error {
 public:
  using Error::Error;
};
class KindMismatch : public Error {
 public:
  using Error::Error;
};
class EqualArguments : public Error {
 public:
  using Error::Error;
};
class StuckProcess : public Error {
 public:
  using Error::Error;
};
class ExplosionGuard : public Error {
 public:
  using Error::Error;
};
class StateSpaceLimit : public Error {
 public:
  using Error::Error;
};
class ConfigError : public Error {
 public:
  using Error::Error;
};
// An implementation could not continue (e.g. no free sequence number). Only
// reachable in deliberately mutated builds.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

enum class OpKind : std::uint8_t { DWrite, DRead, LL, SC, VL };

std::string_view op_name(OpKind kind);

// A high-level operation request. `arg` is the written value for DWrite/SC.
struct Operation {
  OpKind kind = OpKind::DRead;
  std::uint64_t arg = 0;

  friend bool operator==(const Operation&, const Operation&) = default;
};

inline Operation dwrite(std::uint64_t x) { return {OpKind::DWrite, x}; }
inline Operation dread() { return {OpKind::DRead, 0}; }
inline Operation ll() { return {OpKind::LL, 0}; }
inline Operation sc(std::uint64_t x) { return {OpKind::SC, x}; }
inline Operation vl() { return {OpKind::VL, 0}; }

// Response of an operation. Fields unused by an operation kind stay at their
// defaults so that plain equality compares responses:
//   DWrite -> {}            DRead -> {value, flag}
//   LL     -> {value}       SC/VL -> {flag}
struct Response {
  Value value;
  bool flag = false;

  friend bool operator==(const Response&, const Response&) = default;
};

// Compact text form used by the workload DSL and reports: "W5", "R", "L",
// "S3", "V".
std::string to_string(const Operation& op);
Operation parse_operation(std::string_view token);

// "null", "[5,true]", "7", "true" ... depending on the operation kind.
std::string to_string(OpKind kind, const Response& r);

// Smallest k >= 1 with 2^k >= count.
unsigned bits_for(std::uint64_t count);

}  // namespace abakit
