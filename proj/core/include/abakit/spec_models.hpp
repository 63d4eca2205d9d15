#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "abakit/shared_memory.hpp"
#include "abakit/types.hpp"

namespace abakit {

// Sequential ABA-detecting register: DRead(q) returns the current value and
// whether any DWrite happened since q's previous DRead (or since the start).
struct AbaSpecState {
  Value value;
  std::uint64_t dirty = 0;  // bit q: a DWrite happened since q's last DRead

  friend bool operator==(const AbaSpecState&, const AbaSpecState&) = default;
};

class AbaSpec {
 public:
  using State = AbaSpecState;
  struct StateHash {
    std::size_t operator()(const State& s) const noexcept;
  };

  explicit AbaSpec(std::size_t n);

  std::size_t n() const { return n_; }
  State initial() const { return {}; }
  Response apply(State& state, ProcessId p, const Operation& op) const;

 private:
  std::size_t n_;
};

// Sequential LL/SC/VL. SC(p) succeeds iff p holds a valid link; a successful
// SC invalidates every link. With the default (lenient) convention every
// process starts with a valid link; strict mode requires an LL first.
struct LlscSpecState {
  std::uint64_t value = 0;
  std::uint64_t valid = 0;  // bit p: p's link is valid

  friend bool operator==(const LlscSpecState&, const LlscSpecState&) = default;
};

class LlscSpec {
 public:
  using State = LlscSpecState;
  struct StateHash {
    std::size_t operator()(const State& s) const noexcept;
  };

  LlscSpec(std::size_t n, std::uint64_t init, bool strict = false);

  std::size_t n() const { return n_; }
  State initial() const;
  Response apply(State& state, ProcessId p, const Operation& op) const;

 private:
  std::size_t n_;
  std::uint64_t init_;
  bool strict_;
};

// Reference ABA-detecting register from one unbounded register holding
// (tag, x). Every DWrite stores a fresh tag, so DRead detects writes by
// comparing tags. One shared step per operation. Simulated backend only.
class UnboundedAbaOracle {
 public:
  UnboundedAbaOracle(SimMemory& mem, std::size_t n, unsigned value_bits);

  std::optional<Response> invoke(SimMemory& mem, ProcessId p, const Operation& op);
  std::optional<Response> step(SimMemory& mem, ProcessId p);
  bool busy(ProcessId p) const { return procs_.at(p).pending.has_value(); }

  CellId cell() const { return x_; }

 private:
  struct Proc {
    std::optional<Operation> pending;
    std::uint64_t writes = 0;
    BigWord last_tag = 0;
  };

  std::size_t n_;
  unsigned value_bits_;
  CellId x_;
  std::vector<Proc> procs_;
};

}  // namespace abakit
