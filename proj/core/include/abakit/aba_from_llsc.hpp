#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "abakit/llsc.hpp"
#include "abakit/object.hpp"
#include "abakit/types.hpp"

namespace abakit {

// ReadAlwaysClean is a negative control: DRead reports flag=false even when
// its VL failed.
enum class LayeredVariant : std::uint8_t { Faithful, ReadAlwaysClean };

// ABA-detecting register layered over one LL/SC/VL object.
//   DWrite(x): LL; SC(x)            (SC result ignored)
//   DRead():   VL ? (old, false) : (old := LL, (old, true))
// The wrapped object stores values with one extra bit; 2^b encodes bottom.
template <class Mem>
class AbaFromLlsc {
 public:
  AbaFromLlsc(Mem& mem, std::size_t n, unsigned value_bits, LlscOptions inner = {},
              LayeredVariant variant = LayeredVariant::Faithful)
      : value_bits_(checked_bits(value_bits)),
        bottom_(std::uint64_t{1} << value_bits),
        inner_(mem, n, value_bits + 1, bottom_, inner),
        variant_(variant),
        procs_(n) {}

  std::optional<Response> invoke(Mem& mem, ProcessId p, const Operation& op) {
    Proc& st = proc(p);
    if (st.phase != Phase::Idle) throw ConfigError("process already has a pending operation");
    st.wrapped_ops = 1;
    switch (op.kind) {
      case OpKind::DWrite:
        if (op.arg >= bottom_) throw WidthOverflow("DWrite value exceeds value width");
        st.arg = op.arg;
        st.phase = Phase::WriteLL;
        return advance(mem, p, inner_.invoke(mem, p, ll(), "L:WriteLL"));
      case OpKind::DRead:
        st.phase = Phase::ReadVL;
        return advance(mem, p, inner_.invoke(mem, p, vl(), "L:VL"));
      default:
        throw ConfigError("ABA register supports only DWrite and DRead");
    }
  }

  std::optional<Response> step(Mem& mem, ProcessId p) {
    if (proc(p).phase == Phase::Idle) throw StuckProcess("no pending operation");
    return advance(mem, p, inner_.step(mem, p));
  }

  bool busy(ProcessId p) const { return procs_.at(p).phase != Phase::Idle; }

  // Number of operations on the wrapped object issued by p's latest
  // (or current) operation.
  std::size_t wrapped_ops(ProcessId p) const { return procs_.at(p).wrapped_ops; }

  const Llsc<Mem>& inner() const { return inner_; }
  unsigned value_bits() const { return value_bits_; }

 private:
  enum class Phase : std::uint8_t { Idle, WriteLL, WriteSC, ReadVL, ReadLL };

  struct Proc {
    Value old;
    Phase phase = Phase::Idle;
    std::uint64_t arg = 0;
    std::size_t wrapped_ops = 0;
  };

  static unsigned checked_bits(unsigned bits) {
    if (bits == 0 || bits > 62) throw ConfigError("value width must be in 1..62 bits");
    return bits;
  }

  Value decode(const Value& raw) const {
    if (!raw || *raw == bottom_) return std::nullopt;
    return raw;
  }

  // Continues p's operation after a wrapped operation responded (possibly
  // starting the next wrapped operation, which may itself respond at once).
  std::optional<Response> advance(Mem& mem, ProcessId p, std::optional<Response> inner) {
    Proc& st = procs_[p];
    while (inner) {
      switch (st.phase) {
        case Phase::WriteLL:
          st.phase = Phase::WriteSC;
          ++st.wrapped_ops;
          inner = inner_.invoke(mem, p, sc(st.arg), "L:SC");
          break;
        case Phase::WriteSC:
          st.phase = Phase::Idle;
          return Response{};
        case Phase::ReadVL:
          if (inner->flag) {
            st.phase = Phase::Idle;
            return Response{st.old, false};
          }
          st.phase = Phase::ReadLL;
          ++st.wrapped_ops;
          inner = inner_.invoke(mem, p, ll(), "L:ReadLL");
          break;
        case Phase::ReadLL:
          st.old = decode(inner->value);
          st.phase = Phase::Idle;
          return Response{st.old, variant_ != LayeredVariant::ReadAlwaysClean};
        case Phase::Idle:
          return std::nullopt;
      }
    }
    return std::nullopt;
  }

  Proc& proc(ProcessId p) {
    if (p >= procs_.size()) throw ConfigError("process id out of range");
    return procs_[p];
  }

  unsigned value_bits_;
  std::uint64_t bottom_;
  Llsc<Mem> inner_;
  LayeredVariant variant_;
  std::vector<Proc> procs_;
};

}  // namespace abakit
