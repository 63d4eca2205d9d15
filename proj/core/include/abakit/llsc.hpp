#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "abakit/object.hpp"
#include "abakit/shared_memory.hpp"
#include "abakit/types.hpp"
#include "abakit/word.hpp"

namespace abakit {

// Behaviour of LL after `retry_bound` failed CAS attempts.
//   Faithful           b := true, return the value of the first read.
//   FallbackKeepsLink  return the first-read value but leave b false. Benign:
//                      the caller's mask bit stays set, so the next SC/VL
//                      fails through the bit anyway.
//   NoFallback         behave as if the last attempt had succeeded: b := false,
//                      return the value of the last read. Not linearizable.
enum class LlscVariant : std::uint8_t { Faithful, FallbackKeepsLink, NoFallback };

struct LlscOptions {
  // Number of read/CAS attempts in LL and SC; 0 means n.
  std::size_t retry_bound = 0;
  LlscVariant variant = LlscVariant::Faithful;
};

// Bounded LL/SC/VL from a single (b+n)-bit CAS cell holding (x | a), where a
// is an n-bit mask whose bit p records that an SC succeeded since p's last LL.
template <class Mem>
class Llsc {
 public:
  using word_type = typename Mem::word_type;

  Llsc(Mem& mem, std::size_t n, unsigned value_bits, std::uint64_t init, LlscOptions options = {})
      : n_(n),
        value_bits_(value_bits),
        retry_bound_(options.retry_bound == 0 ? n : options.retry_bound),
        variant_(options.variant) {
    if (n == 0) throw ConfigError("LL/SC object needs n >= 1");
    if (value_bits == 0 || value_bits > 63) throw ConfigError("value width must be in 1..63 bits");
    if (init >= (std::uint64_t{1} << value_bits)) throw WidthOverflow("initial value exceeds width");
    if constexpr (std::same_as<word_type, std::uint64_t>) {
      if (n + value_bits > 64) {
        throw WidthOverflow("native LL/SC needs b + n <= 64, got " + std::to_string(n + value_bits));
      }
    }
    x_ = mem.alloc(CellKind::Cas, value_bits + static_cast<unsigned>(n), pack(init, word_type(0)));
    procs_.assign(n, Proc{});
  }

  std::optional<Response> invoke(Mem& mem, ProcessId p, const Operation& op) {
    return invoke(mem, p, op, {});
  }

  // `outer` labels the trace steps with the enclosing layered operation.
  std::optional<Response> invoke(Mem&, ProcessId p, const Operation& op, std::string_view outer) {
    Proc& st = proc(p);
    if (st.pc != Pc::Idle) throw ConfigError("process already has a pending operation");
    st.outer = outer;
    st.attempts = 0;
    switch (op.kind) {
      case OpKind::LL:
        st.pc = Pc::LlRead;
        return std::nullopt;
      case OpKind::SC:
        if (op.arg >= (std::uint64_t{1} << value_bits_)) throw WidthOverflow("SC value exceeds width");
        if (st.b) return Response{std::nullopt, false};
        st.arg = op.arg;
        st.pc = Pc::ScRead;
        return std::nullopt;
      case OpKind::VL:
        st.pc = Pc::VlRead;
        return std::nullopt;
      default:
        throw ConfigError("LL/SC object supports only LL, SC and VL");
    }
  }

  std::optional<Response> step(Mem& mem, ProcessId p) {
    Proc& st = proc(p);
    const unsigned bit = p;
    switch (st.pc) {
      case Pc::Idle:
        throw StuckProcess("no pending operation");

      case Pc::LlRead: {
        const word_type w = mem.read(p, x_, {st.outer, "LL:readX"});
        st.first_x = value_of(w);
        if (!test_bit(w, bit)) return finish(st, Response{st.first_x, false}, false);
        st.pc = Pc::LlRetryRead;
        return std::nullopt;
      }
      case Pc::LlRetryRead:
        st.seen = mem.read(p, x_, {st.outer, "LL:readX"});
        st.pc = Pc::LlRetryCas;
        return std::nullopt;
      case Pc::LlRetryCas: {
        const word_type cleared = st.seen - (word_type(1) << bit);
        if (mem.cas(p, x_, st.seen, cleared, {st.outer, "LL:CAS"})) {
          return finish(st, Response{value_of(st.seen), false}, false);
        }
        if (++st.attempts < retry_bound_) {
          st.pc = Pc::LlRetryRead;
          return std::nullopt;
        }
        switch (variant_) {
          case LlscVariant::Faithful:
            return finish(st, Response{st.first_x, false}, true);
          case LlscVariant::FallbackKeepsLink:
            return finish(st, Response{st.first_x, false}, false);
          case LlscVariant::NoFallback:
            return finish(st, Response{value_of(st.seen), false}, false);
        }
        return std::nullopt;
      }

      case Pc::ScRead: {
        st.seen = mem.read(p, x_, {st.outer, "SC:readX"});
        if (test_bit(st.seen, bit)) return finish(st, Response{std::nullopt, false}, st.b);
        st.pc = Pc::ScCas;
        return std::nullopt;
      }
      case Pc::ScCas: {
        if (mem.cas(p, x_, st.seen, pack(st.arg, low_ones<word_type>(static_cast<unsigned>(n_))),
                    {st.outer, "SC:CAS"})) {
          return finish(st, Response{std::nullopt, true}, st.b);
        }
        if (++st.attempts < retry_bound_) {
          st.pc = Pc::ScRead;
          return std::nullopt;
        }
        return finish(st, Response{std::nullopt, false}, st.b);
      }

      case Pc::VlRead: {
        const word_type w = mem.read(p, x_, {st.outer, "VL:readX"});
        return finish(st, Response{std::nullopt, !test_bit(w, bit) && !st.b}, st.b);
      }
    }
    return std::nullopt;
  }

  bool busy(ProcessId p) const { return procs_.at(p).pc != Pc::Idle; }

  std::uint64_t load_linked(Mem& mem, ProcessId p) { return *run_operation(*this, mem, p, ll()).value; }
  bool store_conditional(Mem& mem, ProcessId p, std::uint64_t y) {
    return run_operation(*this, mem, p, sc(y)).flag;
  }
  bool validate(Mem& mem, ProcessId p) { return run_operation(*this, mem, p, vl()).flag; }

  std::size_t n() const { return n_; }
  unsigned value_bits() const { return value_bits_; }
  std::size_t retry_bound() const { return retry_bound_; }
  CellId cell() const { return x_; }
  bool link_flag(ProcessId p) const { return procs_.at(p).b; }

  word_type pack(std::uint64_t x, const word_type& mask) const {
    return place<word_type>(x, static_cast<unsigned>(n_)) | mask;
  }
  std::uint64_t value_of(const word_type& w) const {
    return extract(w, static_cast<unsigned>(n_), value_bits_);
  }
  word_type mask_of(const word_type& w) const {
    return w & low_ones<word_type>(static_cast<unsigned>(n_));
  }

 private:
  enum class Pc : std::uint8_t { Idle, LlRead, LlRetryRead, LlRetryCas, ScRead, ScCas, VlRead };

  struct Proc {
    bool b = false;
    Pc pc = Pc::Idle;
    std::uint64_t arg = 0;
    std::uint64_t first_x = 0;
    word_type seen{};
    std::size_t attempts = 0;
    std::string_view outer;
  };

  static std::optional<Response> finish(Proc& st, Response r, bool b) {
    st.b = b;
    st.pc = Pc::Idle;
    return r;
  }

  Proc& proc(ProcessId p) {
    if (p >= procs_.size()) throw ConfigError("process id out of range");
    return procs_[p];
  }

  std::size_t n_;
  unsigned value_bits_;
  std::size_t retry_bound_;
  LlscVariant variant_;
  CellId x_;
  std::vector<Proc> procs_;
};

}  // namespace abakit
