#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <utility>
#include <vector>

#include "abakit/object.hpp"
#include "abakit/shared_memory.hpp"
#include "abakit/types.hpp"
#include "abakit/word.hpp"

namespace abakit {

using SeqNo = std::uint32_t;

// Contents of X: (value, writer, sequence number), each possibly bottom.
struct XTriple {
  Value x;
  std::optional<ProcessId> p;
  std::optional<SeqNo> s;

  friend bool operator==(const XTriple&, const XTriple&) = default;
};

// Contents of an announce slot A[q]: (writer, sequence number).
struct AnnouncePair {
  std::optional<ProcessId> r;
  std::optional<SeqNo> s;

  friend bool operator==(const AnnouncePair&, const AnnouncePair&) = default;
};

// Packing of XTriple and AnnouncePair into words, laid out high to low as
// (x | p | s) and (r | s). Bottom is encoded as the largest value of each
// field: x uses one extra bit (value 2^b), p uses n, s uses 2n+2.
class AbaLayout {
 public:
  AbaLayout(std::size_t n, unsigned value_bits);

  std::size_t n() const { return n_; }
  unsigned value_bits() const { return value_bits_; }
  unsigned x_field_bits() const { return value_bits_ + 1; }
  unsigned pid_bits() const { return pid_bits_; }
  unsigned seq_bits() const { return seq_bits_; }
  unsigned x_width() const { return x_field_bits() + pid_bits_ + seq_bits_; }
  unsigned announce_width() const { return pid_bits_ + seq_bits_; }
  // Size of the faithful sequence-number domain {0, ..., 2n+1}.
  SeqNo seq_domain() const { return static_cast<SeqNo>(2 * n_ + 2); }

  template <class W>
  W encode(const XTriple& t) const {
    const std::uint64_t xe = t.x ? *t.x : (std::uint64_t{1} << value_bits_);
    return place<W>(xe, pid_bits_ + seq_bits_) | encode_ps<W>(t.p, t.s);
  }

  template <class W>
  W encode(const AnnouncePair& a) const {
    return encode_ps<W>(a.r, a.s);
  }

  template <class W>
  XTriple decode_x(const W& w) const {
    XTriple t;
    const std::uint64_t xe = extract(w, pid_bits_ + seq_bits_, x_field_bits());
    if (xe != (std::uint64_t{1} << value_bits_)) t.x = xe;
    std::tie(t.p, t.s) = decode_ps(w);
    return t;
  }

  template <class W>
  AnnouncePair decode_announce(const W& w) const {
    AnnouncePair a;
    std::tie(a.r, a.s) = decode_ps(w);
    return a;
  }

 private:
  template <class W>
  W encode_ps(std::optional<ProcessId> p, std::optional<SeqNo> s) const {
    const std::uint64_t pe = p ? *p : n_;
    const std::uint64_t se = s ? *s : seq_domain();
    return place<W>(pe, seq_bits_) | W(se);
  }

  template <class W>
  std::pair<std::optional<ProcessId>, std::optional<SeqNo>> decode_ps(const W& w) const {
    std::optional<ProcessId> p;
    std::optional<SeqNo> s;
    const std::uint64_t pe = extract(w, seq_bits_, pid_bits_);
    const std::uint64_t se = extract(w, 0, seq_bits_);
    if (pe != n_) p = static_cast<ProcessId>(pe);
    if (se != seq_domain()) s = static_cast<SeqNo>(se);
    return {p, s};
  }

  std::size_t n_;
  unsigned value_bits_;
  unsigned pid_bits_;
  unsigned seq_bits_;
};

// Selects the sequence-number allocation policy. ShrunkSequenceDomain is a
// deliberately broken negative control: it draws from {0, ..., n} and, once
// every candidate is excluded, recycles the oldest entry of usedQ.
enum class AbaVariant : std::uint8_t { Faithful, ShrunkSequenceDomain };

// Writer-local sequence-number bookkeeping (usedQ, na, cursor c). Pure local
// state; the caller performs the read of A[cursor()] and passes its contents.
class SequenceRecycler {
 public:
  SequenceRecycler(std::size_t n, AbaVariant variant = AbaVariant::Faithful);

  std::size_t cursor() const { return cursor_; }
  SeqNo domain() const { return domain_; }
  const std::deque<std::optional<SeqNo>>& used() const { return used_; }
  // na, keyed by announce slot.
  const std::vector<std::optional<SeqNo>>& unavailable() const { return na_; }

  // Everything after the read of A[c]: update na, advance c, choose, and
  // rotate usedQ. Throws InvariantViolation if no candidate exists (the
  // faithful domain makes that impossible).
  SeqNo next(ProcessId self, const AnnouncePair& seen);

 private:
  std::size_t n_;
  AbaVariant variant_;
  SeqNo domain_;
  std::size_t cursor_ = 0;
  std::deque<std::optional<SeqNo>> used_;
  std::vector<std::optional<SeqNo>> na_;
  std::vector<bool> excluded_;
};

// Multi-writer b-bit ABA-detecting register from n+1 bounded registers: X and
// the announce array A[0..n-1]. DWrite takes 2 shared steps, DRead takes 4.
template <class Mem>
class AbaRegister {
 public:
  using word_type = typename Mem::word_type;

  AbaRegister(Mem& mem, std::size_t n, unsigned value_bits,
              AbaVariant variant = AbaVariant::Faithful)
      : layout_(n, value_bits) {
    x_ = mem.alloc(CellKind::Register, layout_.x_width(), layout_.encode<word_type>(XTriple{}));
    for (std::size_t q = 0; q < n; ++q) {
      announce_.push_back(mem.alloc(CellKind::Register, layout_.announce_width(),
                                    layout_.encode<word_type>(AnnouncePair{})));
    }
    procs_.assign(n, Proc(SequenceRecycler(n, variant)));
  }

  std::optional<Response> invoke(Mem&, ProcessId p, const Operation& op) {
    Proc& st = proc(p);
    if (st.pc != Pc::Idle) throw ConfigError("process already has a pending operation");
    switch (op.kind) {
      case OpKind::DWrite:
        if (op.arg >= (std::uint64_t{1} << layout_.value_bits())) {
          throw WidthOverflow("DWrite value exceeds value width");
        }
        st.arg = op.arg;
        st.pc = Pc::GetSeqReadA;
        return std::nullopt;
      case OpKind::DRead:
        st.pc = Pc::ReadX;
        return std::nullopt;
      default:
        throw ConfigError("ABA register supports only DWrite and DRead");
    }
  }

  std::optional<Response> step(Mem& mem, ProcessId p) {
    Proc& st = proc(p);
    switch (st.pc) {
      case Pc::Idle:
        throw StuckProcess("no pending operation");
      case Pc::GetSeqReadA: {
        const CellId slot = announce_[st.seq.cursor()];
        const AnnouncePair seen =
            layout_.decode_announce(mem.read(p, slot, {{}, "Write:getSeq"}));
        st.seq_chosen = st.seq.next(p, seen);
        st.pc = Pc::WriteX;
        return std::nullopt;
      }
      case Pc::WriteX:
        mem.write(p, x_, layout_.encode<word_type>(XTriple{st.arg, p, st.seq_chosen}),
                  {{}, "Write:writeX"});
        st.pc = Pc::Idle;
        return Response{};
      case Pc::ReadX:
        st.first = layout_.decode_x(mem.read(p, x_, {{}, "Read:readX"}));
        st.pc = Pc::ReadA;
        return std::nullopt;
      case Pc::ReadA:
        st.old = layout_.decode_announce(mem.read(p, announce_[p], {{}, "Read:readA"}));
        st.pc = Pc::WriteA;
        return std::nullopt;
      case Pc::WriteA:
        mem.write(p, announce_[p], layout_.encode<word_type>(AnnouncePair{st.first.p, st.first.s}),
                  {{}, "Read:writeA"});
        st.pc = Pc::ReadX2;
        return std::nullopt;
      case Pc::ReadX2: {
        const XTriple second = layout_.decode_x(mem.read(p, x_, {{}, "Read:readX2"}));
        const bool same_announcement = AnnouncePair{st.first.p, st.first.s} == st.old;
        Response r{st.first.x, same_announcement ? st.b : true};
        st.b = !(st.first == second);
        st.pc = Pc::Idle;
        return r;
      }
    }
    return std::nullopt;
  }

  bool busy(ProcessId p) const { return procs_.at(p).pc != Pc::Idle; }

  void dwrite(Mem& mem, ProcessId p, std::uint64_t x) { run_operation(*this, mem, p, abakit::dwrite(x)); }
  std::pair<Value, bool> dread(Mem& mem, ProcessId p) {
    const Response r = run_operation(*this, mem, p, abakit::dread());
    return {r.value, r.flag};
  }

  const AbaLayout& layout() const { return layout_; }
  CellId x_cell() const { return x_; }
  CellId announce_cell(ProcessId q) const { return announce_.at(q); }
  const SequenceRecycler& recycler(ProcessId p) const { return procs_.at(p).seq; }
  bool reader_flag(ProcessId p) const { return procs_.at(p).b; }

 private:
  enum class Pc : std::uint8_t { Idle, GetSeqReadA, WriteX, ReadX, ReadA, WriteA, ReadX2 };

  struct Proc {
    explicit Proc(SequenceRecycler r) : seq(std::move(r)) {}

    SequenceRecycler seq;
    bool b = false;
    Pc pc = Pc::Idle;
    std::uint64_t arg = 0;
    SeqNo seq_chosen = 0;
    XTriple first;
    AnnouncePair old;
  };

  Proc& proc(ProcessId p) {
    if (p >= procs_.size()) throw ConfigError("process id out of range");
    return procs_[p];
  }

  AbaLayout layout_;
  CellId x_;
  std::vector<CellId> announce_;
  std::vector<Proc> procs_;
};

}  // namespace abakit
