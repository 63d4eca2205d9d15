#include "abakit/spec_models.hpp"

namespace abakit {

namespace {

std::uint64_t all_processes(std::size_t n) {
  return n >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
}

std::size_t mix(std::size_t h, std::uint64_t v) {
  return h ^ (std::hash<std::uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

void check_spec_pid(ProcessId p, std::size_t n) {
  if (p >= n) throw ConfigError("process id out of range for sequential spec");
}

}  // namespace

AbaSpec::AbaSpec(std::size_t n) : n_(n) {
  if (n == 0 || n > 64) throw ConfigError("sequential spec supports 1..64 processes");
}

std::size_t AbaSpec::StateHash::operator()(const State& s) const noexcept {
  std::size_t h = mix(0, s.value ? *s.value + 1 : 0);
  return mix(h, s.dirty);
}

Response AbaSpec::apply(State& state, ProcessId p, const Operation& op) const {
  check_spec_pid(p, n_);
  switch (op.kind) {
    case OpKind::DWrite:
      state.value = op.arg;
      state.dirty = all_processes(n_);
      return {};
    case OpKind::DRead: {
      Response r{state.value, (state.dirty >> p & 1U) != 0};
      state.dirty &= ~(std::uint64_t{1} << p);
      return r;
    }
    default:
      throw ConfigError("ABA spec supports only DWrite and DRead");
  }
}

LlscSpec::LlscSpec(std::size_t n, std::uint64_t init, bool strict)
    : n_(n), init_(init), strict_(strict) {
  if (n == 0 || n > 64) throw ConfigError("sequential spec supports 1..64 processes");
}

std::size_t LlscSpec::StateHash::operator()(const State& s) const noexcept {
  return mix(mix(0, s.value), s.valid);
}

LlscSpec::State LlscSpec::initial() const {
  return {init_, strict_ ? 0 : all_processes(n_)};
}

Response LlscSpec::apply(State& state, ProcessId p, const Operation& op) const {
  check_spec_pid(p, n_);
  const std::uint64_t me = std::uint64_t{1} << p;
  switch (op.kind) {
    case OpKind::LL:
      state.valid |= me;
      return {state.value, false};
    case OpKind::SC:
      if ((state.valid & me) == 0) return {std::nullopt, false};
      state.value = op.arg;
      state.valid = 0;
      return {std::nullopt, true};
    case OpKind::VL:
      return {std::nullopt, (state.valid & me) != 0};
    default:
      throw ConfigError("LL/SC spec supports only LL, SC and VL");
  }
}

// ---------------------------------------------------------------------------

UnboundedAbaOracle::UnboundedAbaOracle(SimMemory& mem, std::size_t n, unsigned value_bits)
    : n_(n), value_bits_(value_bits), procs_(n) {
  if (n == 0) throw ConfigError("oracle needs n >= 1");
  if (value_bits == 0 || value_bits > 62) throw ConfigError("value width must be in 1..62 bits");
  // Tag 0 with the bottom value marks the initial state.
  x_ = mem.alloc(CellKind::Register, kUnboundedWidth, BigWord(std::uint64_t{1} << value_bits));
}

std::optional<Response> UnboundedAbaOracle::invoke(SimMemory&, ProcessId p, const Operation& op) {
  Proc& st = procs_.at(p);
  if (st.pending) throw ConfigError("process already has a pending operation");
  if (op.kind != OpKind::DWrite && op.kind != OpKind::DRead) {
    throw ConfigError("ABA register supports only DWrite and DRead");
  }
  if (op.kind == OpKind::DWrite && op.arg >= (std::uint64_t{1} << value_bits_)) {
    throw WidthOverflow("DWrite value exceeds value width");
  }
  st.pending = op;
  return std::nullopt;
}

std::optional<Response> UnboundedAbaOracle::step(SimMemory& mem, ProcessId p) {
  Proc& st = procs_.at(p);
  if (!st.pending) throw StuckProcess("no pending operation");
  const Operation op = *st.pending;
  st.pending.reset();
  const unsigned shift = value_bits_ + 1;
  if (op.kind == OpKind::DWrite) {
    const BigWord tag = BigWord(st.writes++) * n_ + p + 1;
    mem.write(p, x_, (tag << shift) | BigWord(op.arg), {{}, "Oracle:writeX"});
    return Response{};
  }
  const BigWord w = mem.read(p, x_, {{}, "Oracle:readX"});
  const BigWord tag = w >> shift;
  const auto raw = static_cast<std::uint64_t>(w & ((BigWord(1) << shift) - 1));
  const Value x = raw == (std::uint64_t{1} << value_bits_) ? Value{} : Value{raw};
  const bool changed = tag != st.last_tag;
  st.last_tag = tag;
  return Response{x, changed};
}

}  // namespace abakit
