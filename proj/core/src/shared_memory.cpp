#include "abakit/shared_memory.hpp"

#include <algorithm>

namespace abakit {

std::string_view kind_name(CellKind kind) {
  return kind == CellKind::Register ? "Register" : "Cas";
}

std::string_view step_op_name(StepOp op) {
  switch (op) {
    case StepOp::Read:
      return "Read";
    case StepOp::Write:
      return "Write";
    case StepOp::CasSuccess:
      return "CasSuccess";
    case StepOp::CasFail:
      return "CasFail";
  }
  return "?";
}

std::string StepLabel::str() const {
  if (outer.empty()) return std::string(line);
  std::string s(outer);
  s += '/';
  s += line;
  return s;
}

namespace {

void check_pid(ProcessId p, std::size_t processes) {
  if (p >= processes) {
    throw ConfigError("process " + std::to_string(p) + " out of range (n=" +
                      std::to_string(processes) + ")");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SimMemory

SimMemory::SimMemory(std::size_t processes) : steps_(processes, 0) {}

CellId SimMemory::alloc(CellKind kind, unsigned bits, const BigWord& init) {
  Cell c{kind, bits, 0};
  check_fits(c, init);
  c.value = init;
  cells_.push_back(std::move(c));
  touched_.push_back(false);
  return CellId{static_cast<std::uint32_t>(cells_.size() - 1)};
}

SimMemory::Cell& SimMemory::cell_at(CellId cell) {
  if (cell.index >= cells_.size()) {
    throw UnknownCell("unknown cell " + std::to_string(cell.index));
  }
  return cells_[cell.index];
}

const SimMemory::Cell& SimMemory::cell_at(CellId cell) const {
  if (cell.index >= cells_.size()) {
    throw UnknownCell("unknown cell " + std::to_string(cell.index));
  }
  return cells_[cell.index];
}

void SimMemory::check_fits(const Cell& c, const BigWord& v) const {
  if (v < 0 || (c.bits != kUnboundedWidth && v >= (BigWord(1) << c.bits))) {
    throw WidthOverflow("value " + v.str() + " does not fit " + std::to_string(c.bits) +
                        "-bit cell");
  }
}

void SimMemory::count(ProcessId p, CellId cell) {
  check_pid(p, steps_.size());
  ++steps_[p];
  touched_[cell.index] = true;
}

std::size_t SimMemory::cells_touched() const {
  return static_cast<std::size_t>(std::count(touched_.begin(), touched_.end(), true));
}

BigWord SimMemory::read(ProcessId p, CellId cell, StepLabel label) {
  const Cell& c = cell_at(cell);
  count(p, cell);
  const std::uint64_t ts = tick();
  if (tracing_) trace_.push_back({ts, p, cell, StepOp::Read, c.value, std::nullopt, label});
  return c.value;
}

void SimMemory::write(ProcessId p, CellId cell, const BigWord& value, StepLabel label) {
  Cell& c = cell_at(cell);
  if (c.kind != CellKind::Register) {
    throw KindMismatch("write to CAS cell " + std::to_string(cell.index));
  }
  check_fits(c, value);
  count(p, cell);
  const std::uint64_t ts = tick();
  if (tracing_) trace_.push_back({ts, p, cell, StepOp::Write, c.value, value, label});
  c.value = value;
}

bool SimMemory::cas(ProcessId p, CellId cell, const BigWord& expected, const BigWord& desired,
                    StepLabel label) {
  Cell& c = cell_at(cell);
  if (c.kind != CellKind::Cas) {
    throw KindMismatch("CAS on register cell " + std::to_string(cell.index));
  }
  if (expected == desired) {
    throw EqualArguments("CAS with expected == new (" + expected.str() + ")");
  }
  check_fits(c, expected);
  check_fits(c, desired);
  count(p, cell);
  const std::uint64_t ts = tick();
  const bool ok = c.value == expected;
  if (tracing_) {
    trace_.push_back({ts, p, cell, ok ? StepOp::CasSuccess : StepOp::CasFail, c.value,
                      ok ? std::optional<BigWord>(desired) : std::nullopt, label});
  }
  if (ok) c.value = desired;
  return ok;
}

std::uint64_t SimMemory::step_count(ProcessId p) const {
  check_pid(p, steps_.size());
  return steps_[p];
}

void SimMemory::reset_step_counts() { std::fill(steps_.begin(), steps_.end(), 0); }

CellKind SimMemory::kind(CellId cell) const { return cell_at(cell).kind; }
unsigned SimMemory::width(CellId cell) const { return cell_at(cell).bits; }
const BigWord& SimMemory::peek(CellId cell) const { return cell_at(cell).value; }

// ---------------------------------------------------------------------------
// NativeMemory

NativeMemory::NativeMemory(std::size_t processes)
    : processes_(processes), counters_(std::make_unique<Counter[]>(processes)) {}

CellId NativeMemory::alloc(CellKind kind, unsigned bits, std::uint64_t init) {
  if (bits == 0 || bits > 64) {
    throw WidthOverflow("native cells hold 1..64 bits, requested " + std::to_string(bits));
  }
  cells_.emplace_back(kind, bits, 0);
  try {
    check_fits(cells_.back(), init);
  } catch (...) {
    cells_.pop_back();
    throw;
  }
  cells_.back().value.store(init);
  return CellId{static_cast<std::uint32_t>(cells_.size() - 1)};
}

NativeMemory::Cell& NativeMemory::cell_at(CellId cell) {
  if (cell.index >= cells_.size()) {
    throw UnknownCell("unknown cell " + std::to_string(cell.index));
  }
  return cells_[cell.index];
}

const NativeMemory::Cell& NativeMemory::cell_at(CellId cell) const {
  if (cell.index >= cells_.size()) {
    throw UnknownCell("unknown cell " + std::to_string(cell.index));
  }
  return cells_[cell.index];
}

void NativeMemory::check_fits(const Cell& c, std::uint64_t v) const {
  if (c.bits < 64 && v >= (std::uint64_t{1} << c.bits)) {
    throw WidthOverflow("value " + std::to_string(v) + " does not fit " +
                        std::to_string(c.bits) + "-bit cell");
  }
}

std::uint64_t NativeMemory::read(ProcessId p, CellId cell, StepLabel) {
  check_pid(p, processes_);
  const Cell& c = cell_at(cell);
  counters_[p].steps.fetch_add(1, std::memory_order_relaxed);
  return c.value.load(std::memory_order_seq_cst);
}

void NativeMemory::write(ProcessId p, CellId cell, std::uint64_t value, StepLabel) {
  check_pid(p, processes_);
  Cell& c = cell_at(cell);
  if (c.kind != CellKind::Register) {
    throw KindMismatch("write to CAS cell " + std::to_string(cell.index));
  }
  check_fits(c, value);
  counters_[p].steps.fetch_add(1, std::memory_order_relaxed);
  c.value.store(value, std::memory_order_seq_cst);
}

bool NativeMemory::cas(ProcessId p, CellId cell, std::uint64_t expected, std::uint64_t desired,
                       StepLabel) {
  check_pid(p, processes_);
  Cell& c = cell_at(cell);
  if (c.kind != CellKind::Cas) {
    throw KindMismatch("CAS on register cell " + std::to_string(cell.index));
  }
  if (expected == desired) {
    throw EqualArguments("CAS with expected == new (" + std::to_string(expected) + ")");
  }
  check_fits(c, expected);
  check_fits(c, desired);
  counters_[p].steps.fetch_add(1, std::memory_order_relaxed);
  return c.value.compare_exchange_strong(expected, desired, std::memory_order_seq_cst);
}

std::uint64_t NativeMemory::step_count(ProcessId p) const {
  check_pid(p, processes_);
  return counters_[p].steps.load(std::memory_order_relaxed);
}

void NativeMemory::reset_step_counts() {
  for (std::size_t i = 0; i < processes_; ++i) counters_[i].steps.store(0);
}

CellKind NativeMemory::kind(CellId cell) const { return cell_at(cell).kind; }
unsigned NativeMemory::width(CellId cell) const { return cell_at(cell).bits; }

}  // namespace abakit
