#pragma once

#include <atomic>
#include <compare>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "abakit/types.hpp"
#include "abakit/word.hpp"

namespace abakit {

struct CellId {
  std::uint32_t index = 0;

  friend auto operator<=>(const CellId&, const CellId&) = default;
};

enum class CellKind : std::uint8_t { Register, Cas };

std::string_view kind_name(CellKind kind);

enum class StepOp : std::uint8_t { Read, Write, CasSuccess, CasFail };

std::string_view step_op_name(StepOp op);

// Source-line label of a shared-memory step. `outer` names the enclosing
// layered operation (empty for single-layer objects). Both views must refer
// to static storage.
struct StepLabel {
  std::string_view outer;
  std::string_view line;

  std::string str() const;
};

struct StepRecord {
  std::uint64_t ts = 0;
  ProcessId pid = 0;
  CellId cell;
  StepOp op = StepOp::Read;
  // Value of the cell at the step: the value returned by a read, the value
  // overwritten by a write, the value compared against by a CAS.
  BigWord observed;
  // Value stored by the step (Write and CasSuccess only).
  std::optional<BigWord> written;
  StepLabel label;
};

// Width accepted by SimMemory::alloc for a cell without a bound. Used only by
// the unbounded-tag reference oracle.
inline constexpr unsigned kUnboundedWidth = 0;

// Sequentially consistent, single-threaded, step-instrumented memory. Copies
// are full snapshots (cells, step counters, clock and trace).
class SimMemory {
 public:
  using word_type = BigWord;

  explicit SimMemory(std::size_t processes);

  CellId alloc(CellKind kind, unsigned bits, const BigWord& init);

  BigWord read(ProcessId p, CellId cell, StepLabel label = {});
  void write(ProcessId p, CellId cell, const BigWord& value, StepLabel label = {});
  bool cas(ProcessId p, CellId cell, const BigWord& expected, const BigWord& desired,
           StepLabel label = {});

  std::uint64_t step_count(ProcessId p) const;
  void reset_step_counts();

  // Logical clock. Every step and every history event takes one tick, so
  // trace and history timestamps share one timeline.
  std::uint64_t tick() { return ++clock_; }
  std::uint64_t now() const { return clock_; }

  void set_tracing(bool on) { tracing_ = on; }
  bool tracing() const { return tracing_; }
  const std::vector<StepRecord>& trace() const { return trace_; }

  std::size_t processes() const { return steps_.size(); }
  std::size_t cell_count() const { return cells_.size(); }
  CellKind kind(CellId cell) const;
  unsigned width(CellId cell) const;
  // Current value without taking a step.
  const BigWord& peek(CellId cell) const;
  // Number of distinct cells accessed by at least one step so far.
  std::size_t cells_touched() const;

 private:
  struct Cell {
    CellKind kind;
    unsigned bits;
    BigWord value;
  };

  Cell& cell_at(CellId cell);
  const Cell& cell_at(CellId cell) const;
  void check_fits(const Cell& c, const BigWord& v) const;
  void count(ProcessId p, CellId cell);

  std::vector<Cell> cells_;
  std::vector<bool> touched_;
  std::vector<std::uint64_t> steps_;
  std::uint64_t clock_ = 0;
  bool tracing_ = false;
  std::vector<StepRecord> trace_;
};

// Hardware-atomic backend: every cell is one std::atomic<std::uint64_t>, so
// widths are limited to 64 bits. Cell operations may be called concurrently
// from any thread; alloc must complete before the memory is shared.
class NativeMemory {
 public:
  using word_type = std::uint64_t;

  explicit NativeMemory(std::size_t processes);
  NativeMemory(const NativeMemory&) = delete;
  NativeMemory& operator=(const NativeMemory&) = delete;

  CellId alloc(CellKind kind, unsigned bits, std::uint64_t init);

  std::uint64_t read(ProcessId p, CellId cell, StepLabel label = {});
  void write(ProcessId p, CellId cell, std::uint64_t value, StepLabel label = {});
  bool cas(ProcessId p, CellId cell, std::uint64_t expected, std::uint64_t desired,
           StepLabel label = {});

  std::uint64_t step_count(ProcessId p) const;
  void reset_step_counts();

  std::size_t processes() const { return processes_; }
  std::size_t cell_count() const { return cells_.size(); }
  CellKind kind(CellId cell) const;
  unsigned width(CellId cell) const;

 private:
  struct Cell {
    Cell(CellKind k, unsigned b, std::uint64_t v) : kind(k), bits(b), value(v) {}
    CellKind kind;
    unsigned bits;
    std::atomic<std::uint64_t> value;
  };
  struct alignas(64) Counter {
    std::atomic<std::uint64_t> steps{0};
  };

  Cell& cell_at(CellId cell);
  const Cell& cell_at(CellId cell) const;
  void check_fits(const Cell& c, std::uint64_t v) const;

  std::size_t processes_;
  std::deque<Cell> cells_;
  std::unique_ptr<Counter[]> counters_;
};

}  // namespace abakit
