#include <gtest/gtest.h>

#include <random>

#include "abakit/shared_memory.hpp"
#include "support/oracles.hpp"

using namespace abakit;

TEST(SimMemory, AllocAndRead) {
  SimMemory mem(1);
  const CellId c = mem.alloc(CellKind::Register, 8, 0);
  EXPECT_EQ(c.index, 0u);
  EXPECT_EQ(mem.read(0, c), 0);

  SimMemory mem4(4);
  const CellId d = mem4.alloc(CellKind::Cas, 12, 0b1111);
  EXPECT_EQ(mem4.read(0, d), 15);
}

TEST(SimMemory, AllocRejectsOverflow) {
  SimMemory mem(1);
  EXPECT_THROW(mem.alloc(CellKind::Register, 4, 16), WidthOverflow);
  EXPECT_NO_THROW(mem.alloc(CellKind::Register, 4, 15));
}

TEST(SimMemory, RegisterSemantics) {
  SimMemory mem(2);
  const CellId c = mem.alloc(CellKind::Register, 8, 0);
  mem.write(1, c, 5);
  EXPECT_EQ(mem.read(0, c), 5);
  mem.write(1, c, 3);
  mem.write(1, c, 9);
  EXPECT_EQ(mem.read(0, c), 9);
  EXPECT_THROW(mem.write(0, c, 256), WidthOverflow);
  EXPECT_THROW(mem.write(0, c, -1), WidthOverflow);
}

TEST(SimMemory, CasSemantics) {
  SimMemory mem(1);
  const CellId c = mem.alloc(CellKind::Cas, 8, 7);
  EXPECT_TRUE(mem.cas(0, c, 7, 3));
  EXPECT_EQ(mem.peek(c), 3);
  EXPECT_FALSE(mem.cas(0, c, 5, 4));
  EXPECT_EQ(mem.peek(c), 3);
  EXPECT_THROW(mem.cas(0, c, 7, 7), EqualArguments);
  EXPECT_THROW(mem.cas(0, c, 3, 300), WidthOverflow);
}

TEST(SimMemory, KindAndCellErrors) {
  SimMemory mem(1);
  const CellId r = mem.alloc(CellKind::Register, 8, 0);
  const CellId x = mem.alloc(CellKind::Cas, 8, 0);
  EXPECT_THROW(mem.write(0, x, 1), KindMismatch);
  EXPECT_THROW(mem.cas(0, r, 0, 1), KindMismatch);
  EXPECT_THROW(mem.read(0, CellId{7}), UnknownCell);
  EXPECT_THROW(mem.read(3, r), ConfigError);
}

TEST(SimMemory, StepCounting) {
  SimMemory mem(2);
  const CellId c = mem.alloc(CellKind::Cas, 8, 0);
  EXPECT_EQ(mem.step_count(0), 0u);
  mem.read(0, c);
  EXPECT_EQ(mem.step_count(0), 1u);
  mem.cas(0, c, 1, 2);  // fails, still a step
  mem.cas(1, c, 0, 2);
  EXPECT_EQ(mem.step_count(0), 2u);
  EXPECT_EQ(mem.step_count(1), 1u);
  mem.reset_step_counts();
  EXPECT_EQ(mem.step_count(0), 0u);
  EXPECT_EQ(mem.cells_touched(), 1u);
}

TEST(SimMemory, UnboundedWidth) {
  SimMemory mem(1);
  const CellId c = mem.alloc(CellKind::Register, kUnboundedWidth, 0);
  const BigWord big = BigWord(1) << 200;
  mem.write(0, c, big);
  EXPECT_EQ(mem.read(0, c), big);
}

TEST(SimMemory, TraceRecordsEveryStep) {
  SimMemory mem(2);
  mem.set_tracing(true);
  const CellId r = mem.alloc(CellKind::Register, 8, 0);
  const CellId x = mem.alloc(CellKind::Cas, 8, 4);
  mem.write(1, r, 3, {{}, "w"});
  EXPECT_EQ(mem.read(0, r), 3);
  EXPECT_TRUE(mem.cas(0, x, 4, 5));
  EXPECT_FALSE(mem.cas(1, x, 4, 6));
  const auto& t = mem.trace();
  ASSERT_EQ(t.size(), 4u);
  EXPECT_EQ(t[0].op, StepOp::Write);
  EXPECT_EQ(t[0].label.line, "w");
  EXPECT_EQ(t[1].observed, 3);
  EXPECT_EQ(t[2].op, StepOp::CasSuccess);
  EXPECT_EQ(t[3].op, StepOp::CasFail);
  EXPECT_FALSE(t[3].written.has_value());
  EXPECT_TRUE(oracle::trace_is_sequential(t, {{0, 0}, {1, 4}}));
}

// Snapshots are independent.
TEST(SimMemory, CopyIsSnapshot) {
  SimMemory a(1);
  const CellId c = a.alloc(CellKind::Register, 8, 1);
  SimMemory b = a;
  b.write(0, c, 2);
  EXPECT_EQ(a.peek(c), 1);
  EXPECT_EQ(b.peek(c), 2);
  EXPECT_EQ(a.step_count(0), 0u);
}

TEST(NativeMemory, BasicOperations) {
  NativeMemory mem(2);
  const CellId r = mem.alloc(CellKind::Register, 8, 0);
  const CellId x = mem.alloc(CellKind::Cas, 64, 7);
  mem.write(0, r, 5);
  EXPECT_EQ(mem.read(1, r), 5u);
  EXPECT_TRUE(mem.cas(0, x, 7, 3));
  EXPECT_FALSE(mem.cas(0, x, 7, 2));
  EXPECT_EQ(mem.read(0, x), 3u);
  EXPECT_THROW(mem.cas(0, x, 3, 3), EqualArguments);
  EXPECT_THROW(mem.write(0, x, 1), KindMismatch);
  EXPECT_THROW(mem.write(0, r, 256), WidthOverflow);
  EXPECT_THROW(mem.alloc(CellKind::Cas, 65, 0), WidthOverflow);
  EXPECT_THROW(mem.read(0, CellId{9}), UnknownCell);
  // Rejected operations take no step.
  EXPECT_EQ(mem.step_count(0), 4u);
}

// Random single-threaded programs yield the same value sequences on both
// backends.
TEST(Backends, SingleThreadedEquivalence) {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 200; ++trial) {
    SimMemory sim(3);
    NativeMemory nat(3);
    std::vector<CellId> cells;
    for (int i = 0; i < 3; ++i) {
      const CellKind kind = i == 0 ? CellKind::Register : CellKind::Cas;
      cells.push_back(sim.alloc(kind, 6, 0));
      nat.alloc(kind, 6, 0);
    }
    for (int step = 0; step < 50; ++step) {
      const ProcessId p = rng() % 3;
      const CellId c = cells[rng() % 3];
      const std::uint64_t v = rng() % 64;
      if (rng() % 2 == 0) {
        ASSERT_EQ(sim.read(p, c), nat.read(p, c));
      } else if (sim.kind(c) == CellKind::Register) {
        sim.write(p, c, v);
        nat.write(p, c, v);
      } else {
        const std::uint64_t expected = rng() % 2 ? static_cast<std::uint64_t>(sim.peek(c)) : rng() % 64;
        if (expected == v) continue;
        ASSERT_EQ(sim.cas(p, c, expected, v), nat.cas(p, c, expected, v));
      }
    }
    for (ProcessId p = 0; p < 3; ++p) ASSERT_EQ(sim.step_count(p), nat.step_count(p));
  }
}
