#include <gtest/gtest.h>

#include <cmath>
#include <deque>
#include <map>
#include <random>
#include <set>

#include "abakit/aba_register.hpp"
#include "abakit/sim_scheduler.hpp"
#include "abakit/spec_models.hpp"
#include "support/oracles.hpp"

using namespace abakit;

using Reg = AbaRegister<SimMemory>;

TEST(AbaLayout, RoundTrip) {
  for (std::size_t n : {1u, 2u, 3u, 5u, 8u}) {
    const AbaLayout l(n, 4);
    for (std::optional<std::uint64_t> x : {Value{}, Value{0}, Value{15}}) {
      for (ProcessId p = 0; p <= n; ++p) {
        for (SeqNo s = 0; s <= l.seq_domain(); ++s) {
          XTriple t{x, p == n ? std::nullopt : std::optional<ProcessId>(p),
                    s == l.seq_domain() ? std::nullopt : std::optional<SeqNo>(s)};
          EXPECT_EQ(l.decode_x(l.encode<std::uint64_t>(t)), t);
          EXPECT_EQ(l.decode_x(l.encode<BigWord>(t)), t);
          AnnouncePair a{t.p, t.s};
          EXPECT_EQ(l.decode_announce(l.encode<std::uint64_t>(a)), a);
          EXPECT_LT(l.encode<std::uint64_t>(t), std::uint64_t{1} << l.x_width());
        }
      }
    }
  }
  EXPECT_THROW(AbaLayout(0, 8), ConfigError);
}

TEST(AbaRegister, AllocatesNPlusOneRegisters) {
  SimMemory mem(3);
  Reg reg(mem, 3, 8);
  EXPECT_EQ(mem.cell_count(), 4u);
  for (std::uint32_t i = 0; i < 4; ++i) EXPECT_EQ(mem.kind(CellId{i}), CellKind::Register);

  SimMemory one(1);
  Reg small(one, 1, 1);
  EXPECT_EQ(one.cell_count(), 2u);
  EXPECT_EQ(small.layout().seq_domain(), 4u);
  EXPECT_EQ(small.recycler(0).domain(), 4u);
}

TEST(AbaRegister, WidthBound) {
  for (std::size_t n = 1; n <= 64; ++n) {
    for (unsigned b : {1u, 8u, 32u}) {
      const AbaLayout l(n, b);
      const unsigned log_n = n == 1 ? 0 : static_cast<unsigned>(std::ceil(std::log2(double(n))));
      EXPECT_LE(l.x_width(), b + 2 * log_n + 8) << "n=" << n << " b=" << b;
      EXPECT_LE(l.announce_width(), l.x_width());
    }
  }
}

// Queue simulation by hand for n=2 with no announcements: usedQ has three
// slots, na stays empty, and each call takes the smallest value outside the
// queue, then enqueues it and drops the oldest entry.
//   call  usedQ before   choice
//   1     [⊥,⊥,⊥]        0
//   2     [⊥,⊥,0]        1
//   3     [⊥,0,1]        2
//   4     [0,1,2]        3
//   5     [1,2,3]        0
//   6     [2,3,0]        1
TEST(GetSeq, FreshWriterSequence) {
  SequenceRecycler r(2);
  std::vector<SeqNo> got;
  for (int i = 0; i < 6; ++i) got.push_back(r.next(0, AnnouncePair{}));
  EXPECT_EQ(got, (std::vector<SeqNo>{0, 1, 2, 3, 0, 1}));
  EXPECT_EQ(r.used().size(), 3u);
}

TEST(GetSeq, AnnouncementsExcludeValues) {
  SequenceRecycler r(2);
  // Slot 0 announces (self, 0): 0 is pinned until slot 0 is read again.
  EXPECT_EQ(r.next(0, AnnouncePair{0, 0}), 1u);
  EXPECT_EQ(r.next(0, AnnouncePair{}), 2u);
  EXPECT_EQ(r.next(0, AnnouncePair{0, 0}), 3u);
  EXPECT_EQ(r.next(0, AnnouncePair{}), 4u);
  EXPECT_EQ(r.unavailable()[0], std::optional<SeqNo>{0});
  // Another writer's announcement clears the slot.
  EXPECT_EQ(r.next(0, AnnouncePair{1, 0}), 0u);
  EXPECT_EQ(r.cursor(), 1u);
}

// Invariants and reuse distance under random announcements.
TEST(GetSeq, RandomInteractions) {
  std::mt19937_64 rng(3);
  for (std::size_t n : {1u, 2u, 3u, 5u}) {
    SequenceRecycler r(n);
    std::map<SeqNo, std::uint64_t> last;
    for (std::uint64_t call = 0; call < 20000; ++call) {
      AnnouncePair a;
      if (rng() % 3 != 0) {
        a.r = static_cast<ProcessId>(rng() % (n + 1));
        if (*a.r == n) a.r.reset();
        a.s = static_cast<SeqNo>(rng() % (2 * n + 2));
      }
      const SeqNo s = r.next(0, a);
      ASSERT_LT(s, 2 * n + 2);
      ASSERT_EQ(r.used().size(), n + 1);
      if (auto it = last.find(s); it != last.end()) ASSERT_GE(call - it->second - 1, n);
      last[s] = call;
    }
  }
}

TEST(AbaRegister, StepCounts) {
  SimMemory mem(2);
  Reg reg(mem, 2, 8);
  reg.dwrite(mem, 0, 7);
  EXPECT_EQ(mem.step_count(0), 2u);
  EXPECT_EQ(reg.layout().decode_x(mem.peek(reg.x_cell())), (XTriple{7, 0, 0}));
  reg.dread(mem, 1);
  EXPECT_EQ(mem.step_count(1), 4u);
}

TEST(AbaRegister, SequentialExamples) {
  SimMemory mem(2);
  Reg reg(mem, 2, 8);
  EXPECT_EQ(reg.dread(mem, 1), (std::pair<Value, bool>{std::nullopt, false}));
  reg.dwrite(mem, 0, 5);
  EXPECT_EQ(reg.dread(mem, 1), (std::pair<Value, bool>{5, true}));
  EXPECT_EQ(reg.dread(mem, 1), (std::pair<Value, bool>{5, false}));
  reg.dwrite(mem, 1, 5);
  EXPECT_EQ(reg.dread(mem, 1), (std::pair<Value, bool>{5, true}));
  EXPECT_EQ(reg.dread(mem, 0), (std::pair<Value, bool>{5, true}));
  EXPECT_THROW(reg.dwrite(mem, 0, 256), WidthOverflow);
  EXPECT_THROW(reg.invoke(mem, 0, ll()), ConfigError);
}

// Sequential differential against the sequential spec and the unbounded-tag oracle.
TEST(AbaRegister, SequentialMatchesSpecAndOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    SimMemory mem(n);
    Reg reg(mem, n, 3);
    UnboundedAbaOracle ora(mem, n, 3);
    const AbaSpec spec(n);
    auto state = spec.initial();
    for (int i = 0; i < 60; ++i) {
      const ProcessId p = static_cast<ProcessId>(rng() % n);
      const Operation op = rng() % 2 ? dwrite(rng() % 8) : dread();
      const Response expected = spec.apply(state, p, op);
      ASSERT_EQ(run_operation(reg, mem, p, op), expected);
      ASSERT_EQ(run_operation(ora, mem, p, op), expected);
    }
  }
}

TEST(AbaRegister, SingleReaderExploration) {
  auto root = make_execution<Reg>(1, {{dread()}}, 8u);
  const auto report = explore_exhaustive(root, make_check(AbaSpec(1)));
  EXPECT_EQ(report.schedules_run, 1u);
  EXPECT_TRUE(report.ok());
  const auto e = run_schedule(root, {0, 0, 0, 0});
  EXPECT_EQ(*e.history().operations()[0].response, (Response{std::nullopt, false}));
}

TEST(AbaRegister, ExhaustiveTwoWritesTwoReads) {
  auto root = make_execution<Reg>(2, {{dwrite(1), dwrite(2)}, {dread(), dread()}}, 8u);
  const auto report = explore_exhaustive(root, make_check(AbaSpec(2)));
  EXPECT_EQ(report.schedules_run, oracle::binomial(12, 4));
  EXPECT_EQ(report.violation_count, 0u);
  EXPECT_EQ(report.audit.shared_steps.at("DWrite").max, 2u);
  EXPECT_EQ(report.audit.shared_steps.at("DRead").min, 4u);
  EXPECT_EQ(report.audit.shared_steps.at("DRead").max, 4u);
}

// The trace of the executions touches A[q] only at q's writeA step, and X
// keeps a writer and a sequence number once any write has happened.
TEST(AbaRegister, TraceProperties) {
  auto root = make_execution<Reg>(2, {{dwrite(1), dread()}, {dread(), dwrite(2)}}, 8u);
  root.set_tracing(true);
  std::uint64_t runs = 0;
  explore_exhaustive<Reg>(root, make_check(AbaSpec(2)), {}, [&](const Execution<Reg>& e) {
    ++runs;
    const auto& obj = e.object();
    std::map<std::uint32_t, BigWord> init{
        {obj.x_cell().index, obj.layout().encode<BigWord>(XTriple{})},
        {obj.announce_cell(0).index, obj.layout().encode<BigWord>(AnnouncePair{})},
        {obj.announce_cell(1).index, obj.layout().encode<BigWord>(AnnouncePair{})}};
    ASSERT_TRUE(oracle::trace_is_sequential(e.memory().trace(), init));
    bool written = false;
    for (const StepRecord& s : e.memory().trace()) {
      if (s.cell == obj.x_cell() && s.op == StepOp::Write) written = true;
      if (s.cell == obj.x_cell() && written) {
        const XTriple t = obj.layout().decode_x(s.written ? *s.written : s.observed);
        ASSERT_TRUE(t.p && t.s);
      }
      for (ProcessId q = 0; q < 2; ++q) {
        if (s.cell == obj.announce_cell(q) && s.op == StepOp::Write) {
          ASSERT_EQ(s.pid, q);
          ASSERT_EQ(s.label.line, "Read:writeA");
        }
      }
    }
  });
  EXPECT_EQ(runs, oracle::multinomial({6, 6}));
}

TEST(AbaRegister, NativeBackendSequential) {
  NativeMemory mem(2);
  AbaRegister<NativeMemory> reg(mem, 2, 8);
  reg.dwrite(mem, 0, 9);
  EXPECT_EQ(reg.dread(mem, 1), (std::pair<Value, bool>{9, true}));
  EXPECT_EQ(reg.dread(mem, 1), (std::pair<Value, bool>{9, false}));
  EXPECT_EQ(mem.step_count(1), 8u);
}

TEST(AbaRegister, ShrunkDomainIsDetected) {
  auto root = make_execution<Reg>(2, {{dwrite(1), dwrite(2), dwrite(3), dwrite(4)}, {dread(), dread()}},
                                  8u, AbaVariant::ShrunkSequenceDomain);
  ExploreOptions opts;
  opts.fail_fast = true;
  const auto report = explore_exhaustive(root, make_check(AbaSpec(2)), opts);
  EXPECT_GE(report.violation_count, 1u);
}
