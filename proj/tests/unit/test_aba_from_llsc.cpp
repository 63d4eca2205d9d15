#include <gtest/gtest.h>

#include <random>
#include <set>

#include "abakit/aba_from_llsc.hpp"
#include "abakit/sim_scheduler.hpp"
#include "abakit/spec_models.hpp"

using namespace abakit;

using Layered = AbaFromLlsc<SimMemory>;

namespace {

// The layered algorithm over an atomic LL/SC/VL object (the sequential spec
// applied in one step), written out independently of AbaFromLlsc.
class AtomicLayered {
 public:
  explicit AtomicLayered(std::size_t n) : spec_(n, kBottom), state_(spec_.initial()), old_(n) {}

  Response apply(ProcessId p, const Operation& op) {
    if (op.kind == OpKind::DWrite) {
      spec_.apply(state_, p, ll());
      spec_.apply(state_, p, sc(op.arg));
      return {};
    }
    if (spec_.apply(state_, p, vl()).flag) return {old_[p], false};
    const std::uint64_t raw = *spec_.apply(state_, p, ll()).value;
    old_[p] = raw == kBottom ? Value{} : Value{raw};
    return {old_[p], true};
  }

 private:
  static constexpr std::uint64_t kBottom = 8;
  LlscSpec spec_;
  LlscSpec::State state_;
  std::vector<Value> old_;
};

}  // namespace

TEST(AbaFromLlsc, SequentialExamples) {
  SimMemory mem(2);
  Layered obj(mem, 2, 8);
  EXPECT_EQ(run_operation(obj, mem, 1, dread()), (Response{std::nullopt, false}));
  EXPECT_EQ(obj.wrapped_ops(1), 1u);
  run_operation(obj, mem, 0, dwrite(3));
  EXPECT_EQ(obj.wrapped_ops(0), 2u);
  EXPECT_EQ(obj.inner().value_of(mem.peek(obj.inner().cell())), 3u);
  EXPECT_EQ(run_operation(obj, mem, 1, dread()), (Response{3, true}));
  EXPECT_EQ(obj.wrapped_ops(1), 2u);
  EXPECT_EQ(run_operation(obj, mem, 1, dread()), (Response{3, false}));
  EXPECT_EQ(obj.wrapped_ops(1), 1u);
}

TEST(AbaFromLlsc, ReductionToAtomicLlsc) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 4;
    SimMemory mem(n);
    Layered obj(mem, n, 3);
    AtomicLayered ref(n);
    const AbaSpec spec(n);
    auto state = spec.initial();
    for (int i = 0; i < 60; ++i) {
      const ProcessId p = static_cast<ProcessId>(rng() % n);
      const Operation op = rng() % 2 ? dwrite(rng() % 8) : dread();
      const Response expected = spec.apply(state, p, op);
      ASSERT_EQ(ref.apply(p, op), expected);
      ASSERT_EQ(run_operation(obj, mem, p, op), expected);
    }
  }
}

TEST(AbaFromLlsc, ConcurrentWritesLinearize) {
  auto root = make_execution<Layered>(2, {{dwrite(1)}, {dwrite(2)}}, 4u);
  std::set<std::uint64_t> finals;
  const auto report = explore_exhaustive<Layered>(root, make_check(AbaSpec(2)), {},
                                                  [&](const Execution<Layered>& e) {
                                                    const auto& in = e.object().inner();
                                                    finals.insert(in.value_of(e.memory().peek(in.cell())));
                                                  });
  EXPECT_EQ(report.violation_count, 0u);
  EXPECT_EQ(finals, (std::set<std::uint64_t>{1, 2}));
  EXPECT_EQ(report.audit.wrapped_ops.at("DWrite").min, 2u);
  EXPECT_EQ(report.audit.wrapped_ops.at("DWrite").max, 2u);
}

TEST(AbaFromLlsc, ExhaustiveMixed) {
  auto root = make_execution<Layered>(2, {{dwrite(1), dread()}, {dread(), dwrite(2), dread()}}, 4u);
  const auto report = explore_exhaustive(root, make_check(AbaSpec(2)));
  EXPECT_EQ(report.violation_count, 0u);
  EXPECT_LE(report.audit.wrapped_ops.at("DRead").max, 2u);
}

TEST(AbaFromLlsc, ReadAlwaysCleanIsDetected) {
  auto root = make_execution<Layered>(2, {{dwrite(1)}, {dread(), dread()}}, 4u, LlscOptions{},
                                      LayeredVariant::ReadAlwaysClean);
  const auto report = explore_exhaustive(root, make_check(AbaSpec(2)));
  EXPECT_GE(report.violation_count, 1u);
}
