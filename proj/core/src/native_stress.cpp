#include "abakit/native_stress.hpp"

#include <algorithm>
#include <atomic>
#include <barrier>
#include <chrono>
#include <exception>
#include <random>
#include <thread>

#include "abakit/aba_from_llsc.hpp"
#include "abakit/lin_checker.hpp"
#include "abakit/shared_memory.hpp"
#include "abakit/spec_models.hpp"

namespace abakit {

std::string_view stress_object_name(StressObject o) {
  switch (o) {
    case StressObject::AbaRegister:
      return "aba_reg";
    case StressObject::Llsc:
      return "llsc";
    case StressObject::AbaFromLlsc:
      return "aba_from_llsc";
  }
  return "?";
}

std::vector<Operation> stress_program(StressObject object, const StressOptions& o, ProcessId p) {
  std::seed_seq seq{o.seed, static_cast<std::uint64_t>(p), std::uint64_t{0x5eed}};
  std::mt19937_64 rng(seq);
  const std::uint64_t range =
      std::min<std::uint64_t>(std::max<std::uint64_t>(o.value_range, 1), std::uint64_t{1} << o.value_bits);
  std::uniform_int_distribution<std::uint64_t> value(0, range - 1);
  std::uniform_int_distribution<int> kind(0, 99);

  std::vector<Operation> ops;
  const std::uint64_t total = o.rounds * o.ops_per_round;
  ops.reserve(total);
  for (std::uint64_t i = 0; i < total; ++i) {
    const int k = kind(rng);
    if (object == StressObject::Llsc) {
      if (k < 40) {
        ops.push_back(ll());
      } else if (k < 75) {
        ops.push_back(sc(value(rng)));
      } else {
        ops.push_back(vl());
      }
    } else {
      ops.push_back(k < 50 ? dwrite(value(rng)) : dread());
    }
  }
  return ops;
}

namespace {

template <class Object, class Spec>
StressSummary drive(Object& object, NativeMemory& mem, const Spec& spec, const StressOptions& o,
                    const std::vector<std::vector<Operation>>& programs) {
  const LinearizabilityChecker<Spec> checker(spec);
  std::vector<typename Spec::State> candidates{spec.initial()};
  std::vector<std::vector<Event>> window(o.threads);
  std::atomic<std::uint64_t> clock{0};
  StressSummary summary;
  std::exception_ptr failure;
  std::atomic<bool> stop{o.rounds == 0};

  // Runs on one thread while all others wait at the barrier.
  auto check_window = [&]() noexcept {
    try {
      std::vector<Event> events;
      for (auto& w : window) {
        events.insert(events.end(), w.begin(), w.end());
        w.clear();
      }
      std::sort(events.begin(), events.end(),
                [](const Event& a, const Event& b) { return a.ts < b.ts; });
      // Some operation is invoked before an earlier-invoked one responds.
      std::size_t open_ops = 0;
      bool overlap = false;
      for (const Event& e : events) {
        if (e.type == EventType::Invoke) {
          if (open_ops++ > 0) overlap = true;
        } else {
          --open_ops;
        }
      }
      summary.overlapping_windows += overlap;
      History h = History::from_events(std::move(events));
      std::vector<typename Spec::State> next = checker.final_states(h, candidates);
      ++summary.rounds;
      if (next.empty()) {
        ++summary.violations;
        summary.first_violation_round = summary.rounds - 1;
        summary.violating_window = std::move(h);
        stop = true;
      } else {
        candidates = std::move(next);
      }
      if (summary.rounds == o.rounds) stop = true;
    } catch (...) {
      failure = std::current_exception();
      stop = true;
    }
  };

  std::barrier sync(static_cast<std::ptrdiff_t>(o.threads), check_window);
  auto worker = [&](ProcessId p) {
    const auto& program = programs[p];
    std::size_t next = 0;
    std::mt19937 jitter(static_cast<std::uint32_t>(o.seed + p));
    std::uniform_int_distribution<unsigned> percent(0, 99);
    auto run = [&](const Operation& op) {
      std::optional<Response> r = object.invoke(mem, p, op);
      while (!r) {
        if (percent(jitter) < o.yield_percent) std::this_thread::yield();
        r = object.step(mem, p);
      }
      return *r;
    };
    while (!stop) {
      for (std::size_t k = 0; k < o.ops_per_round; ++k) {
        const Operation& op = program[next++];
        const std::size_t id = p * o.ops_per_round + k;
        const std::uint64_t inv = clock.fetch_add(1);
        const Response r = run(op);
        const std::uint64_t res = clock.fetch_add(1);
        window[p].push_back({EventType::Invoke, p, id, op, {}, inv});
        window[p].push_back({EventType::Respond, p, id, op, r, res});
      }
      sync.arrive_and_wait();
    }
  };

  const auto start = std::chrono::steady_clock::now();
  if (!stop) {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(o.threads);
    for (ProcessId p = 0; p < o.threads; ++p) {
      pool.emplace_back([&, p] {
        try {
          worker(p);
        } catch (...) {
          errors[p] = std::current_exception();
          // Leave the barrier so the other threads are not blocked forever.
          stop = true;
          sync.arrive_and_drop();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  if (failure) std::rethrow_exception(failure);
  summary.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  summary.ops = summary.rounds * o.threads * o.ops_per_round;
  return summary;
}

}  // namespace

StressSummary run_stress(StressObject object, const StressOptions& o) {
  if (o.threads == 0) throw ConfigError("stress needs at least one thread");
  if (o.ops_per_round == 0) throw ConfigError("stress needs at least one operation per round");
  if (o.threads * o.ops_per_round > kMaxStressWindow) {
    throw ConfigError("stress window of " + std::to_string(o.threads * o.ops_per_round) +
                      " operations exceeds the limit of " + std::to_string(kMaxStressWindow));
  }
  std::vector<std::vector<Operation>> programs;
  for (ProcessId p = 0; p < o.threads; ++p) programs.push_back(stress_program(object, o, p));

  NativeMemory mem(o.threads);
  switch (object) {
    case StressObject::AbaRegister: {
      AbaRegister<NativeMemory> reg(mem, o.threads, o.value_bits);
      return drive(reg, mem, AbaSpec(o.threads), o, programs);
    }
    case StressObject::Llsc: {
      Llsc<NativeMemory> obj(mem, o.threads, o.value_bits, 0, o.llsc);
      return drive(obj, mem, LlscSpec(o.threads, 0), o, programs);
    }
    case StressObject::AbaFromLlsc: {
      AbaFromLlsc<NativeMemory> obj(mem, o.threads, o.value_bits, o.llsc);
      return drive(obj, mem, AbaSpec(o.threads), o, programs);
    }
  }
  throw ConfigError("unknown stress object");
}

}  // namespace abakit
