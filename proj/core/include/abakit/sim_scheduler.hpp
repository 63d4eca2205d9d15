#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "abakit/history.hpp"
#include "abakit/lin_checker.hpp"
#include "abakit/object.hpp"
#include "abakit/shared_memory.hpp"
#include "abakit/types.hpp"

namespace abakit {

// Per-process operation lists, indexed by process id.
using Workload = std::vector<std::vector<Operation>>;
using Schedule = std::vector<ProcessId>;

// "W1;W2|R;R" -> {{W1, W2}, {R, R}}. An empty process segment is allowed.
Workload parse_workload(std::string_view text);
std::string to_string(const Workload& w);

struct OpStats {
  std::uint64_t min = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t max = 0;
  std::uint64_t count = 0;

  void add(std::uint64_t v);
  void merge(const OpStats& other);
  friend bool operator==(const OpStats&, const OpStats&) = default;
};

// Observed cost of each operation kind, keyed by operation name.
struct StepAudit {
  std::map<std::string, OpStats> shared_steps;
  std::map<std::string, OpStats> wrapped_ops;  // layered objects only

  void merge(const StepAudit& other);
  friend bool operator==(const StepAudit&, const StepAudit&) = default;
};

// A simulated execution: memory, object, programs and the recorded history.
// Copyable; a copy is a full snapshot that can be resumed independently.
template <class Object>
  requires SteppedObject<Object, SimMemory>
class Execution {
 public:
  Execution(SimMemory memory, Object object, Workload programs)
      : mem_(std::move(memory)),
        obj_(std::move(object)),
        programs_(std::make_shared<const Workload>(std::move(programs))),
        cursors_(programs_->size()) {
    if (programs_->size() > mem_.processes()) {
      throw ConfigError("workload names more processes than the memory has");
    }
  }

  std::size_t processes() const { return programs_->size(); }

  bool ready(ProcessId p) const {
    if (p >= cursors_.size()) return false;
    const Cursor& c = cursors_[p];
    return c.op_id.has_value() || c.next < (*programs_)[p].size();
  }

  std::vector<ProcessId> ready_set() const {
    std::vector<ProcessId> r;
    for (ProcessId p = 0; p < cursors_.size(); ++p) {
      if (ready(p)) r.push_back(p);
    }
    return r;
  }

  bool complete() const {
    for (ProcessId p = 0; p < cursors_.size(); ++p) {
      if (ready(p)) return false;
    }
    return true;
  }

  // Executes one schedule entry for p: local work for free, then exactly one
  // shared-memory step (none only if p's remaining operations need no shared
  // step at all). Invocations are recorded when p starts an operation,
  // responses right after the step that completes it.
  void step(ProcessId p) {
    if (!ready(p)) {
      throw StuckProcess("process " + std::to_string(p) + " has no pending work");
    }
    Cursor& c = cursors_[p];
    const auto& program = (*programs_)[p];
    for (;;) {
      if (!c.op_id) {
        if (c.next == program.size()) break;
        const Operation& op = program[c.next++];
        c.op_id = history_.invoke(p, op, mem_.tick());
        c.kind = op.kind;
        c.steps_at_invoke = mem_.step_count(p);
        if (auto r = obj_.invoke(mem_, p, op)) {
          finish(p, *r);
          continue;
        }
      }
      const std::uint64_t before = mem_.step_count(p);
      auto r = obj_.step(mem_, p);
      if (mem_.step_count(p) != before + 1) {
        throw InvariantViolation("object step did not take exactly one shared step");
      }
      if (r) finish(p, *r);
      break;
    }
    schedule_.push_back(p);
  }

  void set_tracing(bool on) { mem_.set_tracing(on); }

  const History& history() const { return history_; }
  const SimMemory& memory() const { return mem_; }
  const Object& object() const { return obj_; }
  const Schedule& schedule() const { return schedule_; }
  const StepAudit& audit() const { return audit_; }
  const Workload& programs() const { return *programs_; }

 private:
  struct Cursor {
    std::size_t next = 0;
    std::optional<std::size_t> op_id;
    OpKind kind = OpKind::DRead;
    std::uint64_t steps_at_invoke = 0;
  };

  void finish(ProcessId p, const Response& r) {
    Cursor& c = cursors_[p];
    history_.respond(*c.op_id, r, mem_.tick());
    const std::string name(op_name(c.kind));
    audit_.shared_steps[name].add(mem_.step_count(p) - c.steps_at_invoke);
    if constexpr (requires(const Object& o) { o.wrapped_ops(p); }) {
      audit_.wrapped_ops[name].add(obj_.wrapped_ops(p));
    }
    c.op_id.reset();
  }

  SimMemory mem_;
  Object obj_;
  std::shared_ptr<const Workload> programs_;
  std::vector<Cursor> cursors_;
  History history_;
  Schedule schedule_;
  StepAudit audit_;
};

// Builds the memory and the object (constructed as Object(mem, n, args...))
// and wraps them with the programs.
template <class Object, class... Args>
Execution<Object> make_execution(std::size_t n, Workload programs, Args&&... args) {
  SimMemory mem(n);
  Object object(mem, n, std::forward<Args>(args)...);
  return Execution<Object>(std::move(mem), std::move(object), std::move(programs));
}

// Replays an explicit schedule; throws StuckProcess when it names a process
// without pending work.
template <class Object>
Execution<Object> run_schedule(Execution<Object> exec, const Schedule& schedule) {
  for (ProcessId p : schedule) exec.step(p);
  return exec;
}

struct Violation {
  Schedule schedule;
  History history;
  Verdict verdict;
};

struct ExplorationReport {
  std::uint64_t schedules_run = 0;
  std::uint64_t nodes = 0;
  std::uint64_t distinct_histories = 0;
  std::uint64_t violation_count = 0;
  std::vector<Violation> violations;  // the first few, see ExploreOptions
  StepAudit audit;
  std::size_t cells_touched = 0;

  bool ok() const { return violation_count == 0; }
};

struct ExploreOptions {
  // Maximum number of execution states visited (exhaustive) or steps taken
  // (random) before ExplosionGuard is thrown.
  std::uint64_t node_limit = 200'000'000;
  bool fail_fast = false;
  std::size_t keep_violations = 8;
};

// Checks one complete history; must be deterministic.
using HistoryCheck = std::function<Verdict(const History&)>;

template <SequentialSpec Spec>
HistoryCheck make_check(Spec spec, CheckerOptions options = {}) {
  auto checker = std::make_shared<LinearizabilityChecker<Spec>>(std::move(spec), options);
  return [checker](const History& h) { return checker->check(h); };
}

namespace detail {

std::string history_key(const History& h);

// Shared bookkeeping of the exhaustive and random explorers.
class ReportBuilder {
 public:
  ReportBuilder(const HistoryCheck& check, const ExploreOptions& options)
      : check_(check), options_(options) {}

  // Returns false when exploration should stop (fail-fast).
  template <class Object>
  bool add(const Execution<Object>& e) {
    ++report_.schedules_run;
    report_.audit.merge(e.audit());
    report_.cells_touched = std::max(report_.cells_touched, e.memory().cells_touched());
    const std::string key = history_key(e.history());
    auto it = cache_.find(key);
    if (it == cache_.end()) {
      it = cache_.emplace(key, check_(e.history())).first;
      ++report_.distinct_histories;
    }
    if (!it->second.linearizable) {
      ++report_.violation_count;
      if (report_.violations.size() < options_.keep_violations) {
        report_.violations.push_back({e.schedule(), e.history(), it->second});
      }
      if (options_.fail_fast) return false;
    }
    return true;
  }

  void count_node() {
    if (++report_.nodes > options_.node_limit) {
      throw ExplosionGuard("exploration exceeded node limit of " +
                           std::to_string(options_.node_limit));
    }
  }

  ExplorationReport take() { return std::move(report_); }

 private:
  const HistoryCheck& check_;
  const ExploreOptions& options_;
  ExplorationReport report_;
  std::unordered_map<std::string, Verdict> cache_;
};

}  // namespace detail

template <class Object>
using ExecutionVisitor = std::function<void(const Execution<Object>&)>;

// Depth-first enumeration of every complete schedule: at each state, each
// ready process in turn takes the next step. States are value snapshots.
template <class Object>
ExplorationReport explore_exhaustive(const Execution<Object>& root, const HistoryCheck& check,
                                     const ExploreOptions& options = {},
                                     const ExecutionVisitor<Object>& visit = {}) {
  detail::ReportBuilder builder(check, options);
  std::vector<Execution<Object>> stack;
  stack.push_back(root);
  while (!stack.empty()) {
    Execution<Object> e = std::move(stack.back());
    stack.pop_back();
    builder.count_node();
    const std::vector<ProcessId> ready = e.ready_set();
    if (ready.empty()) {
      if (visit) visit(e);
      if (!builder.add(e)) break;
      continue;
    }
    for (std::size_t i = ready.size() - 1; i > 0; --i) {
      Execution<Object> child = e;
      child.step(ready[i]);
      stack.push_back(std::move(child));
    }
    e.step(ready[0]);
    stack.push_back(std::move(e));
  }
  return builder.take();
}

// `trials` schedules, each step picking uniformly among ready processes with
// a generator seeded by `seed`.
template <class Object>
ExplorationReport explore_random(const Execution<Object>& root, const HistoryCheck& check,
                                 std::uint64_t seed, std::uint64_t trials,
                                 const ExploreOptions& options = {},
                                 const ExecutionVisitor<Object>& visit = {}) {
  detail::ReportBuilder builder(check, options);
  std::mt19937_64 rng(seed);
  for (std::uint64_t t = 0; t < trials; ++t) {
    Execution<Object> e = root;
    for (;;) {
      const std::vector<ProcessId> ready = e.ready_set();
      if (ready.empty()) break;
      builder.count_node();
      std::uniform_int_distribution<std::size_t> pick(0, ready.size() - 1);
      e.step(ready[pick(rng)]);
    }
    if (visit) visit(e);
    if (!builder.add(e)) break;
  }
  return builder.take();
}

}  // namespace abakit
