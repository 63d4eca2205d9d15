#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "abakit/history.hpp"
#include "abakit/types.hpp"

namespace abakit {

struct CheckerOptions {
  // Maximum number of memoized (linearized-set, spec-state) pairs per search.
  std::size_t memo_limit = std::size_t{1} << 22;
  // Compute the shortest non-linearizable prefix on failure.
  bool minimize = true;
};

struct Verdict {
  bool linearizable = false;
  // Operation ids in linearization order and the sequential spec response of each.
  std::vector<std::size_t> witness;
  std::vector<Response> witness_responses;
  // Number of events in the shortest non-linearizable prefix.
  std::optional<std::size_t> violation_prefix_len;
};

// Sequential specification interface expected by the checker.
template <class S>
concept SequentialSpec = requires(const S& spec, typename S::State& state, ProcessId p,
                                  const Operation& op) {
  { spec.initial() } -> std::convertible_to<typename S::State>;
  { spec.apply(state, p, op) } -> std::same_as<Response>;
  typename S::StateHash;
};

// Wing-Gong style search: repeatedly linearize an operation that no
// unlinearized operation precedes in real time, memoizing visited
// (linearized set, spec state) pairs. A pending operation may take any
// response or be left out.
template <SequentialSpec Spec>
class LinearizabilityChecker {
 public:
  using State = typename Spec::State;

  explicit LinearizabilityChecker(Spec spec, CheckerOptions options = {})
      : spec_(std::move(spec)), options_(options) {}

  const Spec& spec() const { return spec_; }

  Verdict check(const History& history) const { return check(history, spec_.initial()); }

  Verdict check(const History& history, const State& initial) const {
    Verdict v;
    Search s(*this, history);
    v.linearizable = s.find(initial);
    if (v.linearizable) {
      v.witness = s.witness_ids();
      v.witness_responses = s.witness_responses;
    } else if (options_.minimize) {
      v.violation_prefix_len = shortest_violation(history, initial);
    }
    return v;
  }

  bool linearizable(const History& history, const State& initial) const {
    Search s(*this, history);
    return s.find(initial);
  }

  // Spec states reachable at the end of some linearization (starting from any
  // of `initial`). Empty iff the history is not linearizable from them. Used
  // to chain histories separated by quiescent points.
  std::vector<State> final_states(const History& history, const std::vector<State>& initial) const {
    Search s(*this, history);
    s.collect = true;
    for (const State& st : initial) s.find(st);
    return {s.finals.begin(), s.finals.end()};
  }

 private:
  struct Key {
    std::uint64_t mask;
    State state;
    friend bool operator==(const Key&, const Key&) = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept {
      const std::size_t h = typename Spec::StateHash{}(k.state);
      return h ^ (std::hash<std::uint64_t>{}(k.mask) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
  };

  struct Search {
    Search(const LinearizabilityChecker& c, const History& h) : checker(c), ops(h.operations()) {
      if (ops.size() > 64) throw StateSpaceLimit("checker supports at most 64 operations");
      before.assign(ops.size(), 0);
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if (!ops[i].pending()) complete |= bit(i);
        for (std::size_t j = 0; j < ops.size(); ++j) {
          if (ops[j].respond_pos && *ops[j].respond_pos < ops[i].invoke_pos) before[i] |= bit(j);
        }
      }
    }

    static std::uint64_t bit(std::size_t i) { return std::uint64_t{1} << i; }

    bool find(const State& initial) { return dfs(0, initial); }

    bool dfs(std::uint64_t mask, const State& state) {
      if ((complete & ~mask) == 0) {
        if (!collect) return true;
        finals.insert(state);
      }
      if (!seen.insert(Key{mask, state}).second) return false;
      if (seen.size() > checker.options_.memo_limit) {
        throw StateSpaceLimit("linearizability search exceeded memo limit");
      }
      for (std::size_t i = 0; i < ops.size(); ++i) {
        if ((mask & bit(i)) != 0 || (before[i] & ~mask) != 0) continue;
        State next = state;
        const Response r = checker.spec_.apply(next, ops[i].pid, ops[i].op);
        if (ops[i].response && *ops[i].response != r) continue;
        path.push_back(i);
        witness_responses.push_back(r);
        if (dfs(mask | bit(i), next)) return true;
        path.pop_back();
        witness_responses.pop_back();
      }
      return false;
    }

    std::vector<std::size_t> witness_ids() const {
      std::vector<std::size_t> ids;
      for (std::size_t i : path) ids.push_back(ops[i].id);
      return ids;
    }

    const LinearizabilityChecker& checker;
    std::vector<OperationRecord> ops;
    std::vector<std::uint64_t> before;
    std::uint64_t complete = 0;
    bool collect = false;
    std::unordered_set<Key, KeyHash> seen;
    std::unordered_set<State, typename Spec::StateHash> finals;
    std::vector<std::size_t> path;
    std::vector<Response> witness_responses;
  };

  // Linearizability is prefix-closed, so the shortest violating prefix can be
  // found by bisection.
  std::size_t shortest_violation(const History& history, const State& initial) const {
    std::size_t lo = 0;
    std::size_t hi = history.size();
    while (hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (linearizable(history.prefix(mid), initial)) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return hi;
  }

  Spec spec_;
  CheckerOptions options_;
};

}  // namespace abakit
