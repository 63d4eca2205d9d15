#include "abakit/sim_scheduler.hpp"

#include <algorithm>

namespace abakit {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = text.find(sep, start);
    parts.push_back(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return parts;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

Workload parse_workload(std::string_view text) {
  Workload w;
  for (std::string_view proc : split(text, '|')) {
    std::vector<Operation> ops;
    for (std::string_view token : split(proc, ';')) {
      token = trim(token);
      if (!token.empty()) ops.push_back(parse_operation(token));
    }
    w.push_back(std::move(ops));
  }
  return w;
}

std::string to_string(const Workload& w) {
  std::string s;
  for (std::size_t p = 0; p < w.size(); ++p) {
    if (p > 0) s += '|';
    for (std::size_t i = 0; i < w[p].size(); ++i) {
      if (i > 0) s += ';';
      s += to_string(w[p][i]);
    }
  }
  return s;
}

void OpStats::add(std::uint64_t v) {
  min = std::min(min, v);
  max = std::max(max, v);
  ++count;
}

void OpStats::merge(const OpStats& other) {
  if (other.count == 0) return;
  min = std::min(min, other.min);
  max = std::max(max, other.max);
  count += other.count;
}

void StepAudit::merge(const StepAudit& other) {
  for (const auto& [name, stats] : other.shared_steps) shared_steps[name].merge(stats);
  for (const auto& [name, stats] : other.wrapped_ops) wrapped_ops[name].merge(stats);
}

namespace detail {

// Timestamps are left out: two schedules yielding the same event order and
// responses have the same linearizability verdict.
std::string history_key(const History& h) {
  std::string key;
  key.reserve(h.size() * 8);
  for (const Event& e : h.events()) {
    key += e.type == EventType::Invoke ? 'i' : 'r';
    key += std::to_string(e.pid);
    key += ':';
    key += std::to_string(e.op_id);
    if (e.type == EventType::Invoke) {
      key += to_string(e.op);
    } else {
      key += to_string(e.op.kind, e.response);
    }
    key += ' ';
  }
  return key;
}

}  // namespace detail

}  // namespace abakit
