#include "abakit/history.hpp"

#include <algorithm>
#include <map>

namespace abakit {

std::size_t History::invoke(ProcessId p, const Operation& op, std::uint64_t ts) {
  const std::size_t id = next_op_++;
  events_.push_back({EventType::Invoke, p, id, op, {}, ts});
  return id;
}

void History::respond(std::size_t op_id, const Response& r, std::uint64_t ts) {
  auto inv = std::find_if(events_.rbegin(), events_.rend(), [&](const Event& e) {
    return e.type == EventType::Invoke && e.op_id == op_id;
  });
  if (inv == events_.rend()) throw ConfigError("response without invocation");
  events_.push_back({EventType::Respond, inv->pid, op_id, inv->op, r, ts});
}

std::vector<OperationRecord> History::operations() const {
  std::vector<OperationRecord> ops;
  std::map<std::size_t, std::size_t> index;  // op id -> position in ops
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (e.type == EventType::Invoke) {
      index[e.op_id] = ops.size();
      ops.push_back({e.op_id, e.pid, e.op, std::nullopt, i, std::nullopt});
    } else {
      OperationRecord& rec = ops.at(index.at(e.op_id));
      rec.response = e.response;
      rec.respond_pos = i;
    }
  }
  return ops;
}

History History::prefix(std::size_t events) const {
  History h;
  h.events_.assign(events_.begin(), events_.begin() + std::min(events, events_.size()));
  h.next_op_ = next_op_;
  return h;
}

bool History::well_formed() const {
  std::map<ProcessId, std::optional<std::size_t>> open;  // pid -> pending op id
  std::map<std::size_t, ProcessId> seen;
  for (std::size_t i = 0; i < events_.size(); ++i) {
    const Event& e = events_[i];
    if (i > 0 && e.ts <= events_[i - 1].ts) return false;
    auto& slot = open[e.pid];
    if (e.type == EventType::Invoke) {
      if (slot || seen.count(e.op_id)) return false;
      slot = e.op_id;
      seen[e.op_id] = e.pid;
    } else {
      if (!slot || *slot != e.op_id) return false;
      slot.reset();
    }
  }
  return true;
}

History History::from_events(std::vector<Event> events) {
  History h;
  std::size_t max_id = 0;
  for (const Event& e : events) max_id = std::max(max_id, e.op_id + 1);
  h.events_ = std::move(events);
  h.next_op_ = max_id;
  if (!h.well_formed()) throw ConfigError("history is not well formed");
  return h;
}

}  // namespace abakit
