#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "abakit/types.hpp"

namespace abakit {

enum class EventType : std::uint8_t { Invoke, Respond };

struct Event {
  EventType type = EventType::Invoke;
  ProcessId pid = 0;
  std::size_t op_id = 0;
  Operation op;
  Response response;  // Respond events only
  std::uint64_t ts = 0;

  friend bool operator==(const Event&, const Event&) = default;
};

// One operation of a history with its position in the event sequence.
// Operation a happens before b iff a.respond_pos < b.invoke_pos.
struct OperationRecord {
  std::size_t id = 0;
  ProcessId pid = 0;
  Operation op;
  std::optional<Response> response;  // nullopt while pending
  std::size_t invoke_pos = 0;
  std::optional<std::size_t> respond_pos;

  bool pending() const { return !respond_pos.has_value(); }
};

class History {
 public:
  History() = default;

  // Appends an invocation and returns the new operation's id.
  std::size_t invoke(ProcessId p, const Operation& op, std::uint64_t ts);
  void respond(std::size_t op_id, const Response& r, std::uint64_t ts);

  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }
  bool empty() const { return events_.empty(); }

  std::vector<OperationRecord> operations() const;

  // The first `events` events; operations without a response become pending.
  History prefix(std::size_t events) const;

  // Per-process Invoke/Respond alternation, strictly increasing timestamps,
  // and every Respond matching an earlier Invoke of the same process.
  bool well_formed() const;

  // Builds a history from raw events (op ids are taken as given); throws
  // ConfigError when the result is not well formed.
  static History from_events(std::vector<Event> events);

  friend bool operator==(const History&, const History&) = default;

 private:
  std::vector<Event> events_;
  std::size_t next_op_ = 0;
};

}  // namespace abakit
