#pragma once

#include <concepts>
#include <optional>

#include "abakit/types.hpp"

namespace abakit {

// A concurrent object written as per-process resumable state machines over a
// memory backend `Mem`.
//
//   invoke(mem, p, op) starts `op` for process p and runs its local code up to
//                      its first shared-memory step. Returns the response if
//                      the operation finishes without touching shared memory.
//   step(mem, p)       performs exactly one shared-memory step of p's pending
//                      operation, then runs local code up to the next shared
//                      step. Returns the response once the operation is done.
//
// The same code drives the simulated scheduler (one step per schedule entry)
// and native threads (run_operation below).
template <class O, class Mem>
concept SteppedObject = requires(O o, Mem& mem, ProcessId p, const Operation& op) {
  { o.invoke(mem, p, op) } -> std::same_as<std::optional<Response>>;
  { o.step(mem, p) } -> std::same_as<std::optional<Response>>;
  { o.busy(p) } -> std::same_as<bool>;
};

template <class O, class Mem>
  requires SteppedObject<O, Mem>
Response run_operation(O& object, Mem& mem, ProcessId p, const Operation& op) {
  if (auto r = object.invoke(mem, p, op)) return *r;
  for (;;) {
    if (auto r = object.step(mem, p)) return *r;
  }
}

}  // namespace abakit
