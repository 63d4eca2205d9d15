#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "abakit/history.hpp"
#include "abakit/lin_checker.hpp"
#include "abakit/shared_memory.hpp"
#include "abakit/sim_scheduler.hpp"

namespace abakit {

using nlohmann::json;

// Words are emitted as JSON numbers when they fit 64 bits, as decimal strings
// otherwise (unbounded oracle tags).
json word_to_json(const BigWord& w);

json to_json(const Response& r, OpKind kind);
json to_json(const StepRecord& s);
json to_json(const History& h);
json to_json(const Verdict& v);
json to_json(const StepAudit& a);
json to_json(const ExplorationReport& r);

// One StepRecord per line.
std::string trace_to_ndjson(const std::vector<StepRecord>& trace);

// Schedule replay files are a JSON array of process ids.
json schedule_to_json(const Schedule& s);
Schedule schedule_from_json(std::string_view text);

}  // namespace abakit
