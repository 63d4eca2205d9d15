#include "abakit/json_io.hpp"

#include <limits>

namespace abakit {

json word_to_json(const BigWord& w) {
  if (w >= 0 && w <= std::numeric_limits<std::uint64_t>::max()) {
    return static_cast<std::uint64_t>(w);
  }
  return w.str();
}

json to_json(const Response& r, OpKind kind) {
  const json value = r.value ? json(*r.value) : json(nullptr);
  switch (kind) {
    case OpKind::DWrite:
      return nullptr;
    case OpKind::DRead:
      return json::array({value, r.flag});
    case OpKind::LL:
      return value;
    case OpKind::SC:
    case OpKind::VL:
      return r.flag;
  }
  return nullptr;
}

json to_json(const StepRecord& s) {
  return {{"ts", s.ts},
          {"pid", s.pid},
          {"cell", s.cell.index},
          {"op", step_op_name(s.op)},
          {"observed", word_to_json(s.observed)},
          {"written", s.written ? word_to_json(*s.written) : json(nullptr)},
          {"label", s.label.str()}};
}

json to_json(const History& h) {
  json events = json::array();
  for (const Event& e : h.events()) {
    json j = {{"type", e.type == EventType::Invoke ? "invoke" : "respond"},
              {"pid", e.pid},
              {"op_id", e.op_id},
              {"op", to_string(e.op)},
              {"ts", e.ts}};
    if (e.type == EventType::Respond) j["result"] = to_json(e.response, e.op.kind);
    events.push_back(std::move(j));
  }
  return events;
}

json to_json(const Verdict& v) {
  return {{"linearizable", v.linearizable},
          {"witness", v.witness},
          {"violation_prefix_len",
           v.violation_prefix_len ? json(*v.violation_prefix_len) : json(nullptr)}};
}

namespace {

json stats_map(const std::map<std::string, OpStats>& m, bool min_too) {
  json j = json::object();
  for (const auto& [name, st] : m) {
    if (min_too) {
      j[name] = {{"min", st.min}, {"max", st.max}, {"count", st.count}};
    } else {
      j[name] = st.max;
    }
  }
  return j;
}

}  // namespace

json to_json(const StepAudit& a) {
  json j = {{"shared_steps", stats_map(a.shared_steps, true)}};
  if (!a.wrapped_ops.empty()) j["wrapped_ops"] = stats_map(a.wrapped_ops, true);
  return j;
}

json to_json(const ExplorationReport& r) {
  json violations = json::array();
  for (const Violation& v : r.violations) {
    violations.push_back(
        {{"schedule", v.schedule}, {"history", to_json(v.history)}, {"verdict", to_json(v.verdict)}});
  }
  json j = {{"schedules_run", r.schedules_run},
            {"nodes", r.nodes},
            {"distinct_histories", r.distinct_histories},
            {"violation_count", r.violation_count},
            {"violations", std::move(violations)},
            {"max_steps_per_op", stats_map(r.audit.shared_steps, false)},
            {"cells_touched", r.cells_touched}};
  if (!r.audit.wrapped_ops.empty()) {
    j["max_wrapped_ops_per_op"] = stats_map(r.audit.wrapped_ops, false);
  }
  return j;
}

std::string trace_to_ndjson(const std::vector<StepRecord>& trace) {
  std::string out;
  for (const StepRecord& s : trace) {
    out += to_json(s).dump();
    out += '\n';
  }
  return out;
}

json schedule_to_json(const Schedule& s) { return s; }

Schedule schedule_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("schedule file: ") + e.what());
  }
  if (!j.is_array()) throw ConfigError("schedule file must hold a JSON array of pids");
  Schedule s;
  for (const json& e : j) {
    if (!e.is_number_unsigned()) throw ConfigError("schedule entries must be non-negative integers");
    s.push_back(e.get<ProcessId>());
  }
  return s;
}

}  // namespace abakit
