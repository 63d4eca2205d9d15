#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <regex>
#include <sstream>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "abakit/aba_from_llsc.hpp"
#include "abakit/aba_register.hpp"
#include "abakit/json_io.hpp"
#include "abakit/llsc.hpp"
#include "abakit/native_stress.hpp"
#include "abakit/sim_scheduler.hpp"
#include "abakit/spec_models.hpp"

using namespace abakit;

namespace {

enum ExitCode : int { kOk = 0, kViolation = 1, kLimit = 2, kConfig = 3 };

enum class ObjectKind { AbaReg, Llsc, AbaFromLlsc, OracleAba };
enum class Mode { Exhaustive, Random, NativeStress };

struct RunConfig {
  ObjectKind object = ObjectKind::AbaReg;
  std::size_t n = 2;
  std::string workload;
  Mode mode = Mode::Exhaustive;
  std::uint64_t seed = 1;
  std::uint64_t trials = 1000;
  std::uint64_t node_limit = ExploreOptions{}.node_limit;
  std::size_t retry_bound = 0;
  bool fail_fast = false;
  std::string trace_out;
  std::string variant = "faithful";
  unsigned value_bits = 8;
  std::uint64_t rounds = 10'000;
  std::size_t ops_per_round = 2;
  std::string schedule_file;
};

std::shared_ptr<spdlog::logger> g_log;

void setup_logging() {
  g_log = spdlog::stderr_color_mt("abakit");
  g_log->set_pattern("[%H:%M:%S.%e] [%l] %v");
  const char* env = std::getenv("ABA_KIT_LOG");
  g_log->set_level(env ? spdlog::level::from_str(env) : spdlog::level::off);
}

std::string_view object_name(ObjectKind o) {
  switch (o) {
    case ObjectKind::AbaReg:
      return "aba_reg";
    case ObjectKind::Llsc:
      return "llsc";
    case ObjectKind::AbaFromLlsc:
      return "aba_from_llsc";
    case ObjectKind::OracleAba:
      return "oracle_aba";
  }
  return "?";
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Exhaustive:
      return "exhaustive";
    case Mode::Random:
      return "random";
    case Mode::NativeStress:
      return "native_stress";
  }
  return "?";
}

// "wXdY": p0 performs X DWrites of 1..X, every other process Y DReads.
Workload resolve_workload(const RunConfig& c) {
  Workload w;
  if (c.workload.empty()) {
    if (c.object == ObjectKind::Llsc) {
      for (std::size_t p = 0; p < c.n; ++p) w.push_back({ll(), sc(p + 1), vl()});
      return w;
    }
    return resolve_workload([&] {
      RunConfig d = c;
      d.workload = "w1d1";
      return d;
    }());
  }
  static const std::regex preset(R"(w(\d+)d(\d+))");
  std::smatch m;
  if (std::regex_match(c.workload, m, preset)) {
    if (c.object == ObjectKind::Llsc) throw ConfigError("wXdY presets apply to ABA registers only");
    const std::uint64_t writes = std::stoull(m[1]);
    const std::uint64_t reads = std::stoull(m[2]);
    w.resize(c.n);
    for (std::uint64_t i = 1; i <= writes; ++i) w[0].push_back(dwrite(i));
    for (std::size_t p = 1; p < c.n; ++p) w[p].assign(reads, dread());
    return w;
  }
  w = parse_workload(c.workload);
  if (w.size() > c.n) throw ConfigError("workload names more processes than --n");
  w.resize(c.n);
  return w;
}

AbaVariant aba_variant(const std::string& v) {
  if (v == "faithful") return AbaVariant::Faithful;
  if (v == "shrunk-domain") return AbaVariant::ShrunkSequenceDomain;
  throw ConfigError("aba_reg variants: faithful, shrunk-domain");
}

LlscOptions llsc_options(const RunConfig& c, bool layered) {
  LlscOptions o;
  o.retry_bound = c.retry_bound;
  if (layered || c.variant == "faithful") return o;
  if (c.variant == "no-fallback") {
    o.variant = LlscVariant::NoFallback;
  } else if (c.variant == "fallback-keeps-link") {
    o.variant = LlscVariant::FallbackKeepsLink;
  } else {
    throw ConfigError("llsc variants: faithful, no-fallback, fallback-keeps-link");
  }
  return o;
}

LayeredVariant layered_variant(const std::string& v) {
  if (v == "faithful") return LayeredVariant::Faithful;
  if (v == "read-always-clean") return LayeredVariant::ReadAlwaysClean;
  throw ConfigError("aba_from_llsc variants: faithful, read-always-clean");
}

// Builds the initial execution for the configured object and hands it, with
// the matching history check, to `f`.
template <class F>
auto with_object(const RunConfig& c, F&& f) {
  const Workload w = resolve_workload(c);
  g_log->info("object={} n={} workload={}", object_name(c.object), c.n, to_string(w));
  switch (c.object) {
    case ObjectKind::AbaReg:
      return f(make_execution<AbaRegister<SimMemory>>(c.n, w, c.value_bits, aba_variant(c.variant)),
               make_check(AbaSpec(c.n)));
    case ObjectKind::Llsc:
      return f(make_execution<Llsc<SimMemory>>(c.n, w, c.value_bits, std::uint64_t{0},
                                               llsc_options(c, false)),
               make_check(LlscSpec(c.n, 0)));
    case ObjectKind::AbaFromLlsc:
      return f(make_execution<AbaFromLlsc<SimMemory>>(c.n, w, c.value_bits, llsc_options(c, true),
                                                      layered_variant(c.variant)),
               make_check(AbaSpec(c.n)));
    case ObjectKind::OracleAba:
      if (c.variant != "faithful") throw ConfigError("oracle_aba has no variants");
      return f(make_execution<UnboundedAbaOracle>(c.n, w, c.value_bits), make_check(AbaSpec(c.n)));
  }
  throw ConfigError("unknown object");
}

json config_json(const RunConfig& c) {
  json j = {{"object", object_name(c.object)},
            {"n", c.n},
            {"mode", mode_name(c.mode)},
            {"variant", c.variant}};
  if (c.mode == Mode::Random) {
    j["seed"] = c.seed;
    j["trials"] = c.trials;
  }
  if (c.retry_bound != 0) j["retry_bound"] = c.retry_bound;
  return j;
}

template <class Object>
void write_trace(const std::string& path, Execution<Object> root, const Schedule& schedule) {
  root.set_tracing(true);
  const auto e = run_schedule(std::move(root), schedule);
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open trace file " + path);
  out << trace_to_ndjson(e.memory().trace());
  g_log->info("wrote {} trace records to {}", e.memory().trace().size(), path);
}

// Runs the configured exploration; `extra` may add fields to the report.
template <class Object>
std::pair<ExplorationReport, std::optional<Schedule>> explore(const RunConfig& c,
                                                              const Execution<Object>& root,
                                                              const HistoryCheck& check) {
  ExploreOptions opts;
  opts.node_limit = c.node_limit;
  opts.fail_fast = c.fail_fast;
  std::optional<Schedule> first;
  const ExecutionVisitor<Object> visit = [&](const Execution<Object>& e) {
    if (!first) first = e.schedule();
  };
  ExplorationReport r;
  switch (c.mode) {
    case Mode::Exhaustive:
      r = explore_exhaustive(root, check, opts, visit);
      break;
    case Mode::Random:
      r = explore_random(root, check, c.seed, c.trials, opts, visit);
      break;
    case Mode::NativeStress:
      throw ConfigError("native_stress mode is run by the stress command");
  }
  g_log->info("{} schedules, {} distinct histories, {} violations", r.schedules_run,
              r.distinct_histories, r.violation_count);
  if (!r.violations.empty()) first = r.violations.front().schedule;
  return {std::move(r), first};
}

int cmd_explore(const RunConfig& c) {
  return with_object(c, [&](auto root, const HistoryCheck& check) {
    auto [report, schedule] = explore(c, root, check);
    json out = config_json(c);
    out["workload"] = to_string(root.programs());
    out["report"] = to_json(report);
    std::cout << out.dump(2) << '\n';
    if (!c.trace_out.empty() && schedule) write_trace(c.trace_out, root, *schedule);
    return report.ok() ? kOk : kViolation;
  });
}

int cmd_audit(const RunConfig& c) {
  return with_object(c, [&](auto root, const HistoryCheck& check) {
    const SimMemory& mem = root.memory();
    json cells = json::object();
    json widths = json::array();
    for (std::uint32_t i = 0; i < mem.cell_count(); ++i) {
      const std::string kind(kind_name(mem.kind(CellId{i})));
      cells[kind] = cells.value(kind, 0) + 1;
      if (mem.width(CellId{i}) == kUnboundedWidth) {
        widths.push_back("unbounded");
      } else {
        widths.push_back(mem.width(CellId{i}));
      }
    }
    auto [report, schedule] = explore(c, root, check);
    json out = config_json(c);
    out["workload"] = to_string(root.programs());
    out["cells"] = cells;
    out["widths"] = widths;
    out["max_steps"] = to_json(report)["max_steps_per_op"];
    if (!report.audit.wrapped_ops.empty()) {
      out["max_wrapped_ops"] = to_json(report)["max_wrapped_ops_per_op"];
    }
    out["step_stats"] = to_json(report.audit);
    out["cells_touched"] = report.cells_touched;
    out["schedules_run"] = report.schedules_run;
    out["violation_count"] = report.violation_count;
    std::cout << out.dump(2) << '\n';
    if (!c.trace_out.empty() && schedule) write_trace(c.trace_out, root, *schedule);
    return report.ok() ? kOk : kViolation;
  });
}

int cmd_replay(const RunConfig& c) {
  std::ifstream in(c.schedule_file);
  if (!in) throw ConfigError("cannot open schedule file " + c.schedule_file);
  std::stringstream buf;
  buf << in.rdbuf();
  const Schedule schedule = schedule_from_json(buf.str());
  return with_object(c, [&](auto root, const HistoryCheck& check) {
    const auto e = run_schedule(root, schedule);
    const Verdict v = check(e.history());
    json out = config_json(c);
    out["workload"] = to_string(root.programs());
    out["schedule"] = schedule;
    out["complete"] = e.complete();
    out["history"] = to_json(e.history());
    out["verdict"] = to_json(v);
    std::cout << out.dump(2) << '\n';
    if (!c.trace_out.empty()) write_trace(c.trace_out, root, schedule);
    return v.linearizable ? kOk : kViolation;
  });
}

int cmd_stress(const RunConfig& c) {
  if (c.mode != Mode::NativeStress) throw ConfigError("stress requires --mode native_stress");
  StressObject obj;
  switch (c.object) {
    case ObjectKind::AbaReg:
      if (c.variant != "faithful") throw ConfigError("stress runs faithful objects only");
      obj = StressObject::AbaRegister;
      break;
    case ObjectKind::Llsc:
      obj = StressObject::Llsc;
      break;
    case ObjectKind::AbaFromLlsc:
      if (c.variant != "faithful") throw ConfigError("stress runs faithful objects only");
      obj = StressObject::AbaFromLlsc;
      break;
    default:
      throw ConfigError("oracle_aba needs unbounded cells and has no native backend");
  }
  StressOptions o;
  o.threads = c.n;
  o.rounds = c.rounds;
  o.ops_per_round = c.ops_per_round;
  o.seed = c.seed;
  o.value_bits = c.value_bits;
  o.llsc = llsc_options(c, obj != StressObject::Llsc);
  g_log->info("stress object={} threads={} rounds={} window={}", stress_object_name(obj), o.threads,
              o.rounds, o.threads * o.ops_per_round);
  const StressSummary s = run_stress(obj, o);
  json out = {{"object", stress_object_name(obj)},
              {"threads", o.threads},
              {"mode", "native_stress"},
              {"seed", o.seed},
              {"window", o.threads * o.ops_per_round},
              {"rounds", s.rounds},
              {"ops", s.ops},
              {"violations", s.violations},
              {"overlapping_windows", s.overlapping_windows},
              {"seconds", s.seconds}};
  if (s.first_violation_round) {
    out["first_violation_round"] = *s.first_violation_round;
    out["violating_window"] = to_json(s.violating_window);
  }
  std::cout << out.dump(2) << '\n';
  return s.violations == 0 ? kOk : kViolation;
}

const std::map<std::string, ObjectKind> kObjects{{"aba_reg", ObjectKind::AbaReg},
                                                {"llsc", ObjectKind::Llsc},
                                                {"aba_from_llsc", ObjectKind::AbaFromLlsc},
                                                {"oracle_aba", ObjectKind::OracleAba}};
const std::map<std::string, Mode> kModes{{"exhaustive", Mode::Exhaustive},
                                         {"random", Mode::Random},
                                         {"native_stress", Mode::NativeStress}};

template <class Map>
std::vector<std::string> keys(const Map& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

void add_common(CLI::App* cmd, RunConfig& c, std::string& object, std::string& mode) {
  cmd->add_option("--object", object, "object under test")->check(CLI::IsMember(keys(kObjects)));
  cmd->add_option("--mode", mode, "schedule source")->check(CLI::IsMember(keys(kModes)));
  cmd->add_option("--n", c.n, "number of processes")->check(CLI::Range(1, 64));
  cmd->add_option("--workload", c.workload, "per-process programs, e.g. \"W1;W2|R;R\", or wXdY");
  cmd->add_option("--seed", c.seed, "random seed");
  cmd->add_option("--trials", c.trials, "schedules to run in random mode");
  cmd->add_option("--node-limit", c.node_limit, "explosion guard for the explorer");
  cmd->add_option("--retry-bound", c.retry_bound, "LL/SC retry bound (default n)");
  cmd->add_flag("--fail-fast", c.fail_fast, "stop at the first violation");
  cmd->add_option("--trace-out", c.trace_out, "write an NDJSON step trace of one schedule");
  cmd->add_option("--variant", c.variant, "implementation variant (negative controls)");
  cmd->add_option("--value-bits", c.value_bits, "value width b")->check(CLI::Range(1, 62));
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Explore, audit and stress bounded ABA-detecting registers and LL/SC/VL"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string object = "aba_reg";
  std::string mode;

  auto* explore_cmd = app.add_subcommand("explore", "explore schedules and check every history");
  add_common(explore_cmd, cfg, object, mode);
  auto* audit_cmd = app.add_subcommand("audit", "report cells, widths and worst step counts");
  add_common(audit_cmd, cfg, object, mode);
  auto* stress_cmd = app.add_subcommand("stress", "run real threads and check barrier windows");
  add_common(stress_cmd, cfg, object, mode);
  stress_cmd->add_option("--rounds", cfg.rounds, "barrier-separated rounds");
  stress_cmd->add_option("--ops-per-round", cfg.ops_per_round, "operations per thread per round");
  auto* replay_cmd = app.add_subcommand("replay", "run one schedule from a JSON file");
  add_common(replay_cmd, cfg, object, mode);
  replay_cmd->add_option("--schedule", cfg.schedule_file, "JSON array of process ids")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Error& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cout << json{{"error", e.what()}}.dump() << '\n';
    return kConfig;
  }

  auto fail = [](int code, const std::string& kind, const std::exception& e) {
    g_log->error("{}: {}", kind, e.what());
    std::cout << json{{"error", e.what()}, {"kind", kind}}.dump() << '\n';
    return code;
  };
  try {
    cfg.object = kObjects.at(object);
    if (mode.empty()) mode = *stress_cmd ? "native_stress" : "exhaustive";
    cfg.mode = kModes.at(mode);
    if (*stress_cmd) {
      if (!stress_cmd->count("--n")) cfg.n = 4;
      return cmd_stress(cfg);
    }
    if (*explore_cmd) return cmd_explore(cfg);
    if (*audit_cmd) return cmd_audit(cfg);
    return cmd_replay(cfg);
  } catch (const ExplosionGuard& e) {
    return fail(kLimit, "explosion_guard", e);
  } catch (const StateSpaceLimit& e) {
    return fail(kLimit, "state_space_limit", e);
  } catch (const Error& e) {
    return fail(kConfig, "config", e);
  }
}
