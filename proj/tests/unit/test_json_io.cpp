#include <gtest/gtest.h>

#include <sstream>

#include "abakit/aba_register.hpp"
#include "abakit/json_io.hpp"
#include "abakit/spec_models.hpp"

using namespace abakit;

TEST(JsonIo, TraceIsNdjson) {
  auto root = make_execution<AbaRegister<SimMemory>>(2, {{dwrite(1)}, {dread()}}, 8u);
  root.set_tracing(true);
  const auto e = run_schedule(root, {0, 1, 0, 1, 1, 1});
  const std::string text = trace_to_ndjson(e.memory().trace());
  std::istringstream in(text);
  std::string line;
  std::size_t lines = 0;
  std::uint64_t last_ts = 0;
  while (std::getline(in, line)) {
    const json j = json::parse(line);
    for (const char* key : {"ts", "pid", "cell", "op", "observed", "written", "label"}) {
      ASSERT_TRUE(j.contains(key)) << key;
    }
    EXPECT_GT(j["ts"].get<std::uint64_t>(), last_ts);
    last_ts = j["ts"].get<std::uint64_t>();
    if (j["op"] == "Read") EXPECT_TRUE(j["written"].is_null());
    ++lines;
  }
  EXPECT_EQ(lines, 6u);
  EXPECT_EQ(json::parse(text.substr(0, text.find('\n')))["label"], "Write:getSeq");
}

TEST(JsonIo, BigWordsBecomeStrings) {
  EXPECT_TRUE(word_to_json(BigWord(5)).is_number_unsigned());
  const BigWord big = BigWord(1) << 70;
  EXPECT_EQ(word_to_json(big), big.str());
}

TEST(JsonIo, VerdictShape) {
  Verdict v;
  v.linearizable = false;
  v.violation_prefix_len = 8;
  const json j = to_json(v);
  EXPECT_EQ(j["linearizable"], false);
  EXPECT_TRUE(j["witness"].is_array());
  EXPECT_EQ(j["violation_prefix_len"], 8);
  v.linearizable = true;
  v.witness = {1, 0};
  v.violation_prefix_len.reset();
  EXPECT_EQ(to_json(v)["witness"], json::array({1, 0}));
  EXPECT_TRUE(to_json(v)["violation_prefix_len"].is_null());
}

TEST(JsonIo, ReportShape) {
  auto root = make_execution<AbaRegister<SimMemory>>(2, {{dwrite(1)}, {dread()}}, 8u);
  const json j = to_json(explore_exhaustive(root, make_check(AbaSpec(2))));
  EXPECT_EQ(j["schedules_run"], 15);
  EXPECT_EQ(j["violations"], json::array());
  EXPECT_EQ(j["max_steps_per_op"]["DWrite"], 2);
  EXPECT_EQ(j["max_steps_per_op"]["DRead"], 4);
  EXPECT_EQ(j["cells_touched"], 3);
}

TEST(JsonIo, ScheduleFiles) {
  const Schedule s{0, 1, 1, 0};
  EXPECT_EQ(schedule_from_json(schedule_to_json(s).dump()), s);
  EXPECT_THROW(schedule_from_json("{}"), ConfigError);
  EXPECT_THROW(schedule_from_json("[1, -2]"), ConfigError);
  EXPECT_THROW(schedule_from_json("[1,"), ConfigError);
}

TEST(JsonIo, Responses) {
  EXPECT_EQ(to_json(Response{5, true}, OpKind::DRead), json::array({5, true}));
  EXPECT_EQ(to_json(Response{std::nullopt, false}, OpKind::DRead), json::array({nullptr, false}));
  EXPECT_EQ(to_json(Response{3, false}, OpKind::LL), 3);
  EXPECT_EQ(to_json(Response{std::nullopt, true}, OpKind::SC), true);
  EXPECT_TRUE(to_json(Response{}, OpKind::DWrite).is_null());
}
