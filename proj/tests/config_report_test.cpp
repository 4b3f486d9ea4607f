#include <gtest/gtest.h>

#include <random>

#include <json.hpp>

#include "handwash/config_io.hpp"
#include "handwash/errors.hpp"
#include "handwash/json_util.hpp"
#include "handwash/report_io.hpp"
#include "support/test_support.hpp"

using namespace handwash;
using nlohmann::json;

namespace {

EpisodeReport sample_report() {
  EpisodeReport r;
  r.start_s = 1.0;
  r.end_s = 12.5;
  r.verdict = Verdict::Failed;
  r.ledger.timebase = Timebase::frames(Rational(30, 1));
  r.ledger.ticks[index_of(Movement::PalmToPalm)] = 150;
  r.ledger.ticks[index_of(Movement::Idle)] = 45;
  r.missing.push_back({Movement::ThumbRub, 5.0, 0.0, 5.0});
  r.total_active_s = 5.0;
  r.total_required_s = 40.0;
  r.total_short_by_s = 35.0;
  r.timeline = {{EngineState::Waiting, EngineState::InProgress, 1.0},
                {EngineState::InProgress, EngineState::Failed, 12.5},
                {EngineState::Failed, EngineState::Waiting, 12.5}};
  return r;
}

}  // namespace

TEST(ConfigText, ParsesKeysCommentsAndDefaults) {
  const auto cfg = parse_config_text(R"(
# stricter hospital policy
total_duration_s = 60     # seconds
required_movements = 2, 3 ,7
min_s.2 = 8
min_s.3 = 8
min_s.7 = 4.5
gate.min_duration_s = 5
smoothing_window = 9
classifier.kind = constant
classifier.constant_code = 4
)");
  EXPECT_DOUBLE_EQ(cfg.total_duration_s, 60.0);
  EXPECT_EQ(cfg.required_movements, (std::set<Movement>{Movement::PalmToPalm, Movement::PalmOverDorsum,
                                                        Movement::FingertipsToPalm}));
  EXPECT_DOUBLE_EQ(cfg.per_movement_min_s.at(Movement::FingertipsToPalm), 4.5);
  EXPECT_DOUBLE_EQ(cfg.per_movement_min_s.at(Movement::ThumbRub), 5.0);  // inherited, not required
  EXPECT_DOUBLE_EQ(cfg.gate.min_duration_s, 5.0);
  EXPECT_DOUBLE_EQ(cfg.gate.max_gap_s, 2.0);
  EXPECT_EQ(cfg.smoothing_window, 9u);
  EXPECT_EQ(cfg.classifier.kind, ClassifierKind::Constant);
  EXPECT_EQ(cfg.classifier.constant_code, Movement::FingersInterlaced);
}

TEST(ConfigText, ErrorsNameTheLine) {
  auto message = [](const std::string& text) {
    try {
      parse_config_text(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  EXPECT_NE(message("total_duration_s = 40\nbogus = 1\n").find("line 2"), std::string::npos);
  EXPECT_NE(message("total_duration_s 40\n").find("line 1"), std::string::npos);
  EXPECT_NE(message("\n\nmin_s.8 = 1\n").find("line 3"), std::string::npos);
  EXPECT_NE(message("poll_period_s = fast\n").find("poll_period_s"), std::string::npos);
  EXPECT_EQ(message("required_movements = 2,9\n").find("no error"), std::string::npos);
  EXPECT_EQ(message("total_duration_s = -1\n").find("no error"), std::string::npos);
  EXPECT_EQ(message("gate.on_threshold = 0.001\n").find("no error"), std::string::npos);
}

TEST(ConfigText, FormatRoundTrips) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    ComplianceConfig cfg = default_config();
    cfg.total_duration_s = 1.0 + (rng() % 1000) / 7.0;
    cfg.required_movements.clear();
    for (Movement m : kWashingMovements) {
      cfg.per_movement_min_s[m] = (rng() % 100) / 3.0;
      if (rng() & 1) cfg.required_movements.insert(m);
    }
    cfg.poll_period_s = 0.1 + (rng() % 10) / 10.0;
    cfg.smoothing_window = 1 + rng() % 30;
    cfg.gate.off_threshold = (rng() % 100) / 1000.0;
    cfg.gate.on_threshold = cfg.gate.off_threshold + (rng() % 100) / 1000.0;
    cfg.classifier.noise_epsilon = (rng() % 101) / 100.0;
    cfg.classifier.seed = rng();
    cfg.classifier.seed >>= 1;
    ASSERT_EQ(parse_config_text(format_config_text(cfg)), cfg) << format_config_text(cfg);
    ASSERT_EQ(config_from_json(config_to_json(cfg), ComplianceConfig{}), cfg);
  }
}

TEST(ConfigJson, PartialUpdatesKeepOtherFields) {
  const auto base = default_config();
  const auto cfg = config_from_json(json{{"total_duration_s", 1}, {"gate", {{"max_gap_s", 3.5}}}}, base);
  EXPECT_DOUBLE_EQ(cfg.total_duration_s, 1.0);
  EXPECT_DOUBLE_EQ(cfg.gate.max_gap_s, 3.5);
  EXPECT_DOUBLE_EQ(cfg.gate.min_duration_s, base.gate.min_duration_s);
  EXPECT_EQ(cfg.required_movements, base.required_movements);

  EXPECT_THROW(config_from_json(json{{"total_duration_s", "long"}}, base), ConfigError);
  EXPECT_THROW(config_from_json(json{{"required_movements", {2, 11}}}, base), ConfigError);
  EXPECT_THROW(config_from_json(json{{"smoothing_window", 0}}, base), ConfigError);
  EXPECT_THROW(config_from_json(json{{"colour", "blue"}}, base), ConfigError);
  EXPECT_THROW(config_from_json(json{{"gate", {{"speed", 1}}}}, base), ConfigError);
  EXPECT_THROW(config_from_json(json::array(), base), ConfigError);
  EXPECT_THROW(config_from_json(json{{"classifier", {{"input_size", "big"}}}}, base), ConfigError);
}

TEST(ConfigFile, LoadsFromDisk) {
  testkit::TempDir dir;
  json_util::write_file(dir.file("c.conf"), "total_duration_s = 12\n");
  EXPECT_DOUBLE_EQ(load_config(dir.file("c.conf")).total_duration_s, 12.0);
  EXPECT_THROW(load_config(dir.file("nope.conf")), IoError);
}

TEST(Report, DocumentShape) {
  const auto j = json::parse(serialize_report(sample_report(), "ep7"));
  EXPECT_EQ(j["format"], "handwash-report/1");
  EXPECT_EQ(j["episode_id"], "ep7");
  EXPECT_EQ(j["verdict"], "failed");
  EXPECT_DOUBLE_EQ(j["durations_s"]["2"].get<double>(), 5.0);
  EXPECT_DOUBLE_EQ(j["durations_s"]["0"].get<double>(), 1.5);
  EXPECT_DOUBLE_EQ(j["durations_s"]["10"].get<double>(), 0.0);
  ASSERT_EQ(j["missing"].size(), 1u);
  EXPECT_EQ(j["missing"][0]["code"], 6);
  EXPECT_DOUBLE_EQ(j["missing"][0]["short_by_s"].get<double>(), 5.0);
  EXPECT_DOUBLE_EQ(j["total_short_by_s"].get<double>(), 35.0);
  ASSERT_EQ(j["timeline"].size(), 3u);
  EXPECT_EQ(j["timeline"][1]["to"], "failed");
}

TEST(Report, SerializationIsCanonical) {
  const auto a = serialize_report(sample_report(), "x");
  EXPECT_EQ(a, serialize_report(sample_report(), "x"));
  EXPECT_EQ(a.back(), '\n');
  EXPECT_EQ(a, json::parse(a).dump(2) + "\n");
}

TEST(Report, StatisticsCsvFromLedger) {
  EXPECT_EQ(ledger_statistics_csv("e", sample_report().ledger),
            "episode_id,movement_code,frames,seconds\n"
            "e,0,45,1.500000\n"
            "e,2,150,5.000000\n");
}

TEST(Report, SnapshotJson) {
  EngineSnapshot s;
  s.state = EngineState::InProgress;
  s.washing_on = true;
  s.movement = Movement::ThumbRub;
  const auto j = snapshot_to_json(s);
  EXPECT_EQ(j["state"], "in_progress");
  EXPECT_EQ(j["washing"], true);
  EXPECT_EQ(j["movement"], 6);
}
