#include <gtest/gtest.h>

#include <httplib.h>

#include <json.hpp>

#include "handwash/errors.hpp"
#include "handwash/service.hpp"
#include "handwash/synthetic.hpp"

using namespace handwash;
using nlohmann::json;
using namespace std::chrono_literals;

namespace {

const char* kCompleteWash = "0:2,2:7,3:7,4:7,5:7,6:7,7:7,10:2,0:4";

RunSpec synthetic(const std::string& segments) {
  RunSpec spec;
  spec.source.kind = SourceSpec::Kind::Synthetic;
  spec.source.synthetic.segments = parse_segments(segments);
  return spec;
}

struct Running {
  explicit Running(RunSpec spec, ServiceOptions options = {})
      : service(std::move(spec), options), port(service.start("127.0.0.1", 0)), client("127.0.0.1", port) {
    client.set_read_timeout(10, 0);
  }
  MonitorService service;
  int port;
  httplib::Client client;
};

std::vector<std::pair<EngineState, EngineState>> transitions(const std::vector<StatusEvent>& events) {
  std::vector<std::pair<EngineState, EngineState>> out;
  for (const auto& e : events) {
    if (e.kind == StatusEventKind::StateChange) out.emplace_back(e.transition->from, e.transition->to);
  }
  return out;
}

}  // namespace

TEST(Service, StatusIsIdleAfterTheRun) {
  Running r(synthetic(kCompleteWash));
  ASSERT_TRUE(r.service.wait_run_finished(30s));
  auto res = r.client.Get("/status");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body), (json{{"washing", false}, {"movement", 0}}));
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
}

TEST(Service, EventsFollowTheEpisode) {
  Running r(synthetic(kCompleteWash));
  ASSERT_TRUE(r.service.wait_run_finished(30s));
  const auto events = r.service.events_after(0);
  using S = EngineState;
  EXPECT_EQ(transitions(events), (std::vector<std::pair<S, S>>{
                                     {S::Waiting, S::InProgress}, {S::InProgress, S::Ok}, {S::Ok, S::Waiting}}));
  std::vector<std::string> kinds;
  for (const auto& e : events) {
    if (e.kind != StatusEventKind::Progress) kinds.emplace_back(status_event_kind_name(e.kind));
  }
  EXPECT_EQ(kinds, (std::vector<std::string>{"state_change", "state_change", "state_change", "report"}));
  for (std::size_t i = 1; i < events.size(); ++i) {
    EXPECT_EQ(events[i].seq, events[i - 1].seq + 1);
    EXPECT_GE(events[i].t, events[i - 1].t);
  }
  // Progress at the first frame, then at every 0.5 s of stream time up to 50 s.
  std::size_t progress = 0;
  for (const auto& e : events) progress += e.kind == StatusEventKind::Progress;
  EXPECT_EQ(progress, 101u);

  auto res = r.client.Get("/report/latest");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(json::parse(res->body)["verdict"], "ok");
}

TEST(Service, EventStreamDeliversServerSentEvents) {
  Running r(synthetic(kCompleteWash));
  ASSERT_TRUE(r.service.wait_run_finished(30s));
  std::string body;
  auto res = r.client.Get("/events?from=1", [&](const char* data, std::size_t n) {
    body.append(data, n);
    return body.find("event: report") == std::string::npos;
  });
  ASSERT_NE(body.find("event: report"), std::string::npos);
  EXPECT_EQ(body.rfind("id: 1\nevent: ", 0), 0u) << body.substr(0, 80);
  const auto start = body.find("event: state_change\ndata: ");
  ASSERT_NE(start, std::string::npos);
  const auto data = body.substr(start + 26, body.find('\n', start + 26) - start - 26);
  const auto j = json::parse(data);
  EXPECT_EQ(j["transition"]["to"], "in_progress");
  EXPECT_EQ(j["snapshot"]["washing"], true);

  // Resume after the last seen id.
  const auto events = r.service.events_after(0);
  const std::uint64_t last = events.back().seq;
  std::string tail;
  httplib::Headers headers = {{"Last-Event-ID", std::to_string(last - 1)}};
  r.client.Get("/events", headers, [&](const char* d, std::size_t n) {
    tail.append(d, n);
    return tail.find("\n\n") == std::string::npos;
  });
  EXPECT_EQ(tail.rfind("id: " + std::to_string(last) + "\n", 0), 0u) << tail.substr(0, 40);

  auto bad = r.client.Get("/events?from=abc");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
}

TEST(Service, ConfigUpdateAppliesOnRerun) {
  Running r(synthetic("0:2,2:12,0:4"));
  ASSERT_TRUE(r.service.wait_run_finished(30s));
  auto first = r.client.Get("/report/latest");
  ASSERT_TRUE(first);
  EXPECT_EQ(json::parse(first->body)["verdict"], "failed");

  auto put = r.client.Put("/config", R"({"total_duration_s": 1, "required_movements": [2]})", "application/json");
  ASSERT_TRUE(put);
  EXPECT_EQ(put->status, 200);
  EXPECT_EQ(json::parse(put->body)["total_duration_s"], 1.0);
  auto got = r.client.Get("/config");
  EXPECT_EQ(json::parse(got->body)["required_movements"], json::array({2}));

  auto run = r.client.Post("/run", "", "application/json");
  ASSERT_TRUE(run);
  EXPECT_EQ(run->status, 202);
  ASSERT_TRUE(r.service.wait_run_finished(30s));
  auto second = r.client.Get("/report/latest");
  EXPECT_EQ(json::parse(second->body)["verdict"], "ok");
  EXPECT_DOUBLE_EQ(json::parse(second->body)["total_required_s"].get<double>(), 1.0);
}

TEST(Service, RejectsBadConfig) {
  Running r(synthetic("0:1"));
  for (const char* body : {"{not json", R"({"total_duration_s": -4})", R"({"gate": {"on_threshold": "x"}})",
                           R"({"unknown": 1})"}) {
    auto res = r.client.Put("/config", body, "application/json");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->status, 400) << body;
    EXPECT_TRUE(json::parse(res->body).contains("error"));
  }
  EXPECT_EQ(r.service.config(), default_config());
  ComplianceConfig zero = default_config();
  zero.total_duration_s = 0.0;
  EXPECT_THROW(r.service.update_config(zero), ConfigError);
}

TEST(Service, NoReportBeforeFirstEpisode) {
  Running r(synthetic("0:3"));
  ASSERT_TRUE(r.service.wait_run_finished(30s));
  auto res = r.client.Get("/report/latest");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
}

TEST(Service, SourceErrorsBecomeEvents) {
  RunSpec spec;
  spec.source.kind = SourceSpec::Kind::Annotation;
  spec.source.path = "/nonexistent/annotation.json";
  Running r(spec);
  ASSERT_TRUE(r.service.wait_run_finished(30s));
  const auto events = r.service.events_after(0);
  ASSERT_FALSE(events.empty());
  EXPECT_EQ(events.back().kind, StatusEventKind::Error);
  EXPECT_NE(events.back().message.find("annotation.json"), std::string::npos);
  EXPECT_EQ(status_event_to_json(events.back())["kind"], "error");
}

TEST(Service, RealtimeStatusShowsWashingInProgress) {
  RunSpec spec = synthetic("0:0.5,2:1.5,3:1.5,0:1.5");
  spec.config.gate.min_duration_s = 0.5;
  spec.config.gate.max_gap_s = 0.5;
  spec.config.smoothing_window = 1;
  Running r(spec, ServiceOptions{.realtime = true});
  bool saw_washing = false;
  std::set<int> movements;
  const auto deadline = std::chrono::steady_clock::now() + 10s;
  while (std::chrono::steady_clock::now() < deadline && !r.service.wait_run_finished(50ms)) {
    auto res = r.client.Get("/status");
    ASSERT_TRUE(res);
    const auto j = json::parse(res->body);
    if (j["washing"].get<bool>()) {
      saw_washing = true;
      movements.insert(j["movement"].get<int>());
    }
  }
  EXPECT_TRUE(saw_washing);
  EXPECT_TRUE(movements.count(2) && movements.count(3));
  EXPECT_EQ(r.service.status(), (PollResult{false, 0}));
}

TEST(Service, StopIsIdempotentAndRestartAfterStopIsIgnored) {
  Running r(synthetic(kCompleteWash), ServiceOptions{.realtime = true});
  r.service.stop();
  r.service.stop();
  r.service.restart_run();
  SUCCEED();
}
