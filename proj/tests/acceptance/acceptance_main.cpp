// Acceptance runner: one PASS/FAIL line per primary criterion. Exit status is
// the number of failures, so ctest fails if any criterion does.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>

#include <json.hpp>

#include "handwash/batch.hpp"
#include "handwash/classifier.hpp"
#include "handwash/json_util.hpp"
#include "handwash/monitor.hpp"
#include "handwash/report_io.hpp"
#include "support/test_support.hpp"

using namespace handwash;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned limits.
constexpr double kStatsMaxSeconds = 1.0;
constexpr double kExhaustiveMaxSeconds = 300.0;
constexpr double kAccuracyTarget = 0.65;
constexpr double kAccuracyTolerance = 0.02;
constexpr std::int64_t kAccuracyMinFrames = 10000;
constexpr double kAccuracyMaxSeconds = 60.0;
constexpr double kMinLabelsPerSecond = 30.0;
constexpr double kTickQuantumSeconds = 1e-6;  // microsecond timebase

const std::string kCli = HANDWASH_CLI_PATH;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(const char* name, const std::function<Outcome()>& check) {
  Outcome o;
  try {
    o = check();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  std::printf("%s  %-32s %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
  std::fflush(stdout);
  failures += !o.pass;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

Outcome check_table1_identities() {
  testkit::TempDir dir;
  const auto synth = testkit::run_command("'" + kCli + "' synth dataset --single 1199 --double 1094 --unannotated 30178 --out " +
                                          dir.path().string());
  if (synth.exit_code != 0) return {false, "synth dataset failed"};
  const auto t0 = Clock::now();
  const auto r = testkit::run_command("'" + kCli + "' stats --manifest " + dir.file("manifest.json"));
  const double elapsed = seconds_since(t0);
  if (r.exit_code != 0) return {false, "stats failed"};
  const auto j = json::parse(r.out);
  const bool ok = j["total_annotations"] == 3387 && j["total_annotated_files"] == 2293 && elapsed < kStatsMaxSeconds;
  return {ok, fmt("annotations=%d files=%d videos=%d runtime=%.3fs", j["total_annotations"].get<int>(),
                  j["total_annotated_files"].get<int>(), j["total_videos"].get<int>(), elapsed)};
}

Outcome check_split_sizes() {
  testkit::TempDir dir;
  auto run = [&](const std::string& out) {
    return testkit::run_command("'" + kCli + "' split --n 309315 --ratios 0.7,0.2,0.1 --seed 2022 --out " + out);
  };
  const auto a = run(dir.file("a.json"));
  const auto b = run(dir.file("b.json"));
  if (a.exit_code != 0 || b.exit_code != 0) return {false, "split failed"};
  const auto sizes = json::parse(a.out)["sizes"];
  const std::int64_t train = sizes["train"], validation = sizes["validation"], test = sizes["test"];
  const bool deterministic =
      a.out == b.out && json_util::read_file(dir.file("a.json")) == json_util::read_file(dir.file("b.json"));
  const auto oracle = testkit::split_sizes_70_20_10(309315);
  const bool ok = train == 216520 && validation == 61863 && test == 30932 && train + validation + test == 309315 &&
                  oracle == std::array<std::int64_t, 3>{train, validation, test} && deterministic;
  return {ok, fmt("sizes=%lld/%lld/%lld deterministic=%s", static_cast<long long>(train),
                  static_cast<long long>(validation), static_cast<long long>(test), deterministic ? "yes" : "no")};
}

Outcome check_motion_rule() {
  const GateParams p;
  const auto nine = segment_episodes(testkit::burst_timeline(5, 9, 10), p).size();
  const auto fifteen = segment_episodes(testkit::burst_timeline(5, 15, 10), p).size();
  std::mt19937_64 rng(2022);
  int agree = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = testkit::random_timeline(rng);
    const auto batch = segment_episodes(s, p);
    std::vector<EpisodeSpan> stream;
    GateState g;
    GateEvent e;
    for (const auto& x : s) {
      std::tie(g, e) = update_gate(g, x.score, x.t, p);
      if (e.kind == GateEventKind::EpisodeEnded) stream.push_back(e.span);
    }
    std::tie(g, e) = flush_gate(g);
    if (e.kind == GateEventKind::EpisodeEnded) stream.push_back(e.span);
    agree += batch == stream && batch == testkit::offline_episodes(s, p);
  }
  return {nine == 0 && fifteen == 1 && agree == 1000,
          fmt("9s->%zu 15s->%zu batch==stream==offline on %d/1000", nine, fifteen, agree)};
}

Outcome check_state_machine_oracle() {
  const testkit::TenthsConfig tc{60, {{Movement::PalmToPalm, 20}, {Movement::PalmOverDorsum, 20}}};
  const ComplianceConfig cfg = testkit::to_config(tc);
  const auto t0 = Clock::now();
  std::uint64_t total = 0;
  std::uint64_t matches = 0;
  std::uint64_t ok = 0;
  for (int length = 0; length <= 12; ++length) {
    std::uint64_t space = 1;
    for (int i = 0; i < length; ++i) space *= 3;
    for (std::uint64_t idx = 0; idx < space; ++idx) {
      const auto labels = testkit::decode(idx, length, 2022);
      const bool expected = testkit::oracle_ok(labels, tc);
      const auto ref = reference_verdict(testkit::to_timed(labels), cfg);
      Engine engine(cfg);
      const auto fold = testkit::fold_engine(engine, labels, idx % 2 == 0);
      const bool engine_ok = fold.report && fold.report->verdict == Verdict::Ok;
      const bool ledger_same = labels.empty() ? !fold.report : (fold.report && fold.report->ledger == ref.ledger);
      matches += engine_ok == (ref.verdict == Verdict::Ok) && expected == engine_ok && ledger_same;
      ok += expected;
      ++total;
    }
  }
  const double elapsed = seconds_since(t0);
  return {matches == total && elapsed < kExhaustiveMaxSeconds,
          fmt("%llu/%llu sequences match (ok=%llu) runtime=%.1fs", static_cast<unsigned long long>(matches),
              static_cast<unsigned long long>(total), static_cast<unsigned long long>(ok), elapsed)};
}

Outcome check_end_to_end() {
  std::mt19937_64 rng(2022);
  int matches = 0;
  int identical = 0;
  int ok = 0;
  for (int trial = 0; trial < 100; ++trial) {
    RunSpec spec;
    spec.source.kind = SourceSpec::Kind::Synthetic;
    spec.source.synthetic.episode_id = "e2e" + std::to_string(trial);
    spec.source.synthetic.segments = testkit::random_episode_segments(rng);
    spec.source.synthetic.render_frames = true;
    spec.source.synthetic.seed = rng();
    spec.config.classifier.noise_epsilon = 0.0;
    const auto truth = generate_synthetic_episode(spec.source.synthetic).annotation;
    const auto ref = reference_verdict(timed_labels(truth), spec.config, Timebase::frames(truth.fps));
    const auto first = run_episode(spec);
    const auto second = run_episode(spec);
    if (!first.report || !second.report) continue;
    matches += first.report->verdict == ref.verdict;
    identical += serialize_report(*first.report, first.episode_id) == serialize_report(*second.report, second.episode_id);
    ok += ref.verdict == Verdict::Ok;
  }
  return {matches == 100 && identical == 100,
          fmt("verdict==reference %d/100 (ok=%d failed=%d), byte-identical reports %d/100", matches, ok, 100 - ok,
              identical)};
}

Outcome check_replay_accuracy() {
  testkit::TempDir dir;
  std::mt19937_64 rng(2022);
  DatasetManifest m;
  const int episodes = 100;
  const int frames = 1500;
  std::filesystem::create_directories(dir.path() / "ann");
  for (int e = 0; e < episodes; ++e) {
    EpisodeAnnotation a;
    a.episode_id = "ep" + std::to_string(e);
    a.annotator_id = "a";
    Movement current = Movement::Idle;
    for (int i = 0; i < frames; ++i) {
      if (rng() % 30 == 0) current = movement_at(rng() % kMovementCount);
      a.labels.push_back(current);
    }
    save_annotation(a, dir.file("ann/" + a.episode_id + ".json"));
    m.entries.push_back({a.episode_id, "", {"ann/" + a.episode_id + ".json"}, frames, Rational(30, 1)});
  }
  ClassifierSpec spec;
  spec.noise_epsilon = 0.35;
  spec.seed = 7;
  BatchOptions o;
  o.base_dir = dir.path().string();
  o.split = EvalSplit::Test;
  const auto t0 = Clock::now();
  const auto r = batch_evaluate(m, spec, o);
  const double elapsed = seconds_since(t0);
  const double acc = r.confusion.accuracy();
  const auto n = static_cast<std::int64_t>(r.confusion.total());
  return {n >= kAccuracyMinFrames && std::abs(acc - kAccuracyTarget) <= kAccuracyTolerance &&
              elapsed < kAccuracyMaxSeconds,
          fmt("accuracy=%.4f over %lld test frames (target %.2f +/- %.2f) runtime=%.2fs", acc,
              static_cast<long long>(n), kAccuracyTarget, kAccuracyTolerance, elapsed)};
}

Outcome check_ledger_conservation() {
  std::mt19937_64 rng(2022);
  std::uniform_real_distribution<double> dt(1e-4, 0.9);
  ComplianceConfig cfg = default_config();
  int sequences = 0;
  int episodes = 0;
  int conserved = 0;
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    Engine engine(cfg);
    double t = dt(rng);
    double credited = 0.0;  // real-valued length of the open episode
    std::optional<double> prev;
    const int n = 2 + static_cast<int>(rng() % 400);
    for (int i = 0; i < n; ++i) {
      const bool on = rng() % 15 != 0;
      const bool open = engine.snapshot().washing_on;
      const auto events = engine.tick({on, movement_at(rng() % kMovementCount), t});
      if (open && on && prev) credited += t - *prev;
      for (const auto& e : events) {
        if (!e.report) continue;
        ++episodes;
        const double ledger_s = e.report->ledger.timebase.to_seconds(e.report->ledger.all_ticks());
        const double err = std::abs(ledger_s - credited);
        worst = std::max(worst, err);
        conserved += err <= kTickQuantumSeconds;
        credited = 0.0;
      }
      prev = t;
      t += dt(rng);
    }
    ++sequences;
  }
  return {sequences == 1000 && conserved == episodes && episodes > 0,
          fmt("%d/%d episodes over %d sequences within one tick (worst %.2e s)", conserved, episodes, sequences,
              worst)};
}

Outcome check_throughput() {
  // Rendered 640x480 frames through the full pipeline, then label-only replay.
  SyntheticEpisodeSpec s;
  s.segments = parse_segments("0:1,2:4,3:4,4:4,0:2");
  s.render_frames = true;
  s.width = 640;
  s.height = 480;
  SyntheticSource source(s);
  MonitorPipeline pipeline(default_config(), make_classifier(ClassifierSpec{}), source.fps());
  std::int64_t frames = 0;
  auto t0 = Clock::now();
  while (auto item = source.next()) {
    pipeline.step(*item, source.truth());
    ++frames;
  }
  pipeline.finish();
  const double video_rate = frames / seconds_since(t0);

  SyntheticEpisodeSpec labels_only = s;
  labels_only.render_frames = false;
  labels_only.segments.assign(200, Segment{Movement::ThumbRub, 3.0});
  AnnotationSource replay(generate_synthetic_episode(labels_only).annotation);
  MonitorPipeline replay_pipeline(default_config(), make_classifier(ClassifierSpec{}), replay.fps());
  std::int64_t labels = 0;
  t0 = Clock::now();
  while (auto item = replay.next()) {
    replay_pipeline.step(*item, replay.truth());
    ++labels;
  }
  replay_pipeline.finish();
  const double replay_rate = labels / seconds_since(t0);
  return {video_rate >= kMinLabelsPerSecond && replay_rate >= kMinLabelsPerSecond,
          fmt("640x480 pipeline %.0f frames/s, annotation replay %.0f labels/s (need >= %.0f)", video_rate,
              replay_rate, kMinLabelsPerSecond)};
}

}  // namespace

int main() {
  report("table1-identities", check_table1_identities);
  report("split-sizes", check_split_sizes);
  report("motion-rule", check_motion_rule);
  report("state-machine-oracle", check_state_machine_oracle);
  report("end-to-end-verdicts", check_end_to_end);
  report("replay-accuracy", check_replay_accuracy);
  report("ledger-conservation", check_ledger_conservation);
  report("throughput", check_throughput);
  std::printf("%d of 8 criteria failed\n", failures);
  return failures;
}
