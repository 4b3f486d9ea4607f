#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "handwash/annotation.hpp"
#include "handwash/classifier.hpp"
#include "handwash/engine.hpp"
#include "handwash/motion_gate.hpp"
#include "handwash/smoothing.hpp"
#include "handwash/synthetic.hpp"
#include "handwash/y4m.hpp"

namespace handwash {

/// One unit of input: a frame, or only an index plus a motion hint for
/// label-only replay.
struct SourceItem {
  std::int64_t index = 0;
  std::optional<Frame> frame;
  std::optional<double> motion_hint;
};

class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual std::optional<SourceItem> next() = 0;
  virtual Rational fps() const = 0;
  /// Ground truth for replay classification, if the source has one.
  virtual const EpisodeAnnotation* truth() const = 0;
  virtual std::string name() const = 0;
};

/// Replays an annotation's labels without pixels. Labelled washing frames
/// stand in for motion (hint 1), idle frames for stillness (hint 0).
class AnnotationSource final : public FrameSource {
 public:
  explicit AnnotationSource(EpisodeAnnotation annotation) : annotation_(std::move(annotation)) {}
  std::optional<SourceItem> next() override;
  Rational fps() const override { return annotation_.fps; }
  const EpisodeAnnotation* truth() const override { return &annotation_; }
  std::string name() const override { return annotation_.episode_id; }

 private:
  EpisodeAnnotation annotation_;
  std::int64_t cursor_ = 0;
};

/// Synthetic episode; renders frames when the spec asks for them.
class SyntheticSource final : public FrameSource {
 public:
  explicit SyntheticSource(const SyntheticEpisodeSpec& spec) : episode_(generate_synthetic_episode(spec)) {}
  std::optional<SourceItem> next() override;
  Rational fps() const override { return episode_.annotation.fps; }
  const EpisodeAnnotation* truth() const override { return &episode_.annotation; }
  std::string name() const override { return episode_.annotation.episode_id; }

 private:
  SyntheticEpisode episode_;
  std::int64_t cursor_ = 0;
};

/// Y4M file or stream ("-" reads standard input).
class VideoSource final : public FrameSource {
 public:
  VideoSource(const std::string& path, std::optional<EpisodeAnnotation> truth);
  std::optional<SourceItem> next() override;
  Rational fps() const override { return reader_->fps(); }
  const EpisodeAnnotation* truth() const override { return truth_ ? &*truth_ : nullptr; }
  std::string name() const override { return name_; }

 private:
  std::unique_ptr<Y4mReader> reader_;
  std::optional<EpisodeAnnotation> truth_;
  std::string name_;
  std::int64_t cursor_ = 0;
};

struct SourceSpec {
  enum class Kind { Annotation, Synthetic, Video };
  Kind kind = Kind::Synthetic;
  std::string path;        // annotation file or video ("-" = stdin)
  std::string truth_path;  // optional annotation for a video source
  SyntheticEpisodeSpec synthetic;
};

/// Throws IoError / ParseError / ValidationError for unreadable sources.
std::unique_ptr<FrameSource> open_source(const SourceSpec& spec);

struct RunSpec {
  SourceSpec source;
  ComplianceConfig config = default_config();
  std::string output_dir;  // empty: write nothing
};

/// gate -> classifier -> smoothing -> engine, one source frame at a time.
///
/// Frame i covers [i/fps, (i+1)/fps). The engine runs on a one-tick-per-frame
/// clock, so every frame inside an episode credits exactly one frame to its
/// smoothed label. Frames seen while the gate is still deciding are held
/// back and credited retroactively once the episode is confirmed, so the
/// first seconds of washing are not lost to the minimum-duration rule.
class MonitorPipeline {
 public:
  MonitorPipeline(const ComplianceConfig& cfg, std::unique_ptr<Classifier> classifier, Rational fps);

  struct StepResult {
    double score = 0.0;
    Movement label = Movement::Idle;
    GateEvent gate;
    std::vector<EngineEvent> engine;
  };

  StepResult step(const SourceItem& item, const EpisodeAnnotation* truth);
  /// End of stream: closes the gate and any open episode.
  StepResult finish();

  /// Applies now if idle between episodes, otherwise at the next idle step.
  void request_config(const ComplianceConfig& cfg);

  const Engine& engine() const { return engine_; }
  const GateState& gate() const { return gate_; }
  Rational fps() const { return fps_; }

 private:
  double frame_start(std::int64_t i) const { return fps_.periods_to_seconds(i); }
  void apply_pending_config();

  ComplianceConfig cfg_;
  std::optional<ComplianceConfig> pending_;
  std::unique_ptr<Classifier> classifier_;
  Rational fps_;
  Engine engine_;
  GateState gate_;
  MajoritySmoother smoother_;
  std::optional<Frame> prev_frame_;
  std::vector<std::pair<std::int64_t, Movement>> held_;
  std::optional<std::int64_t> last_index_;
};

struct RunResult {
  std::string episode_id;
  std::optional<EpisodeReport> report;  // nullopt: no episode detected
  std::int64_t frames_processed = 0;
};

/// Runs the source until the first episode report (or exhaustion). Writes
/// <id>.report.json and <id>.stats.csv into output_dir when a report exists.
RunResult run_episode(const RunSpec& spec);

/// Exit status for a run: 0 Ok, 1 Failed, 2 no episode.
int exit_code_for(const RunResult& r);

/// Timed labels (runs) of an annotation, for reference_verdict with a
/// frame clock.
std::vector<TimedLabel> timed_labels(const EpisodeAnnotation& a);

}  // namespace handwash
