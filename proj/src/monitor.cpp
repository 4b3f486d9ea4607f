#include "handwash/monitor.hpp"

#include <filesystem>

#include "handwash/errors.hpp"
#include "handwash/json_util.hpp"
#include "handwash/report_io.hpp"

namespace handwash {

std::optional<SourceItem> AnnotationSource::next() {
  if (cursor_ >= annotation_.frame_count()) return std::nullopt;
  SourceItem item;
  item.index = cursor_;
  item.motion_hint = is_washing(annotation_.labels[static_cast<std::size_t>(cursor_)]) ? 1.0 : 0.0;
  ++cursor_;
  return item;
}

std::optional<SourceItem> SyntheticSource::next() {
  if (cursor_ >= episode_.annotation.frame_count()) return std::nullopt;
  SourceItem item;
  item.index = cursor_;
  if (episode_.renderer) {
    item.frame = episode_.frame(cursor_);
  } else {
    item.motion_hint = is_washing(episode_.annotation.labels[static_cast<std::size_t>(cursor_)]) ? 1.0 : 0.0;
  }
  ++cursor_;
  return item;
}

VideoSource::VideoSource(const std::string& path, std::optional<EpisodeAnnotation> truth)
    : reader_(Y4mReader::open(path)), truth_(std::move(truth)) {
  name_ = truth_ ? truth_->episode_id
                 : (path == "-" ? std::string("live") : std::filesystem::path(path).stem().string());
}

std::optional<SourceItem> VideoSource::next() {
  auto frame = reader_->next();
  if (!frame) return std::nullopt;
  SourceItem item;
  item.index = cursor_++;
  item.frame = std::move(frame);
  return item;
}

std::unique_ptr<FrameSource> open_source(const SourceSpec& spec) {
  switch (spec.kind) {
    case SourceSpec::Kind::Annotation:
      return std::make_unique<AnnotationSource>(load_annotation(spec.path));
    case SourceSpec::Kind::Synthetic:
      return std::make_unique<SyntheticSource>(spec.synthetic);
    case SourceSpec::Kind::Video: {
      std::optional<EpisodeAnnotation> truth;
      if (!spec.truth_path.empty()) truth = load_annotation(spec.truth_path);
      return std::make_unique<VideoSource>(spec.path, std::move(truth));
    }
  }
  throw ValidationError("unknown source kind");
}

MonitorPipeline::MonitorPipeline(const ComplianceConfig& cfg, std::unique_ptr<Classifier> classifier,
                                 Rational fps)
    : cfg_(cfg),
      classifier_(std::move(classifier)),
      fps_(fps),
      engine_(cfg, Timebase::frames(fps)),
      smoother_(cfg.smoothing_window) {}

void MonitorPipeline::request_config(const ComplianceConfig& cfg) {
  cfg.validate();
  pending_ = cfg;
  apply_pending_config();
}

void MonitorPipeline::apply_pending_config() {
  if (!pending_ || engine_.state() != EngineState::Waiting || gate_.phase != GatePhase::Quiet) return;
  engine_.reconfigure(*pending_);
  if (pending_->smoothing_window != cfg_.smoothing_window) {
    smoother_ = MajoritySmoother(pending_->smoothing_window);
  }
  cfg_ = std::move(*pending_);
  pending_.reset();
}

MonitorPipeline::StepResult MonitorPipeline::step(const SourceItem& item, const EpisodeAnnotation* truth) {
  if (last_index_ && item.index <= *last_index_) {
    throw TimeOrderError("source frame indices must increase");
  }
  last_index_ = item.index;
  apply_pending_config();

  StepResult out;
  static const Frame kNoPixels;
  const Frame& pixels = item.frame ? *item.frame : kNoPixels;
  if (item.frame) {
    out.score = prev_frame_ ? motion_score(*prev_frame_, *item.frame) : 0.0;
    prev_frame_ = *item.frame;
  } else {
    out.score = item.motion_hint.value_or(0.0);
  }
  if (!item.frame && classifier_->needs_pixels()) {
    throw ClassifierError("classifier needs pixel data but the source has none");
  }

  const ClassScores scores = classifier_->classify(pixels, FrameContext{item.index, truth});
  out.label = smoother_.push(scores.argmax());

  const GatePhase before = gate_.phase;
  std::tie(gate_, out.gate) = update_gate(gate_, out.score, frame_start(item.index), cfg_.gate);

  auto append = [&](std::vector<EngineEvent> events) {
    for (auto& e : events) out.engine.push_back(std::move(e));
  };

  switch (out.gate.kind) {
    case GateEventKind::None:
      if (gate_.phase == GatePhase::MotionPending) {
        held_.emplace_back(item.index, out.label);
      } else if (gate_.phase == GatePhase::Recording) {
        append(engine_.tick({true, out.label, frame_start(item.index + 1)}));
      } else if (before == GatePhase::MotionPending) {
        held_.clear();  // motion too short; never became an episode
      }
      break;
    case GateEventKind::EpisodeStarted: {
      held_.emplace_back(item.index, out.label);
      const auto& [first_index, first_label] = held_.front();
      append(engine_.tick({true, first_label, frame_start(first_index)}));
      for (const auto& [index, label] : held_) {
        append(engine_.tick({true, label, frame_start(index + 1)}));
      }
      held_.clear();
      break;
    }
    case GateEventKind::EpisodeEnded:
      append(engine_.tick({false, Movement::Idle, frame_start(item.index + 1)}));
      break;
  }
  apply_pending_config();
  return out;
}

MonitorPipeline::StepResult MonitorPipeline::finish() {
  StepResult out;
  std::tie(gate_, out.gate) = flush_gate(gate_);
  held_.clear();
  const double t = frame_start(last_index_.value_or(-1) + 1);
  const EngineState before = engine_.state();
  if (auto report = engine_.finalize(t)) {
    if (before == EngineState::Ok) {
      out.engine.push_back({{EngineState::Ok, EngineState::Waiting, t}, *report});
    } else {
      out.engine.push_back({{EngineState::InProgress, EngineState::Failed, t}, *report});
      out.engine.push_back({{EngineState::Failed, EngineState::Waiting, t}, std::nullopt});
    }
  }
  apply_pending_config();
  return out;
}

namespace {

std::optional<EpisodeReport> report_in(const MonitorPipeline::StepResult& r) {
  for (const EngineEvent& e : r.engine) {
    if (e.report) return e.report;
  }
  return std::nullopt;
}

}  // namespace

RunResult run_episode(const RunSpec& spec) {
  spec.config.validate();
  auto source = open_source(spec.source);
  MonitorPipeline pipeline(spec.config, make_classifier(spec.config.classifier), source->fps());

  RunResult result;
  result.episode_id = source->name();
  while (auto item = source->next()) {
    ++result.frames_processed;
    if ((result.report = report_in(pipeline.step(*item, source->truth())))) break;
  }
  if (!result.report) result.report = report_in(pipeline.finish());

  if (result.report && !spec.output_dir.empty()) {
    const auto dir = std::filesystem::path(spec.output_dir);
    json_util::write_file((dir / (result.episode_id + ".report.json")).string(),
                          serialize_report(*result.report, result.episode_id));
    json_util::write_file((dir / (result.episode_id + ".stats.csv")).string(),
                          ledger_statistics_csv(result.episode_id, result.report->ledger));
  }
  return result;
}

int exit_code_for(const RunResult& r) {
  if (!r.report) return 2;
  return r.report->verdict == Verdict::Ok ? 0 : 1;
}

std::vector<TimedLabel> timed_labels(const EpisodeAnnotation& a) {
  std::vector<TimedLabel> out;
  for (const LabelRun& run : to_runs(a.labels)) {
    out.push_back({run.code, a.fps.periods_to_seconds(run.end - run.start)});
  }
  return out;
}

}  // namespace handwash
