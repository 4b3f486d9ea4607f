// handwash: command-line front end for the hand-washing compliance monitor.

#include <csignal>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "handwash/annotation.hpp"
#include "handwash/batch.hpp"
#include "handwash/config_io.hpp"
#include "handwash/dataset.hpp"
#include "handwash/errors.hpp"
#include "handwash/json_util.hpp"
#include "handwash/monitor.hpp"
#include "handwash/random.hpp"
#include "handwash/report_io.hpp"
#include "handwash/service.hpp"
#include "handwash/synthetic.hpp"
#include "handwash/y4m.hpp"

namespace fs = std::filesystem;
using namespace handwash;
using nlohmann::json;

namespace {

constexpr int kExitError = 3;

struct SourceFlags {
  std::string annotation;
  std::string video;
  std::string truth;
  std::string segments;
  double fps = 30.0;
  std::uint64_t seed = 0;
  bool render = false;
};

struct ClassifierFlags {
  std::string config_path;
  std::string kind;
  double epsilon = -1.0;
  std::string model;
  int input_size = 0;
  int constant_code = -1;
  std::int64_t seed = -1;
};

void add_source_flags(CLI::App* cmd, SourceFlags& s) {
  auto* group = cmd->add_option_group("source", "exactly one input source");
  group->add_option("--annotation", s.annotation, "replay an annotation file (labels only)");
  group->add_option("--video", s.video, "Y4M video file, or - for a live stream on stdin");
  group->add_option("--synthetic", s.segments, "synthetic episode, e.g. 0:1,2:6,3:6");
  group->require_option(1);
  cmd->add_option("--truth", s.truth, "ground-truth annotation for a video source (replay classifier)");
  cmd->add_option("--fps", s.fps, "synthetic frame rate")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", s.seed, "synthetic rendering seed");
  cmd->add_flag("--render", s.render, "render synthetic frames instead of replaying labels");
}

void add_classifier_flags(CLI::App* cmd, ClassifierFlags& c) {
  cmd->add_option("--config", c.config_path, "key-value configuration file");
  cmd->add_option("--classifier", c.kind, "replay | constant | external")
      ->check(CLI::IsMember({"replay", "constant", "external"}));
  cmd->add_option("--epsilon", c.epsilon, "replay noise rate")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--model", c.model, "model file for the external classifier");
  cmd->add_option("--input-size", c.input_size, "classifier input size in pixels");
  cmd->add_option("--constant-code", c.constant_code, "label emitted by the constant classifier");
  cmd->add_option("--classifier-seed", c.seed, "replay noise seed");
}

Rational fps_from(double fps) {
  const double rounded = std::round(fps);
  if (std::abs(fps - rounded) < 1e-9) return Rational(static_cast<std::int64_t>(rounded), 1);
  return Rational(static_cast<std::int64_t>(std::llround(fps * 1000.0)), 1000);
}

ComplianceConfig build_config(const ClassifierFlags& c) {
  ComplianceConfig cfg = c.config_path.empty() ? default_config() : load_config(c.config_path);
  if (!c.kind.empty()) cfg.classifier.kind = classifier_kind_from_name(c.kind);
  if (c.epsilon >= 0.0) cfg.classifier.noise_epsilon = c.epsilon;
  if (!c.model.empty()) cfg.classifier.model_path = c.model;
  if (c.input_size > 0) cfg.classifier.input_size = c.input_size;
  if (c.constant_code >= 0) cfg.classifier.constant_code = movement_from_code_checked(c.constant_code);
  if (c.seed >= 0) cfg.classifier.seed = static_cast<std::uint64_t>(c.seed);
  cfg.validate();
  return cfg;
}

SourceSpec build_source(const SourceFlags& s) {
  SourceSpec spec;
  if (!s.annotation.empty()) {
    spec.kind = SourceSpec::Kind::Annotation;
    spec.path = s.annotation;
  } else if (!s.video.empty()) {
    spec.kind = SourceSpec::Kind::Video;
    spec.path = s.video;
    spec.truth_path = s.truth;
  } else {
    spec.kind = SourceSpec::Kind::Synthetic;
    spec.synthetic.segments = parse_segments(s.segments);
    spec.synthetic.fps = fps_from(s.fps);
    spec.synthetic.seed = s.seed;
    spec.synthetic.render_frames = s.render;
  }
  return spec;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

volatile std::sig_atomic_t g_interrupted = 0;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hand-washing compliance monitor"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "process one episode and write its report");
  SourceFlags run_source;
  ClassifierFlags run_classifier;
  std::string run_out;
  add_source_flags(run, run_source);
  add_classifier_flags(run, run_classifier);
  run->add_option("--out", run_out, "output directory for report and statistics");

  // serve
  auto* serve = app.add_subcommand("serve", "long-running monitor with an HTTP status service");
  SourceFlags serve_source;
  ClassifierFlags serve_classifier;
  std::string bind = "127.0.0.1:8080";
  bool realtime = false;
  add_source_flags(serve, serve_source);
  add_classifier_flags(serve, serve_classifier);
  serve->add_option("--bind", bind, "host:port to listen on");
  serve->add_flag("--realtime", realtime, "pace the source at its frame rate");

  // eval
  auto* eval = app.add_subcommand("eval", "per-frame accuracy over a dataset manifest");
  std::string eval_manifest;
  std::string eval_out;
  std::string eval_split = "test";
  std::uint64_t eval_split_seed = 0;
  bool eval_episode_level = false;
  ClassifierFlags eval_classifier;
  eval->add_option("--manifest", eval_manifest, "dataset manifest")->required();
  eval->add_option("--split", eval_split, "test | all")->check(CLI::IsMember({"test", "all"}));
  eval->add_option("--split-seed", eval_split_seed, "seed of the frame shuffle");
  eval->add_flag("--episode-level", eval_episode_level, "split whole episodes instead of frames");
  eval->add_option("--out", eval_out, "directory for confusion.csv and episodes.csv");
  add_classifier_flags(eval, eval_classifier);

  // synth
  auto* synth = app.add_subcommand("synth", "generate fixtures");
  synth->require_subcommand(1);
  auto* synth_episode = synth->add_subcommand("episode", "one synthetic episode");
  std::string se_segments;
  std::string se_id = "synthetic";
  std::string se_out = ".";
  double se_fps = 30.0;
  std::uint64_t se_seed = 0;
  bool se_video = false;
  int se_width = 160;
  int se_height = 120;
  synth_episode->add_option("--segments", se_segments, "code:seconds list, e.g. 0:1,2:6,3:6")->required();
  synth_episode->add_option("--id", se_id, "episode id");
  synth_episode->add_option("--out", se_out, "output directory");
  synth_episode->add_option("--fps", se_fps, "frame rate")->check(CLI::PositiveNumber);
  synth_episode->add_option("--seed", se_seed, "rendering seed");
  synth_episode->add_flag("--video", se_video, "also write a rendered Y4M video");
  synth_episode->add_option("--width", se_width, "video width");
  synth_episode->add_option("--height", se_height, "video height");

  auto* synth_dataset = synth->add_subcommand("dataset", "a manifest of synthetic episodes");
  std::int64_t sd_single = 0;
  std::int64_t sd_double = 0;
  std::int64_t sd_unannotated = 0;
  std::int64_t sd_frames = 300;
  std::uint64_t sd_seed = 0;
  bool sd_materialize = false;
  std::string sd_out = ".";
  synth_dataset->add_option("--single", sd_single, "entries annotated once");
  synth_dataset->add_option("--double", sd_double, "entries annotated twice");
  synth_dataset->add_option("--unannotated", sd_unannotated, "videos without annotations");
  synth_dataset->add_option("--frames", sd_frames, "frames per episode");
  synth_dataset->add_option("--seed", sd_seed, "label seed");
  synth_dataset->add_flag("--materialize", sd_materialize, "write the annotation files too");
  synth_dataset->add_option("--out", sd_out, "output directory");

  // stats
  auto* stats = app.add_subcommand("stats", "dataset manifest statistics");
  std::string stats_manifest;
  stats->add_option("--manifest", stats_manifest, "dataset manifest")->required();

  // split
  auto* split = app.add_subcommand("split", "train/validation/test assignment");
  std::int64_t split_n = 0;
  std::vector<double> split_ratios{0.7, 0.2, 0.1};
  std::uint64_t split_seed = 0;
  std::string split_out;
  split->add_option("--n", split_n, "number of items")->required()->check(CLI::NonNegativeNumber);
  split->add_option("--ratios", split_ratios, "train,validation,test")->delimiter(',')->expected(3);
  split->add_option("--seed", split_seed, "shuffle seed");
  split->add_option("--out", split_out, "write the full index assignment as JSON");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      RunSpec spec;
      spec.source = build_source(run_source);
      spec.config = build_config(run_classifier);
      spec.output_dir = run_out;
      const RunResult result = run_episode(spec);
      if (result.report) {
        std::cout << serialize_report(*result.report, result.episode_id);
      } else {
        print_json({{"episode_id", result.episode_id}, {"outcome", "no_episode"},
                    {"frames", result.frames_processed}});
      }
      return exit_code_for(result);
    }

    if (serve->parsed()) {
      RunSpec spec;
      spec.source = build_source(serve_source);
      spec.config = build_config(serve_classifier);
      const auto colon = bind.rfind(':');
      if (colon == std::string::npos) throw ConfigError("--bind expects host:port");
      MonitorService service(spec, ServiceOptions{realtime});
      const int port = service.start(bind.substr(0, colon), std::stoi(bind.substr(colon + 1)));
      std::cerr << "serving on " << bind.substr(0, colon) << ":" << port << "\n";
      std::signal(SIGINT, [](int) { g_interrupted = 1; });
      std::signal(SIGTERM, [](int) { g_interrupted = 1; });
      while (!g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
      service.stop();
      return 0;
    }

    if (eval->parsed()) {
      const ComplianceConfig cfg = build_config(eval_classifier);
      BatchOptions options;
      options.split = eval_split == "all" ? EvalSplit::All : EvalSplit::Test;
      options.split_seed = eval_split_seed;
      options.episode_level = eval_episode_level;
      options.base_dir = fs::path(eval_manifest).parent_path().string();
      const BatchResult r = batch_evaluate(load_manifest(eval_manifest), cfg.classifier, options);
      if (!eval_out.empty()) {
        json_util::write_file((fs::path(eval_out) / "confusion.csv").string(), r.confusion.to_csv());
        json_util::write_file((fs::path(eval_out) / "episodes.csv").string(), episode_evaluations_csv(r));
      }
      print_json({{"frames", r.confusion.total()},
                  {"correct", r.confusion.correct()},
                  {"accuracy", r.confusion.accuracy()},
                  {"episodes", r.episodes.size()}});
      return 0;
    }

    if (synth_episode->parsed()) {
      SyntheticEpisodeSpec spec;
      spec.episode_id = se_id;
      spec.segments = parse_segments(se_segments);
      spec.fps = fps_from(se_fps);
      spec.seed = se_seed;
      spec.render_frames = se_video;
      spec.width = se_width;
      spec.height = se_height;
      const SyntheticEpisode ep = generate_synthetic_episode(spec);
      const fs::path dir(se_out);
      fs::create_directories(dir);
      save_annotation(ep.annotation, (dir / (se_id + ".ann.json")).string());
      json_util::write_file((dir / (se_id + ".stats.csv")).string(),
                            statistics_csv(se_id, movement_durations(ep.annotation)));
      if (se_video) {
        std::ofstream video(dir / (se_id + ".y4m"), std::ios::binary);
        Y4mWriter writer(video, spec.width, spec.height, 3, spec.fps);
        for (std::int64_t i = 0; i < ep.annotation.frame_count(); ++i) writer.write(ep.frame(i));
      }
      print_json({{"episode_id", se_id}, {"frames", ep.annotation.frame_count()}});
      return 0;
    }

    if (synth_dataset->parsed()) {
      if (sd_single < 0 || sd_double < 0 || sd_unannotated < 0 || sd_frames < 0) {
        throw ValidationError("counts must be non-negative");
      }
      const fs::path dir(sd_out);
      fs::create_directories(dir);
      DatasetManifest manifest;
      Rng rng(sd_seed);
      const std::int64_t total = sd_single + sd_double;
      for (std::int64_t i = 0; i < total; ++i) {
        ManifestEntry e;
        char id[32];
        std::snprintf(id, sizeof(id), "ep%06lld", static_cast<long long>(i));
        e.episode_id = id;
        e.video_path = std::string("videos/") + id + ".y4m";
        e.frame_count = sd_frames;
        const int copies = i < sd_single ? 1 : 2;
        for (int k = 0; k < copies; ++k) {
          e.annotation_paths.push_back(std::string("annotations/") + id + ".a" + std::to_string(k + 1) + ".ann.json");
        }
        if (sd_materialize) {
          EpisodeAnnotation a;
          a.episode_id = id;
          for (std::int64_t f = 0; f < sd_frames; ++f) {
            a.labels.push_back(movement_at(uniform_below(rng, kMovementCount)));
          }
          for (int k = 0; k < copies; ++k) {
            a.annotator_id = "annotator" + std::to_string(k + 1);
            save_annotation(a, (dir / e.annotation_paths[k]).string());
          }
        }
        manifest.entries.push_back(std::move(e));
      }
      for (std::int64_t i = 0; i < sd_unannotated; ++i) {
        manifest.unannotated_videos.push_back("videos/unannotated" + std::to_string(i) + ".y4m");
      }
      save_manifest(manifest, (dir / "manifest.json").string());
      print_json({{"manifest", (dir / "manifest.json").string()}, {"entries", manifest.entries.size()}});
      return 0;
    }

    if (stats->parsed()) {
      const DatasetStats s = dataset_stats(load_manifest(stats_manifest));
      print_json({{"total_videos", s.total_videos},
                  {"total_annotations", s.total_annotations},
                  {"total_annotated_files", s.total_annotated_files},
                  {"annotated_once", s.annotated_once},
                  {"annotated_twice", s.annotated_twice}});
      return 0;
    }

    if (split->parsed()) {
      const SplitRatios ratios{split_ratios[0], split_ratios[1], split_ratios[2]};
      const SplitAssignment a = split_dataset(split_n, ratios, split_seed);
      const json sizes = {{"train", a.train.size()}, {"validation", a.validation.size()}, {"test", a.test.size()}};
      if (!split_out.empty()) {
        json_util::write_file(split_out, json{{"seed", a.seed},
                                              {"sizes", sizes},
                                              {"train", a.train},
                                              {"validation", a.validation},
                                              {"test", a.test}}
                                                 .dump() +
                                             "\n");
      }
      print_json({{"n", split_n}, {"seed", a.seed}, {"sizes", sizes}});
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return 0;
}
