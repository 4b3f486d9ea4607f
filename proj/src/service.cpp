#include "handwash/service.hpp"

#include <cmath>

#include <httplib.h>

#include "handwash/config_io.hpp"
#include "handwash/errors.hpp"
#include "handwash/report_io.hpp"

namespace handwash {

using nlohmann::json;

std::string_view status_event_kind_name(StatusEventKind k) {
  switch (k) {
    case StatusEventKind::StateChange: return "state_change";
    case StatusEventKind::Progress: return "progress";
    case StatusEventKind::Report: return "report";
    case StatusEventKind::Error: return "error";
  }
  return "progress";
}

json status_event_to_json(const StatusEvent& e) {
  json j = {{"seq", e.seq},
            {"t", e.t},
            {"kind", status_event_kind_name(e.kind)},
            {"episode_id", e.episode_id},
            {"snapshot", snapshot_to_json(e.snapshot)}};
  if (e.transition) {
    j["transition"] = {{"from", state_name(e.transition->from)},
                       {"to", state_name(e.transition->to)},
                       {"t", e.transition->t}};
  }
  if (e.report) j["report"] = report_to_json(*e.report, e.episode_id);
  if (!e.message.empty()) j["message"] = e.message;
  return j;
}

MonitorService::MonitorService(RunSpec spec, ServiceOptions options)
    : spec_(std::move(spec)), options_(options), config_(spec_.config) {
  config_.validate();
  snapshot_ = Engine(config_).snapshot();
}

MonitorService::~MonitorService() { stop(); }

int MonitorService::start(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  install_routes();
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
  } else if (!server_->bind_to_port(host, port)) {
    throw IoError("cannot bind " + host + ":" + std::to_string(port));
  }
  http_thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  std::lock_guard control(run_control_mutex_);
  start_run();
  return bound;
}

void MonitorService::stop() {
  if (stopping_.exchange(true)) return;
  cancel_ = true;
  events_cv_.notify_all();
  {
    std::lock_guard control(run_control_mutex_);
    join_run();
  }
  if (server_) server_->stop();
  if (http_thread_.joinable()) http_thread_.join();
}

void MonitorService::start_run() {
  std::uint64_t generation;
  {
    std::lock_guard lock(mutex_);
    run_finished_ = false;
    generation = ++generation_;
  }
  cancel_ = false;
  run_thread_ = std::thread([this, generation] { run_loop(generation); });
}

void MonitorService::join_run() {
  if (run_thread_.joinable()) run_thread_.join();
}

void MonitorService::restart_run() {
  std::lock_guard control(run_control_mutex_);
  cancel_ = true;
  join_run();
  if (stopping_) return;
  start_run();
}

bool MonitorService::wait_run_finished(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  return events_cv_.wait_for(lock, timeout, [this] { return run_finished_; });
}

PollResult MonitorService::status() const {
  std::lock_guard lock(mutex_);
  return {snapshot_.washing_on, code_of(snapshot_.movement)};
}

EngineSnapshot MonitorService::snapshot() const {
  std::lock_guard lock(mutex_);
  return snapshot_;
}

std::vector<StatusEvent> MonitorService::events_after(std::uint64_t seq) const {
  std::lock_guard lock(mutex_);
  std::vector<StatusEvent> out;
  for (const StatusEvent& e : events_) {
    if (e.seq > seq) out.push_back(e);
  }
  return out;
}

std::optional<std::string> MonitorService::latest_report() const {
  std::lock_guard lock(mutex_);
  return latest_report_;
}

ComplianceConfig MonitorService::config() const {
  std::lock_guard lock(mutex_);
  return config_;
}

void MonitorService::update_config(const ComplianceConfig& cfg) {
  cfg.validate();
  std::lock_guard lock(mutex_);
  config_ = cfg;
  pending_config_ = cfg;
}

void MonitorService::publish(StatusEvent e) {
  {
    std::lock_guard lock(mutex_);
    e.seq = next_seq_++;
    if (e.report) latest_report_ = serialize_report(*e.report, e.episode_id);
    events_.push_back(std::move(e));
    while (events_.size() > options_.event_history) events_.pop_front();
  }
  events_cv_.notify_all();
}

void MonitorService::set_snapshot(const EngineSnapshot& s) {
  std::lock_guard lock(mutex_);
  snapshot_ = s;
}

void MonitorService::run_loop(std::uint64_t generation) {
  const ComplianceConfig cfg = config();
  {
    std::lock_guard lock(mutex_);
    pending_config_.reset();
  }
  std::unique_ptr<MonitorPipeline> pipeline;
  std::string episode_id;
  double stream_t = 0.0;

  auto handle = [&](const MonitorPipeline::StepResult& r, double t) {
    const EngineSnapshot snap = pipeline->engine().snapshot();
    set_snapshot(snap);
    for (const EngineEvent& ev : r.engine) {
      StatusEvent e;
      e.t = t;
      e.kind = StatusEventKind::StateChange;
      e.snapshot = snap;
      e.transition = ev.transition;
      e.episode_id = episode_id;
      publish(e);
      if (ev.report) {
        e.kind = StatusEventKind::Report;
        e.transition.reset();
        e.report = ev.report;
        publish(std::move(e));
      }
    }
  };

  try {
    auto source = open_source(spec_.source);
    episode_id = source->name();
    pipeline = std::make_unique<MonitorPipeline>(cfg, make_classifier(cfg.classifier), source->fps());
    set_snapshot(pipeline->engine().snapshot());

    const auto wall_start = std::chrono::steady_clock::now();
    double next_progress = 0.0;
    try {
      while (!cancel_) {
        auto item = source->next();
        if (!item) break;
        std::optional<ComplianceConfig> pending;
        {
          std::lock_guard lock(mutex_);
          pending.swap(pending_config_);
        }
        if (pending) pipeline->request_config(*pending);

        stream_t = source->fps().periods_to_seconds(item->index + 1);
        if (options_.realtime) {
          std::this_thread::sleep_until(wall_start + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                         std::chrono::duration<double>(stream_t)));
        }
        handle(pipeline->step(*item, source->truth()), stream_t);

        const double period = pipeline->engine().config().poll_period_s;
        if (stream_t >= next_progress) {
          StatusEvent e;
          e.t = stream_t;
          e.kind = StatusEventKind::Progress;
          e.snapshot = pipeline->engine().snapshot();
          e.episode_id = episode_id;
          publish(std::move(e));
          next_progress = (std::floor(stream_t / period) + 1.0) * period;
        }
      }
      if (!cancel_) handle(pipeline->finish(), stream_t);
    } catch (const std::exception& err) {
      StatusEvent e;
      e.t = stream_t;
      e.kind = StatusEventKind::Error;
      e.snapshot = pipeline->engine().snapshot();
      e.episode_id = episode_id;
      e.message = err.what();
      publish(std::move(e));
      try {
        handle(pipeline->finish(), stream_t);
      } catch (const std::exception&) {
      }
    }
  } catch (const std::exception& err) {
    StatusEvent e;
    e.kind = StatusEventKind::Error;
    e.snapshot = snapshot();
    e.episode_id = episode_id;
    e.message = err.what();
    publish(std::move(e));
  }

  {
    std::lock_guard lock(mutex_);
    if (generation == generation_) run_finished_ = true;
  }
  events_cv_.notify_all();
}

void MonitorService::install_routes() {
  auto& svr = *server_;
  svr.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
  svr.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) {
    res.set_header("Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS");
    res.set_header("Access-Control-Allow-Headers", "Content-Type, Last-Event-ID");
    res.status = 204;
  });

  svr.Get("/status", [this](const httplib::Request&, httplib::Response& res) {
    const PollResult p = status();
    res.set_content(json{{"washing", p.washing}, {"movement", p.movement}}.dump(), "application/json");
  });

  svr.Get("/config", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(config_to_json(config()).dump(2), "application/json");
  });

  svr.Put("/config", [this](const httplib::Request& req, httplib::Response& res) {
    try {
      const json body = json::parse(req.body);
      const ComplianceConfig updated = config_from_json(body, config());
      update_config(updated);
      res.set_content(config_to_json(updated).dump(2), "application/json");
    } catch (const std::exception& e) {
      res.status = 400;
      res.set_content(json{{"error", e.what()}}.dump(), "application/json");
    }
  });

  svr.Get("/report/latest", [this](const httplib::Request&, httplib::Response& res) {
    if (auto report = latest_report()) {
      res.set_content(*report, "application/json");
    } else {
      res.status = 404;
      res.set_content(json{{"error", "no report yet"}}.dump(), "application/json");
    }
  });

  svr.Post("/run", [this](const httplib::Request&, httplib::Response& res) {
    restart_run();
    res.status = 202;
    res.set_content(json{{"status", "restarted"}}.dump(), "application/json");
  });

  svr.Get("/events", [this](const httplib::Request& req, httplib::Response& res) {
    auto cursor = std::make_shared<std::uint64_t>(0);
    try {
      if (req.has_param("from")) {
        const std::uint64_t from = std::stoull(req.get_param_value("from"));
        *cursor = from > 0 ? from - 1 : 0;
      } else if (req.has_header("Last-Event-ID")) {
        *cursor = std::stoull(req.get_header_value("Last-Event-ID"));
      }
    } catch (const std::logic_error&) {
      res.status = 400;
      res.set_content(json{{"error", "event cursor must be a non-negative integer"}}.dump(), "application/json");
      return;
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, cursor](std::size_t, httplib::DataSink& sink) {
      std::vector<StatusEvent> batch;
      {
        std::unique_lock lock(mutex_);
        events_cv_.wait_for(lock, std::chrono::milliseconds(200), [&] {
          return stopping_.load() || (!events_.empty() && events_.back().seq > *cursor);
        });
      }
      if (stopping_) {
        sink.done();
        return false;
      }
      batch = events_after(*cursor);
      for (const StatusEvent& e : batch) {
        const std::string frame = "id: " + std::to_string(e.seq) + "\nevent: " +
                                  std::string(status_event_kind_name(e.kind)) + "\ndata: " +
                                  status_event_to_json(e).dump() + "\n\n";
        if (!sink.write(frame.data(), frame.size())) return false;
        *cursor = e.seq;
      }
      if (batch.empty()) {
        static const std::string keepalive = ": keepalive\n\n";
        if (!sink.write(keepalive.data(), keepalive.size())) return false;
      }
      return true;
    });
  });
}

}  // namespace handwash
