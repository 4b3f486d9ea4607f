#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "handwash/monitor.hpp"

namespace httplib {
class Server;
}

namespace handwash {

enum class StatusEventKind { StateChange, Progress, Report, Error };

std::string_view status_event_kind_name(StatusEventKind k);

struct StatusEvent {
  std::uint64_t seq = 0;
  double t = 0.0;  // stream time
  StatusEventKind kind = StatusEventKind::Progress;
  EngineSnapshot snapshot;
  std::optional<Transition> transition;
  std::optional<EpisodeReport> report;
  std::string episode_id;
  std::string message;  // error text
};

nlohmann::json status_event_to_json(const StatusEvent& e);

struct ServiceOptions {
  /// Pace the source at its frame rate instead of running flat out.
  bool realtime = false;
  std::size_t event_history = 4096;
};

/// Long-running monitor: one processing thread advances the pipeline while
/// any number of HTTP readers observe status, events, config and reports.
///
///   GET  /status         {"washing": bool, "movement": int}
///   GET  /events         text/event-stream of StatusEvent; ?from=SEQ or
///                        Last-Event-ID resumes after a reconnect
///   GET  /config         current configuration
///   PUT  /config         partial JSON update, applied between episodes
///   GET  /report/latest  last episode report (404 before the first)
///   POST /run            restart processing of the source
class MonitorService {
 public:
  MonitorService(RunSpec spec, ServiceOptions options = {});
  ~MonitorService();
  MonitorService(const MonitorService&) = delete;
  MonitorService& operator=(const MonitorService&) = delete;

  /// Binds (port 0 picks a free port), starts serving and processing.
  /// Returns the bound port; throws IoError on bind failure.
  int start(const std::string& host, int port);
  void stop();

  /// Restarts the source from the beginning with the current config.
  void restart_run();
  /// Blocks until the current run has exhausted its source.
  bool wait_run_finished(std::chrono::milliseconds timeout);

  PollResult status() const;
  EngineSnapshot snapshot() const;
  std::vector<StatusEvent> events_after(std::uint64_t seq) const;
  std::optional<std::string> latest_report() const;
  ComplianceConfig config() const;
  /// Throws ConfigError.
  void update_config(const ComplianceConfig& cfg);

 private:
  void run_loop(std::uint64_t generation);
  void publish(StatusEvent e);
  void set_snapshot(const EngineSnapshot& s);
  void start_run();
  void join_run();
  void install_routes();

  RunSpec spec_;
  ServiceOptions options_;
  std::unique_ptr<httplib::Server> server_;
  std::thread http_thread_;
  std::thread run_thread_;

  std::mutex run_control_mutex_;  // serializes start/restart/stop of the run thread
  mutable std::mutex mutex_;
  std::condition_variable events_cv_;
  std::deque<StatusEvent> events_;
  std::uint64_t next_seq_ = 1;
  EngineSnapshot snapshot_;
  std::optional<std::string> latest_report_;
  ComplianceConfig config_;
  std::optional<ComplianceConfig> pending_config_;
  bool run_finished_ = false;
  std::atomic<bool> cancel_{false};
  std::atomic<bool> stopping_{false};
  std::uint64_t generation_ = 0;
};

}  // namespace handwash
