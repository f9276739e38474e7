#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <mutex>
#include <thread>
#include <vector>

#include "hx3d/server/snapshot.hpp"

namespace hx3d::server {

// A tick publishes when it starts a new publish period, which coalesces
// tick_hz / publish_hz ticks per snapshot.
inline bool publish_due(std::int64_t tick, double tick_hz, double publish_hz) {
  const auto slot = [&](std::int64_t t) {
    return static_cast<std::int64_t>(std::floor(static_cast<double>(t) * publish_hz / tick_hz));
  };
  return slot(tick) > slot(tick - 1);
}

struct Ack {
  std::uint64_t seq = 0;
  std::int64_t apply_tick = 0;
  std::string target;
};

// One loop thread owns SimState. Handlers call submit() and latest() /
// wait_newer(); both only touch small mutex-guarded slots.
class Engine {
 public:
  explicit Engine(SimSettings settings) : settings_(std::move(settings)), state_(initial_state(settings_)) {
    if (!(settings_.tick_hz > 0.0) || !(settings_.publish_hz > 0.0) || settings_.publish_hz > settings_.tick_hz)
      throw std::invalid_argument("need 0 < publish rate <= tick rate");
    publish();
  }

  ~Engine() { stop(); }
  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  const SimSettings& settings() const { return settings_; }

  // Validates and queues; throws CommandError on rejection.
  Ack submit(const json& j) { return submit(parse_command(j)); }

  Ack submit(Command c) {
    QueuedCommand q;
    if (const auto* f = std::get_if<SceneFieldCommand>(&c.body)) {
      const SnapshotPtr snap = latest();
      auto it = snap->scenes.find(f->scene);
      if (it == snap->scenes.end()) detail::invalid("no scene '" + f->scene + "'");
      q.update = typed_update(*it->second, *f);
    } else if (const auto* a = std::get_if<AttachmentCommand>(&c.body)) {
      if (settings_.attachments_dir.empty()) detail::invalid("no attachment directory configured");
      try {
        linac::read_attachment(settings_.attachments_dir, a->name);
      } catch (const linac::LinacError& e) {
        detail::invalid(e.what());
      }
    }
    q.command = std::move(c);
    std::lock_guard lock(queue_mutex_);
    q.seq = ++last_seq_;
    Ack ack{q.seq, next_apply_tick_, std::string(target_name(q.command.body))};
    queue_.push_back(std::move(q));
    return ack;
  }

  SnapshotPtr latest() const {
    std::lock_guard lock(snap_mutex_);
    return latest_;
  }

  // Latest snapshot newer than `after_tick`, or null on timeout / stop.
  // Intermediate snapshots are never queued, so a slow reader skips them.
  SnapshotPtr wait_newer(std::int64_t after_tick, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(snap_mutex_);
    snap_cv_.wait_for(lock, timeout, [&] { return latest_->tick > after_tick || stopping_; });
    return latest_->tick > after_tick ? latest_ : nullptr;
  }

  // Manual stepping; not for use while the loop thread runs.
  void run_ticks(std::int64_t n) {
    for (std::int64_t i = 0; i < n; ++i) tick_once();
  }

  void start() {
    if (thread_.joinable()) return;
    {
      std::lock_guard lock(snap_mutex_);
      stopping_ = false;
    }
    running_ = true;
    thread_ = std::thread([this] { loop(); });
  }

  void stop() {
    running_ = false;
    {
      std::lock_guard lock(snap_mutex_);
      stopping_ = true;
    }
    snap_cv_.notify_all();
    if (thread_.joinable()) thread_.join();
  }

  bool running() const { return running_; }

  std::int64_t ticks_done() const { return ticks_done_.load(); }

 private:
  void tick_once() {
    std::vector<QueuedCommand> batch;
    {
      std::lock_guard lock(queue_mutex_);
      batch.swap(queue_);
      next_apply_tick_ = state_.tick + 2;
    }
    ++state_.tick;
    for (const auto& q : batch) apply_command(state_, settings_, q);
    state_.electrolysis = electrolysis::step_electrolysis(state_.electrolysis, 1.0 / settings_.tick_hz);
    if (publish_due(state_.tick, settings_.tick_hz, settings_.publish_hz)) publish();
    ticks_done_.store(state_.tick);
  }

  void publish() {
    // Collision geometry only changes with commands, so the report is cached.
    auto rev = state_.scene_revisions.find(settings_.linac_scene);
    const std::uint64_t revision = rev == state_.scene_revisions.end() ? 0 : rev->second;
    if (!report_ || !(report_->config == state_.linac) || geometry_revision_ != revision) {
      report_ = linac::check_collision(state_.linac, state_.geometry, settings_.clearance);
      geometry_revision_ = revision;
    }
    SnapshotPtr snap = make_snapshot(state_, settings_, *report_);
    {
      std::lock_guard lock(snap_mutex_);
      latest_ = std::move(snap);
    }
    snap_cv_.notify_all();
  }

  void loop() {
    using clock = std::chrono::steady_clock;
    const auto period = std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(1.0 / settings_.tick_hz));
    auto next = clock::now();
    while (running_) {
      tick_once();
      next += period;
      const auto now = clock::now();
      if (now < next) {
        std::this_thread::sleep_until(next);
      } else if (now - next > std::chrono::milliseconds(100)) {
        next = now;  // fell far behind; drop the debt rather than burst
      }
    }
  }

  SimSettings settings_;
  SimState state_;
  std::optional<linac::CollisionReport> report_;
  std::uint64_t geometry_revision_ = 0;

  mutable std::mutex queue_mutex_;
  std::vector<QueuedCommand> queue_;
  std::uint64_t last_seq_ = 0;
  std::int64_t next_apply_tick_ = 1;

  mutable std::mutex snap_mutex_;
  mutable std::condition_variable snap_cv_;
  SnapshotPtr latest_;
  bool stopping_ = false;

  std::atomic<bool> running_{false};
  std::atomic<std::int64_t> ticks_done_{0};
  std::thread thread_;
};

}  // namespace hx3d::server
