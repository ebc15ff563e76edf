// Copyright 2026 The Reconf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Wall-clock runtime: one thread per worker plus the calling thread acting
// as controller. Handlers run under one lock; simulated processing cost is
// slept outside it, so workers overlap the way real operators would.

#include <chrono>
#include <condition_variable>
#include <deque>
#include <exception>
#include <mutex>
#include <random>
#include <thread>

#include "engine/core.hpp"
#include "reconf/error.hpp"

namespace reconf::detail {

namespace {

using Clock = std::chrono::steady_clock;

class ThreadRuntime {
 public:
  explicit ThreadRuntime(Model& model)
      : m_(model),
        channels_(model.channels.size()),
        data_(model.channels.size(), 0),
        control_(model.workers.size()),
        busy_(model.workers.size(), false),
        start_(Clock::now()) {}

  void run();

 private:
  double now() const {
    const double wall = std::chrono::duration<double, std::milli>(Clock::now() - start_).count();
    return m_.start_ms + wall / m_.config.wall_scale;
  }
  Clock::time_point wall_at(double vtime) const {
    const double wall = (vtime - m_.start_ms) * m_.config.wall_scale;
    return start_ + std::chrono::duration_cast<Clock::duration>(
                        std::chrono::duration<double, std::milli>(wall));
  }
  bool can_emit(std::uint32_t w) const;
  void deliver(std::vector<Outgoing>& out);
  void worker_loop(std::uint32_t w);
  bool quiescent() const;

  Model& m_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::vector<std::deque<Message>> channels_;
  std::vector<std::size_t> data_;
  std::vector<std::deque<Control>> control_;
  std::vector<bool> busy_;
  Clock::time_point start_;
  bool stop_ = false;
  std::exception_ptr error_;
  std::uint64_t steps_ = 0;
};

bool ThreadRuntime::can_emit(std::uint32_t w) const {
  for (const OutPort& p : m_.workers[w].ports()) {
    for (std::size_t ch : p.channels) {
      if (data_[ch] < m_.config.channel_capacity) continue;
      const ChannelSpec& spec = m_.channels[ch];
      if (m_.workers[spec.to].slot_blocked(spec.to_slot)) continue;
      return false;
    }
  }
  return true;
}

void ThreadRuntime::deliver(std::vector<Outgoing>& out) {
  for (Outgoing& o : out) {
    if (m_.config.terminated_workers.count(m_.workers[o.worker].name())) {
      ++m_.result.counters["dropped_controls"];
      continue;
    }
    control_[o.worker].push_back(std::move(o.control));
  }
  out.clear();
}

void ThreadRuntime::worker_loop(std::uint32_t w) {
  std::mt19937_64 rng(m_.config.seed * 1000003ULL + w);
  WorkerCore& worker = m_.workers[w];
  std::unique_lock<std::mutex> lk(mu_);
  std::vector<std::size_t> slots;
  while (!stop_) {
    Effects fx;
    try {
      if (!control_[w].empty()) {
        Control c = std::move(control_[w].front());
        control_[w].pop_front();
        worker.handle_control(c, now(), fx);
      } else {
        slots.clear();
        const auto& inputs = worker.inputs();
        const bool emit_ok = can_emit(w);
        for (std::size_t s = 0; s < inputs.size(); ++s) {
          const auto& q = channels_[inputs[s]];
          if (q.empty()) continue;
          if (std::holds_alternative<MarkerPtr>(q.front()) || (!worker.slot_blocked(s) && emit_ok)) {
            slots.push_back(s);
          }
        }
        const auto due = m_.next_source_time(w);
        const bool ingest = due && *due <= now() && emit_ok;
        const std::size_t options = slots.size() + (ingest ? 1 : 0);
        if (options == 0) {
          if (due && emit_ok) {
            cv_.wait_until(lk, wall_at(*due));
          } else {
            cv_.wait_for(lk, std::chrono::milliseconds(5));
          }
          continue;
        }
        const std::size_t pick = rng() % options;
        if (pick < slots.size()) {
          const std::size_t s = slots[pick];
          Message msg = std::move(channels_[inputs[s]].front());
          channels_[inputs[s]].pop_front();
          if (Tuple* t = std::get_if<Tuple>(&msg)) {
            --data_[inputs[s]];
            worker.handle_data(std::move(*t), now(), fx);
          } else {
            worker.handle_marker(s, std::get<MarkerPtr>(msg), now(), fx);
          }
        } else {
          const SourceCursor& cur = m_.cursors[m_.cursor_of[w]];
          const std::uint64_t raw = cur.raw_index(worker.ingested());
          Payload p = cur.feed->payload ? cur.feed->payload(raw, *due) : Payload(raw);
          const TxnId txn = (static_cast<TxnId>(cur.ordinal + 1) << 40) | raw;
          worker.ingest(txn, std::move(p), now(), static_cast<std::uint32_t>(m_.cursor_of[w]),
                        now(), fx);
        }
      }
    } catch (...) {
      error_ = std::current_exception();
      stop_ = true;
      cv_.notify_all();
      return;
    }
    ++steps_;
    busy_[w] = true;
    if (fx.cost_ms > 0) {
      lk.unlock();
      std::this_thread::sleep_for(
          std::chrono::duration<double, std::milli>(fx.cost_ms * m_.config.wall_scale));
      lk.lock();
    }
    for (auto& [ch, msg] : fx.sends) {
      m_.count_send(msg);
      if (std::holds_alternative<Tuple>(msg)) ++data_[ch];
      channels_[ch].push_back(std::move(msg));
    }
    std::vector<Outgoing> out;
    m_.record(w, fx, out, now());
    for (const Notice& n : fx.notices) m_.controller->on_notice(n, now(), out);
    m_.controller->on_tick(now(), [this](std::uint32_t v) { return m_.old_in_flight(v); }, out);
    deliver(out);
    busy_[w] = false;
    cv_.notify_all();
  }
}

bool ThreadRuntime::quiescent() const {
  for (std::uint32_t w = 0; w < m_.workers.size(); ++w) {
    if (busy_[w] || !control_[w].empty()) return false;
    if (m_.next_source_time(w)) return false;
  }
  for (const auto& q : channels_) {
    if (!q.empty()) return false;
  }
  return m_.all_actions_fired();
}

void ThreadRuntime::run() {
  std::vector<std::thread> threads;
  threads.reserve(m_.workers.size());
  for (std::uint32_t w = 0; w < m_.workers.size(); ++w) {
    threads.emplace_back([this, w] { worker_loop(w); });
  }
  {
    std::unique_lock<std::mutex> lk(mu_);
    const StopCondition& stop = m_.config.stop;
    while (!stop_) {
      std::vector<Outgoing> out;
      const double t = now();
      for (ScheduledAction& a : m_.actions) {
        if (a.fired) continue;
        const bool due = a.when.at_step ? steps_ >= *a.when.at_step : a.when.at_ms <= t;
        if (due) m_.fire(a, t, out);
      }
      m_.controller->on_tick(t, [this](std::uint32_t v) { return m_.old_in_flight(v); }, out);
      if (!out.empty()) {
        deliver(out);
        cv_.notify_all();
      }
      if (stop.until_ms && t >= *stop.until_ms) break;
      if (stop.max_steps && steps_ >= *stop.max_steps) break;
      if (stop.when_reconfigs_done && m_.all_actions_fired() &&
          m_.controller->reconfigs_settled() && !m_.controller->reconfigs().empty()) {
        break;
      }
      if (quiescent() && m_.controller->reconfigs_settled()) {
        m_.result.quiescent = true;
        break;
      }
      cv_.wait_for(lk, std::chrono::milliseconds(1));
    }
    stop_ = true;
    cv_.notify_all();
  }
  for (std::thread& th : threads) th.join();
  if (error_) std::rethrow_exception(error_);
  m_.result.steps = steps_;
  m_.finalize(now());
}

}  // namespace

void run_threads(Model& model) { ThreadRuntime(model).run(); }

}  // namespace reconf::detail
