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

// Virtual-time runtime. Every step fires one runnable event chosen by the
// seeded generator: a control delivery, a control handling, a channel read
// or a source ingestion. Processing a message occupies its worker for the
// message's cost, and the outputs become visible when it finishes.

#include <algorithm>
#include <deque>
#include <limits>
#include <random>

#include "engine/core.hpp"
#include "reconf/error.hpp"

namespace reconf::detail {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

struct SimChannel {
  std::deque<std::pair<double, Message>> queue;  // (visible at, message)
  std::size_t data = 0;
};

struct Transit {
  double ready = 0;
  std::uint32_t worker = 0;
  Control control;
};

struct TimedNotice {
  double ready = 0;
  Notice notice;
};

enum class StepKind : std::uint8_t { kDeliver, kControl, kRead, kIngest };

struct Candidate {
  StepKind kind;
  std::uint32_t worker;
  std::size_t item;  // transit index or input slot
};

class Simulator {
 public:
  explicit Simulator(Model& model)
      : m_(model),
        rng_(model.config.seed),
        channels_(model.channels.size()),
        busy_until_(model.workers.size(), model.start_ms),
        control_(model.workers.size()),
        now_(model.start_ms) {}

  void run();

 private:
  bool can_emit(std::uint32_t w) const;
  bool readable(std::uint32_t w, std::size_t slot) const;
  bool can_ingest(std::uint32_t w) const;
  bool has_work(std::uint32_t w) const;
  double next_event_time() const;
  void dispatch(std::vector<Outgoing>& out);
  void apply(std::uint32_t w, Effects& fx);
  bool controller_pass();
  void execute(const Candidate& c);
  bool stop_requested() const;

  Model& m_;
  std::mt19937_64 rng_;
  std::vector<SimChannel> channels_;
  std::vector<double> busy_until_;
  std::vector<std::deque<Control>> control_;
  std::vector<Transit> transit_;
  std::deque<TimedNotice> notices_;
  double now_;
  std::uint64_t step_ = 0;
};

bool Simulator::can_emit(std::uint32_t w) const {
  for (const OutPort& p : m_.workers[w].ports()) {
    for (std::size_t ch : p.channels) {
      if (channels_[ch].data < m_.config.channel_capacity) continue;
      // Input held back by alignment spills past capacity; otherwise
      // alignment and backpressure could wait on each other forever.
      const ChannelSpec& spec = m_.channels[ch];
      if (m_.workers[spec.to].slot_blocked(spec.to_slot)) continue;
      return false;
    }
  }
  return true;
}

bool Simulator::readable(std::uint32_t w, std::size_t slot) const {
  const SimChannel& ch = channels_[m_.workers[w].inputs()[slot]];
  if (ch.queue.empty() || ch.queue.front().first > now_) return false;
  if (std::holds_alternative<MarkerPtr>(ch.queue.front().second)) return true;
  return !m_.workers[w].slot_blocked(slot) && can_emit(w);
}

bool Simulator::can_ingest(std::uint32_t w) const {
  const auto t = m_.next_source_time(w);
  return t && *t <= now_ && can_emit(w);
}

bool Simulator::has_work(std::uint32_t w) const {
  if (!control_[w].empty()) return true;
  for (std::size_t ch : m_.workers[w].inputs()) {
    if (!channels_[ch].queue.empty()) return true;
  }
  return m_.next_source_time(w).has_value();
}

double Simulator::next_event_time() const {
  double next = kNever;
  auto consider = [&](double t) {
    if (t > now_ && t < next) next = t;
  };
  for (const Transit& t : transit_) consider(t.ready);
  if (!notices_.empty()) consider(notices_.front().ready);
  for (const ScheduledAction& a : m_.actions) {
    if (!a.fired && !a.when.at_step) consider(a.when.at_ms);
  }
  for (std::uint32_t w = 0; w < m_.workers.size(); ++w) {
    if (!has_work(w)) continue;
    consider(busy_until_[w]);
    for (std::size_t ch : m_.workers[w].inputs()) {
      if (!channels_[ch].queue.empty()) consider(channels_[ch].queue.front().first);
    }
    if (auto t = m_.next_source_time(w)) consider(*t);
  }
  return next;
}

void Simulator::dispatch(std::vector<Outgoing>& out) {
  const double jitter = m_.config.control_jitter_ms;
  for (Outgoing& o : out) {
    if (m_.config.terminated_workers.count(m_.workers[o.worker].name())) {
      ++m_.result.counters["dropped_controls"];
      continue;
    }
    double delay = m_.config.control_latency_ms;
    if (jitter > 0) delay += std::uniform_real_distribution<double>(0, jitter)(rng_);
    transit_.push_back(Transit{now_ + delay, o.worker, std::move(o.control)});
  }
  out.clear();
}

void Simulator::apply(std::uint32_t w, Effects& fx) {
  const double done = now_ + fx.cost_ms;
  for (auto& [ch, msg] : fx.sends) {
    m_.count_send(msg);
    if (std::holds_alternative<Tuple>(msg)) ++channels_[ch].data;
    channels_[ch].queue.emplace_back(done, std::move(msg));
  }
  std::vector<Outgoing> unused;
  m_.record(w, fx, unused, now_);
  for (Notice& n : fx.notices) {
    notices_.push_back(TimedNotice{done + m_.config.notice_latency_ms, std::move(n)});
  }
  busy_until_[w] = done;
}

bool Simulator::controller_pass() {
  bool acted = false;
  std::vector<Outgoing> out;
  for (bool progressed = true; progressed;) {
    progressed = false;
    for (ScheduledAction& a : m_.actions) {
      if (a.fired) continue;
      const bool due = a.when.at_step ? step_ >= *a.when.at_step : a.when.at_ms <= now_;
      if (!due) continue;
      m_.fire(a, now_, out);
      progressed = true;
    }
    // Notices arrive in completion order; the latency is uniform.
    std::stable_sort(notices_.begin(), notices_.end(),
                     [](const TimedNotice& a, const TimedNotice& b) { return a.ready < b.ready; });
    while (!notices_.empty() && notices_.front().ready <= now_) {
      m_.controller->on_notice(notices_.front().notice, now_, out);
      notices_.pop_front();
      progressed = true;
    }
    m_.controller->on_tick(now_, [this](std::uint32_t v) { return m_.old_in_flight(v); }, out);
    if (!out.empty()) {
      dispatch(out);
      progressed = true;
    }
    acted = acted || progressed;
  }
  return acted;
}

void Simulator::execute(const Candidate& c) {
  Effects fx;
  WorkerCore& worker = m_.workers[c.worker];
  switch (c.kind) {
    case StepKind::kDeliver: {
      Transit t = std::move(transit_[c.item]);
      transit_.erase(transit_.begin() + static_cast<std::ptrdiff_t>(c.item));
      control_[t.worker].push_back(std::move(t.control));
      return;
    }
    case StepKind::kControl: {
      Control ctl = std::move(control_[c.worker].front());
      control_[c.worker].pop_front();
      worker.handle_control(ctl, now_, fx);
      break;
    }
    case StepKind::kRead: {
      SimChannel& ch = channels_[worker.inputs()[c.item]];
      Message msg = std::move(ch.queue.front().second);
      ch.queue.pop_front();
      if (Tuple* t = std::get_if<Tuple>(&msg)) {
        --ch.data;
        worker.handle_data(std::move(*t), now_, fx);
      } else {
        worker.handle_marker(c.item, std::get<MarkerPtr>(msg), now_, fx);
      }
      break;
    }
    case StepKind::kIngest: {
      const SourceCursor& cur = m_.cursors[m_.cursor_of[c.worker]];
      const std::uint64_t raw = cur.raw_index(worker.ingested());
      const double at = *feed_time(*cur.feed, raw);
      Payload p = cur.feed->payload ? cur.feed->payload(raw, at) : Payload(raw);
      const TxnId txn = (static_cast<TxnId>(cur.ordinal + 1) << 40) | raw;
      worker.ingest(txn, std::move(p), at, static_cast<std::uint32_t>(m_.cursor_of[c.worker]),
                    now_, fx);
      break;
    }
  }
  apply(c.worker, fx);
}

bool Simulator::stop_requested() const {
  const StopCondition& stop = m_.config.stop;
  if (stop.max_steps && step_ >= *stop.max_steps) return true;
  if (stop.when_reconfigs_done) {
    bool any = false;
    for (const ScheduledAction& a : m_.actions) {
      if (a.kind == ActionKind::kReconfig) any = true;
    }
    if (any && m_.all_actions_fired() && m_.controller->reconfigs_settled()) return true;
  }
  return false;
}

void Simulator::run() {
  std::vector<Candidate> cands;
  for (;;) {
    controller_pass();
    if (stop_requested()) break;

    cands.clear();
    for (std::size_t i = 0; i < transit_.size(); ++i) {
      if (transit_[i].ready <= now_) cands.push_back({StepKind::kDeliver, transit_[i].worker, i});
    }
    for (std::uint32_t w = 0; w < m_.workers.size(); ++w) {
      if (busy_until_[w] > now_) continue;
      if (!control_[w].empty()) {
        cands.push_back({StepKind::kControl, w, 0});
        continue;
      }
      const std::size_t slots = m_.workers[w].inputs().size();
      for (std::size_t s = 0; s < slots; ++s) {
        if (readable(w, s)) cands.push_back({StepKind::kRead, w, s});
      }
      if (m_.cursor_of[w] >= 0 && can_ingest(w)) cands.push_back({StepKind::kIngest, w, 0});
    }

    if (cands.empty()) {
      const double next = next_event_time();
      if (next == kNever) {
        // Step-triggered actions past the end of the work still fire.
        bool pending = false;
        for (ScheduledAction& a : m_.actions) {
          if (!a.fired && a.when.at_step) {
            step_ = std::max(step_, *a.when.at_step);
            pending = true;
          }
        }
        if (pending) continue;
        bool stuck = false;
        for (std::uint32_t w = 0; w < m_.workers.size(); ++w) stuck = stuck || has_work(w);
        if (stuck) throw EngineError("execution stalled with pending work");
        m_.result.quiescent = true;
        break;
      }
      if (m_.config.stop.until_ms && next > *m_.config.stop.until_ms) {
        now_ = *m_.config.stop.until_ms;
        break;
      }
      now_ = next;
      continue;
    }

    const Candidate pick = cands[rng_() % cands.size()];
    execute(pick);
    ++step_;
  }
  m_.result.steps = step_;
  m_.finalize(now_);
}

}  // namespace

void run_simulation(Model& model) { Simulator(model).run(); }

}  // namespace reconf::detail
