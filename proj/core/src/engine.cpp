#include "c3sim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "c3sim/errors.hpp"

namespace c3sim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kSend:
      return "send";
    case EventKind::kSendNext:
      return "send_due";
    case EventKind::kPacketArrives:
      return "arrive";
    case EventKind::kTransmissionAck:
      return "ack";
    case EventKind::kComputeStart:
      return "start";
    case EventKind::kComputeDone:
      return "done";
    case EventKind::kResultArrives:
      return "result";
    case EventKind::kTimeout:
      return "timeout";
    case EventKind::kStop:
      return "stop";
  }
  return "unknown";
}

void RunTrace::write_csv(std::ostream& out) const {
  out << "time,helper,event,packet\n";
  char buf[64];
  for (const TraceEvent& e : events) {
    std::snprintf(buf, sizeof buf, "%.17g", e.time);
    out << buf << ',' << e.helper << ',' << to_string(e.kind) << ',' << e.packet << '\n';
  }
}

std::size_t RunMetrics::useful_total() const {
  std::size_t total = 0;
  for (std::size_t v : r) total += v;
  return total;
}

double RunMetrics::mean_efficiency() const {
  double sum = 0.0;
  std::size_t count = 0;
  for (double e : efficiency) {
    if (std::isnan(e)) continue;
    sum += e;
    ++count;
  }
  return count == 0 ? std::nan("") : sum / static_cast<double>(count);
}

double RunMetrics::min_efficiency() const {
  double best = std::nan("");
  for (double e : efficiency) {
    if (std::isnan(e)) continue;
    if (std::isnan(best) || e < best) best = e;
  }
  return best;
}

std::vector<double> ground_truth_idle(const RunTrace& trace, HelperId n) {
  const auto& packets = trace.packets.at(n);
  std::vector<double> tu;
  for (std::size_t i = 0; i < packets.size(); ++i) {
    if (packets[i].start == kNever) break;
    tu.push_back(i == 0 ? 0.0 : std::max(0.0, packets[i].start - packets[i - 1].end));
  }
  return tu;
}

double idle_prefix(const RunTrace& trace, HelperId n, std::size_t count) {
  const std::vector<double> tu = ground_truth_idle(trace, n);
  double sum = 0.0;
  for (std::size_t i = 0; i < std::min(count, tu.size()); ++i) sum += tu[i];
  if (tu.size() < count && !tu.empty()) {
    const Seconds last_end = trace.packets[n][tu.size() - 1].end;
    if (last_end <= trace.stop_time) sum += trace.stop_time - last_end;
  } else if (tu.empty() && count > 0) {
    sum += trace.stop_time;
  }
  return sum;
}

Engine::Engine(RuntimeTape& tape, EngineConfig config)
    : tape_(tape), config_(config), helpers_(tape.helper_count()) {
  config_.sizes.validate();
  if (helpers_.empty()) throw ConfigError("engine needs at least one helper");
  if (config_.event_cap == 0) throw ConfigError("event cap must be positive");
}

void Engine::push(Seconds t, EventKind kind, HelperId n, std::uint64_t arg) {
  events_.push(Event{t, seq_++, kind, n, arg});
}

void Engine::log(EventKind kind, HelperId n, std::size_t packet) {
  if (config_.record_events) log_.push_back(TraceEvent{now_, n, kind, packet});
}

void Engine::check_helper(HelperId n, const char* what) const {
  if (n >= helpers_.size()) {
    throw ContractViolation(std::string(what) + " for unknown helper " + std::to_string(n));
  }
}

bool Engine::silent(HelperId n) const {
  const auto& after = tape_.profile(n).silent_after;
  return helpers_[n].dead || (after && now_ >= *after);
}

std::size_t Engine::send(HelperId n, std::uint64_t tag) {
  check_helper(n, "send");
  if (!running_ || stopped_) throw ContractViolation("send outside an active run");
  HelperSim& h = helpers_[n];
  PacketRecord rec;
  rec.tag = tag;
  rec.tx = now_;
  h.packets.push_back(rec);
  const std::size_t index = h.packets.size();
  const Seconds arrival =
      std::max(h.last_uplink, now_ + tape_.uplink_delay(n, index, config_.sizes.data_bits));
  h.last_uplink = arrival;
  push(arrival, EventKind::kPacketArrives, n, index);
  log(EventKind::kSend, n, index);
  return index;
}

void Engine::wake_at(HelperId n, Seconds t) {
  check_helper(n, "wake");
  if (std::isnan(t) || t < now_) {
    throw ContractViolation("wake requested in the past for helper " + std::to_string(n));
  }
  HelperSim& h = helpers_[n];
  ++h.wake_gen;
  if (t != kNever) push(t, EventKind::kSendNext, n, h.wake_gen);
}

void Engine::cancel_wake(HelperId n) {
  check_helper(n, "cancel wake");
  ++helpers_[n].wake_gen;
}

void Engine::arm_timeout(HelperId n, Seconds t) {
  check_helper(n, "timeout");
  if (std::isnan(t) || t < now_) {
    throw ContractViolation("timeout armed in the past for helper " + std::to_string(n));
  }
  HelperSim& h = helpers_[n];
  ++h.timeout_gen;
  if (t != kNever) push(t, EventKind::kTimeout, n, h.timeout_gen);
}

void Engine::cancel_timeout(HelperId n) {
  check_helper(n, "cancel timeout");
  ++helpers_[n].timeout_gen;
}

void Engine::stop() {
  if (!running_) throw ContractViolation("stop outside an active run");
  if (!stopped_) log(EventKind::kStop, 0, 0);
  stopped_ = true;
}

void Engine::start_next(HelperId n) {
  HelperSim& h = helpers_[n];
  if (h.busy || h.queue.empty() || h.dead) return;
  const std::size_t index = h.queue.front();
  h.queue.pop_front();
  PacketRecord& rec = h.packets[index - 1];
  rec.start = now_;
  rec.runtime = tape_.runtime(n, index);
  h.busy = true;
  push(now_ + rec.runtime, EventKind::kComputeDone, n, index);
  log(EventKind::kComputeStart, n, index);
}

void Engine::handle(const Event& ev, Scheduler& scheduler) {
  const HelperId n = ev.helper;
  HelperSim& h = helpers_[n];
  switch (ev.kind) {
    case EventKind::kSendNext:
      if (ev.arg != h.wake_gen) return;
      scheduler.on_send_due(*this, n);
      return;
    case EventKind::kTimeout:
      if (ev.arg != h.timeout_gen) return;
      log(EventKind::kTimeout, n, h.packets.size());
      scheduler.on_timeout(*this, n);
      return;
    case EventKind::kPacketArrives: {
      if (silent(n)) {
        h.dead = true;
        return;
      }
      const std::size_t index = ev.arg;
      h.packets[index - 1].arrival = now_;
      log(EventKind::kPacketArrives, n, index);
      const Seconds ack =
          std::max(h.last_ack, now_ + tape_.ack_delay(n, index, config_.sizes.ack_bits));
      h.last_ack = ack;
      push(ack, EventKind::kTransmissionAck, n, index);
      h.queue.push_back(index);
      start_next(n);
      return;
    }
    case EventKind::kTransmissionAck:
      h.packets[ev.arg - 1].ack = now_;
      log(EventKind::kTransmissionAck, n, ev.arg);
      scheduler.on_transmission_ack(*this, n, ev.arg);
      return;
    case EventKind::kComputeDone: {
      if (silent(n)) {
        h.dead = true;
        return;
      }
      const std::size_t index = ev.arg;
      h.packets[index - 1].end = now_;
      log(EventKind::kComputeDone, n, index);
      const Seconds back =
          std::max(h.last_down, now_ + tape_.downlink_delay(n, index, config_.sizes.result_bits));
      h.last_down = back;
      push(back, EventKind::kResultArrives, n, index);
      h.busy = false;
      start_next(n);
      return;
    }
    case EventKind::kResultArrives: {
      const std::size_t index = ev.arg;
      PacketRecord& rec = h.packets[index - 1];
      // Zero-delay channels make the inequalities non-strict.
      if (!(rec.tx <= rec.arrival && rec.arrival <= rec.start && rec.start <= rec.end &&
            rec.end <= now_)) {
        throw TraceCorruption("non-causal packet record at helper " + std::to_string(n));
      }
      rec.result = now_;
      log(EventKind::kResultArrives, n, index);
      const ResultReport report{n, index, rec.tag, rec.tx, rec.runtime, now_};
      rec.useful = scheduler.on_result(*this, report);
      return;
    }
    case EventKind::kSend:
    case EventKind::kComputeStart:
    case EventKind::kStop:
      break;
  }
  throw StateError("unexpected event kind in the queue");
}

RunResult Engine::run(Scheduler& scheduler) {
  if (running_ || processed_ != 0) throw StateError("an engine instance runs once");
  running_ = true;
  scheduler.on_start(*this);
  while (!stopped_) {
    if (events_.empty()) {
      throw StateError("event queue drained before scheduler '" + scheduler.name() + "' stopped");
    }
    const Event ev = events_.top();
    events_.pop();
    if (++processed_ > config_.event_cap) {
      throw BudgetExceeded("run exceeded the event cap of " + std::to_string(config_.event_cap));
    }
    now_ = ev.time;
    handle(ev, scheduler);
  }
  running_ = false;

  RunResult result;
  result.trace.stop_time = now_;
  result.trace.events = std::move(log_);
  result.trace.packets.reserve(helpers_.size());
  for (const HelperSim& h : helpers_) result.trace.packets.push_back(h.packets);
  result.metrics = collect(scheduler);
  return result;
}

RunMetrics Engine::collect(const Scheduler& scheduler) const {
  RunMetrics m;
  m.scheduler = scheduler.name();
  m.seed = tape_.seed();
  m.t_total = now_;
  m.k_actual = scheduler.coding_overhead().value_or(0);
  m.events = processed_;
  const std::size_t count = helpers_.size();
  m.r.assign(count, 0);
  m.sent.assign(count, 0);
  m.busy.assign(count, 0.0);
  m.idle.assign(count, 0.0);
  m.efficiency.assign(count, std::nan(""));
  m.tu.resize(count);

  std::size_t sent_total = 0;
  for (HelperId n = 0; n < count; ++n) {
    const auto& packets = helpers_[n].packets;
    const auto& silent_after = tape_.profile(n).silent_after;
    const Seconds horizon = silent_after ? std::min(now_, *silent_after) : now_;
    m.sent[n] = packets.size();
    sent_total += packets.size();
    for (std::size_t i = 0; i < packets.size(); ++i) {
      const PacketRecord& p = packets[i];
      if (p.result != kNever) ++m.results_received;
      if (p.useful) ++m.r[n];
      if (p.start == kNever || p.start > horizon) continue;
      m.busy[n] += std::min(p.end, horizon) - p.start;
      const double tu = i == 0 ? 0.0 : std::max(0.0, p.start - packets[i - 1].end);
      m.tu[n].push_back(tu);
      m.idle[n] += tu;
    }
    const double total = m.busy[n] + m.idle[n];
    if (total > 0.0) m.efficiency[n] = m.busy[n] / total;
  }
  m.waste = sent_total - m.useful_total();
  return m;
}

}  // namespace c3sim
