#pragma once

// Discrete-event simulation of one collector and N helpers. Each helper is a
// single-server FIFO queue behind in-order up and down links; schedulers
// decide what to send and when through the Dispatcher interface.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <limits>
#include <optional>
#include <queue>
#include <string>
#include <string_view>
#include <vector>

#include "c3sim/workload.hpp"

namespace c3sim {

inline constexpr Seconds kNever = std::numeric_limits<double>::infinity();

enum class EventKind : std::uint8_t {
  kSend,
  kSendNext,
  kPacketArrives,
  kTransmissionAck,
  kComputeStart,
  kComputeDone,
  kResultArrives,
  kTimeout,
  kStop,
};

std::string_view to_string(EventKind kind);

struct ResultReport {
  HelperId helper = 0;
  std::size_t index = 0;  // 1-based per helper
  std::uint64_t tag = 0;
  Seconds sent_at = 0.0;
  Seconds runtime = 0.0;  // what a timestamping helper would report
  Seconds arrived_at = 0.0;
};

class Dispatcher {
 public:
  virtual ~Dispatcher() = default;
  virtual Seconds now() const = 0;
  virtual std::size_t helper_count() const = 0;
  // Transmits a packet now; returns its 1-based per-helper index.
  virtual std::size_t send(HelperId n, std::uint64_t tag) = 0;
  // Requests on_send_due(n) at time t, replacing any earlier request.
  virtual void wake_at(HelperId n, Seconds t) = 0;
  virtual void cancel_wake(HelperId n) = 0;
  virtual void arm_timeout(HelperId n, Seconds t) = 0;
  virtual void cancel_timeout(HelperId n) = 0;
  virtual void stop() = 0;
};

class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string name() const = 0;
  virtual void on_start(Dispatcher& d) = 0;
  virtual void on_send_due(Dispatcher& d, HelperId n) { (void)d, (void)n; }
  virtual void on_transmission_ack(Dispatcher& d, HelperId n, std::size_t index) {
    (void)d, (void)n, (void)index;
  }
  // Returns whether the result was useful (counted in r_n).
  virtual bool on_result(Dispatcher& d, const ResultReport& result) = 0;
  virtual void on_timeout(Dispatcher& d, HelperId n) { (void)d, (void)n; }
  // Results consumed beyond R at completion; nullopt for uncoded schemes.
  virtual std::optional<std::size_t> coding_overhead() const { return std::nullopt; }
};

struct EngineConfig {
  PacketSizes sizes;
  std::uint64_t event_cap = 100'000'000;
  bool record_events = true;
};

struct PacketRecord {
  std::uint64_t tag = 0;
  Seconds tx = kNever;
  Seconds arrival = kNever;
  Seconds ack = kNever;
  Seconds start = kNever;
  Seconds end = kNever;
  Seconds result = kNever;
  Seconds runtime = 0.0;
  bool useful = false;
};

struct TraceEvent {
  Seconds time = 0.0;
  HelperId helper = 0;
  EventKind kind = EventKind::kSend;
  std::size_t packet = 0;
};

struct RunTrace {
  std::vector<TraceEvent> events;
  std::vector<std::vector<PacketRecord>> packets;  // [helper][index - 1]
  Seconds stop_time = 0.0;

  void write_csv(std::ostream& out) const;
};

struct RunMetrics {
  std::string scheduler;
  std::uint64_t seed = 0;
  Seconds t_total = 0.0;
  std::size_t k_actual = 0;
  std::vector<std::size_t> r;     // useful results per helper
  std::vector<std::size_t> sent;  // packets sent per helper
  std::vector<double> busy;
  std::vector<double> idle;
  std::vector<double> efficiency;  // NaN for helpers that never computed
  std::vector<std::vector<double>> tu;  // ground-truth Tu per started packet
  std::size_t results_received = 0;
  std::size_t waste = 0;  // sent minus useful
  std::uint64_t events = 0;

  std::size_t useful_total() const;
  double mean_efficiency() const;
  double min_efficiency() const;
};

struct RunResult {
  RunMetrics metrics;
  RunTrace trace;
};

// Tu_{n,i} = max(0, start_i - end_{i-1}) for i >= 2 and Tu_{n,1} = 0, over
// packets that started computing.
std::vector<double> ground_truth_idle(const RunTrace& trace, HelperId n);

// Sum of ground-truth Tu over the first `count` packets of helper n. When the
// helper had started fewer than `count` packets and sat idle at stop, the
// idle tail up to the stop time is included.
double idle_prefix(const RunTrace& trace, HelperId n, std::size_t count);

class Engine final : public Dispatcher {
 public:
  Engine(RuntimeTape& tape, EngineConfig config);

  RunResult run(Scheduler& scheduler);

  Seconds now() const override { return now_; }
  std::size_t helper_count() const override { return helpers_.size(); }
  std::size_t send(HelperId n, std::uint64_t tag) override;
  void wake_at(HelperId n, Seconds t) override;
  void cancel_wake(HelperId n) override;
  void arm_timeout(HelperId n, Seconds t) override;
  void cancel_timeout(HelperId n) override;
  void stop() override;

 private:
  struct Event {
    Seconds time;
    std::uint64_t seq;
    EventKind kind;
    HelperId helper;
    std::uint64_t arg;  // packet index or generation

    bool operator>(const Event& o) const {
      return time != o.time ? time > o.time : seq > o.seq;
    }
  };

  struct HelperSim {
    std::deque<std::size_t> queue;
    bool busy = false;
    bool dead = false;
    Seconds last_uplink = 0.0;
    Seconds last_ack = 0.0;
    Seconds last_down = 0.0;
    std::uint64_t wake_gen = 0;
    std::uint64_t timeout_gen = 0;
    std::vector<PacketRecord> packets;
  };

  void push(Seconds t, EventKind kind, HelperId n, std::uint64_t arg);
  void log(EventKind kind, HelperId n, std::size_t packet);
  void check_helper(HelperId n, const char* what) const;
  bool silent(HelperId n) const;
  void start_next(HelperId n);
  void handle(const Event& ev, Scheduler& scheduler);
  RunMetrics collect(const Scheduler& scheduler) const;

  RuntimeTape& tape_;
  EngineConfig config_;
  std::vector<HelperSim> helpers_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::vector<TraceEvent> log_;
  Seconds now_ = 0.0;
  std::uint64_t seq_ = 0;
  std::uint64_t processed_ = 0;
  bool stopped_ = false;
  bool running_ = false;
};

}  // namespace c3sim
