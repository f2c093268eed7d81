#include "c3sim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>

#include "c3sim/errors.hpp"
#include "c3sim/theory.hpp"

namespace c3sim {

namespace {

using json = nlohmann::json;

template <class T>
std::vector<T> scalar_or_list(const json& j, const char* key) {
  try {
    if (j.is_array()) {
      if (j.empty()) throw ConfigError(std::string("'") + key + "' must not be empty");
      return j.get<std::vector<T>>();
    }
    return {j.get<T>()};
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

template <class T>
T value(const json& j, const char* key) {
  try {
    return j.get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& item : j.items()) {
    bool ok = false;
    for (const char* k : known) ok = ok || item.key() == k;
    if (!ok) throw ConfigError("unknown key '" + item.key() + "' in " + where);
  }
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

}  // namespace

void ExperimentConfig::validate() const {
  if (rows.empty() || helpers.empty()) throw ConfigError("R and N sweep lists must be nonempty");
  for (std::size_t r : rows) {
    if (r == 0) throw ConfigError("R must be >= 1");
  }
  for (std::size_t n : helpers) {
    if (n == 0) throw ConfigError("N must be >= 1");
  }
  if (schedulers.empty()) throw ConfigError("scheduler list must be nonempty");
  for (const std::string& s : schedulers) {
    if (std::find(kSchedulerNames.begin(), kSchedulerNames.end(), s) == kSchedulerNames.end()) {
      throw ConfigError("unknown scheduler '" + s + "'");
    }
  }
  if (replicates == 0) throw ConfigError("replicate count must be >= 1");
  if (event_cap == 0) throw ConfigError("event cap must be positive");
  population(1).validate();
  sizes(1).validate();
  ChannelModel{channel.kind, channel.rate_floor_mbps}.validate();
  CadenceParams{estimator, alpha, sizes(1), kDefaultTtiFloor}.validate();
  CollectorConfig{1, stop, overhead_fraction, soliton, 0}.validate();
}

PopulationSpec ExperimentConfig::population(std::size_t n) const {
  PopulationSpec spec;
  spec.helpers = n;
  spec.rate_set = mu_set;
  spec.shift_rule = shift_rule;
  spec.shift_value = shift_value;
  spec.scenario = scenario;
  spec.channel_min_mbps = channel.min_mbps;
  spec.channel_max_mbps = channel.max_mbps;
  return spec;
}

PacketSizes ExperimentConfig::sizes(std::size_t r) const {
  return PacketSizes::for_rows(r, bits_per_row, result_bits, ack_bits);
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  reject_unknown(j,
                 {"R", "N", "scenario", "schedulers", "mu_set", "shift", "channel", "packet",
                  "alpha", "estimator", "stop", "overhead_fraction", "soliton", "replicates",
                  "seed", "event_cap"},
                 "experiment config");
  ExperimentConfig c;
  if (j.contains("R")) c.rows = scalar_or_list<std::size_t>(j["R"], "R");
  if (j.contains("N")) c.helpers = scalar_or_list<std::size_t>(j["N"], "N");
  if (j.contains("scenario")) c.scenario = parse_scenario(value<std::string>(j["scenario"], "scenario"));
  if (j.contains("schedulers")) {
    c.schedulers = scalar_or_list<std::string>(j["schedulers"], "schedulers");
  }
  if (j.contains("mu_set")) c.mu_set = scalar_or_list<double>(j["mu_set"], "mu_set");
  if (j.contains("shift")) {
    const json& s = j["shift"];
    if (s.is_string()) {
      if (s.get<std::string>() != "inverse_mu") throw ConfigError("shift string must be 'inverse_mu'");
      c.shift_rule = ShiftRule::kInverseRate;
    } else if (s.is_number()) {
      c.shift_rule = ShiftRule::kFixed;
      c.shift_value = s.get<double>();
    } else {
      reject_unknown(s, {"rule", "value"}, "shift");
      const std::string rule = s.contains("rule") ? value<std::string>(s["rule"], "shift.rule") : "fixed";
      if (rule == "fixed") {
        c.shift_rule = ShiftRule::kFixed;
        if (s.contains("value")) c.shift_value = value<double>(s["value"], "shift.value");
      } else if (rule == "inverse_mu") {
        c.shift_rule = ShiftRule::kInverseRate;
      } else {
        throw ConfigError("unknown shift rule '" + rule + "'");
      }
    }
  }
  if (j.contains("channel")) {
    const json& ch = j["channel"];
    reject_unknown(ch, {"model", "min_mbps", "max_mbps", "rate_floor_mbps"}, "channel");
    if (ch.contains("model")) c.channel.kind = parse_channel_kind(value<std::string>(ch["model"], "channel.model"));
    if (ch.contains("min_mbps")) c.channel.min_mbps = value<double>(ch["min_mbps"], "channel.min_mbps");
    if (ch.contains("max_mbps")) c.channel.max_mbps = value<double>(ch["max_mbps"], "channel.max_mbps");
    if (ch.contains("rate_floor_mbps")) {
      c.channel.rate_floor_mbps = value<double>(ch["rate_floor_mbps"], "channel.rate_floor_mbps");
    }
  }
  if (j.contains("packet")) {
    const json& p = j["packet"];
    reject_unknown(p, {"bits_per_row", "result_bits", "ack_bits"}, "packet");
    if (p.contains("bits_per_row")) c.bits_per_row = value<double>(p["bits_per_row"], "packet.bits_per_row");
    if (p.contains("result_bits")) c.result_bits = value<double>(p["result_bits"], "packet.result_bits");
    if (p.contains("ack_bits")) c.ack_bits = value<double>(p["ack_bits"], "packet.ack_bits");
  }
  if (j.contains("alpha")) c.alpha = value<double>(j["alpha"], "alpha");
  if (j.contains("estimator")) c.estimator = parse_estimator_mode(value<std::string>(j["estimator"], "estimator"));
  if (j.contains("stop")) c.stop = parse_stop_mode(value<std::string>(j["stop"], "stop"));
  if (j.contains("overhead_fraction")) {
    c.overhead_fraction = value<double>(j["overhead_fraction"], "overhead_fraction");
  }
  if (j.contains("soliton")) {
    const json& s = j["soliton"];
    reject_unknown(s, {"c", "delta"}, "soliton");
    if (s.contains("c")) c.soliton.c = value<double>(s["c"], "soliton.c");
    if (s.contains("delta")) c.soliton.delta = value<double>(s["delta"], "soliton.delta");
  }
  if (j.contains("replicates")) c.replicates = value<std::size_t>(j["replicates"], "replicates");
  if (j.contains("seed")) c.seed = value<std::uint64_t>(j["seed"], "seed");
  if (j.contains("event_cap")) {
    const double cap = value<double>(j["event_cap"], "event_cap");
    if (!(cap >= 1.0)) throw ConfigError("event cap must be >= 1");
    c.event_cap = static_cast<std::uint64_t>(cap);
  }
  c.validate();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return from_json(j);
}

std::size_t RunContext::overhead() const { return overhead_count(rows, config->overhead_fraction); }

PacketSizes RunContext::sizes() const { return config->sizes(rows); }

std::vector<double> RunContext::packet_means() const {
  std::vector<double> out;
  for (const HelperProfile& h : tape->profiles()) out.push_back(h.packet_mean());
  return out;
}

std::vector<double> RunContext::distribution_means() const {
  std::vector<double> out;
  for (const HelperProfile& h : tape->profiles()) out.push_back(h.distribution_mean());
  return out;
}

std::unique_ptr<Scheduler> make_scheduler(const std::string& name, const RunContext& ctx) {
  const ExperimentConfig& c = *ctx.config;
  const CadenceParams cadence{c.estimator, c.alpha, ctx.sizes(), kDefaultTtiFloor};
  const CollectorConfig collector{ctx.rows, c.stop, c.overhead_fraction, c.soliton, ctx.seed};
  if (name == "c3p") return std::make_unique<C3pScheduler>(C3pConfig{cadence, collector});
  if (name == "static") {
    return std::make_unique<BlockScheduler>(make_static_scheduler(ctx.packet_means(), ctx.rows));
  }
  if (name == "nonergodic") {
    return std::make_unique<NonErgodicOracle>(*ctx.tape, ctx.sizes(), collector);
  }
  if (name == "uncoded") {
    return std::make_unique<BlockScheduler>(
        make_uncoded_scheduler(ctx.distribution_means(), ctx.rows));
  }
  if (name == "rr") return std::make_unique<RepetitionRoundRobin>(cadence, ctx.rows);
  if (name == "hcmm_like") {
    return std::make_unique<BlockScheduler>(
        make_hcmm_like_scheduler(ctx.packet_means(), ctx.rows, ctx.overhead()));
  }
  throw ConfigError("unknown scheduler '" + name + "'");
}

namespace {

RuntimeTape make_tape(const ExperimentConfig& config, std::size_t helpers, std::uint64_t seed) {
  return RuntimeTape(make_population(config.population(helpers), seed),
                     ChannelModel{config.channel.kind, config.channel.rate_floor_mbps}, seed);
}

}  // namespace

RunResult run_single(const ExperimentConfig& config, std::size_t rows, std::size_t helpers,
                     std::uint64_t seed, const std::string& scheduler, bool record_events) {
  RuntimeTape tape = make_tape(config, helpers, seed);
  RunContext ctx{&config, rows, seed, &tape};
  auto s = make_scheduler(scheduler, ctx);
  Engine engine(tape, EngineConfig{ctx.sizes(), config.event_cap, record_events});
  return engine.run(*s);
}

double mean_rtt_data(const HelperProfile& profile, const ChannelSpec& channel,
                     const PacketSizes& sizes) {
  if (channel.kind == ChannelKind::kZero) return 0.0;
  return (sizes.data_bits + sizes.result_bits) / (profile.channel_mean_mbps * 1e6);
}

ReplicateOutput run_replicate(const ExperimentConfig& config, std::size_t rows,
                              std::size_t helpers, std::uint64_t seed) {
  RuntimeTape tape = make_tape(config, helpers, seed);
  RunContext ctx{&config, rows, seed, &tape};
  const PacketSizes sizes = ctx.sizes();
  ReplicateOutput out;

  const std::vector<double> means = ctx.packet_means();
  out.theory.rows = rows;
  out.theory.helpers = helpers;
  out.theory.seed = seed;
  out.theory.t_static = static_cast<double>(rows) / theory::harmonic_rate(means);
  out.theory.t_c3p = theory::predict_t_c3p(means, rows, ctx.overhead());
  double gamma_sum = 0.0;
  for (const HelperProfile& h : tape.profiles()) {
    gamma_sum += theory::efficiency_theoretical(h.rate, h.shift, mean_rtt_data(h, config.channel, sizes));
  }
  out.theory.gamma_mean = gamma_sum / static_cast<double>(helpers);

  for (const std::string& name : config.schedulers) {
    auto scheduler = make_scheduler(name, ctx);
    Engine engine(tape, EngineConfig{sizes, config.event_cap, false});
    const auto t0 = std::chrono::steady_clock::now();
    RunResult result = engine.run(*scheduler);
    const auto t1 = std::chrono::steady_clock::now();
    const RunMetrics& m = result.metrics;
    RunRow row;
    row.rows = rows;
    row.helpers = helpers;
    row.scenario = config.scenario;
    row.scheduler = name;
    row.seed = seed;
    row.t_total = m.t_total;
    row.k_actual = m.k_actual;
    row.mean_efficiency = m.mean_efficiency();
    row.min_efficiency = m.min_efficiency();
    row.waste = m.waste;
    row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    out.runs.push_back(row);

    if (name == "c3p") {
      for (HelperId n = 0; n < helpers; ++n) {
        const HelperProfile& h = tape.profile(n);
        const double rtt = mean_rtt_data(h, config.channel, sizes);
        out.helper_rows.push_back(HelperRow{rows, helpers, seed, name, n, h.rate, h.shift, rtt,
                                            m.r[n], m.efficiency[n],
                                            theory::efficiency_theoretical(h.rate, h.shift, rtt)});
      }
    }
  }
  return out;
}

std::size_t worker_count() {
  if (const char* env = std::getenv("C3SIM_WORKERS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return v;
    throw ConfigError("C3SIM_WORKERS must be a positive integer");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ExperimentOutput run_experiment(const ExperimentConfig& config) {
  config.validate();
  struct Job {
    std::size_t rows, helpers;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t r : config.rows) {
    for (std::size_t n : config.helpers) {
      for (std::size_t k = 0; k < config.replicates; ++k) jobs.push_back({r, n, config.seed + k});
    }
  }

  std::vector<ReplicateOutput> results(jobs.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        results[i] = run_replicate(config, jobs[i].rows, jobs[i].helpers, jobs[i].seed);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = jobs.size();
      }
    }
  };
  const std::size_t workers = std::min(worker_count(), jobs.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
  }
  if (failure) std::rethrow_exception(failure);

  ExperimentOutput out;
  for (ReplicateOutput& r : results) {
    out.runs.insert(out.runs.end(), r.runs.begin(), r.runs.end());
    out.helper_rows.insert(out.helper_rows.end(), r.helper_rows.begin(), r.helper_rows.end());
    out.theory.push_back(r.theory);
  }
  return out;
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - s.mean) * (x - s.mean);
    s.ci95 = 1.96 * std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

void write_runs_csv(std::ostream& out, const std::vector<RunRow>& runs, CsvOptions opts) {
  out << "R,N,scenario,scheduler,seed,T_total,K_actual,mean_efficiency,min_efficiency,waste,wall_ms\n";
  for (const RunRow& r : runs) {
    out << r.rows << ',' << r.helpers << ',' << to_string(r.scenario) << ',' << r.scheduler << ','
        << r.seed << ',' << fmt(r.t_total) << ',' << r.k_actual << ',' << fmt(r.mean_efficiency)
        << ',' << fmt(r.min_efficiency) << ',' << r.waste << ','
        << (opts.omit_timing ? "0" : fmt(r.wall_ms)) << '\n';
  }
}

namespace {

struct PointKey {
  std::size_t rows, helpers;
  std::string scheduler;
  auto operator<=>(const PointKey&) const = default;
};

}  // namespace

void write_aggregate_csv(std::ostream& out, const std::vector<RunRow>& runs) {
  out << "R,N,scenario,scheduler,replicates,T_mean,T_ci95,K_mean,efficiency_mean,efficiency_ci95,"
         "waste_mean\n";
  std::map<PointKey, std::vector<const RunRow*>> groups;
  std::vector<PointKey> order;
  for (const RunRow& r : runs) {
    PointKey key{r.rows, r.helpers, r.scheduler};
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(&r);
  }
  for (const PointKey& key : order) {
    const auto& rows = groups[key];
    std::vector<double> t, k, e, w;
    for (const RunRow* r : rows) {
      t.push_back(r->t_total);
      k.push_back(static_cast<double>(r->k_actual));
      if (!std::isnan(r->mean_efficiency)) e.push_back(r->mean_efficiency);
      w.push_back(static_cast<double>(r->waste));
    }
    const Summary st = summarize(t), sk = summarize(k), se = summarize(e), sw = summarize(w);
    out << key.rows << ',' << key.helpers << ',' << to_string(rows.front()->scenario) << ','
        << key.scheduler << ',' << rows.size() << ',' << fmt(st.mean) << ',' << fmt(st.ci95) << ','
        << fmt(sk.mean) << ',' << fmt(se.mean) << ',' << fmt(se.ci95) << ',' << fmt(sw.mean)
        << '\n';
  }
}

void write_improvement_csv(std::ostream& out, const std::vector<RunRow>& runs) {
  out << "R,N,scenario,baseline,replicates,improvement_pct_mean,improvement_pct_ci95,win_rate\n";
  // (R, N, seed) -> c3p T
  std::map<std::tuple<std::size_t, std::size_t, std::uint64_t>, double> c3p;
  for (const RunRow& r : runs) {
    if (r.scheduler == "c3p") c3p[{r.rows, r.helpers, r.seed}] = r.t_total;
  }
  if (c3p.empty()) return;
  std::map<PointKey, std::vector<double>> gains;
  std::map<PointKey, std::size_t> wins;
  std::vector<PointKey> order;
  std::map<PointKey, Scenario> scenario;
  for (const RunRow& r : runs) {
    if (r.scheduler == "c3p") continue;
    auto it = c3p.find({r.rows, r.helpers, r.seed});
    if (it == c3p.end()) continue;
    PointKey key{r.rows, r.helpers, r.scheduler};
    if (!gains.count(key)) order.push_back(key);
    gains[key].push_back(100.0 * (r.t_total - it->second) / r.t_total);
    wins[key] += it->second < r.t_total ? 1 : 0;
    scenario[key] = r.scenario;
  }
  for (const PointKey& key : order) {
    const Summary s = summarize(gains[key]);
    out << key.rows << ',' << key.helpers << ',' << to_string(scenario[key]) << ','
        << key.scheduler << ',' << s.n << ',' << fmt(s.mean) << ',' << fmt(s.ci95) << ','
        << fmt(static_cast<double>(wins[key]) / static_cast<double>(s.n)) << '\n';
  }
}

void write_efficiency_csv(std::ostream& out, const std::vector<HelperRow>& rows) {
  out << "R,N,seed,scheduler,helper,mu,a,rtt_data,r,efficiency,gamma_theory\n";
  for (const HelperRow& h : rows) {
    out << h.rows << ',' << h.helpers << ',' << h.seed << ',' << h.scheduler << ',' << h.helper
        << ',' << fmt(h.mu) << ',' << fmt(h.a) << ',' << fmt(h.rtt_data) << ',' << h.r << ','
        << fmt(h.efficiency) << ',' << fmt(h.gamma_theory) << '\n';
  }
}

void write_theory_csv(std::ostream& out, const std::vector<TheoryRow>& rows) {
  out << "R,N,seed,T_static_pred,T_c3p_pred,gamma_theory_mean\n";
  for (const TheoryRow& t : rows) {
    out << t.rows << ',' << t.helpers << ',' << t.seed << ',' << fmt(t.t_static) << ','
        << fmt(t.t_c3p) << ',' << fmt(t.gamma_mean) << '\n';
  }
}

void write_experiment(const std::filesystem::path& dir, const ExperimentOutput& out,
                      CsvOptions opts) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string() + ": " + ec.message());
  auto open = [&](const char* name) {
    std::ofstream f(dir / name);
    if (!f) throw ConfigError("cannot write " + (dir / name).string());
    return f;
  };
  {
    auto f = open("runs.csv");
    write_runs_csv(f, out.runs, opts);
  }
  {
    auto f = open("aggregate.csv");
    write_aggregate_csv(f, out.runs);
  }
  {
    auto f = open("improvement.csv");
    write_improvement_csv(f, out.runs);
  }
  {
    auto f = open("efficiency.csv");
    write_efficiency_csv(f, out.helper_rows);
  }
  {
    auto f = open("theory.csv");
    write_theory_csv(f, out.theory);
  }
}

}  // namespace c3sim
