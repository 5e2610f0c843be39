#include "condmon/cli/commands.hpp"

#include <signal.h>

#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "condmon/bag/player.hpp"
#include "condmon/bag/reader.hpp"
#include "condmon/bag/recorder.hpp"
#include "condmon/bag/writer.hpp"
#include "condmon/bus/broker.hpp"
#include "condmon/bus/client.hpp"
#include "condmon/bus/socket.hpp"
#include "condmon/error.hpp"
#include "condmon/features/report.hpp"
#include "condmon/features/robot.hpp"
#include "condmon/sim/config.hpp"
#include "condmon/sync/filter.hpp"

namespace condmon::cli {

namespace {

using namespace std::chrono_literals;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Blocks SIGINT/SIGTERM for the lifetime of the object and runs `on_signal`
// from a watcher thread when one arrives.
class SignalWatch {
 public:
  explicit SignalWatch(std::function<void()> on_signal) : on_signal_(std::move(on_signal)) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set, &old_);
    thread_ = std::thread([this, set] {
      const timespec tick{0, 100'000'000};
      while (!done_.load()) {
        if (sigtimedwait(&set, nullptr, &tick) > 0) {
          on_signal_();
          return;
        }
      }
    });
  }
  ~SignalWatch() {
    done_.store(true);
    thread_.join();
    pthread_sigmask(SIG_SETMASK, &old_, nullptr);
  }

 private:
  std::function<void()> on_signal_;
  sigset_t old_{};
  std::atomic<bool> done_{false};
  std::thread thread_;
};

// Sleeps so that simulated time advances at `speed` times wall time.
std::function<void(double)> make_pacer(double speed) {
  if (!(speed > 0)) return {};
  const auto t0 = std::chrono::steady_clock::now();
  return [t0, speed](double sim_s) {
    std::this_thread::sleep_until(t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                           std::chrono::duration<double>(sim_s / speed)));
  };
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error(Errc::IoError, "cannot write " + path);
  f << text;
  if (!f.flush()) throw Error(Errc::IoError, "write failed for " + path);
}

// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else write_file(path, text);
}

std::string format_value(const StreamDescriptor* desc, const StampedMessage& m) {
  if (desc && desc->schema.kind != PayloadSchema::Kind::Blob && !m.payload.empty() && m.payload.size() % 8 == 0) {
    std::string out;
    for (double v : decode_reals(m.payload)) out += fmt::format("{}{}", out.empty() ? "" : ";", v);
    return out;
  }
  std::string hex;
  for (auto b : m.payload) hex += fmt::format("{:02x}", b);
  return hex;
}

// broker --------------------------------------------------------------------

struct BrokerArgs {
  std::string listen;
  int ping_ms = 2000;
  int idle_ms = 10000;
};

int cmd_broker(const BrokerArgs& a, std::ostream& out) {
  bus::BrokerOptions opts;
  opts.listen = a.listen.empty() ? bus::default_broker_address() : a.listen;
  opts.ping_interval = std::chrono::milliseconds(a.ping_ms);
  opts.idle_timeout = std::chrono::milliseconds(a.idle_ms);
  bus::Broker broker(opts);
  out << "listening on " << broker.address() << std::endl;
  std::atomic<bool> stop{false};
  {
    SignalWatch watch([&] { stop.store(true); });
    broker.start();
    while (!stop.load()) std::this_thread::sleep_for(50ms);
  }
  broker.stop();
  const auto st = broker.stats();
  out << fmt::format("broker stopped: {} frames in, {} dropped, {} rejected\n", st.frames_in, st.dropped, st.rejected);
  return kExitOk;
}

// record / play / info ----------------------------------------------------

struct RecordArgs {
  std::string topics = "**";
  std::string output;
  std::string broker;
  std::uint64_t max_messages = 0;
  double duration_s = 0;
  std::uint64_t chunk_bytes = 4u << 20;
  double chunk_interval_s = 5;
};

int cmd_record(const RecordArgs& a, std::ostream& out, std::ostream& err) {
  bag::RecordOptions opts;
  opts.pattern = a.topics;
  opts.broker = a.broker;
  if (a.max_messages > 0) opts.max_messages = a.max_messages;
  if (a.duration_s > 0) opts.max_duration = std::chrono::milliseconds(std::llround(a.duration_s * 1000));
  opts.writer.chunk_bytes = a.chunk_bytes;
  opts.writer.chunk_interval = std::chrono::milliseconds(std::llround(a.chunk_interval_s * 1000));
  bag::Recorder rec(a.output, opts);
  bag::RecordStats stats;
  {
    SignalWatch watch([&] { rec.request_stop(true); });
    stats = rec.run([&] { err << "recording '" << a.topics << "' to " << a.output << std::endl; });
  }
  out << fmt::format("recorded {} messages ({} rejected) to {}\n", stats.messages, stats.rejected, a.output);
  return kExitOk;
}

int cmd_play(const std::string& path, double rate, const std::string& broker, std::ostream& out) {
  if (!(rate > 0)) throw UsageError("--rate must be > 0");
  auto player = bag::Player::open(path, rate);
  bus::Client client(broker);
  std::size_t n = 0;
  {
    SignalWatch watch([&] { player.stop(); });
    n = player.play(client);
  }
  client.sync();
  out << fmt::format("played {} of {} messages\n", n, player.size());
  return kExitOk;
}

int cmd_info(const std::string& path, std::ostream& out) {
  const auto s = bag::bag_info(path);
  out << fmt::format("path:      {}\n", path);
  out << fmt::format("size:      {} bytes\n", s.size_bytes);
  out << fmt::format("created:   {}\n", to_string(s.creation));
  out << fmt::format("start:     {}\n", s.first ? to_string(*s.first) : "-");
  out << fmt::format("end:       {}\n", s.last ? to_string(*s.last) : "-");
  out << fmt::format("duration:  {:.9f} s\n", static_cast<double>(s.duration_ns) * 1e-9);
  out << fmt::format("messages:  {}\n", s.total);
  out << fmt::format("recovered: {}\n", s.recovered ? "yes" : "no");
  out << fmt::format("streams:   {}\n", s.streams.size());
  for (const auto& st : s.streams) {
    out << fmt::format("  {:<24} {:<20} {:>8} msgs  {:>9.3f} Hz (nominal {:.3f})\n", st.desc.id,
                       to_string(st.desc.kind), st.count, st.rate_hz, st.desc.nominal_rate_hz);
  }
  return kExitOk;
}

// simulators ------------------------------------------------------------------

struct SimArgs {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> duration_s;
  std::string output;
  std::string broker;
  double speed = 0;
  // physio only
  std::string schedule;
  double round_s = 60;
  double image_at_s = 30;
};

sim::ScenarioConfig load_config(const SimArgs& a) {
  sim::ScenarioConfig sc;
  if (!a.config.empty()) sc = sim::load_scenario(a.config);
  return sc;
}

// Runs `body` against a bag writer or a broker connection.
template <typename F>
std::uint64_t with_sink(const SimArgs& a, F&& body) {
  if (!a.output.empty()) {
    bag::Writer writer(a.output);
    const auto n = body(static_cast<MessageSink&>(writer));
    writer.close();
    return n;
  }
  bus::Client client(a.broker);
  const auto n = body(static_cast<MessageSink&>(client));
  client.sync();
  return n;
}

int cmd_sim_fleet(const SimArgs& a, std::ostream& out) {
  auto cfg = load_config(a).fleet;
  if (a.seed) cfg.seed = *a.seed;
  if (a.duration_s) cfg.duration_s = *a.duration_s;
  cfg.validate();
  sim::FleetRun run;
  with_sink(a, [&](MessageSink& sink) {
    run = sim::run_fleet_scenario(cfg, sink, false, make_pacer(a.speed));
    return run.messages;
  });
  out << fmt::format("published {} messages from {} robots over {} s (min obstacle clearance {:.3f} m)\n",
                     run.messages, cfg.world.robots.size(), cfg.duration_s, run.min_obstacle_clearance);
  return kExitOk;
}

int cmd_sim_physio(const SimArgs& a, std::ostream& out) {
  auto cfg = load_config(a).physio;
  if (a.seed) cfg.seed = *a.seed;
  if (a.duration_s) cfg.duration_s = *a.duration_s;
  const bool from_config = !a.config.empty() && a.schedule.empty();
  const std::string kind = a.schedule.empty() ? "workload" : a.schedule;
  if (!from_config) {
    if (kind == "workload") {
      cfg.schedule = sim::workload_schedule(a.round_s);
    } else if (kind == "image" || kind == "audio") {
      cfg.schedule.events = {{a.image_at_s,
                              kind == "image" ? sim::StimulusEvent::Kind::ImageOnset
                                              : sim::StimulusEvent::Kind::AudioOnset,
                              0, 5.0}};
      if (cfg.duration_s == 0) cfg.duration_s = a.image_at_s + 30;
    } else if (kind == "none") {
      cfg.schedule.events.clear();
    } else {
      throw UsageError("--schedule must be workload, image, audio or none");
    }
  }
  cfg.validate();
  const auto n = with_sink(a, [&](MessageSink& sink) { return sim::physio_generator(cfg, sink, make_pacer(a.speed)); });
  out << fmt::format("published {} messages over {} s\n", n, cfg.effective_duration());
  return kExitOk;
}

// sync ----------------------------------------------------------------------

struct SyncArgs {
  std::string input;
  std::vector<std::string> topics;
  std::string policy = "approx";
  std::optional<double> slop_ms;
  std::size_t queue = sync::kDefaultQueueBound;
  std::string output;
  std::string broker;
  bool live = false;
  double duration_s = 0;
  std::uint64_t max_tuples = 0;
  std::string publish;
};

class SyncCsv {
 public:
  SyncCsv(const std::vector<std::string>& topics, std::map<std::string, StreamDescriptor> descs)
      : topics_(topics), descs_(std::move(descs)) {
    text_ = "pivot";
    for (const auto& t : topics_) text_ += "," + t;
    text_ += ",spread_ns\n";
  }
  void add(const sync::SyncedTuple& tup) {
    text_ += to_string(tup.pivot_stamp);
    for (const auto& m : tup.messages) {
      auto it = descs_.find(m.stream);
      text_ += "," + format_value(it == descs_.end() ? nullptr : &it->second, m);
    }
    text_ += fmt::format(",{}\n", tup.spread_ns);
  }
  void describe(const StreamDescriptor& d) { descs_.emplace(d.id, d); }
  const std::string& text() const { return text_; }

 private:
  std::vector<std::string> topics_;
  std::map<std::string, StreamDescriptor> descs_;
  std::string text_;
};

sync::SyncPolicy make_policy(const SyncArgs& a, const std::vector<double>& rates) {
  if (a.policy == "exact") return sync::ExactTime{};
  if (a.policy != "approx") throw UsageError("--policy must be exact or approx");
  if (a.slop_ms) {
    if (!(*a.slop_ms >= 0)) throw UsageError("--slop must be >= 0");
    return sync::ApproximateTime{std::llround(*a.slop_ms * 1e6)};
  }
  if (rates.size() != a.topics.size()) throw UsageError("--slop is required when stream rates are unknown");
  return sync::ApproximateTime{sync::default_slop_ns(rates)};
}

int cmd_sync(const SyncArgs& a, std::ostream& out, std::ostream& err) {
  if (a.topics.size() < 2) throw UsageError("sync needs at least two --topics");
  if (a.live == !a.input.empty()) throw UsageError("give either a bag path or --live");

  std::vector<sync::SyncedTuple> tuples;
  sync::SyncCounters counters;
  std::string csv;
  if (!a.live) {
    const auto contents = bag::load(a.input);
    std::map<std::string, StreamDescriptor> descs;
    for (const auto& d : contents.streams) descs.emplace(d.id, d);
    std::vector<double> rates;
    for (const auto& t : a.topics) {
      auto it = descs.find(t);
      if (it == descs.end()) throw Error(Errc::MissingStream, "stream '" + t + "' not in " + a.input);
      if (it->second.nominal_rate_hz > 0) rates.push_back(it->second.nominal_rate_hz);
    }
    sync::SyncFilter filter(a.topics, make_policy(a, rates), a.queue);
    SyncCsv table(a.topics, descs);
    for (auto& m : bag::sorted_messages(contents.file_order)) {
      if (filter.state().index_of(m.stream) < 0) continue;
      try {
        for (const auto& tup : filter.push(std::move(m))) table.add(tup);
      } catch (const Error& e) {
        if (e.code() != Errc::OutOfOrder) throw;
      }
    }
    counters = filter.counters();
    csv = table.text();
  } else {
    bus::Client client(a.broker);
    for (const auto& t : a.topics) client.subscribe(t, 1u << 16);
    client.sync();
    std::vector<double> rates;
    for (const auto& t : a.topics) {
      if (const auto* d = client.descriptor(t); d && d->nominal_rate_hz > 0) rates.push_back(d->nominal_rate_hz);
    }
    sync::SyncFilter filter(a.topics, make_policy(a, rates), a.queue);
    SyncCsv table(a.topics, client.descriptors());
    const std::string out_topic = "synced/" + a.publish;
    if (!a.publish.empty()) {
      client.advertise({out_topic, StreamKind::Robot, 0.0, PayloadSchema::blob(), kFlagNone});
    }
    std::atomic<bool> stop{false};
    SignalWatch watch([&] { stop.store(true); });
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                                                  std::chrono::duration<double>(a.duration_s));
    std::uint64_t seq = 1;
    while (!stop.load()) {
      if (a.duration_s > 0 && std::chrono::steady_clock::now() >= deadline) break;
      if (a.max_tuples > 0 && filter.counters().emitted >= a.max_tuples) break;
      auto m = client.receive(100ms);
      if (!m) continue;
      if (const auto* d = client.descriptor(m->stream)) table.describe(*d);
      try {
        for (const auto& tup : filter.push(std::move(*m))) {
          table.add(tup);
          if (!a.publish.empty()) client.publish(sync::to_synced_message(tup, a.publish, seq++));
        }
      } catch (const Error& e) {
        if (e.code() != Errc::OutOfOrder && e.code() != Errc::UnknownStream) throw;
      }
    }
    if (!a.publish.empty()) client.sync();
    counters = filter.counters();
    csv = table.text();
  }
  emit(a.output, csv, out);
  err << fmt::format("{} tuples, {} out of order, {} overflow, {} discarded\n", counters.emitted,
                     counters.out_of_order, counters.overflow, counters.discarded);
  return kExitOk;
}

// features / report -------------------------------------------------------

struct FeatureArgs {
  std::string input;
  double window_s = 30;
  std::string output;
  bool status = false;
};

int cmd_features(const FeatureArgs& a, std::ostream& out) {
  if (!(a.window_s > 0)) throw UsageError("--window must be > 0");
  const auto contents = bag::load(a.input);
  const auto msgs = bag::sorted_messages(contents.file_order);
  if (msgs.empty()) throw Error(Errc::NoData, a.input + " holds no messages");
  const Timestamp first = msgs.front().stamp, last = msgs.back().stamp;
  const auto window_ns = static_cast<std::int64_t>(std::llround(a.window_s * 1e9));

  std::string csv = "robot,window_start,window_end,battery_utilization_pct_per_min,mean_rssi_dbm,deployment_s\n";
  for (const auto& d : contents.streams) {
    const auto ns = std::string(d.name_space());
    if (d.id != ns + "/battery") continue;
    const auto battery = features::Series::from_messages(d.id, msgs);
    if (battery.empty()) continue;
    const auto wifi = features::Series::from_messages(ns + "/wifi", msgs);
    const Timestamp seen = battery.samples().front().stamp;
    for (Timestamp ws = first; !(last < ws); ws = ws.plus_nanos(window_ns)) {
      const Timestamp we = ws.plus_nanos(window_ns);
      std::string util, rssi, deployed;
      if (battery.window(ws, we).size() >= 2) util = fmt::format("{:.6f}", features::battery_utilization(battery, ws, we));
      if (!wifi.window(ws, we).empty()) rssi = fmt::format("{:.6f}", features::window_location(wifi, ws, we).mean);
      const Timestamp at = we < last ? we : last;
      if (!(at < seen)) deployed = fmt::format("{:.3f}", features::deployment_time(seen, at));
      csv += fmt::format("{},{},{},{},{},{}\n", ns, to_string(ws), to_string(we), util, rssi, deployed);
    }
  }
  emit(a.output, csv, out);

  if (a.status) {
    features::HealthTable table;
    for (const auto& d : contents.streams) {
      if (d.nominal_rate_hz > 0) table.register_stream(d.id, d.nominal_rate_hz);
    }
    for (const auto& m : msgs) table.observe(m.stream, m.stamp);
    out << "stream,status,last_seen\n";
    for (const auto& h : table.sensor_status(last)) {
      out << fmt::format("{},{},{}\n", h.stream, features::to_string(h.state), to_string(h.last_seen));
    }
  }
  return kExitOk;
}

int cmd_report(const std::string& input, const std::string& csv_path, const std::string& text_path, std::ostream& out,
               std::ostream& err) {
  const auto msgs = bag::read(input);
  const auto report = features::stats_report(msgs);
  for (const auto& w : report.warnings) err << "warning: " << w << "\n";
  const auto text = features::report_text(report);
  if (!csv_path.empty()) write_file(csv_path, features::report_csv(report));
  if (!text_path.empty()) write_file(text_path, text);
  out << text;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"condmon: condition monitoring for robots and human operators"};
  app.name("condmon");
  app.require_subcommand(1, 1);

  BrokerArgs broker_args;
  auto* broker = app.add_subcommand("broker", "Run the message broker until SIGINT/SIGTERM");
  broker->add_option("--listen", broker_args.listen, "host:port (default $CONDMON_BROKER or 127.0.0.1:7447)");
  broker->add_option("--ping-interval-ms", broker_args.ping_ms, "Idle time before a keepalive PING")->check(CLI::PositiveNumber);
  broker->add_option("--idle-timeout-ms", broker_args.idle_ms, "Silence before a client is dropped")->check(CLI::PositiveNumber);

  RecordArgs rec_args;
  auto* record = app.add_subcommand("record", "Record bus traffic into a bag");
  record->add_option("--topics", rec_args.topics, "Subscription pattern");
  record->add_option("-o,--output", rec_args.output, "Bag path")->required();
  record->add_option("--broker", rec_args.broker, "Broker address");
  record->add_option("--max-messages", rec_args.max_messages, "Stop after this many messages");
  record->add_option("--duration", rec_args.duration_s, "Stop after this many wall seconds");
  record->add_option("--chunk-bytes", rec_args.chunk_bytes, "Chunk flush size")->check(CLI::PositiveNumber);
  record->add_option("--chunk-interval", rec_args.chunk_interval_s, "Chunk flush interval, seconds")->check(CLI::PositiveNumber);

  std::string play_path, play_broker;
  double play_rate = 1.0;
  auto* play = app.add_subcommand("play", "Replay a bag onto the bus");
  play->add_option("bag", play_path, "Bag path")->required();
  play->add_option("--rate", play_rate, "Playback speed factor");
  play->add_option("--broker", play_broker, "Broker address");

  std::string info_path;
  auto* info = app.add_subcommand("info", "Summarise a bag");
  info->add_option("bag", info_path, "Bag path")->required();

  SimArgs fleet_args, physio_args;
  auto add_sim_options = [](CLI::App* cmd, SimArgs& s) {
    cmd->add_option("--config", s.config, "Scenario JSON");
    cmd->add_option("--seed", s.seed, "RNG seed");
    cmd->add_option("--duration", s.duration_s, "Simulated seconds");
    cmd->add_option("-o,--output", s.output, "Write a bag instead of publishing");
    cmd->add_option("--broker", s.broker, "Broker address");
    cmd->add_option("--speed", s.speed, "Simulated seconds per wall second (0: unpaced)");
  };
  auto* sim_fleet = app.add_subcommand("sim-fleet", "Simulate the robot fleet");
  add_sim_options(sim_fleet, fleet_args);
  auto* sim_physio = app.add_subcommand("sim-physio", "Simulate physiological streams");
  add_sim_options(sim_physio, physio_args);
  sim_physio->add_option("--schedule", physio_args.schedule, "workload | image | audio | none");
  sim_physio->add_option("--round", physio_args.round_s, "Workload round length, seconds")->check(CLI::PositiveNumber);
  sim_physio->add_option("--stimulus-at", physio_args.image_at_s, "Stimulus onset, seconds");

  SyncArgs sync_args;
  auto* sync_cmd = app.add_subcommand("sync", "Synchronise streams and write tuples as CSV");
  sync_cmd->add_option("bag", sync_args.input, "Bag path (omit with --live)");
  sync_cmd->add_option("--topics", sync_args.topics, "Member streams, two or more")->required();
  sync_cmd->add_option("--policy", sync_args.policy, "exact | approx");
  sync_cmd->add_option("--slop", sync_args.slop_ms, "Slop in milliseconds (default: half the slowest period)");
  sync_cmd->add_option("--queue", sync_args.queue, "Per-stream queue bound")->check(CLI::PositiveNumber);
  sync_cmd->add_option("-o,--output", sync_args.output, "CSV path (default stdout)");
  sync_cmd->add_flag("--live", sync_args.live, "Read from the broker");
  sync_cmd->add_option("--broker", sync_args.broker, "Broker address");
  sync_cmd->add_option("--duration", sync_args.duration_s, "Live: stop after this many wall seconds");
  sync_cmd->add_option("--max-tuples", sync_args.max_tuples, "Live: stop after this many tuples");
  sync_cmd->add_option("--publish", sync_args.publish, "Live: republish tuples on synced/<name>");

  FeatureArgs feat_args;
  auto* feat = app.add_subcommand("features", "Robot condition features from a bag");
  feat->add_option("bag", feat_args.input, "Bag path")->required();
  feat->add_option("--window", feat_args.window_s, "Window length, seconds");
  feat->add_option("-o,--output", feat_args.output, "CSV path (default stdout)");
  feat->add_flag("--status", feat_args.status, "Also print sensor status at the last stamp");

  std::string report_path, report_csv, report_txt;
  auto* report = app.add_subcommand("report", "Baseline-delta statistics table");
  report->add_option("bag", report_path, "Bag path")->required();
  report->add_option("-o,--output", report_csv, "CSV path");
  report->add_option("--text", report_txt, "Text table path");

  PlotSpec plot_spec;
  std::string plot_format;
  auto* plot = app.add_subcommand("plot", "Plot streams to CSV or SVG");
  plot->add_option("bag", plot_spec.input, "Bag path")->required();
  plot->add_option("--streams", plot_spec.streams, "Topic patterns")->required();
  plot->add_option("--from", plot_spec.from_s, "Range start, seconds after the first message");
  plot->add_option("--to", plot_spec.to_s, "Range end, seconds after the first message");
  plot->add_option("--period", plot_spec.period_s, "CSV grid period, seconds");
  plot->add_option("-o,--output", plot_spec.output, "Output path")->required();
  plot->add_option("--format", plot_format, "csv | svg (default from extension)");
  plot->add_flag("--markers", plot_spec.markers, "Overlay segment and stimulus markers");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << "condmon 1.0.0\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (broker->parsed()) return cmd_broker(broker_args, out);
    if (record->parsed()) return cmd_record(rec_args, out, err);
    if (play->parsed()) return cmd_play(play_path, play_rate, play_broker, out);
    if (info->parsed()) return cmd_info(info_path, out);
    if (sim_fleet->parsed()) return cmd_sim_fleet(fleet_args, out);
    if (sim_physio->parsed()) return cmd_sim_physio(physio_args, out);
    if (sync_cmd->parsed()) return cmd_sync(sync_args, out, err);
    if (feat->parsed()) return cmd_features(feat_args, out);
    if (report->parsed()) return cmd_report(report_path, report_csv, report_txt, out, err);
    if (plot->parsed()) {
      if (plot_format.empty()) plot_spec.format = format_for(plot_spec.output);
      else if (plot_format == "csv") plot_spec.format = PlotSpec::Format::Csv;
      else if (plot_format == "svg") plot_spec.format = PlotSpec::Format::Svg;
      else throw UsageError("--format must be csv or svg");
      write_plot(plot_spec);
      return kExitOk;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == Errc::BindFailed ? kExitUsage : kExitDomain;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace condmon::cli
