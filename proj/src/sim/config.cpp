#include "condmon/sim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "condmon/error.hpp"
#include "json.hpp"

namespace condmon::sim {

namespace {

using json = nlohmann::json;

// Maps each JSON pointer in a document to the line its value starts on.
// Only run on text the real parser has already accepted.
class LineIndex {
 public:
  explicit LineIndex(const std::string& text) : text_(text) {
    skip_ws();
    value("");
  }

  int line_of(const std::string& pointer) const {
    auto it = lines_.find(pointer);
    return it == lines_.end() ? 1 : it->second;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string string_token() {
    std::string out;
    ++pos_;  // opening quote
    while (pos_ < text_.size() && text_[pos_] != '"') {
      if (text_[pos_] == '\\') out += text_[pos_++];
      out += text_[pos_++];
    }
    ++pos_;
    return out;
  }

  static std::string escape(const std::string& key) {
    std::string out;
    for (char c : key) {
      if (c == '~') out += "~0";
      else if (c == '/') out += "~1";
      else out += c;
    }
    return out;
  }

  void value(const std::string& ptr) {
    lines_[ptr] = line_;
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      while (pos_ < text_.size() && text_[pos_] != '}') {
        const std::string key = string_token();
        skip_ws();
        ++pos_;  // ':'
        skip_ws();
        value(ptr + "/" + escape(key));
        skip_ws();
        if (text_[pos_] == ',') ++pos_;
        skip_ws();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      for (int i = 0; pos_ < text_.size() && text_[pos_] != ']'; ++i) {
        value(ptr + "/" + std::to_string(i));
        skip_ws();
        if (text_[pos_] == ',') ++pos_;
        skip_ws();
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ',' &&
             text_[pos_] != '}' && text_[pos_] != ']') {
        ++pos_;
      }
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, int> lines_;
};

struct Ctx {
  std::string origin;
  LineIndex index;

  [[noreturn]] void fail(const std::string& ptr, const std::string& what) const {
    throw Error(Errc::BadConfig, origin + ":" + std::to_string(index.line_of(ptr)) + ": " +
                                     (ptr.empty() ? "/" : ptr) + ": " + what);
  }
};

class Node {
 public:
  Node(const Ctx& ctx, const json& j, std::string ptr) : ctx_(ctx), j_(j), ptr_(std::move(ptr)) {}

  const json& raw() const { return j_; }
  const std::string& pointer() const { return ptr_; }
  [[noreturn]] void fail(const std::string& what) const { ctx_.fail(ptr_, what); }

  void expect_object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    for (const auto& [key, _] : j_.items()) {
      bool ok = false;
      for (const char* a : allowed) ok = ok || key == a;
      if (!ok) child(key).fail("unknown key '" + key + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key); }
  Node child(const std::string& key) const { return Node(ctx_, j_.at(key), ptr_ + "/" + key); }
  Node at(std::size_t i) const { return Node(ctx_, j_.at(i), ptr_ + "/" + std::to_string(i)); }

  std::vector<Node> array() const {
    if (!j_.is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.push_back(at(i));
    return out;
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    return j_.get<double>();
  }
  std::uint64_t unsigned_int() const {
    if (!j_.is_number_unsigned()) fail("expected a non-negative integer");
    return j_.get<std::uint64_t>();
  }
  int integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<int>();
  }
  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  void read(const char* key, double& out) const {
    if (has(key)) out = child(key).number();
  }
  void read(const char* key, std::uint64_t& out) const {
    if (has(key)) out = child(key).unsigned_int();
  }
  void read(const char* key, int& out) const {
    if (has(key)) out = child(key).integer();
  }
  void read(const char* key, std::string& out) const {
    if (has(key)) out = child(key).string();
  }

 private:
  const Ctx& ctx_;
  const json& j_;
  std::string ptr_;
};

// Runs a semantic validator and re-raises its error at `node`.
template <typename F>
void checked(const Node& node, F&& f) {
  try {
    f();
  } catch (const Error& e) {
    if (e.code() != Errc::BadConfig && e.code() != Errc::InvalidArgument) throw;
    std::string msg = e.what();
    if (auto p = msg.find(": "); p != std::string::npos) msg = msg.substr(p + 2);
    node.fail(msg);
  }
}

Vec2 read_point(const Node& n) {
  n.expect_object({"x", "y"});
  Vec2 v;
  n.read("x", v.x);
  n.read("y", v.y);
  return v;
}

RobotState read_robot(const Node& n, std::size_t i) {
  n.expect_object({"id", "x", "y", "heading", "speed", "battery_pct", "cpu_load", "avoid_radius"});
  RobotState r;
  r.id = "robot" + std::to_string(i + 1);
  n.read("id", r.id);
  if (!is_valid_topic(r.id + "/battery")) n.child("id").fail("robot id must be a single topic segment");
  n.read("x", r.pos.x);
  n.read("y", r.pos.y);
  n.read("heading", r.heading);
  n.read("speed", r.speed);
  n.read("battery_pct", r.battery_pct);
  n.read("cpu_load", r.cpu_load);
  n.read("avoid_radius", r.avoid_radius);
  if (r.speed < 0) n.child("speed").fail("speed must be >= 0");
  if (r.battery_pct < 0 || r.battery_pct > 100) n.fail("battery_pct must be within [0, 100]");
  if (r.cpu_load < 0 || r.cpu_load > 1) n.fail("cpu_load must be within [0, 1]");
  if (r.avoid_radius <= 0) n.fail("avoid_radius must be > 0");
  return r;
}

Obstacle read_obstacle(const Node& n) {
  n.expect_object({"x", "y", "vx", "vy", "radius"});
  Obstacle o;
  n.read("x", o.pos.x);
  n.read("y", o.pos.y);
  n.read("vx", o.velocity.x);
  n.read("vy", o.velocity.y);
  n.read("radius", o.radius);
  if (o.radius <= 0) n.fail("radius must be > 0");
  return o;
}

StimulusEvent read_event(const Node& n) {
  n.expect_object({"at_s", "kind", "level", "duration_s"});
  StimulusEvent e;
  if (!n.has("kind")) n.fail("missing 'kind'");
  const std::string kind = n.child("kind").string();
  if (kind == "image") e.kind = StimulusEvent::Kind::ImageOnset;
  else if (kind == "audio") e.kind = StimulusEvent::Kind::AudioOnset;
  else if (kind == "workload") e.kind = StimulusEvent::Kind::WorkloadLevel;
  else n.child("kind").fail("kind must be image, audio or workload");
  n.read("at_s", e.at_s);
  n.read("level", e.level);
  n.read("duration_s", e.duration_s);
  if (e.kind != StimulusEvent::Kind::WorkloadLevel && n.has("level")) {
    n.child("level").fail("level applies to workload events only");
  }
  if (e.at_s < 0 || e.duration_s < 0) n.fail("event times must be >= 0");
  if (e.level < 0) n.child("level").fail("level must be >= 0");
  return e;
}

void read_profile(const Node& n, PhysioProfile& p) {
  n.expect_object({"ibi_mean_s", "ibi_sd_s", "ibi_workload_shift_s", "ibi_stimulus_dip_s", "gsr_tonic_us",
                   "gsr_noise_us", "gsr_drift_amp_us", "gsr_drift_period_s", "gsr_workload_shift_us",
                   "phasic_amp_us", "phasic_latency_s", "phasic_tau_s", "phasic_rise_s", "ecg_amp_mv",
                   "ecg_noise_mv", "ppg_amp", "ppg_noise", "ppg_delay_s", "ppg_hz", "gsr_hz", "ecg_hz"});
  n.read("ibi_mean_s", p.ibi_mean_s);
  n.read("ibi_sd_s", p.ibi_sd_s);
  n.read("ibi_workload_shift_s", p.ibi_workload_shift_s);
  n.read("ibi_stimulus_dip_s", p.ibi_stimulus_dip_s);
  n.read("gsr_tonic_us", p.gsr_tonic_us);
  n.read("gsr_noise_us", p.gsr_noise_us);
  n.read("gsr_drift_amp_us", p.gsr_drift_amp_us);
  n.read("gsr_drift_period_s", p.gsr_drift_period_s);
  n.read("gsr_workload_shift_us", p.gsr_workload_shift_us);
  n.read("phasic_amp_us", p.phasic_amp_us);
  n.read("phasic_latency_s", p.phasic_latency_s);
  n.read("phasic_tau_s", p.phasic_tau_s);
  n.read("phasic_rise_s", p.phasic_rise_s);
  n.read("ecg_amp_mv", p.ecg_amp_mv);
  n.read("ecg_noise_mv", p.ecg_noise_mv);
  n.read("ppg_amp", p.ppg_amp);
  n.read("ppg_noise", p.ppg_noise);
  n.read("ppg_delay_s", p.ppg_delay_s);
  n.read("ppg_hz", p.ppg_hz);
  n.read("gsr_hz", p.gsr_hz);
  n.read("ecg_hz", p.ecg_hz);
}

void read_physio(const Node& n, PhysioConfig& cfg) {
  n.expect_object({"seed", "duration_s", "start_time_s", "profile", "schedule"});
  n.read("seed", cfg.seed);
  n.read("duration_s", cfg.duration_s);
  n.read("start_time_s", cfg.start_time_s);
  if (n.has("profile")) read_profile(n.child("profile"), cfg.profile);
  if (n.has("schedule")) {
    const Node sched = n.child("schedule");
    cfg.schedule.events.clear();
    for (const auto& e : sched.array()) cfg.schedule.events.push_back(read_event(e));
    checked(sched, [&] { cfg.schedule.validate(); });
  }
  checked(n, [&] { cfg.validate(); });
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& json_text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    // byte offsets are 1-based and point just past the offending character
    const auto upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, json_text.size());
    const auto line = 1 + std::count(json_text.begin(), json_text.begin() + static_cast<std::ptrdiff_t>(upto), '\n');
    throw Error(Errc::BadConfig, origin + ":" + std::to_string(line) + ": invalid JSON");
  }
  const Ctx ctx{origin, LineIndex(json_text)};
  const Node root(ctx, doc, "");
  root.expect_object({"seed", "duration_s", "start_time_s", "dt_s", "publish_hz", "heading_sd", "workspace", "router",
                      "robots", "obstacles", "rssi", "battery", "cpu_events", "physio"});

  ScenarioConfig sc;
  FleetConfig& f = sc.fleet;
  root.read("seed", f.seed);
  if (root.has("seed")) sc.physio.seed = f.seed;
  root.read("duration_s", f.duration_s);
  root.read("start_time_s", f.start_time_s);
  sc.physio.start_time_s = f.start_time_s;
  root.read("dt_s", f.dt_s);
  root.read("publish_hz", f.publish_hz);
  root.read("heading_sd", f.heading_sd);
  if (root.has("workspace")) {
    const Node ws = root.child("workspace");
    ws.expect_object({"width", "height"});
    ws.read("width", f.world.width);
    ws.read("height", f.world.height);
  }
  if (root.has("router")) f.world.router = read_point(root.child("router"));
  if (root.has("robots")) {
    f.world.robots.clear();
    const auto robots = root.child("robots").array();
    for (std::size_t i = 0; i < robots.size(); ++i) f.world.robots.push_back(read_robot(robots[i], i));
    // an explicit heading keeps the given headings for every robot
    f.outward_initial_heading = std::none_of(robots.begin(), robots.end(), [](const Node& r) { return r.has("heading"); });
  }
  if (root.has("obstacles")) {
    f.world.obstacles.clear();
    for (const auto& o : root.child("obstacles").array()) f.world.obstacles.push_back(read_obstacle(o));
  }
  if (root.has("rssi")) {
    const Node n = root.child("rssi");
    n.expect_object({"p0_dbm", "n_exponent", "d0", "noise_sd_db"});
    n.read("p0_dbm", f.rssi.p0_dbm);
    n.read("n_exponent", f.rssi.n_exponent);
    n.read("d0", f.rssi.d0);
    n.read("noise_sd_db", f.rssi.noise_sd_db);
    checked(n, [&] { f.rssi.validate(); });
  }
  if (root.has("battery")) {
    const Node n = root.child("battery");
    n.expect_object({"alpha", "beta"});
    n.read("alpha", f.battery.alpha);
    n.read("beta", f.battery.beta);
    checked(n, [&] { f.battery.validate(); });
  }
  if (root.has("cpu_events")) {
    f.cpu_events.clear();
    for (const auto& n : root.child("cpu_events").array()) {
      n.expect_object({"robot", "start_s", "end_s", "cpu_load"});
      CpuEvent ev;
      if (!n.has("robot")) n.fail("missing 'robot'");
      n.read("robot", ev.robot);
      n.read("start_s", ev.start_s);
      n.read("end_s", ev.end_s);
      n.read("cpu_load", ev.cpu_load);
      const bool known = std::any_of(f.world.robots.begin(), f.world.robots.end(),
                                     [&](const RobotState& r) { return r.id == ev.robot; });
      if (!known) n.child("robot").fail("unknown robot '" + ev.robot + "'");
      if (!(ev.start_s < ev.end_s)) n.fail("start_s must be < end_s");
      if (ev.cpu_load < 0 || ev.cpu_load > 1) n.child("cpu_load").fail("cpu_load must be within [0, 1]");
      f.cpu_events.push_back(ev);
    }
  }
  checked(root, [&] { f.validate(); });
  if (root.has("physio")) read_physio(root.child("physio"), sc.physio);
  return sc;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::IoError, "cannot open config " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path);
}

}  // namespace condmon::sim
