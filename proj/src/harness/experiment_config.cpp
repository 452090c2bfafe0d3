#include "uavmec/experiment_config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

namespace uavmec {

using nlohmann::json;
using Pointer = json::json_pointer;

ConfigError::ConfigError(const std::string& message, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}

namespace {

// Walks well-formed JSON text and reports the line on which the value at a
// given pointer starts.
class LineScanner {
 public:
  LineScanner(const std::string& text, const Pointer& target) : s_(text), target_(target.to_string()) {}

  int run() {
    try {
      skip_ws();
      value("");
    } catch (const Found&) {
      return found_;
    } catch (const std::out_of_range&) {
      return 0;
    }
    return 0;
  }

 private:
  struct Found {};

  char peek() const { return s_.at(i_); }

  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\r' || s_[i_] == '\n')) {
      if (s_[i_] == '\n') ++line_;
      ++i_;
    }
  }

  std::string string_token() {
    std::string out;
    ++i_;  // opening quote
    while (peek() != '"') {
      if (peek() == '\\') {
        ++i_;
        const char e = peek();
        if (e == 'u') {
          out += s_.substr(i_ - 1, 6);
          i_ += 5;
          continue;
        }
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        ++i_;
        continue;
      }
      out += s_[i_++];
    }
    ++i_;
    return out;
  }

  static std::string escape(const std::string& token) {
    std::string out;
    for (char c : token) {
      if (c == '~') {
        out += "~0";
      } else if (c == '/') {
        out += "~1";
      } else {
        out += c;
      }
    }
    return out;
  }

  void value(const std::string& path) {
    if (path == target_) {
      found_ = line_;
      throw Found{};
    }
    const char c = peek();
    if (c == '{') {
      ++i_;
      skip_ws();
      if (peek() == '}') {
        ++i_;
        return;
      }
      while (true) {
        skip_ws();
        const int key_line = line_;
        const std::string key = string_token();
        const std::string child = path + "/" + escape(key);
        if (child == target_) {
          found_ = key_line;
          throw Found{};
        }
        skip_ws();
        ++i_;  // colon
        skip_ws();
        value(child);
        skip_ws();
        if (peek() == ',') {
          ++i_;
          continue;
        }
        ++i_;  // closing brace
        return;
      }
    }
    if (c == '[') {
      ++i_;
      skip_ws();
      if (peek() == ']') {
        ++i_;
        return;
      }
      for (std::size_t k = 0;; ++k) {
        skip_ws();
        value(path + "/" + std::to_string(k));
        skip_ws();
        if (peek() == ',') {
          ++i_;
          continue;
        }
        ++i_;
        return;
      }
    }
    if (c == '"') {
      string_token();
      return;
    }
    while (i_ < s_.size() && std::string_view(",]} \t\r\n").find(s_[i_]) == std::string_view::npos) ++i_;
  }

  const std::string& s_;
  std::string target_;
  std::size_t i_ = 0;
  int line_ = 1;
  int found_ = 0;
};

// One JSON object of the config, read key by key. Keys that were never
// asked for are rejected by finish().
class Section {
 public:
  Section(const json& obj, Pointer where, const std::string& text) : obj_(obj), where_(std::move(where)), text_(text) {
    if (!obj_.is_object()) fail_here(name() + " must be an object");
  }

  std::string name() const { return where_.empty() ? "config" : where_.to_string().substr(1); }

  const json* find(const std::string& key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  Pointer at(const std::string& key) const { return where_ / key; }

  [[noreturn]] void fail(const std::string& key, const std::string& message) const {
    throw ConfigError(message, locate_line(text_, at(key)));
  }

  [[noreturn]] void fail_here(const std::string& message) const {
    throw ConfigError(message, locate_line(text_, where_));
  }

  void number(const std::string& key, double& out) {
    if (const json* v = find(key)) {
      if (!v->is_number()) fail(key, qualified(key) + " must be a number");
      out = v->get<double>();
      if (!std::isfinite(out)) fail(key, qualified(key) + " must be finite");
    }
  }

  template <typename Int>
  void integer(const std::string& key, Int& out) {
    if (const json* v = find(key)) {
      if (!v->is_number_integer()) fail(key, qualified(key) + " must be an integer");
      if constexpr (std::is_unsigned_v<Int>) {
        if (v->get<long long>() < 0) fail(key, qualified(key) + " must be >= 0");
      }
      out = v->get<Int>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = find(key)) {
      if (!v->is_boolean()) fail(key, qualified(key) + " must be true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = find(key)) {
      if (!v->is_string()) fail(key, qualified(key) + " must be a string");
      out = v->get<std::string>();
    }
  }

  void point(const std::string& key, Vec2& out) {
    if (const json* v = find(key)) out = to_point(*v, key);
  }

  Vec2 to_point(const json& v, const std::string& key) const {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(key, qualified(key) + " must be a pair [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
  }

  std::string qualified(const std::string& key) const { return where_.empty() ? key : name() + "." + key; }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) fail(it.key(), "unknown key '" + qualified(it.key()) + "'");
    }
  }

  // Runs a validator, attributing its complaint to this section.
  template <typename F>
  void check(F&& f) const {
    try {
      f();
    } catch (const std::invalid_argument& e) {
      const std::string message = strip(e.what());
      // Messages open with the offending setting, possibly section-qualified.
      std::string key = message.substr(0, message.find(' '));
      if (const auto dot = key.rfind('.'); dot != std::string::npos) key.erase(0, dot + 1);
      if (obj_.contains(key)) fail(key, message);
      fail_here(message);
    }
  }

  static std::string strip(std::string message) {
    const std::string prefix = "invalid configuration: ";
    if (message.rfind(prefix, 0) == 0) message.erase(0, prefix.size());
    return message;
  }

  const json& obj_;
  Pointer where_;
  const std::string& text_;
  std::set<std::string> seen_;
};

GmrmParams default_terminal(int m) {
  GmrmParams p;
  p.mean_direction = m % 2 == 0 ? 0.0 : std::numbers::pi;
  return p;
}

void read_terminal(Section& s, GmrmParams& p, bool spread_is_variance) {
  s.number("speed_memory", p.speed_memory);
  s.number("direction_memory", p.direction_memory);
  s.number("mean_speed", p.mean_speed);
  s.number("mean_direction", p.mean_direction);
  s.number("speed_noise_mean", p.speed_noise_mean);
  s.number("direction_noise_mean", p.direction_noise_mean);
  for (auto [key, field] : {std::pair{"speed_noise_spread", &p.speed_noise_std},
                            std::pair{"direction_noise_spread", &p.direction_noise_std}}) {
    if (!s.find(key)) continue;
    double spread = 0.0;
    s.number(key, spread);
    if (spread < 0) s.fail(key, s.qualified(key) + " must be >= 0");
    *field = spread_is_variance ? std::sqrt(spread) : spread;
  }
  s.finish();
  s.check([&] { p.validate(); });
}

json terminal_json(const GmrmParams& p, bool spread_is_variance) {
  auto spread = [&](double sd) { return spread_is_variance ? sd * sd : sd; };
  return {{"speed_memory", p.speed_memory},
          {"direction_memory", p.direction_memory},
          {"mean_speed", p.mean_speed},
          {"mean_direction", p.mean_direction},
          {"speed_noise_mean", p.speed_noise_mean},
          {"speed_noise_spread", spread(p.speed_noise_std)},
          {"direction_noise_mean", p.direction_noise_mean},
          {"direction_noise_spread", spread(p.direction_noise_std)}};
}

MobilityParams read_terminal_list(const json& list, const Pointer& where, const std::string& text,
                                  MobilityParams base, bool spread_is_variance) {
  if (!list.is_array() || list.size() != base.size()) {
    throw ConfigError(where.to_string().substr(1) + " must list one entry per terminal (" +
                          std::to_string(base.size()) + ")",
                      locate_line(text, where));
  }
  for (std::size_t m = 0; m < base.size(); ++m) {
    Section t(list[m], where / m, text);
    read_terminal(t, base[m], spread_is_variance);
  }
  return base;
}

void read_world(Section& s, WorldConfig& w) {
  s.number("flight_time", w.flight_time);
  s.integer("slots", w.slots);
  s.integer("terminals", w.terminals);
  s.number("altitude", w.altitude);
  s.number("bandwidth", w.bandwidth);
  s.number("noise_power", w.noise_power);
  s.number("wpt_efficiency", w.wpt_efficiency);
  s.number("capacitance", w.capacitance);
  s.number("cycles_per_bit", w.cycles_per_bit);
  s.number("upload_overhead", w.upload_overhead);
  s.number("uav_power", w.uav_power);
  s.number("max_speed", w.max_speed);
  if (const json* f = s.find("field")) {
    Section fs(*f, s.at("field"), s.text_);
    fs.point("lo", w.field.lo);
    fs.point("hi", w.field.hi);
    fs.finish();
  }
  s.point("start", w.start);
  s.point("destination", w.destination);
  s.number("destination_radius", w.destination_radius);
  w.initial_energy.assign(static_cast<std::size_t>(std::max(w.terminals, 0)), 1e-3);
  if (const json* e = s.find("initial_energy")) {
    if (e->is_number()) {
      w.initial_energy.assign(w.initial_energy.size(), e->get<double>());
    } else if (e->is_array() && std::all_of(e->begin(), e->end(), [](const json& x) { return x.is_number(); })) {
      w.initial_energy = e->get<std::vector<double>>();
    } else {
      s.fail("initial_energy", "world.initial_energy must be a number or a list of numbers");
    }
  }
  s.number("max_power", w.max_power);
  s.number("max_frequency", w.max_frequency);
  s.number("reference_energy", w.reference_energy);
  if (const json* c = s.find("channel")) {
    Section cs(*c, s.at("channel"), s.text_);
    cs.number("carrier_frequency", w.channel.carrier_frequency);
    cs.number("light_speed", w.channel.light_speed);
    cs.number("h", w.channel.h);
    cs.number("l", w.channel.l);
    cs.number("eta_los", w.channel.eta_los);
    cs.number("eta_nlos", w.channel.eta_nlos);
    cs.finish();
    cs.check([&] { w.channel.validate(); });
  }
  s.finish();
  s.check([&] { w.validate(); });
}

void read_mobility(Section& s, TrainerConfig& t) {
  const int m = t.world.terminals;
  std::string spread = "variance";
  s.string("spread_is", spread);
  if (spread != "variance" && spread != "std") s.fail("spread_is", "mobility.spread_is must be \"variance\" or \"std\"");
  const bool spread_is_variance = spread == "variance";

  t.mobility.clear();
  for (int k = 0; k < m; ++k) t.mobility.push_back(default_terminal(k));
  if (const json* list = s.find("terminals")) {
    t.mobility = read_terminal_list(*list, s.at("terminals"), s.text_, t.mobility, spread_is_variance);
  }

  if (const json* p = s.find("initial_positions")) {
    if (p->is_string()) {
      const auto mode = p->get<std::string>();
      if (mode == "random_per_seed") {
        t.initial_positions.mode = InitialPositions::Mode::RandomPerSeed;
      } else if (mode == "random_per_episode") {
        t.initial_positions.mode = InitialPositions::Mode::RandomPerEpisode;
      } else {
        s.fail("initial_positions",
               "mobility.initial_positions must be \"random_per_seed\", \"random_per_episode\" or a list of points");
      }
    } else if (p->is_array()) {
      t.initial_positions.mode = InitialPositions::Mode::Fixed;
      t.initial_positions.fixed.clear();
      for (const auto& q : *p) t.initial_positions.fixed.push_back(s.to_point(q, "initial_positions"));
    } else {
      s.fail("initial_positions", "mobility.initial_positions has the wrong type");
    }
  }

  if (const json* sched = s.find("schedule")) {
    if (!sched->is_array()) s.fail("schedule", "mobility.schedule must be a list");
    for (std::size_t k = 0; k < sched->size(); ++k) {
      Section e((*sched)[k], s.at("schedule") / k, s.text_);
      MobilitySwitch sw;
      const json* ep = e.find("episode");
      if (!ep) e.fail_here("mobility schedule entry needs an episode");
      e.integer("episode", sw.episode);
      const json* list = e.find("terminals");
      if (!list) e.fail_here("mobility schedule entry needs terminals");
      sw.params = read_terminal_list(*list, e.at("terminals"), s.text_, t.mobility, spread_is_variance);
      e.finish();
      t.mobility_schedule.push_back(std::move(sw));
    }
  }
  s.finish();
}

void read_reward(Section& s, TrainerConfig& t) {
  s.integer("omega", t.reward.omega);
  if (const json* o = s.find("objective_omega"); o && !o->is_null()) {
    int w = 0;
    s.integer("objective_omega", w);
    t.objective_omega = w;
  }
  s.number("arrival_constant", t.reward.arrival_constant);
  s.number("distance_slope", t.reward.distance_slope);
  s.number("computation_scale", t.reward.computation_scale);
  s.boolean("sparse", t.reward.sparse);
  s.finish();
  s.check([&] {
    t.reward.validate();
    if (t.objective_omega && *t.objective_omega < 0) throw std::invalid_argument("objective_omega must be >= 0");
  });
}

void read_agent(Section& s, sac::AgentConfig& a) {
  s.number("alpha", a.alpha);
  s.number("gamma", a.gamma);
  s.number("tau", a.tau);
  s.number("learning_rate", a.learning_rate);
  s.integer("batch_size", a.batch_size);
  s.integer("memory_capacity", a.memory_capacity);
  s.integer("update_interval_slots", a.update_interval_slots);
  s.integer("grad_steps_per_update", a.grad_steps_per_update);
  s.integer("warmup_random_slots", a.warmup_random_slots);
  if (const json* h = s.find("hidden_layers")) {
    if (!h->is_array() || h->empty() ||
        !std::all_of(h->begin(), h->end(), [](const json& x) { return x.is_number_unsigned() && x.get<std::size_t>() > 0; })) {
      s.fail("hidden_layers", "agent.hidden_layers must be a non-empty list of positive integers");
    }
    a.hidden_layers = h->get<std::vector<std::size_t>>();
  }
  s.number("log_std_min", a.log_std_min);
  s.number("log_std_max", a.log_std_max);
  s.finish();
  s.check([&] { a.validate(); });
}

void read_run(Section& s, ExperimentConfig& cfg) {
  RunConfig& r = cfg.run;
  s.integer("episodes", r.episodes);
  if (const json* seeds = s.find("seeds")) {
    if (!seeds->is_array() || seeds->empty() ||
        !std::all_of(seeds->begin(), seeds->end(), [](const json& x) { return x.is_number_unsigned(); })) {
      s.fail("seeds", "run.seeds must be a non-empty list of non-negative integers");
    }
    r.seeds = seeds->get<std::vector<std::uint64_t>>();
    if (std::set<std::uint64_t>(r.seeds.begin(), r.seeds.end()).size() != r.seeds.size()) {
      s.fail("seeds", "run.seeds must not repeat");
    }
  }
  s.integer("eval_every", r.eval_every);
  s.integer("eval_episodes", r.eval_episodes);
  if (r.eval_episodes < 0) s.fail("eval_episodes", "run.eval_episodes must be >= 0");
  s.integer("checkpoint_every", r.checkpoint_every);
  s.string("output_dir", r.output_dir);
  if (r.output_dir.empty()) s.fail("output_dir", "run.output_dir must not be empty");
  s.integer("trace_episodes", r.trace_episodes);
  if (r.trace_episodes < 0) s.fail("trace_episodes", "run.trace_episodes must be >= 0");

  std::string baseline = "none";
  s.string("baseline", baseline);
  if (baseline == "none") {
    cfg.trainer.baseline.reset();
  } else if (auto kind = parse_baseline(baseline)) {
    cfg.trainer.baseline = *kind;
  } else {
    s.fail("baseline",
           "run.baseline must be none, hfh, straight, greedy_local, greedy_offload or random (got '" + baseline + "')");
  }
  std::string hybrid = "learned";
  s.string("hybrid", hybrid);
  if (hybrid != "learned" && hybrid != "random") s.fail("hybrid", "run.hybrid must be \"learned\" or \"random\"");
  cfg.trainer.learn = hybrid == "learned";
  s.finish();
}

}  // namespace

int locate_line(const std::string& text, const Pointer& pointer) { return LineScanner(text, pointer).run(); }

void set_dotted(json& doc, const std::string& path, const json& value) {
  json* node = &doc;
  std::stringstream ss(path);
  std::string key;
  std::vector<std::string> keys;
  while (std::getline(ss, key, '.')) keys.push_back(key);
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (!node->is_object()) throw std::invalid_argument("cannot set '" + path + "'");
    node = &(*node)[keys[i]];
    if (node->is_null()) *node = json::object();
  }
  if (keys.empty() || !node->is_object()) throw std::invalid_argument("cannot set '" + path + "'");
  (*node)[keys.back()] = value;
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto upto = std::min<std::size_t>(e.byte > 0 ? e.byte - 1 : 0, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
    std::string what = e.what();
    if (auto pos = what.find("syntax error"); pos != std::string::npos) what = what.substr(pos);
    throw ConfigError("malformed JSON: " + what, line);
  }

  ExperimentConfig cfg;
  Section root(doc, Pointer(), text);
  TrainerConfig& t = cfg.trainer;
  if (const json* w = root.find("world")) {
    Section s(*w, root.at("world"), text);
    read_world(s, t.world);
  } else {
    t.world.validate();
  }
  {
    const json empty = json::object();
    const json* m = root.find("mobility");
    Section s(m ? *m : empty, root.at("mobility"), text);
    read_mobility(s, t);
  }
  if (const json* r = root.find("reward")) {
    Section s(*r, root.at("reward"), text);
    read_reward(s, t);
  }
  if (const json* a = root.find("agent")) {
    Section s(*a, root.at("agent"), text);
    read_agent(s, t.agent);
  }
  if (const json* r = root.find("run")) {
    Section s(*r, root.at("run"), text);
    read_run(s, cfg);
  }
  if (const json* sw = root.find("sweep")) {
    Section s(*sw, root.at("sweep"), text);
    SweepConfig sweep;
    if (!s.find("parameter")) s.fail_here("sweep needs a parameter");
    s.string("parameter", sweep.parameter);
    const json* values = s.find("values");
    if (!values || !values->is_array() || values->empty()) s.fail_here("sweep needs a non-empty list of values");
    sweep.values = values->get<std::vector<json>>();
    s.finish();
    const auto section = sweep.parameter.substr(0, sweep.parameter.find('.'));
    if (section != "world" && section != "mobility" && section != "reward" && section != "agent") {
      s.fail("parameter", "sweep.parameter must name a world, mobility, reward or agent setting");
    }
    for (const auto& v : sweep.values) {
      json patched = doc;
      patched.erase("sweep");
      set_dotted(patched, sweep.parameter, v);
      try {
        parse_config(patched.dump());
      } catch (const ConfigError& e) {
        std::string msg = e.what();
        if (auto pos = msg.find(": "); e.line() > 0 && pos != std::string::npos) msg = msg.substr(pos + 2);
        s.fail("values", "sweep value " + v.dump() + " is invalid: " + msg);
      }
    }
    cfg.sweep = std::move(sweep);
  }
  root.finish();
  root.check([&] { t.validate(); });
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

json to_json(const ExperimentConfig& cfg) {
  const TrainerConfig& t = cfg.trainer;
  const WorldConfig& w = t.world;
  auto pt = [](Vec2 p) { return json::array({p.x, p.y}); };
  json doc;
  doc["world"] = {{"flight_time", w.flight_time},
                  {"slots", w.slots},
                  {"terminals", w.terminals},
                  {"altitude", w.altitude},
                  {"bandwidth", w.bandwidth},
                  {"noise_power", w.noise_power},
                  {"wpt_efficiency", w.wpt_efficiency},
                  {"capacitance", w.capacitance},
                  {"cycles_per_bit", w.cycles_per_bit},
                  {"upload_overhead", w.upload_overhead},
                  {"uav_power", w.uav_power},
                  {"max_speed", w.max_speed},
                  {"field", {{"lo", pt(w.field.lo)}, {"hi", pt(w.field.hi)}}},
                  {"start", pt(w.start)},
                  {"destination", pt(w.destination)},
                  {"destination_radius", w.destination_radius},
                  {"initial_energy", w.initial_energy},
                  {"max_power", w.max_power},
                  {"max_frequency", w.max_frequency},
                  {"reference_energy", w.reference_energy},
                  {"channel",
                   {{"carrier_frequency", w.channel.carrier_frequency},
                    {"light_speed", w.channel.light_speed},
                    {"h", w.channel.h},
                    {"l", w.channel.l},
                    {"eta_los", w.channel.eta_los},
                    {"eta_nlos", w.channel.eta_nlos}}}};

  // Spreads are echoed as standard deviations so the round trip is exact.
  json mobility;
  mobility["spread_is"] = "std";
  mobility["terminals"] = json::array();
  for (const auto& p : t.mobility) mobility["terminals"].push_back(terminal_json(p, false));
  switch (t.initial_positions.mode) {
    case InitialPositions::Mode::RandomPerSeed:
      mobility["initial_positions"] = "random_per_seed";
      break;
    case InitialPositions::Mode::RandomPerEpisode:
      mobility["initial_positions"] = "random_per_episode";
      break;
    case InitialPositions::Mode::Fixed:
      mobility["initial_positions"] = json::array();
      for (const auto& p : t.initial_positions.fixed) mobility["initial_positions"].push_back(pt(p));
      break;
  }
  mobility["schedule"] = json::array();
  for (const auto& s : t.mobility_schedule) {
    json terminals = json::array();
    for (const auto& p : s.params) terminals.push_back(terminal_json(p, false));
    mobility["schedule"].push_back({{"episode", s.episode}, {"terminals", terminals}});
  }
  doc["mobility"] = mobility;

  doc["reward"] = {{"omega", t.reward.omega},
                   {"objective_omega", t.objective_omega ? json(*t.objective_omega) : json(nullptr)},
                   {"arrival_constant", t.reward.arrival_constant},
                   {"distance_slope", t.reward.distance_slope},
                   {"computation_scale", t.reward.computation_scale},
                   {"sparse", t.reward.sparse}};
  const auto& a = t.agent;
  doc["agent"] = {{"alpha", a.alpha},
                  {"gamma", a.gamma},
                  {"tau", a.tau},
                  {"learning_rate", a.learning_rate},
                  {"batch_size", a.batch_size},
                  {"memory_capacity", a.memory_capacity},
                  {"update_interval_slots", a.update_interval_slots},
                  {"grad_steps_per_update", a.grad_steps_per_update},
                  {"warmup_random_slots", a.warmup_random_slots},
                  {"hidden_layers", a.hidden_layers},
                  {"log_std_min", a.log_std_min},
                  {"log_std_max", a.log_std_max}};
  const auto& r = cfg.run;
  doc["run"] = {{"episodes", r.episodes},
                {"seeds", r.seeds},
                {"eval_every", r.eval_every},
                {"eval_episodes", r.eval_episodes},
                {"checkpoint_every", r.checkpoint_every},
                {"output_dir", r.output_dir},
                {"trace_episodes", r.trace_episodes},
                {"baseline", t.baseline ? std::string(to_string(*t.baseline)) : std::string("none")},
                {"hybrid", t.learn ? "learned" : "random"}};
  if (cfg.sweep) doc["sweep"] = {{"parameter", cfg.sweep->parameter}, {"values", cfg.sweep->values}};
  return doc;
}

json checkpoint_identity(const json& resolved) {
  json id = resolved;
  id.erase("sweep");
  json run = id.at("run");
  id.erase("run");
  id["policy"] = {{"baseline", run.at("baseline")}, {"hybrid", run.at("hybrid")}};
  return id;
}

}  // namespace uavmec
