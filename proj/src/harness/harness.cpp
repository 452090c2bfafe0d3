#include "uavmec/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "uavmec/mdp.hpp"

namespace uavmec::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string(), 0);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::trunc) {
  std::ofstream out(path, std::ios::out | mode);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json eval_json(const EvalSummary& s) {
  return {{"episodes", s.episodes.size()},
          {"mean_return", s.mean_return},
          {"mean_sum_bits", s.mean_bits},
          {"mean_fairness", s.mean_fairness},
          {"mean_objective", s.mean_objective},
          {"arrival_ratio", s.arrival_ratio}};
}

// Keeps the first `lines` lines of a line-delimited file.
void truncate_lines(const fs::path& path, std::uint64_t lines) {
  std::vector<std::string> kept;
  {
    std::ifstream in(path);
    std::string line;
    while (kept.size() < lines && std::getline(in, line)) kept.push_back(line);
  }
  auto out = open_out(path);
  for (const auto& l : kept) out << l << '\n';
}

void drop_evals_after(const fs::path& path, std::uint64_t episode) {
  std::vector<std::string> kept;
  {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && json::parse(line).at("episode").get<std::uint64_t>() <= episode) kept.push_back(line);
    }
  }
  auto out = open_out(path);
  for (const auto& l : kept) out << l << '\n';
}

class TraceWriter {
 public:
  TraceWriter(const fs::path& path, int terminals, std::uint64_t max_episodes)
      : out_(open_out(path)), max_episodes_(max_episodes) {
    out_ << "episode,slot,uav_x,uav_y,speed,heading,reward";
    for (int m = 1; m <= terminals; ++m) {
      for (const char* f : {"power", "offload_share", "frequency", "distance", "bits", "energy"}) {
        out_ << ',' << f << '_' << m;
      }
    }
    out_ << '\n';
  }

  TraceSink sink() {
    return [this](const SlotTrace& t) {
      if (t.episode >= max_episodes_) return;
      out_ << t.episode << ',' << t.slot << ',' << fmt(t.uav.x) << ',' << fmt(t.uav.y) << ',' << fmt(t.speed) << ','
           << fmt(t.heading) << ',' << fmt(t.reward);
      for (std::size_t m = 0; m < t.power.size(); ++m) {
        out_ << ',' << fmt(t.power[m]) << ',' << fmt(t.offload_share[m]) << ',' << fmt(t.frequency[m]) << ','
             << fmt(t.distance[m]) << ',' << fmt(t.bits[m]) << ',' << fmt(t.energy[m]);
      }
      out_ << '\n';
    };
  }

 private:
  std::ofstream out_;
  std::uint64_t max_episodes_;
};

EvalSummary traced_evaluation(const Trainer& trainer, int episodes, std::uint64_t seed, const fs::path& trace_path,
                              int trace_episodes) {
  TraceWriter writer(trace_path, trainer.config().world.terminals, static_cast<std::uint64_t>(trace_episodes));
  return trainer.evaluate(episodes, seed, writer.sink());
}

void save_checkpoint_atomic(const Trainer& trainer, const fs::path& dir, const json& identity) {
  const fs::path tmp = dir.string() + ".tmp";
  fs::remove_all(tmp);
  trainer.save_checkpoint(tmp, identity);
  fs::remove_all(dir);
  fs::rename(tmp, dir);
}

SeedResult train_seed(const ExperimentConfig& config, const json& identity, std::uint64_t seed,
                      const std::optional<fs::path>& resume) {
  const RunConfig& run = config.run;
  const fs::path dir = fs::path(run.output_dir) / ("seed_" + std::to_string(seed));
  fs::create_directories(dir);
  const fs::path metrics_path = dir / "metrics.jsonl";
  const fs::path timing_path = dir / "timing.jsonl";
  const fs::path eval_path = dir / "eval.jsonl";

  std::optional<Trainer> trainer;
  if (resume) {
    trainer.emplace(Trainer::load_checkpoint(*resume, config.trainer, identity));
    truncate_lines(metrics_path, trainer->episodes_done());
    truncate_lines(timing_path, trainer->episodes_done());
    drop_evals_after(eval_path, trainer->episodes_done());
    spdlog::info("seed {}: resumed at episode {}", seed, trainer->episodes_done());
  } else {
    trainer.emplace(config.trainer, seed);
    open_out(metrics_path);
    open_out(timing_path);
    open_out(eval_path);
  }

  auto metrics = open_out(metrics_path, std::ios::app);
  auto timing = open_out(timing_path, std::ios::app);
  auto evals = open_out(eval_path, std::ios::app);
  const auto started = std::chrono::steady_clock::now();

  while (trainer->episodes_done() < run.episodes) {
    const EpisodeRecord r = trainer->train_episode();
    metrics << record_json(r).dump() << '\n' << std::flush;
    timing << json{{"episode", r.episode}, {"act_latency_us", r.act_latency_us}}.dump() << '\n' << std::flush;
    const std::uint64_t done = trainer->episodes_done();
    if (run.eval_every > 0 && done % run.eval_every == 0 && run.eval_episodes > 0) {
      const EvalSummary s = trainer->evaluate(run.eval_episodes, seed);
      json line = eval_json(s);
      line["episode"] = done;
      evals << line.dump() << '\n' << std::flush;
      spdlog::info("seed {} episode {}: eval return {:.2f}, fairness {:.3f}, arrival {:.2f}", seed, done,
                   s.mean_return, s.mean_fairness, s.arrival_ratio);
    }
    if (run.checkpoint_every > 0 && done % run.checkpoint_every == 0) {
      save_checkpoint_atomic(*trainer, dir / "checkpoint", identity);
    }
    if (done % 100 == 0) {
      spdlog::debug("seed {} episode {}: return {:.2f}", seed, done, r.episode_return);
    }
  }
  metrics.close();
  timing.close();
  evals.close();

  SeedResult result;
  result.seed = seed;
  if (run.episodes == 0) return result;

  save_checkpoint_atomic(*trainer, dir / "checkpoint", identity);
  write_metrics_csv(dir / "metrics.csv", read_metrics(metrics_path));
  result.final_eval = traced_evaluation(*trainer, run.eval_episodes, seed, dir / "trace.csv", run.trace_episodes);
  json fe = eval_json(result.final_eval);
  fe["seed"] = seed;
  write_json(dir / "final_eval.json", fe);
  spdlog::info("seed {} done in {:.1f}s: objective {:.4g}, fairness {:.3f}, arrival {:.2f}", seed,
               std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count(),
               result.final_eval.mean_objective, result.final_eval.mean_fairness, result.final_eval.arrival_ratio);
  return result;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

ExperimentConfig load_experiment(const std::optional<fs::path>& path, const Overrides& overrides) {
  const std::string text = path ? read_text(*path) : std::string("{}");
  ExperimentConfig base = parse_config(text);
  if (!overrides.seed && !overrides.output_dir && !overrides.baseline && !overrides.hybrid) return base;
  json doc = json::parse(text);
  if (overrides.seed) set_dotted(doc, "run.seeds", json::array({*overrides.seed}));
  if (overrides.output_dir) set_dotted(doc, "run.output_dir", *overrides.output_dir);
  if (overrides.baseline) set_dotted(doc, "run.baseline", *overrides.baseline);
  if (overrides.hybrid) set_dotted(doc, "run.hybrid", *overrides.hybrid);
  try {
    return parse_config(doc.dump(2));
  } catch (const ConfigError& e) {
    // Line numbers of the patched document mean nothing to the user.
    std::string msg = e.what();
    if (auto pos = msg.find(": "); e.line() > 0 && pos != std::string::npos) msg = msg.substr(pos + 2);
    throw ConfigError("command-line override rejected: " + msg, 0);
  }
}

json record_json(const EpisodeRecord& r) {
  return {{"episode", r.episode},           {"return", r.episode_return}, {"sum_bits", r.sum_bits},
          {"fairness", r.fairness},         {"objective", r.objective},   {"arrived", r.arrived},
          {"final_distance", r.final_distance}};
}

EpisodeRecord record_from_json(const json& j) {
  EpisodeRecord r;
  r.episode = j.at("episode").get<std::uint64_t>();
  r.episode_return = j.at("return").get<double>();
  r.sum_bits = j.at("sum_bits").get<double>();
  r.fairness = j.at("fairness").get<double>();
  r.objective = j.at("objective").get<double>();
  r.arrived = j.at("arrived").get<bool>();
  r.final_distance = j.at("final_distance").get<double>();
  return r;
}

std::vector<EpisodeRecord> read_metrics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<EpisodeRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(record_from_json(json::parse(line)));
  }
  return out;
}

void write_metrics_csv(const fs::path& path, const std::vector<EpisodeRecord>& records, std::size_t window) {
  auto out = open_out(path);
  out << "episode,return,sum_bits,fairness,objective,arrived,final_distance,"
         "ma_return,ma_objective,ma_fairness,arrival_ratio\n";
  double s_ret = 0, s_obj = 0, s_fair = 0, s_arr = 0;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    s_ret += r.episode_return;
    s_obj += r.objective;
    s_fair += r.fairness;
    s_arr += r.arrived ? 1.0 : 0.0;
    if (i >= window) {
      const auto& old = records[i - window];
      s_ret -= old.episode_return;
      s_obj -= old.objective;
      s_fair -= old.fairness;
      s_arr -= old.arrived ? 1.0 : 0.0;
    }
    const double n = static_cast<double>(std::min(i + 1, window));
    out << r.episode << ',' << fmt(r.episode_return) << ',' << fmt(r.sum_bits) << ',' << fmt(r.fairness) << ','
        << fmt(r.objective) << ',' << (r.arrived ? 1 : 0) << ',' << fmt(r.final_distance) << ',' << fmt(s_ret / n)
        << ',' << fmt(s_obj / n) << ',' << fmt(s_fair / n) << ',' << fmt(s_arr / n) << '\n';
  }
}

json summarize_seeds(const std::vector<SeedResult>& results) {
  std::vector<double> obj, fair, arr, bits, ret;
  json per_seed = json::array();
  for (const auto& r : results) {
    const auto& e = r.final_eval;
    obj.push_back(e.mean_objective);
    fair.push_back(e.mean_fairness);
    arr.push_back(e.arrival_ratio);
    bits.push_back(e.mean_bits);
    ret.push_back(e.mean_return);
    json row = eval_json(e);
    row["seed"] = r.seed;
    per_seed.push_back(row);
  }
  auto stat = [](const std::vector<double>& v) { return json{{"mean", mean(v)}, {"std", sample_std(v)}}; };
  return {{"seeds", results.size()},
          {"objective", stat(obj)},
          {"fairness", stat(fair)},
          {"arrival_ratio", stat(arr)},
          {"sum_bits", stat(bits)},
          {"return", stat(ret)},
          {"per_seed", per_seed}};
}

std::vector<SeedResult> run_training(const ExperimentConfig& config, const std::optional<fs::path>& resume) {
  const fs::path out(config.run.output_dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out.string() + ": " + ec.message());
  const json resolved = to_json(config);
  write_json(out / "config.json", resolved);
  const json identity = checkpoint_identity(resolved);

  std::vector<SeedResult> results;
  if (resume) {
    std::ifstream in(*resume / "manifest.json");
    if (!in) throw std::runtime_error("no checkpoint manifest in " + resume->string());
    const auto seed = json::parse(in).at("seed").get<std::uint64_t>();
    results.push_back(train_seed(config, identity, seed, resume));
  } else {
    for (auto seed : config.run.seeds) results.push_back(train_seed(config, identity, seed, std::nullopt));
  }
  if (config.run.episodes == 0) return results;

  // The summary covers every seed with a finished evaluation, so a resumed
  // seed joins the ones completed earlier.
  std::vector<SeedResult> finished;
  for (auto seed : config.run.seeds) {
    auto it = std::find_if(results.begin(), results.end(), [&](const SeedResult& r) { return r.seed == seed; });
    if (it != results.end()) {
      finished.push_back(*it);
      continue;
    }
    const fs::path fe = out / ("seed_" + std::to_string(seed)) / "final_eval.json";
    std::ifstream in(fe);
    if (!in) continue;
    const json j = json::parse(in);
    SeedResult r;
    r.seed = seed;
    r.final_eval.mean_return = j.at("mean_return").get<double>();
    r.final_eval.mean_bits = j.at("mean_sum_bits").get<double>();
    r.final_eval.mean_fairness = j.at("mean_fairness").get<double>();
    r.final_eval.mean_objective = j.at("mean_objective").get<double>();
    r.final_eval.arrival_ratio = j.at("arrival_ratio").get<double>();
    r.final_eval.episodes.resize(j.at("episodes").get<std::size_t>());
    finished.push_back(r);
  }
  write_json(out / "summary.json", summarize_seeds(finished));
  return results;
}

EvalSummary run_evaluation(const ExperimentConfig& config, const std::optional<fs::path>& checkpoint,
                           const fs::path& out, int episodes, std::uint64_t seed) {
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + out.string() + ": " + ec.message());
  const json resolved = to_json(config);
  std::optional<Trainer> trainer;
  if (checkpoint) {
    trainer.emplace(Trainer::load_checkpoint(*checkpoint, config.trainer, checkpoint_identity(resolved)));
    seed = trainer->seed();
  } else {
    if (config.trainer.has_learner()) spdlog::warn("evaluating an untrained learner");
    trainer.emplace(config.trainer, seed);
  }
  const EvalSummary s = traced_evaluation(*trainer, episodes, seed, out / "trace.csv", config.run.trace_episodes);
  json j = eval_json(s);
  j["seed"] = seed;
  j["records"] = json::array();
  for (const auto& r : s.episodes) j["records"].push_back(record_json(r));
  write_json(out / "eval_summary.json", j);
  return s;
}

std::vector<BenchCell> run_bench(const ExperimentConfig& config, int repetitions,
                                 const std::vector<int>& terminal_grid) {
  if (repetitions < 1) throw std::invalid_argument("bench needs at least one repetition");
  std::vector<BenchCell> cells;
  using clock = std::chrono::steady_clock;
  for (int m : terminal_grid) {
    WorldConfig world = config.trainer.world;
    world.terminals = m;
    world.initial_energy.assign(static_cast<std::size_t>(m), world.initial_energy.empty() ? 1e-3 : world.initial_energy[0]);
    sac::AgentConfig agent = config.trainer.agent;
    const std::size_t s_dim = state_dim(world);
    const std::size_t a_dim = action_dim(world, ControlMode::Full);
    Rng init(0, 0), rng(0, 1);
    sac::SacAgent learner(s_dim, a_dim, agent, init);

    sac::ReplayMemory memory(agent.batch_size);
    for (std::size_t i = 0; i < agent.batch_size; ++i) {
      sac::Transition t;
      t.state = nn::Vector::NullaryExpr(static_cast<Eigen::Index>(s_dim), [&] { return rng.uniform(0.0, 1.0); });
      t.next_state = nn::Vector::NullaryExpr(static_cast<Eigen::Index>(s_dim), [&] { return rng.uniform(0.0, 1.0); });
      t.action = sac::uniform_action(a_dim, rng);
      t.reward = rng.uniform(-1.0, 1.0);
      t.done = i % 10 == 9;
      memory.push(std::move(t));
    }
    const sac::Batch batch = sac::gather(memory, memory.sample_indices(agent.batch_size, rng));
    const nn::Vector state = memory[0].state;

    BenchCell cell;
    cell.terminals = m;
    cell.repetitions = repetitions;
    double sink = 0.0;
    for (int r = 0; r < repetitions; ++r) {
      const auto t0 = clock::now();
      const nn::Vector a = learner.act(state, rng, false);
      cell.act_seconds += std::chrono::duration<double>(clock::now() - t0).count();
      sink += a(0);
    }
    for (int r = 0; r < repetitions; ++r) {
      const auto t0 = clock::now();
      learner.update(batch, rng);
      cell.update_seconds += std::chrono::duration<double>(clock::now() - t0).count();
    }
    cell.act_seconds /= repetitions;
    cell.update_seconds /= repetitions;
    if (!std::isfinite(sink)) spdlog::warn("bench: non-finite action");
    cells.push_back(cell);
  }
  return cells;
}

json run_sweep(const ExperimentConfig& config) {
  if (!config.sweep) throw std::invalid_argument("config has no sweep block");
  const fs::path base(config.run.output_dir);
  std::error_code ec;
  fs::create_directories(base, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + base.string() + ": " + ec.message());
  json resolved = to_json(config);
  write_json(base / "config.json", resolved);
  resolved.erase("sweep");

  json rows = json::array();
  auto csv = open_out(base / "sweep.csv");
  csv << "parameter,value,objective_mean,objective_std,fairness_mean,fairness_std,sum_bits_mean,sum_bits_std,"
         "arrival_ratio_mean,return_mean\n";
  for (const auto& value : config.sweep->values) {
    json doc = resolved;
    set_dotted(doc, config.sweep->parameter, value);
    const std::string label = config.sweep->parameter + "=" + (value.is_string() ? value.get<std::string>() : value.dump());
    set_dotted(doc, "run.output_dir", (base / label).string());
    const ExperimentConfig one = parse_config(doc.dump(2));
    spdlog::info("sweep {}", label);
    const json summary = summarize_seeds(run_training(one));
    json row = {{"parameter", config.sweep->parameter}, {"value", value}, {"summary", summary}};
    rows.push_back(row);
    csv << config.sweep->parameter << ',' << (value.is_string() ? value.get<std::string>() : value.dump()) << ','
        << fmt(summary["objective"]["mean"].get<double>()) << ',' << fmt(summary["objective"]["std"].get<double>())
        << ',' << fmt(summary["fairness"]["mean"].get<double>()) << ','
        << fmt(summary["fairness"]["std"].get<double>()) << ',' << fmt(summary["sum_bits"]["mean"].get<double>())
        << ',' << fmt(summary["sum_bits"]["std"].get<double>()) << ','
        << fmt(summary["arrival_ratio"]["mean"].get<double>()) << ',' << fmt(summary["return"]["mean"].get<double>())
        << '\n'
        << std::flush;
  }
  return rows;
}

}  // namespace uavmec::harness
