#include "imlab/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace imlab {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Small shared helpers
// ---------------------------------------------------------------------------

std::string to_lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

int log_verbosity() {
  static const int level = [] {
    const char* v = std::getenv("IMLAB_LOG");
    if (!v) return 1;
    const std::string s = to_lower(v);
    if (s == "quiet" || s == "0") return 0;
    if (s == "debug" || s == "2") return 2;
    return 1;
  }();
  return level;
}

const char* strategy_name(BetaStrategyKind k) {
  switch (k) {
    case BetaStrategyKind::Static: return "s";
    case BetaStrategyKind::MultiStatic: return "ngu";
    case BetaStrategyKind::Parametric: return "pd";
    case BetaStrategyKind::Adaptive: return "ad";
  }
  return "?";
}

BetaStrategyKind parse_strategy(const std::string& name, long& window_out) {
  const std::string s = to_lower(name);
  window_out = 0;
  if (s == "s" || s == "static") return BetaStrategyKind::Static;
  if (s == "ngu" || s == "multi") return BetaStrategyKind::MultiStatic;
  if (s == "pd" || s == "parametric") return BetaStrategyKind::Parametric;
  if (s == "ad" || s == "adaptive") return BetaStrategyKind::Adaptive;
  if (s.rfind("ad", 0) == 0) {
    const std::string digits = s.substr(2);
    if (!digits.empty() && digits.find_first_not_of("0123456789") == std::string::npos) {
      window_out = std::stol(digits);
      return BetaStrategyKind::Adaptive;
    }
  }
  throw std::invalid_argument("unknown beta strategy: " + name +
                              " (expected s, ngu, pd, ad or ad<window>)");
}

GridState make_env(const std::string& name, std::uint64_t seed) {
  const std::string n = to_lower(name);
  if (n == "mn7s4") return generate_multiroom(7, 4, seed);
  if (n == "mn10s4") return generate_multiroom(10, 4, seed);
  if (n == "mn7s8") return generate_multiroom(7, 8, seed);
  if (n == "ks3r3") return generate_keycorridor(seed);
  if (n == "o2dlh") return generate_obstructed2dlh(seed);
  if (n == "corridor") return generate_corridor(6, seed);
  throw std::invalid_argument("unknown environment: " + name);
}

bool is_known_env(const std::string& name) {
  const std::string n = to_lower(name);
  return n == "mn7s4" || n == "mn10s4" || n == "mn7s8" || n == "ks3r3" || n == "o2dlh" ||
         n == "corridor";
}

double optimal_score(const std::string& env_name) {
  const std::string n = to_lower(env_name);
  if (n == "mn7s4") return 0.77;
  if (n == "mn10s4") return 0.76;
  if (n == "mn7s8") return 0.65;
  if (n == "ks3r3") return 0.90;
  if (n == "o2dlh") return 0.95;
  if (n == "corridor") return 0.85;  // 5 forward steps, limit 30
  throw std::invalid_argument("unknown environment: " + env_name);
}

// ---------------------------------------------------------------------------
// EpisodeWindow
// ---------------------------------------------------------------------------

void EpisodeWindow::push(double episode_return, int length, int env_index) {
  returns_.push_back({episode_return, length, env_index});
  if (returns_.size() > cap_) returns_.pop_front();
  ++total_;
}

double EpisodeWindow::mean_return() const {
  if (returns_.empty()) return 0;
  double s = 0;
  for (const Item& it : returns_) s += it.ret;
  return s / static_cast<double>(returns_.size());
}

double EpisodeWindow::mean_length() const {
  if (returns_.empty()) return 0;
  double s = 0;
  for (const Item& it : returns_) s += it.len;
  return s / static_cast<double>(returns_.size());
}

double EpisodeWindow::mean_return_env(int env_index) const {
  double s = 0;
  int n = 0;
  for (const Item& it : returns_)
    if (it.env == env_index) {
      s += it.ret;
      ++n;
    }
  return n ? s / n : 0.0;
}

// ---------------------------------------------------------------------------
// CSV / JSON
// ---------------------------------------------------------------------------

std::string run_record_header() {
  return "update,frames,return100,eplen100,episodes,intrinsic_return,beta,policy_loss,"
         "value_loss,entropy,clip_frac,fps,return100_exploit";
}

std::string format_run_record(const RunRecord& r) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), "%ld,%ld,%.6f,%.2f,%ld,%.6f,%.8f,%.6f,%.6f,%.6f,%.4f,%.1f,%.6f",
                r.update, r.frames, r.return100, r.eplen100, r.episodes, r.intrinsic_return,
                r.beta, r.policy_loss, r.value_loss, r.entropy, r.clip_frac, r.fps,
                r.return100_exploit);
  return buf;
}

std::optional<RunRecord> parse_run_record(const std::string& line) {
  RunRecord r;
  const int got = std::sscanf(
      line.c_str(), "%ld,%ld,%lf,%lf,%ld,%lf,%lf,%lf,%lf,%lf,%lf,%lf,%lf", &r.update, &r.frames,
      &r.return100, &r.eplen100, &r.episodes, &r.intrinsic_return, &r.beta, &r.policy_loss,
      &r.value_loss, &r.entropy, &r.clip_frac, &r.fps, &r.return100_exploit);
  if (got != 13) return std::nullopt;
  return r;
}

namespace {

json config_to_json(const RunConfig& cfg) {
  json j;
  j["env"] = to_lower(cfg.env);
  j["im"] = intrinsic_name(cfg.im);
  j["scaling"] = scaling_name(cfg.scaling);
  j["beta_strategy"] = strategy_name(cfg.strategy);
  j["adaptive_window"] = cfg.adaptive_window;
  j["beta"] = cfg.effective_beta();
  j["beta_floor"] = cfg.effective_floor();
  j["beta_smooth"] = cfg.beta_smooth;
  j["arch"] = arch_name(cfg.arch);
  j["seed"] = cfg.seed;
  j["frames"] = cfg.frames;
  j["out_dir"] = cfg.out_dir;
  j["stop_at_95"] = cfg.stop_at_95;
  j["curiosity_lr"] = cfg.effective_curiosity_lr();
  j["ppo"] = {{"gamma", cfg.ppo.gamma},
              {"gae_lambda", cfg.ppo.gae_lambda},
              {"clip", cfg.ppo.clip},
              {"epochs", cfg.ppo.epochs},
              {"n_envs", cfg.ppo.n_envs},
              {"rollout_len", cfg.ppo.rollout_len},
              {"minibatch", cfg.ppo.minibatch},
              {"entropy_coef", cfg.ppo.entropy_coef},
              {"value_coef", cfg.ppo.value_coef},
              {"lr", cfg.ppo.lr},
              {"max_grad_norm", cfg.ppo.max_grad_norm},
              {"adam_eps", cfg.ppo.adam_eps}};
  return j;
}

}  // namespace

std::string config_json(const RunConfig& cfg) { return config_to_json(cfg).dump(2); }

std::string summary_json(const RunConfig& cfg, const RunSummary& s) {
  json j;
  j["config"] = config_to_json(cfg);
  j["frames_to_optimal"] = s.frames_to_optimal < 0 ? json(nullptr) : json(s.frames_to_optimal);
  j["frames_to_95"] = s.frames_to_95 < 0 ? json(nullptr) : json(s.frames_to_95);
  j["frames_run"] = s.frames_run;
  j["updates"] = s.updates;
  j["episodes"] = s.episodes;
  j["final_return"] = s.final_return;
  j["best_return"] = s.best_return;
  j["optimal_score"] = s.optimal_score;
  j["wall_seconds"] = s.wall_seconds;
  return j.dump(2);
}

// ---------------------------------------------------------------------------
// Trainer
// ---------------------------------------------------------------------------

namespace {

struct Trainer {
  RunConfig cfg;
  double opt_score;
  Rng root;
  Rng act_rng;
  Rng shuffle_rng;
  std::vector<Rng> env_seed_rng;

  ParamStore<float> policy;
  CuriosityNets<float> nets;
  CountTable counts;
  std::vector<EpisodicCountTable> ep_tables;
  std::vector<GridState> envs;
  std::vector<Observation> obs;
  std::vector<double> running_return;

  EpisodeWindow window{100};
  AdaptiveBeta adaptive;
  std::vector<double> multi_betas;

  long frames = 0;
  RunSummary summary;
  Rollout roll;

  explicit Trainer(const RunConfig& c)
      : cfg(c),
        opt_score(optimal_score(c.env)),
        root(c.seed),
        act_rng(root.fork(2)),
        shuffle_rng(root.fork(3)),
        adaptive(c.effective_beta(), static_cast<std::size_t>(std::max(0L, c.adaptive_window))) {
    cfg.ppo.validate();
    const int n = cfg.ppo.n_envs;
    Rng policy_rng = root.fork(1);
    build_policy(policy, cfg.arch, policy_rng);
    nets = build_curiosity<float>(cfg.im, cfg.arch, root.fork(4));
    ep_tables.resize(static_cast<std::size_t>(n));
    envs.resize(static_cast<std::size_t>(n));
    obs.resize(static_cast<std::size_t>(n));
    running_return.assign(static_cast<std::size_t>(n), 0.0);
    env_seed_rng.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) env_seed_rng.push_back(root.fork(100 + static_cast<std::uint64_t>(i)));
    for (int i = 0; i < n; ++i) reset_env(i);
    if (cfg.strategy == BetaStrategyKind::MultiStatic) {
      ParametricParams p{cfg.effective_beta(), cfg.effective_floor(), cfg.beta_smooth, 1};
      multi_betas = beta_multi(n, p);
    }
    summary.optimal_score = opt_score;
  }

  void reset_env(int i) {
    const std::size_t k = static_cast<std::size_t>(i);
    // seeds that fail generation (possible in principle for multiroom) are skipped
    for (int tries = 0; tries < 16; ++tries) {
      try {
        envs[k] = make_env(cfg.env, env_seed_rng[k].next_u64());
        break;
      } catch (const EnvGenerationError&) {
        if (tries == 15) throw;
      }
    }
    obs[k] = observe(envs[k]);
    ep_tables[k].clear();
    running_return[k] = 0.0;
  }

  // Values of a batch of observations under the current policy.
  std::vector<float> values_of(std::span<const Observation> batch) {
    if (batch.empty()) return {};
    const PolicyOutput<float> out = policy_forward(policy, cfg.arch, batch);
    std::vector<float> v(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) v[i] = out.value[static_cast<int>(i)];
    return v;
  }

  // One collection phase.  Fills `roll`, updates metrics and count tables.
  void collect() {
    const int n = cfg.ppo.n_envs;
    const int len = cfg.ppo.rollout_len;
    roll.resize(n, len);
    std::vector<Observation> next_obs(static_cast<std::size_t>(n));
    std::vector<float> r_ext(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> done_flags(static_cast<std::size_t>(n));
    std::vector<std::uint8_t> trunc_flags(static_cast<std::size_t>(n));
    std::vector<int> actions(static_cast<std::size_t>(n));
    std::vector<StateKey> keys(static_cast<std::size_t>(n));
    std::vector<double> raw(static_cast<std::size_t>(n));

    for (int t = 0; t < len; ++t) {
      Tape<float> tape;
      const int input = tape.constant(
          obs_to_input<float>(cfg.arch, std::span<const Observation>(obs.data(), obs.size())));
      const PolicyNodes pn = policy_graph(tape, policy, cfg.arch, input);
      const int logp_all = log_softmax(tape, pn.logits);
      const auto lp = tape.val(logp_all).mat2();
      const auto& values = tape.val(pn.value);

      for (int i = 0; i < n; ++i) {
        const double u = act_rng.uniform();
        double cum = 0;
        int a = kNumActions - 1;
        for (int j = 0; j < kNumActions; ++j) {
          cum += std::exp(static_cast<double>(lp(i, j)));
          if (u < cum) {
            a = j;
            break;
          }
        }
        actions[static_cast<std::size_t>(i)] = a;
        const std::size_t k = roll.idx(t, i);
        roll.obs[k] = obs[static_cast<std::size_t>(i)];
        roll.action[k] = a;
        roll.logp[k] = lp(i, a);
        roll.value[k] = values[i];

        const StepResult res = step(envs[static_cast<std::size_t>(i)], a);
        next_obs[static_cast<std::size_t>(i)] = res.obs;
        r_ext[static_cast<std::size_t>(i)] = res.reward;
        done_flags[static_cast<std::size_t>(i)] = res.done;
        trunc_flags[static_cast<std::size_t>(i)] = res.truncated;
        keys[static_cast<std::size_t>(i)] = state_key(res.obs);
      }

      // Raw intrinsic bonuses for the batch of transitions.
      switch (cfg.im) {
        case IntrinsicKind::Counts:
          for (int i = 0; i < n; ++i)
            raw[static_cast<std::size_t>(i)] = counts.reward(keys[static_cast<std::size_t>(i)]);
          break;
        case IntrinsicKind::Rnd: {
          const auto r = rnd_rewards(nets, std::span<const Observation>(next_obs));
          for (int i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)];
          break;
        }
        case IntrinsicKind::Icm:
        case IntrinsicKind::Ride: {
          const auto r = curiosity_rewards(nets, std::span<const Observation>(obs),
                                           std::span<const int>(actions),
                                           std::span<const Observation>(next_obs));
          for (int i = 0; i < n; ++i) raw[static_cast<std::size_t>(i)] = r[static_cast<std::size_t>(i)];
          break;
        }
      }

      frames += n;
      for (int i = 0; i < n; ++i) {
        const std::size_t k = roll.idx(t, i);
        const std::size_t ii = static_cast<std::size_t>(i);
        roll.next_obs[k] = next_obs[ii];
        roll.reward_ext[k] = r_ext[ii];
        roll.reward_int[k] = static_cast<float>(
            apply_scaling(raw[ii], keys[ii], cfg.scaling, ep_tables[ii]));
        roll.done[k] = done_flags[ii];
        roll.truncated[k] = trunc_flags[ii];
        running_return[ii] += r_ext[ii];

        if (done_flags[ii]) {
          window.push(running_return[ii], envs[ii].step_count, i);
          ++summary.episodes;
          const double m = window.mean_return();
          if (summary.frames_to_95 < 0 && m >= 0.95 * opt_score) summary.frames_to_95 = frames;
          if (summary.frames_to_optimal < 0 && m >= opt_score) summary.frames_to_optimal = frames;
          reset_env(i);
          obs[ii] = observe(envs[ii]);
        } else {
          obs[ii] = next_obs[ii];
        }
      }
    }

    // Bootstrap values: the step after the rollout, and terminal observations
    // of episodes cut by the step limit.
    const std::vector<float> boot = values_of(std::span<const Observation>(obs.data(), obs.size()));
    for (int i = 0; i < n; ++i) roll.bootstrap[static_cast<std::size_t>(i)] = boot[static_cast<std::size_t>(i)];
    std::vector<std::size_t> trunc_idx;
    std::vector<Observation> trunc_obs;
    for (std::size_t k = 0; k < roll.size(); ++k)
      if (roll.truncated[k]) {
        trunc_idx.push_back(k);
        trunc_obs.push_back(roll.next_obs[k]);
      }
    const std::vector<float> tv = values_of(std::span<const Observation>(trunc_obs));
    for (std::size_t j = 0; j < trunc_idx.size(); ++j) roll.trunc_bootstrap[trunc_idx[j]] = tv[j];
  }

  // One epoch of minibatch updates for the neural intrinsic modules.
  double im_update() {
    if (cfg.im == IntrinsicKind::Counts) return 0;
    const double lr = cfg.effective_curiosity_lr();
    const int total = static_cast<int>(roll.size());
    const int bs = std::min(cfg.ppo.minibatch, total);
    double loss_sum = 0;
    int batches = 0;
    for (int start = 0; start + bs <= total; start += bs) {
      const std::size_t s0 = static_cast<std::size_t>(start);
      const std::size_t sb = static_cast<std::size_t>(bs);
      if (cfg.im == IntrinsicKind::Rnd) {
        loss_sum += rnd_update(nets, std::span<const Observation>(&roll.next_obs[s0], sb), lr,
                               cfg.ppo.adam_eps);
      } else {
        const CuriosityLosses l = curiosity_update(
            nets, std::span<const Observation>(&roll.obs[s0], sb),
            std::span<const int>(&roll.action[s0], sb),
            std::span<const Observation>(&roll.next_obs[s0], sb), lr, 1.0, 1.0, cfg.ppo.adam_eps);
        loss_sum += l.forward_loss + l.inverse_loss;
      }
      ++batches;
    }
    return batches ? loss_sum / batches : 0;
  }
};

}  // namespace

// ---------------------------------------------------------------------------
// run_experiment
// ---------------------------------------------------------------------------

RunSummary run_experiment(const RunConfig& cfg_in, std::vector<RunRecord>* records) {
  RunConfig cfg = cfg_in;
  cfg.env = to_lower(cfg.env);
  if (!is_known_env(cfg.env)) throw std::invalid_argument("unknown environment: " + cfg.env);
  if (cfg.frames <= 0) throw std::invalid_argument("frames must be positive");

  Trainer tr(cfg);

  std::ofstream csv;
  const bool writing = !cfg.out_dir.empty();
  if (writing) {
    std::filesystem::create_directories(cfg.out_dir);
    std::ofstream cj(cfg.out_dir + "/config.json");
    cj << config_json(cfg) << "\n";
    csv.open(cfg.out_dir + "/progress.csv");
    csv << run_record_header() << "\n";
  }

  const auto t_start = std::chrono::steady_clock::now();
  const ParametricParams decay{cfg.effective_beta(), cfg.effective_floor(), cfg.beta_smooth,
                               static_cast<double>(cfg.frames)};
  long update = 0;
  try {
    while (tr.frames < cfg.frames) {
      const long frames_at_start = tr.frames;
      const auto u_start = std::chrono::steady_clock::now();
      tr.collect();

      const double g = rollout_intrinsic_return(tr.roll.reward_int, cfg.ppo.n_envs,
                                                cfg.ppo.rollout_len);
      double beta = cfg.effective_beta();
      switch (cfg.strategy) {
        case BetaStrategyKind::Static: break;
        case BetaStrategyKind::Parametric:
          beta = beta_parametric(static_cast<double>(frames_at_start), decay);
          break;
        case BetaStrategyKind::Adaptive: beta = tr.adaptive.next(g); break;
        case BetaStrategyKind::MultiStatic: break;  // per-env, below
      }

      std::vector<float> combined(tr.roll.size());
      for (int t = 0; t < cfg.ppo.rollout_len; ++t)
        for (int i = 0; i < cfg.ppo.n_envs; ++i) {
          const std::size_t k = tr.roll.idx(t, i);
          const double b = cfg.strategy == BetaStrategyKind::MultiStatic
                               ? tr.multi_betas[static_cast<std::size_t>(i)]
                               : beta;
          combined[k] = combine_rewards(tr.roll.reward_ext[k], tr.roll.reward_int[k],
                                        static_cast<float>(b));
        }

      const Gae gae = compute_gae(tr.roll, combined, cfg.ppo.gamma, cfg.ppo.gae_lambda);
      const UpdateStats st = ppo_update(tr.roll, gae, tr.policy, cfg.arch, cfg.ppo,
                                        tr.shuffle_rng);
      tr.im_update();

      ++update;
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - u_start).count();
      RunRecord rec;
      rec.update = update;
      rec.frames = tr.frames;
      rec.return100 = tr.window.mean_return();
      rec.eplen100 = tr.window.mean_length();
      rec.episodes = tr.summary.episodes;
      rec.intrinsic_return = g;
      rec.beta = cfg.strategy == BetaStrategyKind::MultiStatic
                     ? std::accumulate(tr.multi_betas.begin(), tr.multi_betas.end(), 0.0) /
                           static_cast<double>(tr.multi_betas.size())
                     : beta;
      rec.policy_loss = st.policy_loss;
      rec.value_loss = st.value_loss;
      rec.entropy = st.entropy;
      rec.clip_frac = st.clip_frac;
      rec.fps = secs > 0 ? static_cast<double>(cfg.ppo.horizon()) / secs : 0;
      rec.return100_exploit = tr.window.mean_return_env(cfg.ppo.n_envs - 1);
      if (records) records->push_back(rec);
      if (writing) csv << format_run_record(rec) << "\n";
      if (log_verbosity() >= 2 ||
          (log_verbosity() == 1 && (update % std::max(1, cfg.log_every) == 0 || update == 1))) {
        std::fprintf(stderr,
                     "[imlab] %s/%s u=%ld frames=%ld return100=%.3f eplen=%.0f beta=%.5f G=%.3f "
                     "fps=%.0f\n",
                     cfg.env.c_str(), intrinsic_name(cfg.im), update, tr.frames, rec.return100,
                     rec.eplen100, rec.beta, g, rec.fps);
      }
      tr.summary.best_return = std::max(tr.summary.best_return, rec.return100);
      if (cfg.stop_at_95 && tr.summary.frames_to_95 >= 0) break;
    }
  } catch (...) {
    if (writing) csv.flush();  // partial logs stay on disk on abort
    throw;
  }

  tr.summary.frames_run = tr.frames;
  tr.summary.updates = update;
  tr.summary.final_return = tr.window.mean_return();
  tr.summary.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (writing) {
    csv.flush();
    std::ofstream sj(cfg.out_dir + "/summary.json");
    sj << summary_json(cfg, tr.summary) << "\n";
  }
  return tr.summary;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

BenchReport bench(ArchitectureKind arch, IntrinsicKind im, int rollouts, int warmup) {
  RunConfig cfg;
  cfg.env = "mn7s4";
  cfg.im = im;
  cfg.scaling = EpisodicScaling::Ep;
  cfg.arch = arch;
  cfg.seed = 42;
  cfg.frames = 1L << 40;  // never reached; we only collect
  Trainer tr(cfg);

  BenchReport rep;
  rep.arch = arch;
  rep.im = im;
  rep.rollouts = rollouts;

  if (arch == ArchitectureKind::Lightweight) {
    rep.components.push_back({"actor", actor_param_count(tr.policy)});
    rep.components.push_back({"critic", critic_param_count(tr.policy)});
  }
  rep.components.push_back({"actor+critic", tr.policy.param_count()});
  switch (im) {
    case IntrinsicKind::Counts:
      rep.components.push_back({"dictionary", 0});
      break;
    case IntrinsicKind::Rnd:
      rep.components.push_back({"embedding", tr.nets.params.param_count("embed.")});
      rep.components.push_back(
          {"rnd pair", tr.nets.params.param_count() + tr.nets.target.param_count()});
      break;
    case IntrinsicKind::Icm:
    case IntrinsicKind::Ride:
      rep.components.push_back({"inverse", tr.nets.params.param_count("inverse.")});
      rep.components.push_back({"forward", tr.nets.params.param_count("forward.")});
      rep.components.push_back({"embedding", tr.nets.params.param_count("embed.")});
      rep.components.push_back({"curiosity nets", tr.nets.params.param_count()});
      break;
  }
  rep.total_params =
      tr.policy.param_count() + tr.nets.params.param_count() + tr.nets.target.param_count();

  std::vector<double> times;
  for (int k = 0; k < warmup + rollouts; ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    tr.collect();
    tr.im_update();
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    if (k >= warmup) times.push_back(ms);
  }
  std::sort(times.begin(), times.end());
  rep.rollout_ms_median = times.empty() ? 0 : times[times.size() / 2];
  return rep;
}

std::string format_bench(const BenchReport& rep) {
  std::ostringstream out;
  out << "arch=" << arch_name(rep.arch) << " im=" << intrinsic_name(rep.im) << "\n";
  for (const auto& c : rep.components) {
    out << "  " << c.name;
    for (std::size_t pad = c.name.size(); pad < 16; ++pad) out << ' ';
    out << c.params << "\n";
  }
  out << "  total parameters " << rep.total_params << "\n";
  out << "  rollout median   " << rep.rollout_ms_median << " ms (" << rep.rollouts
      << " rollouts, 2048 frames each)\n";
  return out.str();
}

}  // namespace imlab
