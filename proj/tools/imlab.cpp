#include "imlab/harness.hpp"
#include "imlab/plot.hpp"
#include "imlab/sweep.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace {

using imlab::to_lower;

imlab::IntrinsicKind parse_im(const std::string& s) {
  const std::string n = to_lower(s);
  if (n == "counts") return imlab::IntrinsicKind::Counts;
  if (n == "rnd") return imlab::IntrinsicKind::Rnd;
  if (n == "icm") return imlab::IntrinsicKind::Icm;
  if (n == "ride") return imlab::IntrinsicKind::Ride;
  throw CLI::ValidationError("--im", "expected one of counts, rnd, icm, ride");
}

imlab::EpisodicScaling parse_scaling(const std::string& s) {
  const std::string n = to_lower(s);
  if (n == "noep") return imlab::EpisodicScaling::NoEp;
  if (n == "ep") return imlab::EpisodicScaling::Ep;
  if (n == "first" || n == "1st") return imlab::EpisodicScaling::First;
  throw CLI::ValidationError("--scaling", "expected one of noep, ep, first");
}

imlab::ArchitectureKind parse_arch(const std::string& s) {
  const std::string n = to_lower(s);
  if (n == "lightweight" || n == "lw") return imlab::ArchitectureKind::Lightweight;
  if (n == "default") return imlab::ArchitectureKind::Default;
  throw CLI::ValidationError("--arch", "expected lightweight or default");
}

// Flat "key = value" text or a JSON object; keys match the long option names.
std::map<std::string, std::string> load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw CLI::ValidationError("--config", "cannot open file: " + path);
  std::map<std::string, std::string> kv;
  std::stringstream buffer;
  buffer << f.rdbuf();
  const std::string text = buffer.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    const auto j = nlohmann::json::parse(text);
    for (const auto& [key, value] : j.items())
      kv[key] = value.is_string() ? value.get<std::string>() : value.dump();
    return kv;
  }
  std::istringstream lines(text);
  std::string line;
  while (std::getline(lines, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"imlab: intrinsic-motivation exploration lab (gridworlds + PPO)"};
  app.require_subcommand(1);

  // ---- train ----
  auto* train = app.add_subcommand("train", "Run one training experiment");
  std::string t_env = "mn7s4", t_im = "counts", t_scaling = "ep", t_strategy = "s",
              t_arch = "default", t_out, t_config;
  std::uint64_t t_seed = 1;
  long t_frames = 2'000'000;
  double t_beta = -1, t_beta_floor = -1, t_beta_smooth = 0.5;
  double t_lr = 2.5e-4, t_curiosity_lr = -1, t_entropy = 0.0005, t_value_coef = 0.5;
  double t_gamma = 0.99, t_lambda = 0.95, t_clip = 0.2, t_max_grad = 0.5;
  int t_epochs = 4, t_batch = 256, t_n_envs = 16, t_rollout = 128, t_log_every = 25;
  bool t_stop95 = false;
  train->add_option("--env", t_env, "mn7s4, mn10s4, mn7s8, ks3r3, o2dlh, corridor");
  train->add_option("--im", t_im, "counts, rnd, icm, ride");
  train->add_option("--scaling", t_scaling, "noep, ep, first");
  train->add_option("--beta-strategy", t_strategy, "s, ngu, pd, ad, ad1000 (or ad<window>)");
  train->add_option("--arch", t_arch, "lightweight, default");
  train->add_option("--seed", t_seed, "run seed");
  train->add_option("--frames", t_frames, "total frames (F)");
  train->add_option("--out", t_out, "output directory");
  train->add_option("--config", t_config, "flat key=value or JSON config file; CLI overrides");
  train->add_option("--beta", t_beta, "beta_s / K (default 0.005 counts, 0.05 otherwise)");
  train->add_option("--beta-floor", t_beta_floor, "decay floor A (default beta/100)");
  train->add_option("--beta-smooth", t_beta_smooth, "decay smoothness B");
  train->add_option("--lr", t_lr, "policy learning rate");
  train->add_option("--curiosity-lr", t_curiosity_lr, "curiosity learning rate (default --lr)");
  train->add_option("--entropy-coef", t_entropy, "entropy coefficient");
  train->add_option("--value-coef", t_value_coef, "value loss coefficient");
  train->add_option("--gamma", t_gamma, "discount factor");
  train->add_option("--gae-lambda", t_lambda, "GAE lambda");
  train->add_option("--clip", t_clip, "PPO clipping factor");
  train->add_option("--max-grad-norm", t_max_grad, "global gradient norm clip");
  train->add_option("--epochs", t_epochs, "PPO epochs per update");
  train->add_option("--batch", t_batch, "minibatch size");
  train->add_option("--n-envs", t_n_envs, "parallel environments");
  train->add_option("--rollout-len", t_rollout, "steps per environment per rollout");
  train->add_option("--log-every", t_log_every, "stderr log period in updates");
  train->add_flag("--stop-at-95", t_stop95, "stop once 95% of optimal is reached");

  // ---- bench ----
  auto* bench_cmd = app.add_subcommand("bench", "Parameter counts and rollout latency");
  std::string b_arch = "lightweight", b_im = "ride";
  int b_rollouts = 20, b_warmup = 3;
  bench_cmd->add_option("--arch", b_arch, "lightweight, default");
  bench_cmd->add_option("--im", b_im, "counts, rnd, icm, ride");
  bench_cmd->add_option("--rollouts", b_rollouts, "timed rollouts (median reported)");
  bench_cmd->add_option("--warmup", b_warmup, "untimed warm-up rollouts");

  // ---- plot ----
  auto* plot_cmd = app.add_subcommand("plot", "Render training curves to SVG");
  std::vector<std::string> p_files;
  std::string p_out = "curves.svg", p_env, p_title;
  plot_cmd->add_option("files", p_files, "progress.csv files")->required();
  plot_cmd->add_option("--out", p_out, "output SVG path");
  plot_cmd->add_option("--env", p_env, "environment name for reference lines");
  plot_cmd->add_option("--title", p_title, "plot title");

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment matrix");
  std::string s_config;
  sweep_cmd->add_option("--config", s_config, "JSON sweep description")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train) {
      // config file first, explicit CLI flags override
      if (!t_config.empty()) {
        const auto kv = load_config_file(t_config);
        auto use = [&](const char* key) {
          auto it = kv.find(key);
          return it != kv.end() && train->get_option("--" + std::string(key))->count() == 0
                     ? &it->second
                     : nullptr;
        };
        if (const auto* v = use("env")) t_env = *v;
        if (const auto* v = use("im")) t_im = *v;
        if (const auto* v = use("scaling")) t_scaling = *v;
        if (const auto* v = use("beta-strategy")) t_strategy = *v;
        if (const auto* v = use("arch")) t_arch = *v;
        if (const auto* v = use("seed")) t_seed = std::stoull(*v);
        if (const auto* v = use("frames")) t_frames = std::stol(*v);
        if (const auto* v = use("out")) t_out = *v;
        if (const auto* v = use("beta")) t_beta = std::stod(*v);
        if (const auto* v = use("beta-floor")) t_beta_floor = std::stod(*v);
        if (const auto* v = use("beta-smooth")) t_beta_smooth = std::stod(*v);
        if (const auto* v = use("lr")) t_lr = std::stod(*v);
        if (const auto* v = use("curiosity-lr")) t_curiosity_lr = std::stod(*v);
        if (const auto* v = use("entropy-coef")) t_entropy = std::stod(*v);
        if (const auto* v = use("value-coef")) t_value_coef = std::stod(*v);
        if (const auto* v = use("gamma")) t_gamma = std::stod(*v);
        if (const auto* v = use("gae-lambda")) t_lambda = std::stod(*v);
        if (const auto* v = use("clip")) t_clip = std::stod(*v);
        if (const auto* v = use("max-grad-norm")) t_max_grad = std::stod(*v);
        if (const auto* v = use("epochs")) t_epochs = std::stoi(*v);
        if (const auto* v = use("batch")) t_batch = std::stoi(*v);
        if (const auto* v = use("n-envs")) t_n_envs = std::stoi(*v);
        if (const auto* v = use("rollout-len")) t_rollout = std::stoi(*v);
        if (const auto* v = use("stop-at-95")) t_stop95 = (*v == "true" || *v == "1");
      }
      imlab::RunConfig cfg;
      cfg.env = t_env;
      cfg.im = parse_im(t_im);
      cfg.scaling = parse_scaling(t_scaling);
      cfg.strategy = imlab::parse_strategy(t_strategy, cfg.adaptive_window);
      cfg.arch = parse_arch(t_arch);
      cfg.seed = t_seed;
      cfg.frames = t_frames;
      cfg.out_dir = t_out;
      cfg.beta = t_beta;
      cfg.beta_floor = t_beta_floor;
      cfg.beta_smooth = t_beta_smooth;
      cfg.curiosity_lr = t_curiosity_lr;
      cfg.stop_at_95 = t_stop95;
      cfg.log_every = t_log_every;
      cfg.ppo.lr = t_lr;
      cfg.ppo.entropy_coef = t_entropy;
      cfg.ppo.value_coef = t_value_coef;
      cfg.ppo.gamma = t_gamma;
      cfg.ppo.gae_lambda = t_lambda;
      cfg.ppo.clip = t_clip;
      cfg.ppo.max_grad_norm = t_max_grad;
      cfg.ppo.epochs = t_epochs;
      cfg.ppo.minibatch = t_batch;
      cfg.ppo.n_envs = t_n_envs;
      cfg.ppo.rollout_len = t_rollout;
      const imlab::RunSummary s = imlab::run_experiment(cfg);
      std::printf("%s\n", imlab::summary_json(cfg, s).c_str());
      return 0;
    }
    if (*bench_cmd) {
      const auto rep = imlab::bench(parse_arch(b_arch), parse_im(b_im), b_rollouts, b_warmup);
      std::printf("%s", imlab::format_bench(rep).c_str());
      return 0;
    }
    if (*plot_cmd) {
      double opt = 0;
      if (!p_env.empty()) opt = imlab::optimal_score(p_env);
      imlab::write_curve_svg(p_files, p_out, opt, p_title);
      std::printf("wrote %s\n", p_out.c_str());
      return 0;
    }
    if (*sweep_cmd) {
      const int failures = imlab::run_sweep(s_config);
      if (failures) std::fprintf(stderr, "[sweep] finished with %d failed runs\n", failures);
      return failures ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
