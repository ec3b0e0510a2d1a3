#ifndef IMLAB_HARNESS_HPP
#define IMLAB_HARNESS_HPP

#include "imlab/intrinsic.hpp"
#include "imlab/ppo.hpp"
#include "imlab/schedule.hpp"

#include <cstdint>
#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace imlab {

enum class BetaStrategyKind { Static, MultiStatic, Parametric, Adaptive };

const char* strategy_name(BetaStrategyKind k);
BetaStrategyKind parse_strategy(const std::string& name, long& window_out);

struct RunConfig {
  std::string env = "mn7s4";
  IntrinsicKind im = IntrinsicKind::Counts;
  EpisodicScaling scaling = EpisodicScaling::Ep;
  BetaStrategyKind strategy = BetaStrategyKind::Static;
  long adaptive_window = 0;  // rollouts; 0 = unbounded
  double beta = -1;          // beta_s / K; < 0 picks the per-IM default
  double beta_floor = -1;    // A; < 0 -> beta / 100
  double beta_smooth = 0.5;  // B
  ArchitectureKind arch = ArchitectureKind::Default;
  std::uint64_t seed = 1;
  long frames = 2'000'000;
  std::string out_dir;  // empty: no files written
  PpoConfig ppo;
  double curiosity_lr = -1;  // < 0 -> ppo.lr
  bool stop_at_95 = false;   // stop once the 95%-of-optimal metric is reached
  int log_every = 25;

  double effective_beta() const {
    if (beta >= 0) return beta;
    return im == IntrinsicKind::Counts ? 0.005 : 0.05;
  }
  double effective_floor() const {
    return beta_floor >= 0 ? beta_floor : effective_beta() / 100.0;
  }
  double effective_curiosity_lr() const { return curiosity_lr >= 0 ? curiosity_lr : ppo.lr; }
};

// Ring buffer over the last `cap` completed episodes, all environments mixed.
class EpisodeWindow {
 public:
  explicit EpisodeWindow(std::size_t cap = 100) : cap_(cap) {}

  void push(double episode_return, int length, int env_index);
  double mean_return() const;  // over available episodes
  double mean_length() const;
  double mean_return_env(int env_index) const;  // only episodes from one env
  long total_episodes() const { return total_; }
  std::size_t size() const { return returns_.size(); }

 private:
  struct Item {
    double ret;
    int len;
    int env;
  };
  std::size_t cap_;
  std::deque<Item> returns_;
  long total_ = 0;
};

struct RunRecord {
  long update = 0;
  long frames = 0;
  double return100 = 0;
  double eplen100 = 0;
  long episodes = 0;
  double intrinsic_return = 0;
  double beta = 0;
  double policy_loss = 0;
  double value_loss = 0;
  double entropy = 0;
  double clip_frac = 0;
  double fps = 0;
  double return100_exploit = 0;
};

struct RunSummary {
  long frames_to_optimal = -1;  // -1 = never reached
  long frames_to_95 = -1;
  long frames_run = 0;
  long updates = 0;
  long episodes = 0;
  double final_return = 0;
  double best_return = 0;
  double optimal_score = 0;
  double wall_seconds = 0;
};

// Full training loop: collect -> intrinsic -> scale -> beta -> combine ->
// GAE -> PPO -> curiosity updates -> logging.  Writes config.json,
// progress.csv and summary.json into cfg.out_dir when set.
RunSummary run_experiment(const RunConfig& cfg, std::vector<RunRecord>* records = nullptr);

struct BenchComponent {
  std::string name;
  long params = 0;
};

struct BenchReport {
  ArchitectureKind arch;
  IntrinsicKind im;
  std::vector<BenchComponent> components;
  long total_params = 0;
  double rollout_ms_median = 0;
  int rollouts = 0;
};

// Parameter table plus rollout-collection latency (policy forward, intrinsic
// forward and backward, no PPO update).  Median over `rollouts` timed
// collections after `warmup` unmeasured ones.
BenchReport bench(ArchitectureKind arch, IntrinsicKind im, int rollouts = 20, int warmup = 3);

std::string format_bench(const BenchReport& report);

// Median optimal extrinsic return for a named environment.
double optimal_score(const std::string& env_name);

// mn7s4, mn10s4, mn7s8, ks3r3, o2dlh, corridor (case-insensitive).
GridState make_env(const std::string& name, std::uint64_t seed);

bool is_known_env(const std::string& name);

std::string to_lower(std::string s);

// CSV helpers shared by the harness and the plotting tool.
std::string run_record_header();
std::string format_run_record(const RunRecord& r);
std::optional<RunRecord> parse_run_record(const std::string& line);

// Effective-config serialization (JSON).
std::string config_json(const RunConfig& cfg);
std::string summary_json(const RunConfig& cfg, const RunSummary& s);

int log_verbosity();  // 0 quiet, 1 info, 2 debug (IMLAB_LOG env var)

}  // namespace imlab

#endif  // IMLAB_HARNESS_HPP
