#include "imlab/sweep.hpp"

#include "imlab/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace imlab {

using json = nlohmann::json;

namespace {

IntrinsicKind parse_im(const std::string& s) {
  const std::string n = to_lower(s);
  if (n == "counts") return IntrinsicKind::Counts;
  if (n == "rnd") return IntrinsicKind::Rnd;
  if (n == "icm") return IntrinsicKind::Icm;
  if (n == "ride") return IntrinsicKind::Ride;
  throw std::invalid_argument("unknown im: " + s);
}

EpisodicScaling parse_scaling(const std::string& s) {
  const std::string n = to_lower(s);
  if (n == "noep") return EpisodicScaling::NoEp;
  if (n == "ep") return EpisodicScaling::Ep;
  if (n == "first" || n == "1st") return EpisodicScaling::First;
  throw std::invalid_argument("unknown scaling: " + s);
}

ArchitectureKind parse_arch(const std::string& s) {
  const std::string n = to_lower(s);
  if (n == "lightweight" || n == "lw") return ArchitectureKind::Lightweight;
  if (n == "default") return ArchitectureKind::Default;
  throw std::invalid_argument("unknown arch: " + s);
}

// Median over seed results; unsolved runs count as +inf.
std::string median_cell(std::vector<long> frames_to, long budget) {
  std::vector<double> v;
  for (long f : frames_to) v.push_back(f < 0 ? std::numeric_limits<double>::infinity()
                                             : static_cast<double>(f));
  std::sort(v.begin(), v.end());
  const double med = v[v.size() / 2];
  char buf[64];
  if (std::isinf(med)) {
    std::snprintf(buf, sizeof(buf), "> %.3g", static_cast<double>(budget) / 1e6);
  } else {
    std::snprintf(buf, sizeof(buf), "%.2f", med / 1e6);
  }
  return buf;
}

}  // namespace

int run_sweep(const std::string& config_path) {
  std::ifstream f(config_path);
  if (!f) throw std::runtime_error("cannot open sweep config: " + config_path);
  json j;
  f >> j;

  const std::string out = j.value("out", "sweep_out");
  const long frames = j.value("frames", 2'000'000L);
  const auto envs = j.value("envs", std::vector<std::string>{"mn7s4"});
  const auto ims = j.value("im", std::vector<std::string>{"counts"});
  const auto scalings = j.value("scaling", std::vector<std::string>{"ep"});
  const auto strategies = j.value("strategies", std::vector<std::string>{"s"});
  const auto archs = j.value("arch", std::vector<std::string>{"default"});
  const auto seeds = j.value("seeds", std::vector<std::uint64_t>{1, 2, 3});
  const bool stop_at_95 = j.value("stop_at_95", false);

  std::filesystem::create_directories(out);
  std::ofstream agg(out + "/aggregate.csv");
  agg << "env,im,scaling,strategy,arch,seeds,ok,frames_to_optimal_1e6,frames_to_95_1e6,cell\n";

  int failures = 0;
  for (const auto& env : envs)
    for (const auto& im : ims)
      for (const auto& scaling : scalings)
        for (const auto& strategy : strategies)
          for (const auto& arch : archs) {
            std::vector<long> to_opt, to_95;
            int ok = 0;
            for (std::uint64_t seed : seeds) {
              RunConfig cfg;
              cfg.env = env;
              cfg.im = parse_im(im);
              cfg.scaling = parse_scaling(scaling);
              cfg.strategy = parse_strategy(strategy, cfg.adaptive_window);
              cfg.arch = parse_arch(arch);
              cfg.seed = seed;
              cfg.frames = frames;
              cfg.stop_at_95 = stop_at_95;
              if (j.contains("beta")) cfg.beta = j["beta"].get<double>();
              if (j.contains("lr")) cfg.ppo.lr = j["lr"].get<double>();
              if (j.contains("entropy_coef")) cfg.ppo.entropy_coef = j["entropy_coef"].get<double>();
              std::ostringstream dir;
              dir << out << "/" << to_lower(env) << "_" << to_lower(im) << "_" << to_lower(scaling)
                  << "_" << to_lower(strategy) << "_" << to_lower(arch) << "/seed" << seed;
              cfg.out_dir = dir.str();

              const std::string summary_path = cfg.out_dir + "/summary.json";
              long f_opt = -1, f_95 = -1;
              if (std::filesystem::exists(summary_path)) {
                std::ifstream sf(summary_path);
                json sj;
                sf >> sj;
                if (!sj["frames_to_optimal"].is_null()) f_opt = sj["frames_to_optimal"].get<long>();
                if (!sj["frames_to_95"].is_null()) f_95 = sj["frames_to_95"].get<long>();
                std::fprintf(stderr, "[sweep] skip (done): %s\n", cfg.out_dir.c_str());
                ++ok;
              } else {
                try {
                  const RunSummary s = run_experiment(cfg);
                  f_opt = s.frames_to_optimal;
                  f_95 = s.frames_to_95;
                  ++ok;
                } catch (const std::exception& e) {
                  std::fprintf(stderr, "[sweep] run failed (%s): %s\n", cfg.out_dir.c_str(),
                               e.what());
                  ++failures;
                  continue;
                }
              }
              to_opt.push_back(f_opt);
              to_95.push_back(f_95);
            }
            if (to_opt.empty()) {
              to_opt.push_back(-1);
              to_95.push_back(-1);
            }
            const std::string opt_cell = median_cell(to_opt, frames);
            const std::string sub_cell = median_cell(to_95, frames);
            agg << to_lower(env) << "," << to_lower(im) << "," << to_lower(scaling) << ","
                << to_lower(strategy) << "," << to_lower(arch) << "," << seeds.size() << "," << ok
                << "," << opt_cell << "," << sub_cell << ",\"" << opt_cell << " (" << sub_cell
                << ")\"\n";
          }
  return failures;
}

}  // namespace imlab
