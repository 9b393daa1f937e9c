#include "alh/cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "alh/evaluation.hpp"
#include "alh/verify.hpp"

namespace alh {

namespace fs = std::filesystem;

namespace {

std::string cell_filename(double epsilon, std::uint64_t seed) {
  std::ostringstream ss;
  ss << "run_eps" << epsilon << "_seed" << seed << ".json";
  return ss.str();
}

// Runs all (epsilon, seed) cells, fanning out across threads; results come
// back in deterministic (epsilon-major, seed-minor) order.
std::vector<ExperimentRecord> run_all_cells(const ExperimentConfig& cfg,
                                            const std::string& hash) {
  struct Cell {
    double epsilon;
    std::uint64_t seed;
  };
  std::vector<Cell> cells;
  for (double eps : cfg.epsilons) {
    for (std::uint64_t seed : cfg.seeds) cells.push_back({eps, seed});
  }
  std::vector<ExperimentRecord> records(cells.size());
  int threads = std::max(1, cfg.threads);
  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= cells.size()) return;
        i = next++;
      }
      records[i] = run_cell(cfg, hash, cells[i].epsilon, cells[i].seed);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  return records;
}

void write_records(const ExperimentConfig& cfg, const std::vector<ExperimentRecord>& records,
                   const std::string& csv_name) {
  fs::create_directories(cfg.out_dir);
  std::string csv = record_csv_header();
  for (const auto& rec : records) {
    write_text_file(fs::path(cfg.out_dir) / cell_filename(rec.schedule.epsilon, rec.seed),
                    record_to_json(rec));
    csv += record_csv_row(rec);
  }
  write_text_file(fs::path(cfg.out_dir) / csv_name, csv);
}

}  // namespace

ExperimentRecord run_cell(const ExperimentConfig& cfg, const std::string& hash,
                          double epsilon, std::uint64_t seed) {
  auto t0 = std::chrono::steady_clock::now();
  const int d = cfg.marginal.dim;
  const double A = cfg.resolved_A();
  const UnitVector target = basis_vector(d, 0);
  const NoiseModel noise(cfg.alpha, A, cfg.margin_scale, target);

  ExperimentRecord rec;
  rec.config_hash = hash;
  rec.seed = seed;
  rec.schedule = make_schedule(epsilon, cfg.delta, cfg.alpha, A, d, cfg.constants,
                               cfg.sigma_override, cfg.epsilon_validity);
  try {
    LearnerResult res =
        run_learner(rec.schedule, cfg.marginal, noise, seed, cfg.psgd_init, cfg.label_cap);
    rec.labels = res.labels;
    rec.selected_run = res.selected_run;
    rec.sign_flipped = res.sign_flipped;
    auto excess = excess_error(res.w_hat, noise, cfg.marginal, cfg.eval_samples,
                               substream(seed, {100}));
    rec.final_excess_error = excess.estimate;
    rec.final_excess_stderr = excess.stderr_;
    rec.final_min_angle = min_angle_to(res.w_hat, target);
    rec.success = excess.estimate <= epsilon;
    rec.completed = true;
  } catch (const BudgetExhausted& e) {
    rec.labels = StageLabels{e.queries_used, 0, 0};
    rec.final_excess_error = std::numeric_limits<double>::quiet_NaN();
    rec.final_excess_stderr = std::numeric_limits<double>::quiet_NaN();
    rec.final_min_angle = std::numeric_limits<double>::quiet_NaN();
    rec.success = false;
    rec.completed = false;
  }
  rec.wall_time_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - t0)
                         .count();
  return rec;
}

int cmd_run(const ExperimentConfig& cfg, const std::string& hash) {
  auto records = run_all_cells(cfg, hash);
  write_records(cfg, records, "runs.csv");
  std::size_t ok = 0;
  for (const auto& r : records) ok += r.success ? 1 : 0;
  std::cout << "run: " << ok << "/" << records.size() << " cells reached excess <= epsilon; "
            << "results in " << cfg.out_dir << "\n";
  return 0;
}

ScalingFit fit_scaling(const std::vector<ExperimentRecord>& records) {
  auto slope_of = [](const std::vector<std::pair<double, double>>& pts) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (auto [x, y] : pts) {
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    double n = double(pts.size());
    return (sxy - sx * sy / n) / (sxx - sx * sx / n);
  };

  std::map<std::uint64_t, std::vector<std::pair<double, double>>> by_seed;
  std::vector<std::pair<double, double>> pooled;
  for (const auto& r : records) {
    double x = std::log(1.0 / r.schedule.epsilon);
    double y = std::log(double(r.labels.total()));
    pooled.push_back({x, y});
    by_seed[r.seed].push_back({x, y});
  }
  ScalingFit fit;
  fit.slope = slope_of(pooled);
  for (const auto& [seed, pts] : by_seed) fit.per_seed_slopes.push_back(slope_of(pts));
  double m = 0, v = 0;
  for (double s : fit.per_seed_slopes) m += s;
  m /= double(fit.per_seed_slopes.size());
  for (double s : fit.per_seed_slopes) v += (s - m) * (s - m);
  std::size_t k = fit.per_seed_slopes.size();
  double sd = k > 1 ? std::sqrt(v / double(k - 1)) : 0.0;
  fit.ci_low = m - 1.96 * sd / std::sqrt(double(k));
  fit.ci_high = m + 1.96 * sd / std::sqrt(double(k));
  return fit;
}

int cmd_scaling(const ExperimentConfig& cfg, const std::string& hash) {
  if (cfg.epsilons.size() < 3) {
    std::cerr << "scaling: run.epsilons needs at least 3 values\n";
    return 1;
  }
  auto records = run_all_cells(cfg, hash);
  write_records(cfg, records, "scaling.csv");
  ScalingFit fit = fit_scaling(records);
  double theory = label_exponent(cfg.alpha);
  nlohmann::json j{
      {"fitted_exponent", fit.slope},
      {"ci_low", fit.ci_low},
      {"ci_high", fit.ci_high},
      {"per_seed_slopes", fit.per_seed_slopes},
      {"theoretical_exponent", theory},
      {"alpha", cfg.alpha},
  };
  write_text_file(fs::path(cfg.out_dir) / "scaling_summary.json", j.dump(2) + "\n");
  std::cout << "scaling: fitted exponent " << fit.slope << " (95% CI [" << fit.ci_low
            << ", " << fit.ci_high << "]), theoretical " << theory << "\n";
  return 0;
}

int cmd_verify(const ExperimentConfig& cfg, std::uint64_t seed) {
  VerifyReport rep = run_verification(cfg, seed);
  fs::create_directories(cfg.out_dir);
  write_text_file(fs::path(cfg.out_dir) / "verify_report.json", verify_report_to_json(rep));
  for (const auto& c : rep.checks) {
    std::cout << (c.pass ? "[pass] " : "[FAIL] ") << c.name << ": " << c.details << "\n";
  }
  if (!rep.all_pass()) {
    for (const auto& c : rep.checks) {
      if (!c.pass) {
        std::cerr << "verify: check failed: " << c.name << "\n";
        return 1;
      }
    }
  }
  return 0;
}

int cmd_calibrate(const ExperimentConfig& cfg) {
  // Pilot grid search at (d=2, epsilon=0.2): coarse sweep over the step-size
  // constant and the step budget, scored by success rate then label cost.
  ExperimentConfig pilot = cfg;
  pilot.marginal.dim = 2;
  pilot.epsilons = {0.2};
  pilot.seeds = {1, 2, 3};
  const std::vector<double> beta_grid = {0.1, 1.0, 10.0};
  const std::vector<std::uint64_t> cap_grid = {100'000, 400'000};

  struct Best {
    double c_beta = 0;
    std::uint64_t cap = 0;
    double success = -1.0;
    double labels = 0.0;
  } best;
  for (double cb : beta_grid) {
    for (std::uint64_t cap : cap_grid) {
      ExperimentConfig trial = pilot;
      trial.constants.c_beta = cfg.constants.c_beta * cb;
      trial.constants.step_cap = cap;
      double succ = 0.0, labels = 0.0;
      for (std::uint64_t seed : trial.seeds) {
        ExperimentRecord rec = run_cell(trial, "calibrate", 0.2, seed);
        succ += rec.success ? 1.0 : 0.0;
        labels += double(rec.labels.total());
      }
      succ /= double(trial.seeds.size());
      labels /= double(trial.seeds.size());
      std::cout << "calibrate: c_beta=" << trial.constants.c_beta << " step_cap=" << cap
                << " success=" << succ << " labels=" << labels << "\n";
      if (succ > best.success || (succ == best.success && labels < best.labels)) {
        best = {trial.constants.c_beta, cap, succ, labels};
      }
    }
  }
  nlohmann::json j{{"c_beta", best.c_beta},
                   {"step_cap", best.cap},
                   {"success_rate", best.success},
                   {"mean_labels", best.labels}};
  fs::create_directories(cfg.out_dir);
  write_text_file(fs::path(cfg.out_dir) / "calibration.json", j.dump(2) + "\n");
  std::cout << "calibrate: best c_beta=" << best.c_beta << " step_cap=" << best.cap << "\n";
  return 0;
}

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Active halfspace learning benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::uint64_t seed_flag = 0;
  bool seed_given = false;
  int threads_flag = 0;
  std::uint64_t label_cap_flag = 0;
  bool label_cap_given = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "config file path")->required();
    sub->add_option("--out", out_override, "output directory override");
    sub->add_option("--seed", seed_flag, "seed override (single seed)")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--threads", threads_flag, "worker threads");
    sub->add_option("--label-cap", label_cap_flag, "global label budget per run")
        ->each([&](const std::string&) { label_cap_given = true; });
  };

  CLI::App* run = app.add_subcommand("run", "run the learner over (epsilon, seed) cells");
  CLI::App* scaling = app.add_subcommand("scaling", "label-complexity scaling study");
  CLI::App* verify = app.add_subcommand("verify", "numeric verification suite");
  CLI::App* calibrate = app.add_subcommand("calibrate", "pilot constant search");
  for (CLI::App* sub : {run, scaling, verify, calibrate}) add_common(sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  ExperimentConfig cfg;
  try {
    Config raw = Config::parse_file(config_path);
    cfg = load_experiment_config(raw);
    std::string hash = config_hash(raw);
    if (!out_override.empty()) cfg.out_dir = out_override;
    if (seed_given) cfg.seeds = {seed_flag};
    if (threads_flag > 0) cfg.threads = threads_flag;
    if (label_cap_given) cfg.label_cap = label_cap_flag;

    if (app.got_subcommand(run)) return cmd_run(cfg, hash);
    if (app.got_subcommand(scaling)) return cmd_scaling(cfg, hash);
    if (app.got_subcommand(verify)) return cmd_verify(cfg, cfg.seeds.front());
    if (app.got_subcommand(calibrate)) return cmd_calibrate(cfg);
  } catch (const ConfigMissing& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace alh
