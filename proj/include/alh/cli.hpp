#pragma once
// Command-line orchestration: run / scaling / verify / calibrate.

#include <cstdint>
#include <string>
#include <vector>

#include "alh/config.hpp"
#include "alh/record.hpp"

namespace alh {

// Executes one (epsilon, seed) cell end to end and evaluates the result.
ExperimentRecord run_cell(const ExperimentConfig& cfg, const std::string& hash,
                          double epsilon, std::uint64_t seed);

int cmd_run(const ExperimentConfig& cfg, const std::string& hash);
int cmd_scaling(const ExperimentConfig& cfg, const std::string& hash);
int cmd_verify(const ExperimentConfig& cfg, std::uint64_t seed);
int cmd_calibrate(const ExperimentConfig& cfg);

struct ScalingFit {
  double slope = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::vector<double> per_seed_slopes;
};

// Least-squares slope of log(labels) against log(1/epsilon); the CI comes
// from per-seed slope replication (mean +/- 1.96 * sd / sqrt(#seeds)).
ScalingFit fit_scaling(const std::vector<ExperimentRecord>& records);

int cli_main(int argc, const char* const* argv);

}  // namespace alh
