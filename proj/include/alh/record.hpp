#pragma once
// Experiment persistence: one JSON record per (epsilon, seed) cell plus
// aggregate CSV files. JSON keys are emitted sorted, so records are
// byte-stable across reruns except for wall_time_ms.

#include <cstdint>
#include <string>

#include "alh/learner.hpp"

namespace alh {

struct ExperimentRecord {
  std::string config_hash;
  std::uint64_t seed = 0;
  Schedule schedule;
  StageLabels labels;
  std::uint64_t selected_run = 0;
  bool sign_flipped = false;
  double final_excess_error = 0.0;
  double final_excess_stderr = 0.0;
  double final_min_angle = 0.0;
  bool success = false;
  bool completed = true;  // false when the label cap was hit
  double wall_time_ms = 0.0;
};

std::string record_to_json(const ExperimentRecord& rec);
void write_text_file(const std::string& path, const std::string& content);

// CSV row matching the aggregate schema:
// epsilon,seed,labels_total,excess_error,min_angle,success
std::string record_csv_header();  // includes the "# schema=1" comment line
std::string record_csv_row(const ExperimentRecord& rec);

}  // namespace alh
