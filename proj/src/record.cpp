#include "alh/record.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace alh {

using nlohmann::json;

namespace {

json schedule_to_json(const Schedule& s) {
  return json{
      {"epsilon", s.epsilon},
      {"delta", s.delta},
      {"alpha", s.alpha},
      {"A", s.A},
      {"d", s.d},
      {"theta0", s.theta0},
      {"sigma", s.sigma},
      {"rho", s.rho},
      {"beta", s.beta},
      {"S", s.S},
      {"N", s.N},
      {"M1", s.M1},
      {"M2", s.M2},
      {"polylog", s.polylog},
      {"epsilon_warning", s.epsilon_warning},
      {"constants",
       json{
           {"c_theta0", s.constants.c_theta0},
           {"c_sigma", s.constants.c_sigma},
           {"c_rho", s.constants.c_rho},
           {"c_N", s.constants.c_N},
           {"c_beta", s.constants.c_beta},
           {"c_M1", s.constants.c_M1},
           {"c_M2", s.constants.c_M2},
           {"step_cap", s.constants.step_cap},
           {"m1_cap", s.constants.m1_cap},
       }},
  };
}

}  // namespace

std::string record_to_json(const ExperimentRecord& rec) {
  json j{
      {"config_hash", rec.config_hash},
      {"seed", rec.seed},
      {"schedule", schedule_to_json(rec.schedule)},
      {"labels_by_stage",
       json{{"psgd", rec.labels.psgd},
            {"selection", rec.labels.selection},
            {"sign", rec.labels.sign}}},
      {"labels_total", rec.labels.total()},
      {"selected_run", rec.selected_run},
      {"sign_flipped", rec.sign_flipped},
      {"final_excess_error", rec.final_excess_error},
      {"final_excess_stderr", rec.final_excess_stderr},
      {"final_min_angle", rec.final_min_angle},
      {"success", rec.success},
      {"completed", rec.completed},
      {"wall_time_ms", rec.wall_time_ms},
  };
  return j.dump(2) + "\n";
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
}

std::string record_csv_header() {
  return "# schema=1\nepsilon,seed,labels_total,excess_error,min_angle,success\n";
}

std::string record_csv_row(const ExperimentRecord& rec) {
  std::ostringstream ss;
  ss.precision(12);
  ss << rec.schedule.epsilon << ',' << rec.seed << ',' << rec.labels.total() << ','
     << rec.final_excess_error << ',' << rec.final_min_angle << ','
     << (rec.success ? 1 : 0) << '\n';
  return ss.str();
}

}  // namespace alh
