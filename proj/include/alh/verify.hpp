#pragma once
// The verification suite behind `verify`: numeric spot-checks of the
// properties the pipeline relies on, each reported as a named pass/fail entry.

#include <string>
#include <vector>

#include "alh/config.hpp"

namespace alh {

struct VerifyCheck {
  std::string name;
  bool pass = false;
  std::string details;
};

struct VerifyReport {
  std::vector<VerifyCheck> checks;
  bool all_pass() const {
    for (const auto& c : checks) {
      if (!c.pass) return false;
    }
    return true;
  }
};

VerifyReport run_verification(const ExperimentConfig& cfg, std::uint64_t seed);

std::string verify_report_to_json(const VerifyReport& rep);

}  // namespace alh
