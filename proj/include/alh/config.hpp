#pragma once
// Flat key=value config files with dotted keys, '#' comments, and
// line-numbered error messages.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "alh/distributions.hpp"
#include "alh/learner.hpp"

namespace alh {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigMissing : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class Config {
 public:
  static Config parse_file(const std::string& path);  // ConfigMissing if absent
  static Config parse_string(const std::string& text, const std::string& name = "<string>");

  bool has(const std::string& key) const;
  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_u64(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_double_list(const std::string& key) const;
  std::vector<std::uint64_t> get_u64_list(const std::string& key) const;

  // Line number of a key, for error reporting.
  int line_of(const std::string& key) const;
  const std::string& name() const { return name_; }
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::string name_;
  std::map<std::string, std::string> values_;
  std::map<std::string, int> lines_;

  [[noreturn]] void fail(const std::string& key, const std::string& what) const;
};

struct ExperimentConfig {
  MarginalDistribution marginal;
  double alpha = 0.7;
  std::optional<double> A;  // empty: derive from the marginal's density bound
  double margin_scale = 1.0;
  std::optional<double> sigma_override;
  std::optional<double> epsilon_validity;
  std::vector<double> epsilons;  // sorted descending
  double delta = 0.2;
  std::vector<std::uint64_t> seeds;
  std::string out_dir = "out";
  std::optional<std::uint64_t> label_cap;
  ScheduleConstants constants;
  PsgdInit psgd_init = PsgdInit::random;
  int threads = 1;
  std::int64_t eval_samples = 400'000;
  // verification knobs
  int certify_grid = 16;
  std::int64_t certify_samples = 1'000'000;
  double certify_R = 0.5;
  std::int64_t verify_samples = 200'000;

  double resolved_A() const;  // A or the derived certificate
};

// Reads and validates; throws ConfigError with "<file>:<line>:" prefixes.
ExperimentConfig load_experiment_config(const Config& cfg);

// Stable FNV-1a hash of the canonical key=value listing, as hex.
std::string config_hash(const Config& cfg);

}  // namespace alh
