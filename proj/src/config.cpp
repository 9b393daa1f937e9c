#include "alh/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "alh/noise.hpp"

namespace alh {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigMissing("config file not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& name) {
  Config cfg;
  cfg.name_ = name;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": expected key = value");
    }
    std::string key = trim(t.substr(0, eq));
    std::string val = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": empty key");
    }
    if (cfg.values_.count(key)) {
      throw ConfigError(name + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
    }
    cfg.values_[key] = val;
    cfg.lines_[key] = lineno;
  }
  return cfg;
}

bool Config::has(const std::string& key) const { return values_.count(key) > 0; }

int Config::line_of(const std::string& key) const {
  auto it = lines_.find(key);
  return it == lines_.end() ? 0 : it->second;
}

void Config::fail(const std::string& key, const std::string& what) const {
  throw ConfigError(name_ + ":" + std::to_string(line_of(key)) + ": key '" + key + "' " + what);
}

std::string Config::get_string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError(name_ + ": missing required key '" + key + "'");
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
  auto it = values_.find(key);
  return it == values_.end() ? fallback : it->second;
}

double Config::get_double(const std::string& key) const {
  std::string v = get_string(key);
  try {
    std::size_t pos;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    fail(key, "is not a number: '" + v + "'");
  }
}

double Config::get_double(const std::string& key, double fallback) const {
  return has(key) ? get_double(key) : fallback;
}

std::uint64_t Config::get_u64(const std::string& key) const {
  std::string v = get_string(key);
  try {
    std::size_t pos;
    unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    fail(key, "is not a non-negative integer: '" + v + "'");
  }
}

std::uint64_t Config::get_u64(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? get_u64(key) : fallback;
}

std::vector<double> Config::get_double_list(const std::string& key) const {
  std::vector<double> out;
  for (const auto& item : split_commas(get_string(key))) {
    try {
      std::size_t pos;
      double x = std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument("");
      out.push_back(x);
    } catch (...) {
      fail(key, "has a non-numeric list item: '" + item + "'");
    }
  }
  if (out.empty()) fail(key, "is an empty list");
  return out;
}

std::vector<std::uint64_t> Config::get_u64_list(const std::string& key) const {
  std::vector<std::uint64_t> out;
  for (const auto& item : split_commas(get_string(key))) {
    try {
      std::size_t pos;
      unsigned long long x = std::stoull(item, &pos);
      if (pos != item.size()) throw std::invalid_argument("");
      out.push_back(x);
    } catch (...) {
      fail(key, "has a non-integer list item: '" + item + "'");
    }
  }
  if (out.empty()) fail(key, "is an empty list");
  return out;
}

double ExperimentConfig::resolved_A() const {
  if (A) return *A;
  return derived_tnc_A(alpha, margin_scale, max_margin_density(marginal));
}

ExperimentConfig load_experiment_config(const Config& cfg) {
  ExperimentConfig ec;
  std::string kind = cfg.get_string("marginal.kind", "isotropic_gaussian");
  try {
    ec.marginal.kind = marginal_kind_from_string(kind);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(cfg.name() + ":" + std::to_string(cfg.line_of("marginal.kind")) +
                      ": " + e.what());
  }
  ec.marginal.dim = int(cfg.get_u64("marginal.dim", 2));
  if (ec.marginal.dim < 2) {
    throw ConfigError(cfg.name() + ":" + std::to_string(cfg.line_of("marginal.dim")) +
                      ": marginal.dim must be >= 2");
  }
  ec.marginal.radius = cfg.get_double("marginal.radius", 1.0);

  ec.alpha = cfg.get_double("noise.alpha", 0.7);
  if (!(ec.alpha > 1.0 / 3.0 && ec.alpha <= 1.0)) {
    throw ConfigError(cfg.name() + ":" + std::to_string(cfg.line_of("noise.alpha")) +
                      ": noise.alpha must be in (1/3, 1]");
  }
  if (cfg.has("noise.A") && cfg.get_string("noise.A") != "auto") {
    ec.A = cfg.get_double("noise.A");
  }
  ec.margin_scale = cfg.get_double("noise.margin_scale", 1.0);
  if (cfg.has("loss.sigma_override")) ec.sigma_override = cfg.get_double("loss.sigma_override");
  if (cfg.has("schedule.epsilon_validity")) {
    ec.epsilon_validity = cfg.get_double("schedule.epsilon_validity");
  }

  ec.epsilons = cfg.has("run.epsilons") ? cfg.get_double_list("run.epsilons")
                                        : std::vector<double>{0.1};
  for (std::size_t i = 1; i < ec.epsilons.size(); ++i) {
    if (ec.epsilons[i] >= ec.epsilons[i - 1]) {
      throw ConfigError(cfg.name() + ":" + std::to_string(cfg.line_of("run.epsilons")) +
                        ": run.epsilons must be sorted descending");
    }
  }
  ec.delta = cfg.get_double("run.delta", 0.2);
  ec.seeds = cfg.has("run.seeds") ? cfg.get_u64_list("run.seeds")
                                  : std::vector<std::uint64_t>{1};
  ec.out_dir = cfg.get_string("out.dir", "out");
  if (cfg.has("run.label_cap")) ec.label_cap = cfg.get_u64("run.label_cap");
  ec.threads = int(cfg.get_u64("run.threads", 1));
  ec.eval_samples = std::int64_t(cfg.get_u64("run.eval_samples", 400'000));

  ec.constants.c_theta0 = cfg.get_double("schedule.c_theta0", 1.0);
  ec.constants.c_sigma = cfg.get_double("schedule.c_sigma", 0.5);
  ec.constants.c_rho = cfg.get_double("schedule.c_rho", 0.1);
  ec.constants.c_N = cfg.get_double("schedule.c_N", 1.0);
  ec.constants.c_beta = cfg.get_double("schedule.c_beta", 1.0);
  ec.constants.c_M1 = cfg.get_double("schedule.c_M1", 1.0);
  ec.constants.c_M2 = cfg.get_double("schedule.c_M2", 16.0);
  ec.constants.step_cap = cfg.get_u64("schedule.step_cap", 2'000'000);
  ec.constants.m1_cap = cfg.get_u64("schedule.m1_cap", 700'000);

  std::string init = cfg.get_string("psgd.init", "random");
  if (init == "random") {
    ec.psgd_init = PsgdInit::random;
  } else if (init == "e1") {
    ec.psgd_init = PsgdInit::e1;
  } else {
    throw ConfigError(cfg.name() + ":" + std::to_string(cfg.line_of("psgd.init")) +
                      ": psgd.init must be 'random' or 'e1'");
  }

  ec.certify_grid = int(cfg.get_u64("certify.grid", 16));
  ec.certify_samples = std::int64_t(cfg.get_u64("certify.samples", 1'000'000));
  ec.certify_R = cfg.get_double("certify.R", 0.5);
  ec.verify_samples = std::int64_t(cfg.get_u64("verify.samples", 200'000));
  return ec;
}

std::string config_hash(const Config& cfg) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  auto mix = [&](const std::string& s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ull;
    }
  };
  for (const auto& [k, v] : cfg.values()) {
    mix(k);
    mix("=");
    mix(v);
    mix("\n");
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace alh
