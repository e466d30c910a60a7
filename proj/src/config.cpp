#include "bhtopo/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace bhtopo {

std::string to_string(DiagonalPattern pattern) {
  return pattern == DiagonalPattern::Mirrored ? "mirrored" : "uniform";
}

DiagonalPattern diagonal_pattern_from_string(const std::string& name) {
  if (name == "uniform") return DiagonalPattern::Uniform;
  if (name == "mirrored") return DiagonalPattern::Mirrored;
  throw std::invalid_argument("unknown diagonal pattern '" + name + "'");
}

std::string format_exact(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

int parse_int(const std::string& s) {
  int v = 0;
  const char* end = s.data() + s.size();
  const auto res = std::from_chars(s.data(), end, v);
  if (res.ec != std::errc() || res.ptr != end) throw std::invalid_argument("not an integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw std::invalid_argument("not a boolean (true/false): '" + s + "'");
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  if (trim(s).empty()) return out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(trim(item)));
  return out;
}

}  // namespace

std::vector<double> parse_number_list(const std::string& text) {
  try {
    return parse_list(text);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

namespace {

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ", ";
    out += format_exact(v[i]);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<std::string(const SolverConfig&)> get;
  std::function<void(SolverConfig&, const std::string&)> set;
};

template <class T>
Field number(std::string key, T SolverConfig::*section, double T::*member) {
  return {std::move(key), [=](const SolverConfig& c) { return format_exact(c.*section.*member); },
          [=](SolverConfig& c, const std::string& v) { c.*section.*member = parse_double(v); }};
}

template <class T>
Field integer(std::string key, T SolverConfig::*section, int T::*member) {
  return {std::move(key), [=](const SolverConfig& c) { return std::to_string(c.*section.*member); },
          [=](SolverConfig& c, const std::string& v) { c.*section.*member = parse_int(v); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = [] {
    using C = SolverConfig;
    std::vector<Field> f;
    f.push_back(integer("mesh.nx", &C::mesh, &MeshConfig::nx));
    f.push_back(integer("mesh.ny", &C::mesh, &MeshConfig::ny));
    f.push_back({"mesh.diagonal", [](const C& c) { return to_string(c.mesh.diagonal); },
                 [](C& c, const std::string& v) { c.mesh.diagonal = diagonal_pattern_from_string(v); }});
    f.push_back(number("material.lambda0", &C::material, &MaterialModel::lambda0));
    f.push_back(number("material.lambda1", &C::material, &MaterialModel::lambda1));
    f.push_back(number("material.mu0", &C::material, &MaterialModel::mu0));
    f.push_back(number("material.mu1", &C::material, &MaterialModel::mu1));
    f.push_back(number("material.exponent", &C::material, &MaterialModel::exponent));
    f.push_back(number("problem.gamma", &C::problem, &ProblemParams::gamma));
    f.push_back(number("problem.beta", &C::problem, &ProblemParams::beta));
    f.push_back(number("problem.epsilon", &C::problem, &ProblemParams::epsilon));
    f.push_back({"problem.rho0", [](const C& c) { return format_exact(c.rho0); },
                 [](C& c, const std::string& v) { c.rho0 = parse_double(v); }});
    f.push_back({"barrier.mu0", [](const C& c) { return format_exact(c.barrier.schedule.mu0); },
                 [](C& c, const std::string& v) { c.barrier.schedule.mu0 = parse_double(v); }});
    f.push_back({"barrier.mu_inf", [](const C& c) { return format_exact(c.barrier.schedule.mu_inf); },
                 [](C& c, const std::string& v) { c.barrier.schedule.mu_inf = parse_double(v); }});
    f.push_back({"barrier.schedule", [](const C& c) { return to_string(c.barrier.schedule.kind); },
                 [](C& c, const std::string& v) { c.barrier.schedule.kind = schedule_kind_from_string(v); }});
    f.push_back({"barrier.fraction_to_boundary",
                 [](const C& c) { return std::string(c.barrier.fraction_to_boundary ? "true" : "false"); },
                 [](C& c, const std::string& v) { c.barrier.fraction_to_boundary = parse_bool(v); }});
    f.push_back(number("barrier.boundary_fraction", &C::barrier, &BarrierSettings::boundary_fraction));
    f.push_back(number("stepping.dt_init", &C::stepping, &SteppingConfig::dt_init));
    f.push_back(number("stepping.dt_max", &C::stepping, &SteppingConfig::dt_max));
    f.push_back(number("stepping.growth", &C::stepping, &SteppingConfig::growth));
    f.push_back(number("stepping.shrink", &C::stepping, &SteppingConfig::shrink));
    f.push_back(number("stepping.dt_min", &C::stepping, &SteppingConfig::dt_min));
    f.push_back(number("newton.tol", &C::newton, &NewtonSettings::tol));
    f.push_back(integer("newton.max_iter", &C::newton, &NewtonSettings::max_iter));
    f.push_back(number("newton.divergence_growth", &C::newton, &NewtonSettings::divergence_growth));
    f.push_back({"newton.scale_tol",
                 [](const C& c) { return std::string(c.newton.scale_tol ? "true" : "false"); },
                 [](C& c, const std::string& v) { c.newton.scale_tol = parse_bool(v); }});
    f.push_back({"predictor.order", [](const C& c) { return std::to_string(c.predictor_order); },
                 [](C& c, const std::string& v) { c.predictor_order = parse_int(v); }});
    f.push_back({"output.dir", [](const C& c) { return c.output.dir; },
                 [](C& c, const std::string& v) { c.output.dir = v; }});
    f.push_back({"output.snapshots", [](const C& c) { return format_list(c.output.snapshots); },
                 [](C& c, const std::string& v) { c.output.snapshots = parse_list(v); }});
    return f;
  }();
  return table;
}

void require(bool ok, const std::string& key, const std::string& what) {
  if (!ok) throw ConfigError("invalid " + key + ": " + what);
}

}  // namespace

void SolverConfig::validate() const {
  require(mesh.nx > 0 && mesh.nx % 20 == 0, "mesh.nx",
          "must be a positive multiple of 20 so the support and load segments align with the grid");
  require(mesh.ny > 0, "mesh.ny", "must be positive");

  auto wrap = [](const std::string& section, auto&& check) {
    try {
      check();
    } catch (const std::invalid_argument& e) {
      throw ConfigError("invalid " + section + ": " + e.what());
    }
  };
  wrap("material", [&] { material.validate(); });
  require(problem.gamma > 0.0, "problem.gamma", "must be positive");
  require(problem.beta > 0.0, "problem.beta", "must be positive");
  require(problem.epsilon > 0.0, "problem.epsilon", "must be positive");
  require(rho0 > 0.0 && rho0 < 1.0, "problem.rho0", "must lie strictly inside (0, 1)");

  require(barrier.schedule.mu_inf > 0.0, "barrier.mu_inf", "must be positive");
  require(barrier.schedule.mu0 > barrier.schedule.mu_inf, "barrier.mu0",
          "must exceed barrier.mu_inf (the schedule must decrease)");
  require(barrier.boundary_fraction > 0.0 && barrier.boundary_fraction < 1.0,
          "barrier.boundary_fraction", "must lie in (0, 1)");

  require(stepping.dt_init > 0.0, "stepping.dt_init", "must be positive");
  require(stepping.dt_max >= stepping.dt_init, "stepping.dt_max", "must be at least stepping.dt_init");
  require(stepping.growth >= 1.0, "stepping.growth", "must be at least 1");
  require(stepping.shrink > 0.0 && stepping.shrink < 1.0, "stepping.shrink", "must lie in (0, 1)");
  require(stepping.dt_min > 0.0, "stepping.dt_min", "must be positive");

  require(newton.tol > 0.0, "newton.tol", "must be positive");
  require(newton.max_iter >= 1, "newton.max_iter", "must be at least 1");
  require(newton.divergence_growth > 1.0, "newton.divergence_growth", "must exceed 1");
  require(predictor_order == 0 || predictor_order == 1, "predictor.order", "must be 0 or 1");

  require(!output.dir.empty(), "output.dir", "must not be empty");
  for (double s : output.snapshots) {
    require(s >= 0.0 && s <= 1.0, "output.snapshots", "values must lie in [0, 1]");
  }
}

double SolverConfig::newton_tolerance(int dimension) const {
  return newton.scale_tol ? newton.tol * std::sqrt(static_cast<double>(dimension)) : newton.tol;
}

NewtonConfig SolverConfig::newton_config(int dimension) const {
  return {newton_tolerance(dimension), newton.max_iter, newton.divergence_growth};
}

SolverConfig parse_config_string(const std::string& text, const std::string& source) {
  std::map<std::string, const Field*> by_key;
  for (const Field& f : fields()) by_key[f.key] = &f;

  SolverConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string where = source + ":" + std::to_string(line_no) + ": ";
    std::string line = raw;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = by_key.find(key);
    if (it == by_key.end()) throw ConfigError(where + "unknown key '" + key + "'");
    if (const auto prev = seen.find(key); prev != seen.end()) {
      throw ConfigError(where + "duplicate key '" + key + "' (first set on line " +
                        std::to_string(prev->second) + ")");
    }
    seen[key] = line_no;
    try {
      it->second->set(cfg, value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(where + key + ": " + e.what());
    } catch (const std::out_of_range&) {
      throw ConfigError(where + key + ": value out of range");
    }
  }
  cfg.validate();
  return cfg;
}

SolverConfig parse_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_string(ss.str(), path);
}

std::string serialize_config(const SolverConfig& cfg) {
  std::string out;
  for (const Field& f : fields()) out += f.key + " = " + f.get(cfg) + "\n";
  return out;
}

std::string config_digest(const SolverConfig& cfg) {
  SolverConfig problem_only = cfg;
  problem_only.output = OutputConfig{};
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : serialize_config(problem_only)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace bhtopo
