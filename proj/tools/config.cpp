#include "config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace petrec::cli {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

struct Section {
  std::string type;
  std::string name;  // second word of the header, e.g. [algorithm fast]
  int line = 0;
  std::vector<std::pair<std::string, std::string>> kv;
};

std::vector<Section> read_sections(const std::string& text, const std::string& path) {
  std::vector<Section> sections;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  auto fail = [&](const std::string& msg) {
    throw ConfigError(path + ":" + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++line_no;
    const auto comment = raw.find_first_of("#;");
    const std::string line = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      const std::string inner = trim(line.substr(1, line.size() - 2));
      Section sec;
      sec.line = line_no;
      const auto space = inner.find_first_of(" \t");
      if (space == std::string::npos) {
        sec.type = inner;
      } else {
        sec.type = inner.substr(0, space);
        sec.name = trim(inner.substr(space + 1));
      }
      if (sec.type.empty()) fail("empty section header");
      sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    if (sections.empty()) fail("key outside any section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail("empty key");
    for (const auto& pair : sections.back().kv)
      if (pair.first == key)
        fail("duplicate key '" + key + "' in [" + sections.back().type + "]");
    sections.back().kv.emplace_back(key, value);
  }
  return sections;
}

// Typed access to one section with consumption tracking, so a typo in a key
// name is an error rather than a silently ignored setting.
class KeyReader {
 public:
  KeyReader(const Section& sec, const std::string& path) : sec_(sec), path_(path) {}

  bool has(const std::string& key) const {
    return std::any_of(sec_.kv.begin(), sec_.kv.end(),
                       [&](const auto& pair) { return pair.first == key; });
  }

  std::string str(const std::string& key, const std::string& fallback) {
    const std::string* v = find(key);
    return v ? *v : fallback;
  }

  double num(const std::string& key, double fallback) {
    const std::string* v = find(key);
    return v ? parse_num(key, *v) : fallback;
  }

  long integer(const std::string& key, long fallback) {
    const double v = num(key, static_cast<double>(fallback));
    const long r = static_cast<long>(v);
    if (static_cast<double>(r) != v) fail(key, "expected an integer");
    return r;
  }

  bool flag(const std::string& key, bool fallback) {
    const std::string* v = find(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "on" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "off" || *v == "0") return false;
    fail(key, "expected a boolean, got '" + *v + "'");
    return false;
  }

  std::vector<double> num_list(const std::string& key, std::vector<double> fallback) {
    const std::string* v = find(key);
    if (!v) return fallback;
    std::vector<double> out;
    std::istringstream items(*v);
    std::string item;
    while (std::getline(items, item, ',')) out.push_back(parse_num(key, trim(item)));
    if (out.empty()) fail(key, "expected a comma-separated list");
    return out;
  }

  void fail(const std::string& key, const std::string& msg) const {
    throw ConfigError(path_ + ": [" + sec_.type + (sec_.name.empty() ? "" : " " + sec_.name) +
                      "] key '" + key + "': " + msg);
  }

  // Every recognized key must have been asked for by the time this runs.
  void finish() const {
    for (const auto& pair : sec_.kv)
      if (!used_.count(pair.first)) fail(pair.first, "unknown key");
  }

 private:
  const std::string* find(const std::string& key) {
    used_.insert(key);
    for (const auto& pair : sec_.kv)
      if (pair.first == key) return &pair.second;
    return nullptr;
  }

  double parse_num(const std::string& key, const std::string& text) const {
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0') fail(key, "expected a number, got '" + text + "'");
    return v;
  }

  const Section& sec_;
  const std::string& path_;
  std::set<std::string> used_;
};

SolverKind parse_solver(KeyReader& keys, const std::string& value) {
  if (value == "ppga") return SolverKind::ppga;
  if (value == "appga") return SolverKind::appga;
  if (value == "fppa") return SolverKind::fppa;
  if (value == "afppa") return SolverKind::afppa;
  keys.fail("solver", "expected ppga, appga, fppa or afppa, got '" + value + "'");
  return SolverKind::ppga;
}

AlgorithmConfig parse_algorithm(const Section& sec, const std::string& path) {
  if (sec.name.empty())
    throw ConfigError(path + ":" + std::to_string(sec.line) +
                      ": [algorithm] needs a name, e.g. [algorithm appga-w1]");
  // The name becomes a directory under runs/, so keep it to a safe charset.
  for (char ch : sec.name)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.')
      throw ConfigError(path + ":" + std::to_string(sec.line) + ": algorithm name '" +
                        sec.name + "' may only use letters, digits, '-', '_' and '.'");
  KeyReader keys(sec, path);
  AlgorithmConfig alg;
  alg.name = sec.name;
  alg.solver = parse_solver(keys, keys.str("solver", "ppga"));
  alg.iterations = static_cast<int>(keys.integer("iterations", 100));
  alg.beta = keys.num("beta", 1.0);
  alg.freeze_after = static_cast<int>(keys.integer("freeze_after", 50));
  alg.safety = keys.flag("safety", false);
  alg.rho1 = keys.num("rho1", 0.0);
  alg.rho2 = keys.num("rho2", 0.0);
  alg.diagnostics = keys.flag("diagnostics", false);

  const bool accelerated = alg.solver == SolverKind::appga || alg.solver == SolverKind::afppa;
  const std::string momentum = keys.str("momentum", accelerated ? "generalized" : "none");
  if (momentum == "none")
    alg.momentum = MomentumKind::none;
  else if (momentum == "generalized")
    alg.momentum = MomentumKind::generalized;
  else if (momentum == "nesterov")
    alg.momentum = MomentumKind::nesterov;
  else
    keys.fail("momentum", "expected none, generalized or nesterov, got '" + momentum + "'");
  if (!accelerated && alg.momentum != MomentumKind::none)
    keys.fail("momentum", std::string("solver '") + solver_name(alg.solver) +
                              "' does not take momentum");

  alg.schedule.a = keys.num("a", alg.schedule.a);
  alg.schedule.b = keys.num("b", alg.schedule.b);
  alg.schedule.omega = keys.num("omega", alg.schedule.omega);
  if (alg.momentum == MomentumKind::generalized) {
    try {
      validate_gn_for_solver(alg.schedule);
    } catch (const std::invalid_argument& e) {
      keys.fail("a", e.what());
    }
  }

  if (alg.iterations <= 0) keys.fail("iterations", "must be positive");
  if (!(alg.beta > 0.0)) keys.fail("beta", "must be positive");
  if (alg.freeze_after < 0) keys.fail("freeze_after", "must be >= 0");
  keys.finish();
  return alg;
}

}  // namespace

const char* solver_name(SolverKind kind) {
  switch (kind) {
    case SolverKind::ppga: return "ppga";
    case SolverKind::appga: return "appga";
    case SolverKind::fppa: return "fppa";
    case SolverKind::afppa: return "afppa";
  }
  return "?";
}

ExperimentConfig parse_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  ExperimentConfig cfg;
  cfg.source_text = text;

  std::set<std::string> seen;
  std::string geometry_preset = "desk";
  long geometry_size = 0;
  bool have_counts = false;

  for (const Section& sec : read_sections(text, path)) {
    if (sec.type != "algorithm") {
      if (!sec.name.empty())
        throw ConfigError(path + ":" + std::to_string(sec.line) + ": section [" + sec.type +
                          "] does not take a name");
      if (!seen.insert(sec.type).second)
        throw ConfigError(path + ":" + std::to_string(sec.line) + ": duplicate section [" +
                          sec.type + "]");
    }
    KeyReader keys(sec, path);

    if (sec.type == "experiment") {
      cfg.output_dir = keys.str("output_dir", cfg.output_dir);
      std::vector<double> marks = keys.num_list("checkpoints", {25, 50, 100});
      cfg.checkpoints.clear();
      for (double m : marks) {
        if (m <= 0 || m != static_cast<long>(m))
          keys.fail("checkpoints", "entries must be positive integers");
        cfg.checkpoints.push_back(static_cast<long>(m));
      }
      std::sort(cfg.checkpoints.begin(), cfg.checkpoints.end());
      cfg.checkpoints.erase(std::unique(cfg.checkpoints.begin(), cfg.checkpoints.end()),
                            cfg.checkpoints.end());
    } else if (sec.type == "geometry") {
      geometry_preset = keys.str("preset", geometry_preset);
      geometry_size = keys.integer("size", geometry_size);
    } else if (sec.type == "phantom") {
      const std::string variant = keys.str("variant", "uniform");
      if (variant == "uniform")
        cfg.phantom.variant = PhantomSpec::Variant::uniform_spheres;
      else if (variant == "head")
        cfg.phantom.variant = PhantomSpec::Variant::synthetic_head;
      else if (variant == "external")
        cfg.phantom.variant = PhantomSpec::Variant::external_image;
      else
        keys.fail("variant", "expected uniform, head or external, got '" + variant + "'");
      cfg.phantom.radii_px = keys.num_list("radii", cfg.phantom.radii_px);
      for (double r : cfg.phantom.radii_px)
        if (!(r > 0.0)) keys.fail("radii", "radii must be positive");
      cfg.phantom.activity_ratio = keys.num("activity_ratio", cfg.phantom.activity_ratio);
      cfg.phantom.background = keys.num("background", cfg.phantom.background);
      cfg.phantom.ring_radius_frac = keys.num("ring_fraction", cfg.phantom.ring_radius_frac);
      cfg.phantom.image_path = keys.str("path", "");
      if (cfg.phantom.variant == PhantomSpec::Variant::external_image &&
          cfg.phantom.image_path.empty())
        keys.fail("path", "required for the external variant");
    } else if (sec.type == "noise") {
      cfg.noise.total_counts = keys.num("total_counts", 0.0);
      have_counts = keys.has("total_counts");
      cfg.noise.scatter_fraction = keys.num("scatter_fraction", cfg.noise.scatter_fraction);
      cfg.noise.random_fraction = keys.num("random_fraction", cfg.noise.random_fraction);
      cfg.noise.seed = static_cast<std::uint64_t>(keys.integer("seed", 0));
    } else if (sec.type == "model") {
      cfg.fwhm_mm = keys.num("fwhm_mm", cfg.fwhm_mm);
      cfg.mu_per_cm = keys.num("mu_per_cm", cfg.mu_per_cm);
      cfg.epsilon = keys.num("epsilon", cfg.epsilon);
      cfg.lambda1 = keys.num("lambda1", cfg.lambda1);
      cfg.lambda2 = keys.num("lambda2", cfg.lambda2);
      if (!(cfg.epsilon > 0.0)) keys.fail("epsilon", "must be positive");
      if (cfg.lambda1 < 0.0) keys.fail("lambda1", "must be >= 0");
      if (cfg.lambda2 < 0.0) keys.fail("lambda2", "must be >= 0");
      if (cfg.fwhm_mm < 0.0) keys.fail("fwhm_mm", "must be >= 0");
      if (cfg.mu_per_cm < 0.0) keys.fail("mu_per_cm", "must be >= 0");
    } else if (sec.type == "reference") {
      cfg.reference_iterations = static_cast<int>(keys.integer("iterations", 0));
      if (cfg.reference_iterations < 0) keys.fail("iterations", "must be >= 0");
    } else if (sec.type == "algorithm") {
      AlgorithmConfig alg = parse_algorithm(sec, path);
      for (const AlgorithmConfig& other : cfg.algorithms)
        if (other.name == alg.name)
          throw ConfigError(path + ":" + std::to_string(sec.line) +
                            ": duplicate algorithm name '" + alg.name + "'");
      cfg.algorithms.push_back(std::move(alg));
      continue;  // parse_algorithm ran its own finish()
    } else {
      throw ConfigError(path + ":" + std::to_string(sec.line) + ": unknown section [" +
                        sec.type + "]");
    }
    keys.finish();
  }

  if (geometry_preset == "desk") {
    cfg.geometry = geometry_size > 0 ? ScanGeometry::scaled_to(static_cast<int>(geometry_size))
                                     : ScanGeometry::desk_scale();
  } else if (geometry_preset == "full") {
    if (geometry_size > 0)
      throw ConfigError(path + ": [geometry] size applies to the desk preset only");
    cfg.geometry = ScanGeometry::full_scale();
  } else {
    throw ConfigError(path + ": [geometry] preset must be desk or full, got '" +
                      geometry_preset + "'");
  }
  try {
    cfg.geometry.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": [geometry] " + e.what());
  }

  if (!have_counts) throw ConfigError(path + ": [noise] total_counts is required");
  try {
    cfg.noise.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": [noise] " + e.what());
  }

  if (cfg.algorithms.empty())
    throw ConfigError(path + ": at least one [algorithm NAME] section is required");
  return cfg;
}

}  // namespace petrec::cli
