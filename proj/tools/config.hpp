#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "petrec/projector.hpp"
#include "petrec/simulator.hpp"
#include "petrec/solvers.hpp"

namespace petrec::cli {

// Anything wrong with the experiment description itself. The launcher maps
// this to exit code 2, as opposed to numeric failures during a run.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class SolverKind { ppga, appga, fppa, afppa };

const char* solver_name(SolverKind kind);

struct AlgorithmConfig {
  std::string name;
  SolverKind solver = SolverKind::ppga;
  int iterations = 100;
  double beta = 1.0;
  int freeze_after = 50;
  bool safety = false;
  MomentumKind momentum = MomentumKind::none;
  GNSchedule schedule;            // used when momentum == generalized
  double rho1 = 0.0, rho2 = 0.0;  // <= 0 selects the built-in defaults
  bool diagnostics = false;       // keep iterates and write convergence checks
};

struct ExperimentConfig {
  std::string output_dir = "out";
  std::vector<long> checkpoints = {25, 50, 100};

  ScanGeometry geometry = ScanGeometry::desk_scale();
  PhantomSpec phantom = PhantomSpec::desk_spheres();
  NoiseProtocol noise;

  double fwhm_mm = 6.59;
  double mu_per_cm = 0.096;
  double epsilon = 1e-3;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  int reference_iterations = 0;  // 0 disables the reference run

  std::vector<AlgorithmConfig> algorithms;

  std::string source_text;  // verbatim file contents, written back as a snapshot
};

// Parses and validates an INI-style experiment file. Comments start at the
// first '#' or ';' on a line; sections are [experiment], [geometry],
// [phantom], [noise], [model], [reference] and one [algorithm NAME] per run.
// Unknown sections or keys are errors. Throws ConfigError.
ExperimentConfig parse_experiment_config(const std::string& path);

}  // namespace petrec::cli
