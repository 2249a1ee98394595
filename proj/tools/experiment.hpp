#pragma once

#include <iosfwd>
#include <string>

#include "config.hpp"

namespace petrec::cli {

// Runs the whole pipeline: simulate one scan, compute the optional long
// reference run, then execute every configured algorithm and write its
// artifacts under cfg.output_dir. Progress goes to log. Returns 0 when every
// run finished clean and 3 when any solver aborted on non-finite values.
int run_experiment(const ExperimentConfig& cfg, std::ostream& log);

// Pretty-prints the comparison table of a finished experiment directory.
// Returns 0, or 2 when the directory has no comparison file.
int compare_report(const std::string& out_dir, std::ostream& os);

}  // namespace petrec::cli
