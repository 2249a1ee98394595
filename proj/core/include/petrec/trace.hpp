#pragma once

#include <string>
#include <utility>
#include <vector>

#include "petrec/types.hpp"

namespace petrec {

// One row per iterate. Row 0 describes the initial image, row i >= 1 the
// result of solver step i. eta/eps are NaN unless a reference solution was
// supplied; tau needs only consecutive iterates and is 0 on row 0; re is NaN
// on row 0 where no previous iterate exists.
struct TraceRow {
  long k = 0;
  double phi = 0.0;
  double eta = 0.0;
  double tau = 0.0;
  double eps = 0.0;
  double re = 0.0;
  double wall_ms = 0.0;
};

struct SolverTrace {
  std::vector<TraceRow> rows;
  Image final_image;
  std::vector<std::pair<long, Image>> snapshots;  // requested checkpoint images
  std::vector<Image> iterates;                    // full history when requested
  bool aborted = false;
  std::string abort_reason;
  Vec precond_final;     // diagonal in effect at the last step
  double p_max_final = 0.0;
  Vec dual_b, dual_c;    // final dual state of the primal-dual solvers
};

// Writes k,phi,eta,tau,eps,re[,wall_ms] with a header row, each value at 17
// significant digits. Timing is opt-out so runs can be compared bytewise.
void write_trace_csv(const SolverTrace& trace, const std::string& path,
                     bool include_wall_ms = true);

// Companion file holding only k,wall_ms for when the main CSV omits timing.
void write_wall_csv(const SolverTrace& trace, const std::string& path);

std::vector<TraceRow> read_trace_csv(const std::string& path);

}  // namespace petrec
