#include "experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "petrec/io.hpp"
#include "petrec/metrics.hpp"
#include "petrec/objective.hpp"
#include "petrec/simulator.hpp"
#include "petrec/solvers.hpp"
#include "petrec/trace.hpp"

namespace fs = std::filesystem;

namespace petrec::cli {

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  return out;
}

double nofv_or_nan(double phi, double phi_0, double phi_ref) {
  const double denom = phi_0 - phi_ref;
  if (!std::isfinite(denom) || !(denom > 0.0)) return std::nan("");
  return (phi - phi_ref) / denom;
}

bool is_primal_dual(SolverKind kind) {
  return kind == SolverKind::fppa || kind == SolverKind::afppa;
}

SolverTrace dispatch(const AlgorithmConfig& alg, const ReconProblem& prob, const Image& init,
                     const SolverOptions& opts) {
  switch (alg.solver) {
    case SolverKind::ppga: return run_ppga(prob, init, opts);
    case SolverKind::appga: return run_appga(prob, init, opts);
    case SolverKind::fppa: return run_fppa(prob, init, alg.rho1, alg.rho2, opts);
    case SolverKind::afppa: return run_afppa(prob, init, alg.rho1, alg.rho2, opts);
  }
  throw std::logic_error("dispatch: unhandled solver kind");
}

// One line per trace row; psnr is only available where a checkpoint image
// exists and stays nan elsewhere.
void write_metrics_csv(const fs::path& path, const SolverTrace& trace, const Image& truth,
                       bool have_ref, double phi_ref) {
  std::map<long, const Image*> images;
  for (const auto& snap : trace.snapshots) images[snap.first] = &snap.second;
  if (!trace.rows.empty()) images[trace.rows.back().k] = &trace.final_image;

  std::ofstream out = open_out(path);
  out << "k,nofv,psnr,re\n";
  const double phi_0 = trace.rows.empty() ? std::nan("") : trace.rows.front().phi;
  for (const TraceRow& row : trace.rows) {
    const double nofv = have_ref ? nofv_or_nan(row.phi, phi_0, phi_ref) : std::nan("");
    double snr = std::nan("");
    const auto it = images.find(row.k);
    if (it != images.end()) snr = psnr(*it->second, truth);
    out << row.k << ',' << format_g17(nofv) << ',' << format_g17(snr) << ','
        << format_g17(row.re) << '\n';
  }
}

void write_clp_csv(const fs::path& path, const Image& truth, const Image& final_image) {
  const int row = clp_default_row(truth.n);
  const Vec t = clp(truth, row);
  const Vec f = clp(final_image, row);
  std::ofstream out = open_out(path);
  out << "col,truth,final\n";
  for (int c = 0; c < truth.n; ++c)
    out << c << ',' << format_g17(t[c]) << ',' << format_g17(f[c]) << '\n';
}

void write_checkpoint_images(const fs::path& dir, const SolverTrace& trace) {
  for (const auto& snap : trace.snapshots) {
    char stem[32];
    std::snprintf(stem, sizeof(stem), "checkpoint_%04ld", snap.first);
    write_image_raw((dir / (std::string(stem) + ".raw")).string(), snap.second);
    write_pgm((dir / (std::string(stem) + ".pgm")).string(), snap.second);
  }
  write_image_raw((dir / "final.raw").string(), trace.final_image);
  write_pgm((dir / "final.pgm").string(), trace.final_image);
}

struct ComparisonRow {
  std::string name;
  std::string solver;
  long iterations = 0;
  double final_phi = 0.0;
  double final_nofv = 0.0;
  double final_psnr = 0.0;
  double final_re = 0.0;
  double total_wall_ms = 0.0;
  bool aborted = false;
};

void write_comparison_csv(const fs::path& path, const std::vector<ComparisonRow>& rows) {
  std::ofstream out = open_out(path);
  out << "name,solver,iterations,final_phi,final_nofv,final_psnr,final_re,total_wall_ms,aborted\n";
  for (const ComparisonRow& r : rows)
    out << r.name << ',' << r.solver << ',' << r.iterations << ',' << format_g17(r.final_phi)
        << ',' << format_g17(r.final_nofv) << ',' << format_g17(r.final_psnr) << ','
        << format_g17(r.final_re) << ',' << format_g17(r.total_wall_ms) << ','
        << (r.aborted ? "yes" : "no") << '\n';
}

void write_diagnostics(const fs::path& path, const ExperimentConfig& cfg,
                       const AlgorithmConfig& alg, const SolverTrace& trace,
                       const ReconProblem& prob, const Image& phantom,
                       const ReferenceSolution* reference) {
  std::ofstream out = open_out(path);
  out << "algorithm " << alg.name << " (" << solver_name(alg.solver) << ")\n";
  out << "iterations requested = " << alg.iterations
      << ", completed = " << (trace.rows.empty() ? 0 : trace.rows.back().k) << "\n";
  out << "status = " << (trace.aborted ? "aborted: " + trace.abort_reason : "ok") << "\n";
  if (!trace.rows.empty()) {
    out << "final phi = " << format_g17(trace.rows.back().phi) << "\n";
    out << "final re = " << format_g17(trace.rows.back().re) << "\n";
  }
  out << "preconditioner p_max = " << format_g17(trace.p_max_final) << "\n";

  const long horizon = std::max<long>(2000, alg.iterations);
  if (alg.momentum == MomentumKind::generalized)
    out << "momentum condition: " << momentum_condition_check(alg.schedule, horizon).summary()
        << "\n";
  else if (alg.momentum == MomentumKind::nesterov)
    out << "momentum condition: "
        << momentum_condition_check(NesterovSchedule{}, horizon).summary() << "\n";

  if (cfg.phantom.variant == PhantomSpec::Variant::uniform_spheres && !trace.aborted) {
    for (std::size_t j = 0; j < cfg.phantom.radii_px.size(); ++j) {
      try {
        const RoiSpec roi = roi_for_sphere(cfg.phantom, phantom.n, j);
        out << "nrc r=" << fmt6(cfg.phantom.radii_px[j]) << "px = "
            << fmt6(nrc(trace.final_image, phantom, roi)) << "\n";
      } catch (const std::exception& e) {
        out << "nrc r=" << fmt6(cfg.phantom.radii_px[j]) << "px skipped: " << e.what() << "\n";
      }
    }
  }

  if (alg.diagnostics && !is_primal_dual(alg.solver)) {
    if (!reference) {
      out << "descent certificate skipped: no reference run configured\n";
    } else if (alg.momentum == MomentumKind::nesterov) {
      out << "descent certificate skipped: only closed-form t schedules are audited\n";
    } else if (trace.aborted || trace.iterates.size() < 2) {
      out << "descent certificate skipped: run did not produce a usable history\n";
    } else {
      const GNSchedule sched = alg.momentum == MomentumKind::generalized
                                   ? alg.schedule
                                   : GNSchedule{0.0, 1.0, 1.0};  // t stuck at 1
      const LyapunovReport rep =
          lyapunov_diagnostics(trace.iterates, prob, sched, trace.precond_final, *reference);
      out << "descent certificate: " << rep.summary() << "\n";
    }
  } else if (alg.diagnostics) {
    out << "descent certificate skipped: not defined for the primal-dual scheme\n";
  }
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, std::ostream& log) {
  const fs::path out_dir(cfg.output_dir);
  const fs::path runs_dir = out_dir / "runs";
  fs::create_directories(runs_dir);
  open_out(out_dir / "config.ini") << cfg.source_text;

  // Data generation. Geometry and spec were validated at parse time, but the
  // phantom layout can still be inconsistent with the grid; that is a
  // description problem, not a numeric one.
  Image phantom;
  AcquisitionResult acq;
  try {
    phantom = make_phantom(cfg.phantom, cfg.geometry.image_side);
    acq = simulate_acquisition(phantom, cfg.geometry, cfg.noise, cfg.fwhm_mm, cfg.mu_per_cm);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  log << "simulated " << cfg.geometry.image_side << "x" << cfg.geometry.image_side << " scan: "
      << fmt6(acq.g.sum()) << " counts recorded (trues mean " << fmt6(acq.Tc) << ")\n";

  write_image_raw((out_dir / "phantom.raw").string(), phantom);
  write_pgm((out_dir / "phantom.pgm").string(), phantom);
  write_image_raw((out_dir / "truth.raw").string(), acq.truth);
  write_pgm((out_dir / "truth.pgm").string(), acq.truth);
  write_sinogram_csv((out_dir / "sinogram.csv").string(), acq.g, cfg.geometry);
  write_sinogram_csv((out_dir / "background.csv").string(), acq.gamma, cfg.geometry);

  const ReconProblem prob{PoissonData(*acq.system, acq.g, acq.gamma),
                          RegWeights{cfg.lambda1, cfg.lambda2}, SmoothingParams{cfg.epsilon}};
  const Image init = initial_image(acq.g, acq.gamma, acq.attenuation, cfg.geometry);

  // Long certified run used as the surrogate minimizer for nofv and the
  // convergence diagnostics of every algorithm: accelerated capped descent
  // followed by plain fixed-point polish under the frozen diagonal.
  ReferenceSolution ref_smoothed, ref_nonsmooth;
  bool have_ref = false;
  if (cfg.reference_iterations > 0) {
    const int polish = cfg.reference_iterations / 2;
    log << "reference: appga (safety on), " << cfg.reference_iterations << " iterations plus "
        << polish << " polish steps\n";
    SolverOptions ref_opts;
    ref_opts.iterations = cfg.reference_iterations;
    ref_opts.safety_rescale = true;
    ref_opts.momentum = MomentumSpec{MomentumKind::generalized, GNSchedule{0.125, 1.0, 1.0}};
    const SolverTrace ref_trace = run_appga(prob, init, ref_opts);
    if (ref_trace.aborted) {
      log << "reference run aborted: " << ref_trace.abort_reason << "\n";
      return 3;
    }
    Image ref_image = ref_trace.final_image;
    for (int i = 0; i < polish; ++i) ref_image = t_operator(ref_image, ref_trace.precond_final, prob);
    ref_smoothed = {ref_image,
                    objective_value(ref_image, prob.data, prob.weights, prob.smoothing)};
    ref_nonsmooth = {ref_image,
                     objective_value_nonsmooth(ref_image, prob.data, prob.weights)};
    have_ref = true;
    write_image_raw((out_dir / "reference.raw").string(), ref_image);
    std::ofstream ref_txt = open_out(out_dir / "reference.txt");
    ref_txt << "iterations = " << cfg.reference_iterations << "\n"
            << "polish_steps = " << polish << "\n"
            << "phi_smoothed = " << format_g17(ref_smoothed.phi) << "\n"
            << "phi_nonsmooth = " << format_g17(ref_nonsmooth.phi) << "\n";
    log << "reference phi = " << fmt6(ref_smoothed.phi) << "\n";
  }

  std::vector<ComparisonRow> table;
  bool any_aborted = false;

  for (const AlgorithmConfig& alg : cfg.algorithms) {
    const fs::path dir = runs_dir / alg.name;
    fs::create_directories(dir);

    SolverOptions opts;
    opts.iterations = alg.iterations;
    opts.beta = alg.beta;
    opts.freeze_after = alg.freeze_after;
    opts.safety_rescale = alg.safety;
    opts.momentum = MomentumSpec{alg.momentum, alg.schedule};
    opts.snapshot_at = cfg.checkpoints;
    opts.keep_iterates = alg.diagnostics;
    const ReferenceSolution* ref =
        have_ref ? (is_primal_dual(alg.solver) ? &ref_nonsmooth : &ref_smoothed) : nullptr;
    opts.reference = ref;

    const auto started = std::chrono::steady_clock::now();
    const SolverTrace trace = dispatch(alg, prob, init, opts);
    const double elapsed_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();

    write_trace_csv(trace, (dir / "trace.csv").string(), false);
    write_wall_csv(trace, (dir / "wall_ms.csv").string());
    write_metrics_csv(dir / "metrics.csv", trace, acq.truth, have_ref,
                      is_primal_dual(alg.solver) ? ref_nonsmooth.phi : ref_smoothed.phi);
    write_clp_csv(dir / "clp.csv", acq.truth, trace.final_image);
    write_checkpoint_images(dir, trace);
    write_diagnostics(dir / "diagnostics.txt", cfg, alg, trace, prob, phantom, ref);

    ComparisonRow row;
    row.name = alg.name;
    row.solver = solver_name(alg.solver);
    row.iterations = trace.rows.empty() ? 0 : trace.rows.back().k;
    row.final_phi = trace.rows.empty() ? std::nan("") : trace.rows.back().phi;
    row.final_nofv =
        have_ref && !trace.rows.empty()
            ? nofv_or_nan(row.final_phi, trace.rows.front().phi,
                          is_primal_dual(alg.solver) ? ref_nonsmooth.phi : ref_smoothed.phi)
            : std::nan("");
    row.final_psnr = psnr(trace.final_image, acq.truth);
    row.final_re = trace.rows.size() > 1 ? trace.rows.back().re : std::nan("");
    // rows carry time since the solver started, so the last row is the total
    row.total_wall_ms = trace.rows.empty() ? 0.0 : trace.rows.back().wall_ms;
    row.aborted = trace.aborted;
    table.push_back(row);

    log << "algorithm " << alg.name << " (" << row.solver << "): " << row.iterations
        << " iterations in " << fmt6(elapsed_s) << " s, final phi = " << fmt6(row.final_phi)
        << (trace.aborted ? ", ABORTED: " + trace.abort_reason : "") << "\n";
    if (ref && std::isfinite(row.final_phi) && row.final_phi < ref->phi)
      log << "warning: " << alg.name << " descended below the reference objective;"
          << " raise the reference budget for meaningful normalized values\n";
    if (trace.aborted) any_aborted = true;
  }

  write_comparison_csv(out_dir / "comparison.csv", table);
  compare_report(cfg.output_dir, log);
  return any_aborted ? 3 : 0;
}

int compare_report(const std::string& out_dir, std::ostream& os) {
  const fs::path path = fs::path(out_dir) / "comparison.csv";
  std::ifstream in(path);
  if (!in) {
    os << "no comparison table at " << path.string() << "\n";
    return 2;
  }
  // Read all cells, then print with per-column widths.
  std::vector<std::vector<std::string>> cells;
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> row;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) row.push_back(cell);
    if (!row.empty()) cells.push_back(std::move(row));
  }
  if (cells.empty()) {
    os << "comparison table at " << path.string() << " is empty\n";
    return 2;
  }
  std::vector<std::size_t> width;
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c >= width.size()) width.push_back(0);
      width[c] = std::max(width[c], row[c].size());
    }
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      os << row[c];
      if (c + 1 < row.size()) os << std::string(width[c] - row[c].size() + 2, ' ');
    }
    os << "\n";
  }
  return 0;
}

}  // namespace petrec::cli
