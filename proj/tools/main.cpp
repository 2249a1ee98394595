#include <CLI11.hpp>
#include <iostream>
#include <string>

#include "config.hpp"
#include "experiment.hpp"
#include "petrec/schedules.hpp"

using namespace petrec;
using namespace petrec::cli;

int main(int argc, char** argv) {
  CLI::App app{"Matrix-free PET reconstruction experiments"};
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  CLI::App* run = app.add_subcommand("run", "Simulate a scan and run every configured algorithm");
  run->add_option("config", config_path, "experiment description file")->required();
  run->add_option("-o,--output-dir", output_dir, "override the configured output directory");

  std::string report_dir;
  CLI::App* report = app.add_subcommand("report", "Print the comparison table of a finished run");
  report->add_option("dir", report_dir, "experiment output directory")->required();

  double a = 0.125, b = 1.0, omega = 1.0;
  long horizon = 2000;
  bool nesterov = false;
  CLI::App* sched = app.add_subcommand(
      "check-schedule", "Audit a momentum schedule against the convergence conditions");
  sched->add_option("--a", a, "growth coefficient of t_k = a k^omega + b");
  sched->add_option("--b", b, "offset of the schedule");
  sched->add_option("--omega", omega, "growth exponent in (0, 1]");
  sched->add_option("--horizon", horizon, "number of k values to audit");
  sched->add_flag("--nesterov", nesterov, "audit the classic recurrence instead");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      ExperimentConfig cfg = parse_experiment_config(config_path);
      if (!output_dir.empty()) cfg.output_dir = output_dir;
      return run_experiment(cfg, std::cout);
    }
    if (report->parsed()) return compare_report(report_dir, std::cout);
    if (sched->parsed()) {
      MomentumConditionReport rep;
      if (nesterov) {
        rep = momentum_condition_check(NesterovSchedule{}, horizon);
      } else {
        const GNSchedule schedule{a, b, omega};
        validate_gn_for_solver(schedule);
        rep = momentum_condition_check(schedule, horizon);
      }
      std::cout << rep.summary() << "\n";
      std::cout << (rep.holds() ? "schedule accepted" : "schedule rejected") << "\n";
      return rep.holds() ? 0 : 2;
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
