#pragma once

#include <string>

namespace petrec {

// Power-law momentum sequence t_k = a*k^omega + b driving the extrapolation
// weights theta_k = (t_{k-1} - 1)/t_k.
struct GNSchedule {
  double a = 0.125;
  double b = 1.0;
  double omega = 1.0;
};

double gn_t(const GNSchedule& s, long k);

struct Momentum {
  double t_prev = 1.0;
  double t_curr = 1.0;
  double theta = 0.0;
};

// t_k, t_{k-1} and theta_k for k >= 1. Throws if t_k vanishes.
Momentum gn_momentum(const GNSchedule& s, long k);

// Solver-grade parameter domain: a > 0, b > 0, omega in (0,1], and a < 1/2
// when omega = 1. Throws std::invalid_argument naming the violated bound.
void validate_gn_for_solver(const GNSchedule& s);

// Classic momentum recurrence t_k = (1 + sqrt(1 + 4 t_{k-1}^2))/2, t_0 = 1.
struct NesterovSchedule {};

// Stateful theta source shared by the solver loops. next() advances the
// iteration index k = 1, 2, ... and returns theta_k; t_prev/t_curr expose
// t_{k-1} and t_k for the diagnostics of the same iteration.
class ThetaSequence {
 public:
  static ThetaSequence none();
  static ThetaSequence generalized(const GNSchedule& s);
  static ThetaSequence nesterov();

  double next();
  double t_prev() const { return tp_; }
  double t_curr() const { return tc_; }

 private:
  enum class Kind { none, generalized, nesterov };
  explicit ThetaSequence(Kind kind) : kind_(kind) {}

  Kind kind_;
  GNSchedule gn_{};
  long k_ = 0;
  double tp_ = 1.0;
  double tc_ = 1.0;
};

// Numeric audit of the four momentum hypotheses over a finite horizon:
//   (i)   t_k never vanishes,
//   (ii)  1 <= t_{k-1} < rho * [t_{k-1}^2 - t_k(t_k - 1)] on a tail,
//   (iii) c1 * t_k <= t_{k-1} <= c2 * t_k on a tail,
//   (iv)  t_k -> infinity with divergent sum of 1/t_k.
// Witnesses are discovered, not prescribed: K1/K2 are the first indices
// after which the tail inequalities hold and rho/c1/c2 are the extremal
// ratios over those tails. Item (iv) is decided from the closed form of the
// sequence rather than sampled.
struct MomentumConditionReport {
  long horizon = 0;
  bool item_i = false;
  bool item_ii = false;
  bool item_iii = false;
  bool item_iv = false;
  bool gap_positive_tail = false;  // t_{k-1}^2 - t_k(t_k-1) > 0 on the tail
  double rho = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  long K1 = -1;
  long K2 = -1;

  bool holds() const { return item_i && item_ii && item_iii && item_iv; }
  std::string summary() const;
};

MomentumConditionReport momentum_condition_check(const GNSchedule& s, long k_max);
MomentumConditionReport momentum_condition_check(const NesterovSchedule& s, long k_max);

}  // namespace petrec
