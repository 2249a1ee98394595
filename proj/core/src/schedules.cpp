#include "petrec/schedules.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <vector>

namespace petrec {

double gn_t(const GNSchedule& s, long k) {
  if (k < 0) throw std::invalid_argument("gn_t: k must be nonnegative");
  return s.a * std::pow(static_cast<double>(k), s.omega) + s.b;
}

Momentum gn_momentum(const GNSchedule& s, long k) {
  if (k < 1) throw std::invalid_argument("gn_momentum: k must be positive");
  Momentum m;
  m.t_prev = gn_t(s, k - 1);
  m.t_curr = gn_t(s, k);
  if (m.t_curr == 0.0) throw std::invalid_argument("gn_momentum: t_k vanished");
  m.theta = (m.t_prev - 1.0) / m.t_curr;
  return m;
}

void validate_gn_for_solver(const GNSchedule& s) {
  if (!(s.a > 0.0)) throw std::invalid_argument("momentum schedule: a must be positive");
  if (!(s.b > 0.0)) throw std::invalid_argument("momentum schedule: b must be positive");
  if (!(s.omega > 0.0) || !(s.omega <= 1.0))
    throw std::invalid_argument("momentum schedule: omega must lie in (0, 1]");
  if (s.omega == 1.0 && !(s.a < 0.5))
    throw std::invalid_argument(
        "momentum schedule: omega = 1 requires a < 1/2, otherwise the "
        "extrapolation grows too fast for the convergence guarantee");
}

ThetaSequence ThetaSequence::none() { return ThetaSequence(Kind::none); }

ThetaSequence ThetaSequence::generalized(const GNSchedule& s) {
  ThetaSequence seq(Kind::generalized);
  seq.gn_ = s;
  seq.tp_ = gn_t(s, 0);
  seq.tc_ = gn_t(s, 0);
  return seq;
}

ThetaSequence ThetaSequence::nesterov() { return ThetaSequence(Kind::nesterov); }

double ThetaSequence::next() {
  ++k_;
  switch (kind_) {
    case Kind::none:
      tp_ = 1.0;
      tc_ = 1.0;
      return 0.0;
    case Kind::generalized: {
      Momentum m = gn_momentum(gn_, k_);
      tp_ = m.t_prev;
      tc_ = m.t_curr;
      return m.theta;
    }
    case Kind::nesterov: {
      tp_ = tc_;
      tc_ = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tp_ * tp_));
      return (tp_ - 1.0) / tc_;
    }
  }
  return 0.0;
}

namespace {

// Shared audit over sampled values t[0..k_max]. item (iv) is decided by the
// caller from the closed form of the sequence and passed through.
MomentumConditionReport check_samples(const std::vector<double>& t, bool item_iv) {
  const long k_max = static_cast<long>(t.size()) - 1;
  if (k_max < 10)
    throw std::invalid_argument("momentum_condition_check: need a horizon of at least 10");

  MomentumConditionReport rep;
  rep.horizon = k_max;
  rep.item_iv = item_iv;

  rep.item_i = true;
  for (long k = 1; k <= k_max; ++k) {
    if (t[static_cast<size_t>(k)] == 0.0) {
      rep.item_i = false;
      break;
    }
  }

  auto gap = [&](long k) {
    const double tp = t[static_cast<size_t>(k - 1)];
    const double tc = t[static_cast<size_t>(k)];
    return tp * tp - tc * (tc - 1.0);
  };
  // Strictly positive means clear of roundoff: sequences satisfying the gap
  // identity with equality (the classic recurrence) must not sneak through
  // on the sign of a few ulps.
  auto gap_positive = [&](long k) {
    const double tp = t[static_cast<size_t>(k - 1)];
    return gap(k) > 1e-12 * tp * tp;
  };

  // Largest suffix on which the strict gap inequality is even satisfiable.
  long first_ok_ii = k_max + 1;
  for (long k = k_max; k >= 1; --k) {
    if (t[static_cast<size_t>(k - 1)] >= 1.0 && gap_positive(k))
      first_ok_ii = k;
    else
      break;
  }
  const long tail_ii = k_max - first_ok_ii + 1;
  if (tail_ii >= 10) {
    rep.gap_positive_tail = true;
    rep.K1 = first_ok_ii - 1;
    double rho_max = 0.0;
    for (long k = first_ok_ii; k <= k_max; ++k)
      rho_max = std::max(rho_max, t[static_cast<size_t>(k - 1)] / gap(k));
    // Any finite horizon admits a witness; a ratio still growing at the end
    // of the horizon means the bound would not survive k -> infinity. The
    // mid/end comparison separates convergent ratios from polynomial growth.
    const long mid = (first_ok_ii + k_max) / 2;
    const double r_mid = t[static_cast<size_t>(mid - 1)] / gap(mid);
    const double r_end = t[static_cast<size_t>(k_max - 1)] / gap(k_max);
    rep.item_ii = r_end <= 1.25 * r_mid;
    if (rep.item_ii) rep.rho = rho_max * (1.0 + 1e-9);
  }

  long first_ok_iii = k_max + 1;
  for (long k = k_max; k >= 1; --k) {
    if (t[static_cast<size_t>(k)] > 0.0 && t[static_cast<size_t>(k - 1)] > 0.0)
      first_ok_iii = k;
    else
      break;
  }
  if (k_max - first_ok_iii + 1 >= 10) {
    rep.K2 = first_ok_iii - 1;
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (long k = first_ok_iii; k <= k_max; ++k) {
      const double r = t[static_cast<size_t>(k - 1)] / t[static_cast<size_t>(k)];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    rep.item_iii = lo > 0.0 && std::isfinite(hi);
    if (rep.item_iii) {
      rep.c1 = lo;
      rep.c2 = hi;
    }
  }

  return rep;
}

}  // namespace

MomentumConditionReport momentum_condition_check(const GNSchedule& s, long k_max) {
  std::vector<double> t(static_cast<size_t>(std::max(k_max, 0L)) + 1);
  for (long k = 0; k <= k_max; ++k) t[static_cast<size_t>(k)] = gn_t(s, k);
  // With t_k = a*k^omega + b the sum of 1/t_k diverges exactly when
  // omega <= 1, and t_k -> infinity exactly when a > 0 with omega > 0.
  const bool iv = s.a > 0.0 && s.omega > 0.0 && s.omega <= 1.0;
  return check_samples(t, iv);
}

MomentumConditionReport momentum_condition_check(const NesterovSchedule&, long k_max) {
  std::vector<double> t(static_cast<size_t>(std::max(k_max, 0L)) + 1);
  t[0] = 1.0;
  for (long k = 1; k <= k_max; ++k) {
    const double tp = t[static_cast<size_t>(k - 1)];
    t[static_cast<size_t>(k)] = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tp * tp));
  }
  // The recurrence gives t_k >= (k + 2)/2, so t_k -> infinity while the
  // reciprocal sum behaves like the harmonic series.
  return check_samples(t, true);
}

std::string MomentumConditionReport::summary() const {
  char buf[512];
  std::string out;
  std::snprintf(buf, sizeof(buf), "momentum condition over k <= %ld: %s\n", horizon,
                holds() ? "holds" : "fails");
  out += buf;
  std::snprintf(buf, sizeof(buf), "  (i)   t_k nonzero: %s\n", item_i ? "yes" : "no");
  out += buf;
  if (item_ii)
    std::snprintf(buf, sizeof(buf),
                  "  (ii)  gap bound holds for k > %ld with rho = %.6g\n", K1, rho);
  else
    std::snprintf(buf, sizeof(buf),
                  "  (ii)  gap bound fails (positive tail: %s)\n",
                  gap_positive_tail ? "yes, but ratio grows" : "no");
  out += buf;
  if (item_iii)
    std::snprintf(buf, sizeof(buf),
                  "  (iii) ratio bound holds for k > %ld with c1 = %.6g, c2 = %.6g\n",
                  K2, c1, c2);
  else
    std::snprintf(buf, sizeof(buf), "  (iii) ratio bound fails\n");
  out += buf;
  std::snprintf(buf, sizeof(buf), "  (iv)  divergence: %s\n", item_iv ? "yes" : "no");
  out += buf;
  return out;
}

}  // namespace petrec
