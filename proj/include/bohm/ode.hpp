#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>

#include <Eigen/Core>

#include "bohm/errors.hpp"

namespace bohm {

struct StepControl {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double max_step = 1e-2;  // absolute
  double min_step = 1e-12; // floor for node-driven halving
  std::size_t max_steps = 10'000'000;
};

struct IntegratorStats {
  std::size_t steps = 0;
  std::size_t rejections = 0;
  std::size_t node_events = 0;
  std::size_t rhs_evals = 0;

  friend bool operator==(const IntegratorStats&, const IntegratorStats&) = default;
};

struct OdeOutcome {
  IntegratorStats stats;
  bool truncated = false;  // stopped early at a node
  double t_reached = 0.0;
};

/// Dormand–Prince 5(4) with PI step-size control and the 4th-order continuous
/// extension for dense output.
///
///   rhs(t, y, dy)     evaluates the field; may throw NodeError.
///   guard(t, y)       false when a candidate state sits too close to a node.
///   observe(t, y)     called at each requested output time in order.
///
/// Node trouble (a throwing rhs or a failing guard) halves the step; once it
/// falls below `min_step` the run is truncated. Non-finite states abort.
template <typename Rhs, typename Guard, typename Observe>
OdeOutcome integrate_dopri5(Rhs&& rhs, Guard&& guard, Observe&& observe, Eigen::VectorXd y,
                            double t0, double t1, std::span<const double> out_times,
                            const StepControl& ctl) {
  using Eigen::VectorXd;
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
  static constexpr double safety = 0.9, beta = 0.04, expo = 0.2 - beta * 0.75;
  static constexpr double fac_min = 0.2, fac_max = 10.0;

  OdeOutcome out;
  auto& st = out.stats;
  const Eigen::Index n = y.size();
  VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n);
  VectorXd r1(n), r2(n), r3(n), r4(n), r5(n);

  std::size_t next_out = 0;
  while (next_out < out_times.size() && out_times[next_out] <= t0) {
    observe(out_times[next_out], y);
    ++next_out;
  }

  double t = t0;
  auto eval = [&](double tt, const VectorXd& yy, VectorXd& dy) {
    ++st.rhs_evals;
    rhs(tt, yy, dy);
  };

  try {
    eval(t, y, k1);
  } catch (const NodeError&) {
    out.truncated = true;
    out.t_reached = t;
    ++st.node_events;
    return out;
  }

  auto scaled_norm = [&](const VectorXd& e, const VectorXd& ya, const VectorXd& yb) {
    const VectorXd sc = (ctl.abs_tol + ctl.rel_tol * ya.cwiseAbs().cwiseMax(yb.cwiseAbs()).array()).matrix();
    return std::sqrt((e.cwiseQuotient(sc)).squaredNorm() / static_cast<double>(std::max<Eigen::Index>(n, 1)));
  };

  // Initial step from the size of the field (Hairer–Nørsett–Wanner heuristic).
  double h;
  {
    const VectorXd sc = (ctl.abs_tol + ctl.rel_tol * y.cwiseAbs().array()).matrix();
    const double dnf = (k1.cwiseQuotient(sc)).squaredNorm() / static_cast<double>(n);
    const double dny = (y.cwiseQuotient(sc)).squaredNorm() / static_cast<double>(n);
    h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : std::sqrt(dny / dnf) * 0.01;
    h = std::min({h, ctl.max_step, t1 - t0});
  }

  double fac_old = 1e-4;
  bool last_rejected = false;

  while (t < t1) {
    if (st.steps + st.rejections > ctl.max_steps) {
      throw IntegrationAbort("step budget exhausted before reaching t_end");
    }
    if (t + 1.01 * h >= t1) h = t1 - t;
    if (t + h == t) throw IntegrationAbort("step size underflow before reaching t_end");

    bool node_trouble = false;
    try {
      ytmp = y + h * a21 * k1;
      eval(t + c2 * h, ytmp, k2);
      ytmp = y + h * (a31 * k1 + a32 * k2);
      eval(t + c3 * h, ytmp, k3);
      ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
      eval(t + c4 * h, ytmp, k4);
      ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
      eval(t + c5 * h, ytmp, k5);
      ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
      eval(t + h, ytmp, k6);
      ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      if (!guard(t + h, ynew)) {
        node_trouble = true;
      } else {
        eval(t + h, ynew, k7);
      }
    } catch (const NodeError&) {
      node_trouble = true;
    }

    if (node_trouble) {
      ++st.node_events;
      ++st.rejections;
      h *= 0.5;
      if (h < ctl.min_step) {
        out.truncated = true;
        out.t_reached = t;
        return out;
      }
      last_rejected = true;
      continue;
    }

    err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = scaled_norm(err, y, ynew);

    if (!std::isfinite(en)) {
      ++st.rejections;
      h *= 0.1;
      if (h < ctl.min_step) throw IntegrationAbort("non-finite state during integration");
      last_rejected = true;
      continue;
    }

    const double fac11 = std::pow(en, expo);
    if (en <= 1.0) {
      if (!ynew.allFinite()) throw IntegrationAbort("non-finite state during integration");
      double fac = fac11 / std::pow(fac_old, beta);
      fac = std::clamp(fac / safety, 1.0 / fac_max, 1.0 / fac_min);
      double hnew = h / fac;
      fac_old = std::max(en, 1e-4);

      // Dense output coefficients for (t, t + h].
      r1 = y;
      r2 = ynew - y;
      r3 = h * k1 - r2;
      r4 = r2 - h * k7 - r3;
      r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
      const double t_new = (t + h >= t1) ? t1 : t + h;
      while (next_out < out_times.size() && out_times[next_out] <= t_new) {
        const double theta = (out_times[next_out] - t) / h;
        const double theta1 = 1.0 - theta;
        if (out_times[next_out] == t_new) {
          observe(out_times[next_out], ynew);
        } else {
          ytmp = r1 + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5)));
          observe(out_times[next_out], ytmp);
        }
        ++next_out;
      }

      y = ynew;
      k1 = k7;
      t = t_new;
      ++st.steps;
      if (last_rejected) hnew = std::min(hnew, h);
      last_rejected = false;
      h = std::min(hnew, ctl.max_step);
    } else {
      ++st.rejections;
      h /= std::min(1.0 / fac_min, fac11 / safety);
      last_rejected = true;
    }
  }
  out.t_reached = t;
  return out;
}

}  // namespace bohm
