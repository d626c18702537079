#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>

#include <Eigen/Core>

#include "darkstates/errors.hpp"

namespace darkstates {

/// Adaptive Dormand-Prince 5(4) integrator for y' = f(y) on dense Eigen
/// states.  The error of a step is measured as ||err||_F / (tol * max(1, ||y||_F))
/// and must stay below one.  The fifth-order solution is propagated.
template <typename State>
class DormandPrince {
 public:
  struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t evaluations = 0;
  };

  explicit DormandPrince(double tol, double min_step = 1e-14) : tol_(tol), min_step_(min_step) {}

  /// Advances `y` from `t` to exactly `t_end`.  `f(y, dydt)` fills the derivative.
  template <typename Rhs>
  void integrate(Rhs&& f, State& y, double& t, double t_end) {
    if (t_end <= t) return;
    if (!have_derivative_) {
      k1_.resizeLike(y);
      f(y, k1_);
      ++stats_.evaluations;
      have_derivative_ = true;
    }
    if (h_ <= 0.0) h_ = initial_step(y, t_end - t);

    while (t < t_end) {
      const double remaining = t_end - t;
      bool last = false;
      double h = h_;
      if (h >= remaining * (1.0 - 1e-12)) {
        h = remaining;
        last = true;
      }
      const double err = attempt(f, y, h);
      if (err <= 1.0) {
        y.swap(y_new_);
        k1_.swap(k7_);  // first-same-as-last
        t = last ? t_end : t + h;
        ++stats_.accepted;
        const double grow = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
        // A step shortened to hit t_end says nothing about the natural size.
        if (!last || h >= h_) h_ = h * grow;
      } else {
        ++stats_.rejected;
        h_ = h * std::clamp(0.9 * std::pow(err, -0.25), 0.1, 0.9);
        if (h_ < min_step_)
          throw NumericalFailure("step size underflow at t=" + std::to_string(t) + " (error ratio " +
                                 std::to_string(err) + ")");
      }
    }
  }

  const Stats& stats() const { return stats_; }

 private:
  double initial_step(const State& y, double span) const {
    const double d0 = y.norm();
    const double d1 = k1_.norm();
    double h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::min(h, span);
    return std::max(h, min_step_);
  }

  template <typename Rhs>
  double attempt(Rhs& f, const State& y, double h) {
    // Butcher tableau of Dormand & Prince (1980).
    constexpr double a21 = 1.0 / 5.0;
    constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
    constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
    constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                     a54 = -212.0 / 729.0;
    constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0, a64 = 49.0 / 176.0,
                     a65 = -5103.0 / 18656.0;
    constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0, b5 = -2187.0 / 6784.0,
                     b6 = 11.0 / 84.0;
    constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0, e5 = -17253.0 / 339200.0,
                     e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

    tmp_ = y + h * a21 * k1_;
    f(tmp_, k2_);
    tmp_ = y + h * (a31 * k1_ + a32 * k2_);
    f(tmp_, k3_);
    tmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
    f(tmp_, k4_);
    tmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
    f(tmp_, k5_);
    tmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
    f(tmp_, k6_);
    y_new_ = y + h * (b1 * k1_ + b3 * k3_ + b4 * k4_ + b5 * k5_ + b6 * k6_);
    f(y_new_, k7_);
    stats_.evaluations += 6;

    tmp_ = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
    const double scale = tol_ * std::max({1.0, y.norm(), y_new_.norm()});
    const double err = tmp_.norm() / scale;
    return std::isfinite(err) ? err : std::numeric_limits<double>::infinity();
  }

  double tol_;
  double min_step_;
  double h_ = 0.0;
  bool have_derivative_ = false;
  Stats stats_;
  State k1_, k2_, k3_, k4_, k5_, k6_, k7_, tmp_, y_new_;
};

}  // namespace darkstates
