#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "darkbright/common.hpp"

namespace darkbright {

/// The optimizer was asked for something unsatisfiable.
struct fit_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitOptions {
  int max_iterations = 200;
  double ftol = 1e-12;       // relative cost improvement
  double xtol = 1e-10;       // relative step size
  double fd_rel_step = 1e-6;
  double lambda_init = 1e-3;
};

struct FitResult {
  RealVector x;
  double residual_norm = 0.0;  // ||r||_2 at the final iterate
  int iterations = 0;
  bool converged = false;
};

using ResidualFn = std::function<RealVector(const RealVector&)>;

namespace detail {

inline RealVector clamp_box(RealVector x, const RealVector& lb,
                            const RealVector& ub) {
  for (Eigen::Index i = 0; i < x.size(); ++i)
    x(i) = std::min(ub(i), std::max(lb(i), x(i)));
  return x;
}

/// Forward differences with a relative step, flipped near the upper bound so
/// evaluations stay inside the box.
inline RealMatrix fd_jacobian(const ResidualFn& fn, const RealVector& x,
                              const RealVector& r0, const RealVector& lb,
                              const RealVector& ub, double rel_step) {
  const Eigen::Index n = x.size();
  RealMatrix j(r0.size(), n);
  for (Eigen::Index i = 0; i < n; ++i) {
    double h = rel_step * std::max(std::abs(x(i)), 1e-8);
    RealVector xp = x;
    if (x(i) + h > ub(i)) h = -h;
    xp(i) = std::min(ub(i), std::max(lb(i), x(i) + h));
    const double actual = xp(i) - x(i);
    if (actual == 0.0)
      throw fit_error("fd_jacobian: bounds leave no room for a finite-difference step");
    j.col(i) = (fn(xp) - r0) / actual;
  }
  return j;
}

}  // namespace detail

/// Box-bounded Levenberg-Marquardt with numeric Jacobians.  Deterministic:
/// no randomness, no environment dependence; candidate steps are clamped to
/// the box and accepted only when the cost decreases.
inline FitResult levenberg_marquardt(const ResidualFn& fn, RealVector x0,
                                     const RealVector& lb, const RealVector& ub,
                                     const FitOptions& opts = {}) {
  if (x0.size() != lb.size() || x0.size() != ub.size())
    throw fit_error("levenberg_marquardt: bound dimensions do not match x0");
  for (Eigen::Index i = 0; i < x0.size(); ++i)
    if (!(lb(i) < ub(i)))
      throw fit_error("levenberg_marquardt: lower bound must be below upper bound");

  FitResult out;
  out.x = detail::clamp_box(std::move(x0), lb, ub);
  RealVector r = fn(out.x);
  double cost = 0.5 * r.squaredNorm();
  double lambda = opts.lambda_init;

  for (out.iterations = 1; out.iterations <= opts.max_iterations;
       ++out.iterations) {
    const RealMatrix j =
        detail::fd_jacobian(fn, out.x, r, lb, ub, opts.fd_rel_step);
    const RealMatrix jtj = j.transpose() * j;
    const RealVector g = j.transpose() * r;

    if (g.cwiseAbs().maxCoeff() < 1e-14) {
      out.converged = true;
      break;
    }

    bool stepped = false;
    while (lambda < 1e12) {
      RealMatrix a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      const RealVector step = a.ldlt().solve(-g);
      const RealVector xn = detail::clamp_box(out.x + step, lb, ub);
      const RealVector rn = fn(xn);
      const double costn = 0.5 * rn.squaredNorm();
      if (costn < cost) {
        const double dcost = cost - costn;
        const double dx = (xn - out.x).norm();
        out.x = xn;
        r = rn;
        cost = costn;
        lambda = std::max(lambda / 3.0, 1e-12);
        stepped = true;
        if (dcost <= opts.ftol * std::max(cost, 1e-300) ||
            dx <= opts.xtol * (1.0 + out.x.norm()))
          out.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    if (!stepped || out.converged) {
      // Stuck against the damping ceiling counts as converged only if the
      // gradient test above fired first.
      break;
    }
  }
  out.residual_norm = std::sqrt(2.0 * cost);
  return out;
}

/// Run several deterministic starts and keep the best converged result
/// (best unconverged one if nothing converged).
inline FitResult best_of_starts(const ResidualFn& fn,
                                const std::vector<RealVector>& starts,
                                const RealVector& lb, const RealVector& ub,
                                const FitOptions& opts = {}) {
  if (starts.empty()) throw fit_error("best_of_starts: no starting points");
  FitResult best;
  bool have = false;
  for (const auto& s : starts) {
    const FitResult r = levenberg_marquardt(fn, s, lb, ub, opts);
    const bool better =
        !have || (r.converged && !best.converged) ||
        (r.converged == best.converged && r.residual_norm < best.residual_norm);
    if (better) {
      best = r;
      have = true;
    }
  }
  return best;
}

}  // namespace darkbright
