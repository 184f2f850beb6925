#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "darkbright/fitting.hpp"
#include "darkbright/response.hpp"
#include "darkbright/util.hpp"

namespace darkbright {

/// Applied noise power to bath temperature: T(P) = T_res + alpha * P.
struct CalibrationModel {
  double t_res_k = 0.095;
  double alpha_k_per_mw = 0.0;

  void validate() const {
    if (!(t_res_k > 0.0))
      throw validation_error("CalibrationModel: t_res_k must be positive");
    if (!(alpha_k_per_mw >= 0.0))
      throw validation_error("CalibrationModel: alpha_k_per_mw must be >= 0");
  }

  double temperature(double power_mw) const {
    if (!(power_mw >= 0.0))
      throw validation_error("CalibrationModel: power must be >= 0");
    return t_res_k + alpha_k_per_mw * power_mw;
  }
};

enum class SweptBath { global_bath, local_bath };

inline const char* to_string(SweptBath s) {
  return s == SweptBath::global_bath ? "global" : "local";
}

namespace detail {

inline void check_temperature_grid(const std::vector<double>& grid_k) {
  if (grid_k.empty())
    throw validation_error("temperature grid must not be empty");
  for (size_t i = 0; i < grid_k.size(); ++i) {
    if (!(grid_k[i] >= 0.0) || !std::isfinite(grid_k[i]))
      throw validation_error("temperature grid entries must be finite and >= 0");
    if (i > 0 && !(grid_k[i] > grid_k[i - 1]))
      throw validation_error("temperature grid must be strictly increasing");
  }
}

inline BathTemps swept_temps(SweptBath swept, double value_k, double other_k) {
  return swept == SweptBath::global_bath ? BathTemps{value_k, other_k}
                                         : BathTemps{other_k, value_k};
}

}  // namespace detail

struct CurvePoint {
  double temperature_k = 0.0;
  double abs_t = 0.0;
};

struct TemperatureCurve {
  Transition transition{};
  ResolvedTransition line{};
  SweptBath swept = SweptBath::global_bath;
  double other_k = 0.0;
  double a_in = 0.0;
  std::vector<CurvePoint> points;
};

/// |t| at one fixed transition frequency while one bath temperature sweeps
/// and the other sits at its residual value.
inline TemperatureCurve temperature_curve(const TransmissionModel& model,
                                          Transition which, SweptBath swept,
                                          const std::vector<double>& grid_k,
                                          double other_k, double a_in = 0.0) {
  detail::check_temperature_grid(grid_k);
  if (!(other_k >= 0.0))
    throw validation_error("temperature_curve: held temperature must be >= 0");

  TemperatureCurve out;
  out.transition = which;
  out.line = model.resolve(which);
  out.swept = swept;
  out.other_k = other_k;
  out.a_in = a_in > 0.0 ? a_in : default_probe_a_in(model.gamma_glob_mhz());
  out.points.resize(grid_k.size());

  parallel_for(grid_k.size(), [&](size_t i) {
    const BathTemps temps = detail::swept_temps(swept, grid_k[i], other_k);
    try {
      out.points[i] = {grid_k[i], std::abs(model.transmission(
                                      out.line.freq_ghz, out.a_in, temps))};
    } catch (const solver_error& e) {
      std::ostringstream msg;
      msg << e.what() << " at " << to_string(swept) << " bath temperature "
          << grid_k[i] << " K";
      throw solver_error(msg.str());
    }
  });
  return out;
}

struct BrightDarkPoint {
  double sweep_value_k = 0.0;
  double t_00B_abs = 0.0;
  double t_DDp_abs = 0.0;
};

struct BrightDarkDiagram {
  std::string label;
  double f_bright_ghz = 0.0;
  double f_dark_ghz = 0.0;
  double other_k = 0.0;
  double a_in = 0.0;
  std::vector<BrightDarkPoint> points;
};

/// Paired (|t| at f_00B, |t| at f_DD') along a bath-temperature sweep.  The
/// global-sweep and local-sweep curves come out of this one code path.
inline BrightDarkDiagram bright_dark_diagram(const TransmissionModel& model,
                                             SweptBath swept,
                                             const std::vector<double>& grid_k,
                                             double other_k,
                                             double a_in = 0.0) {
  detail::check_temperature_grid(grid_k);
  if (!(other_k >= 0.0))
    throw validation_error("bright_dark_diagram: held temperature must be >= 0");

  BrightDarkDiagram out;
  out.label = std::string(to_string(swept)) + "-sweep";
  out.f_bright_ghz = model.resolve(Transition::bright_00B).freq_ghz;
  out.f_dark_ghz = model.resolve(Transition::dark_DDp).freq_ghz;
  out.other_k = other_k;
  out.a_in = a_in > 0.0 ? a_in : default_probe_a_in(model.gamma_glob_mhz());
  out.points.resize(grid_k.size());

  parallel_for(grid_k.size(), [&](size_t i) {
    const BathTemps temps = detail::swept_temps(swept, grid_k[i], other_k);
    BrightDarkPoint p;
    p.sweep_value_k = grid_k[i];
    p.t_00B_abs = std::abs(model.transmission(out.f_bright_ghz, out.a_in, temps));
    p.t_DDp_abs = std::abs(model.transmission(out.f_dark_ghz, out.a_in, temps));
    if (p.t_00B_abs > 1.0 + 1e-6 || p.t_DDp_abs > 1.0 + 1e-6) {
      std::ostringstream msg;
      msg << "bright_dark_diagram: |t| exceeded 1 at sweep value " << grid_k[i]
          << " K; probe amplitude " << out.a_in << " is outside the linear regime";
      throw solver_error(msg.str());
    }
    out.points[i] = p;
  });
  return out;
}

/// One sample of a power sweep at a fixed probe frequency.
struct PowerPoint {
  double power_mw = 0.0;
  double abs_t = 0.0;
};

struct FitReport {
  std::map<std::string, double> params;
  std::map<std::string, std::array<double, 2>> bounds;
  double residual_norm = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<std::string> warnings;
};

struct CalibrationSetup {
  const TransmissionModel* model = nullptr;
  Transition transition = Transition::ge;
  SweptBath heated = SweptBath::global_bath;
  double a_in = 0.0;  // 0 picks the weak-probe default
  int max_iterations = 200;

  void validate() const {
    if (model == nullptr)
      throw validation_error("CalibrationSetup: model must be set");
    if (max_iterations < 1)
      throw validation_error("CalibrationSetup: max_iterations must be >= 1");
  }
};

/// Forward model behind fit_calibration: the heated bath sits at T(P), the
/// other one at T_res.
inline std::vector<PowerPoint> calibration_power_curve(
    const CalibrationSetup& setup, const CalibrationModel& cal,
    const std::vector<double>& powers_mw) {
  setup.validate();
  cal.validate();
  const double f = setup.model->resolve(setup.transition).freq_ghz;
  const double a_in = setup.a_in > 0.0
                          ? setup.a_in
                          : default_probe_a_in(setup.model->gamma_glob_mhz());
  std::vector<PowerPoint> out(powers_mw.size());
  parallel_for(powers_mw.size(), [&](size_t i) {
    const BathTemps temps =
        detail::swept_temps(setup.heated, cal.temperature(powers_mw[i]), cal.t_res_k);
    out[i] = {powers_mw[i],
              std::abs(setup.model->transmission(f, a_in, temps))};
  });
  return out;
}

namespace detail {

inline void warn_if_flat(const std::vector<double>& values,
                         std::vector<std::string>& warnings) {
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  if (*hi - *lo < 1e-3)
    warnings.push_back(
        "data curve is flat (|t| span < 1e-3); fit is ill-conditioned");
}

}  // namespace detail

/// Least squares over (T_res, alpha) on a measured power curve.  Both
/// parameters run in log space; four fixed starts cover the alpha decades.
inline FitReport fit_calibration(const std::vector<PowerPoint>& data,
                                 const CalibrationSetup& setup) {
  setup.validate();
  if (data.size() < 4)
    throw validation_error("fit_calibration: need at least 4 power points");
  for (const auto& p : data)
    if (!(p.power_mw >= 0.0) || !std::isfinite(p.abs_t))
      throw validation_error("fit_calibration: bad data point");

  FitReport report;
  std::vector<double> values;
  for (const auto& p : data) values.push_back(p.abs_t);
  detail::warn_if_flat(values, report.warnings);

  const double f = setup.model->resolve(setup.transition).freq_ghz;
  const double a_in = setup.a_in > 0.0
                          ? setup.a_in
                          : default_probe_a_in(setup.model->gamma_glob_mhz());
  const std::array<double, 2> tres_band{0.005, 1.0};
  const std::array<double, 2> alpha_band{1e-6, 1e3};

  auto residual = [&](const RealVector& x) -> RealVector {
    CalibrationModel cal{std::exp(x(0)), std::exp(x(1))};
    RealVector r(static_cast<Eigen::Index>(data.size()));
    for (size_t i = 0; i < data.size(); ++i) {
      const BathTemps temps = detail::swept_temps(
          setup.heated, cal.temperature(data[i].power_mw), cal.t_res_k);
      r(static_cast<Eigen::Index>(i)) =
          std::abs(setup.model->transmission(f, a_in, temps)) - data[i].abs_t;
    }
    return r;
  };

  RealVector lb(2), ub(2);
  lb << std::log(tres_band[0]), std::log(alpha_band[0]);
  ub << std::log(tres_band[1]), std::log(alpha_band[1]);
  std::vector<RealVector> starts;
  for (double alpha0 : {1e-2, 1e-1, 1.0, 10.0}) {
    RealVector s(2);
    s << std::log(0.1), std::log(alpha0);
    starts.push_back(s);
  }

  FitOptions fit_opts;
  fit_opts.max_iterations = setup.max_iterations;
  const FitResult fit = best_of_starts(residual, starts, lb, ub, fit_opts);
  report.params["t_res_k"] = std::exp(fit.x(0));
  report.params["alpha_k_per_mw"] = std::exp(fit.x(1));
  report.bounds["t_res_k"] = tres_band;
  report.bounds["alpha_k_per_mw"] = alpha_band;
  report.residual_norm = fit.residual_norm;
  report.iterations = fit.iterations;
  report.converged = fit.converged;
  return report;
}

/// Joint single-qubit fit of the side-pin parameters.  Qubit 2's pin rate is
/// tied to qubit 1's by the fixed asymmetry k_ratio.
struct LocalFitSetup {
  TransmonParams q1{};
  TransmonParams q2{};
  double gamma_glob_mhz = 5.0;
  double k_ratio = 1.78;
  double t_res_k = 0.095;
  double alpha_glob_k_per_mw = 1.0;
  double gamma_loc1_guess_mhz = 0.05;
  SecularPolicy policy{};
  double a_in = 0.0;
  int max_iterations = 200;

  void validate() const {
    q1.validate();
    q2.validate();
    if (!(gamma_glob_mhz > 0.0) || !(k_ratio > 0.0))
      throw validation_error("LocalFitSetup: rates must be positive");
    if (!(t_res_k > 0.0) || !(alpha_glob_k_per_mw > 0.0))
      throw validation_error("LocalFitSetup: t_res_k and alpha_glob must be positive");
    if (!(gamma_loc1_guess_mhz > 0.0))
      throw validation_error("LocalFitSetup: gamma_loc1 guess must be positive");
    if (max_iterations < 1)
      throw validation_error("LocalFitSetup: max_iterations must be >= 1");
  }
};

/// Forward single-qubit power curve with the local bath heated as
/// T_loc(P) = T_res + alpha_loc * P and the waveguide held at T_res.
inline std::vector<PowerPoint> local_power_curve(
    const LocalFitSetup& setup, int qubit, Transition which, double alpha_loc,
    double gamma_loc1_mhz, const std::vector<double>& powers_mw) {
  setup.validate();
  if (qubit != 1 && qubit != 2)
    throw validation_error("local_power_curve: qubit index must be 1 or 2");
  const TransmonParams& q = qubit == 1 ? setup.q1 : setup.q2;
  const double gamma_loc =
      gamma_loc1_mhz * (qubit == 1 ? 1.0 : setup.k_ratio);
  const TransmissionModel model(q, setup.gamma_glob_mhz, gamma_loc,
                                BathLayout{}, setup.policy);
  const double f = model.resolve(which).freq_ghz;
  const double a_in =
      setup.a_in > 0.0 ? setup.a_in : default_probe_a_in(setup.gamma_glob_mhz);
  std::vector<PowerPoint> out(powers_mw.size());
  for (size_t i = 0; i < powers_mw.size(); ++i) {
    const BathTemps temps{setup.t_res_k,
                          setup.t_res_k + alpha_loc * powers_mw[i]};
    out[i] = {powers_mw[i], std::abs(model.transmission(f, a_in, temps))};
  }
  return out;
}

/// Simultaneous fit of (alpha_loc, gamma_loc1) against both qubits' ge power
/// curves.  alpha_loc stays within a factor 3 of the waveguide calibration;
/// gamma_loc1 may roam three decades around its estimate.
inline FitReport fit_local(const std::vector<PowerPoint>& data_q1,
                           const std::vector<PowerPoint>& data_q2,
                           const LocalFitSetup& setup) {
  setup.validate();
  if (data_q1.size() < 2 || data_q2.size() < 2)
    throw validation_error("fit_local: need at least 2 points per qubit");

  FitReport report;
  std::vector<double> values;
  for (const auto& p : data_q1) values.push_back(p.abs_t);
  for (const auto& p : data_q2) values.push_back(p.abs_t);
  detail::warn_if_flat(values, report.warnings);

  std::vector<double> powers_q1, powers_q2;
  for (const auto& p : data_q1) powers_q1.push_back(p.power_mw);
  for (const auto& p : data_q2) powers_q2.push_back(p.power_mw);

  const std::array<double, 2> alpha_band{setup.alpha_glob_k_per_mw / 3.0,
                                         setup.alpha_glob_k_per_mw * 3.0};
  const std::array<double, 2> gamma_band{setup.gamma_loc1_guess_mhz * 1e-3,
                                         setup.gamma_loc1_guess_mhz * 1e3};

  auto residual = [&](const RealVector& x) -> RealVector {
    const double alpha_loc = std::exp(x(0));
    const double gamma_loc1 = std::exp(x(1));
    const auto c1 = local_power_curve(setup, 1, Transition::ge, alpha_loc,
                                      gamma_loc1, powers_q1);
    const auto c2 = local_power_curve(setup, 2, Transition::ge, alpha_loc,
                                      gamma_loc1, powers_q2);
    RealVector r(static_cast<Eigen::Index>(data_q1.size() + data_q2.size()));
    for (size_t i = 0; i < data_q1.size(); ++i)
      r(static_cast<Eigen::Index>(i)) = c1[i].abs_t - data_q1[i].abs_t;
    for (size_t i = 0; i < data_q2.size(); ++i)
      r(static_cast<Eigen::Index>(data_q1.size() + i)) =
          c2[i].abs_t - data_q2[i].abs_t;
    return r;
  };

  RealVector lb(2), ub(2);
  lb << std::log(alpha_band[0]), std::log(gamma_band[0]);
  ub << std::log(alpha_band[1]), std::log(gamma_band[1]);
  std::vector<RealVector> starts;
  for (double scale : {1.0, 30.0, 1.0 / 30.0}) {
    RealVector s(2);
    s << std::log(setup.alpha_glob_k_per_mw),
        std::log(setup.gamma_loc1_guess_mhz * scale);
    starts.push_back(s);
  }
  {
    RealVector s(2);
    s << std::log(setup.alpha_glob_k_per_mw * 2.0),
        std::log(setup.gamma_loc1_guess_mhz);
    starts.push_back(s);
  }

  FitOptions fit_opts;
  fit_opts.max_iterations = setup.max_iterations;
  const FitResult fit = best_of_starts(residual, starts, lb, ub, fit_opts);
  report.params["alpha_loc_k_per_mw"] = std::exp(fit.x(0));
  report.params["gamma_loc1_mhz"] = std::exp(fit.x(1));
  report.bounds["alpha_loc_k_per_mw"] = alpha_band;
  report.bounds["gamma_loc1_mhz"] = gamma_band;
  report.residual_norm = fit.residual_norm;
  report.iterations = fit.iterations;
  report.converged = fit.converged;
  return report;
}

enum class InferenceStatus { ok, out_of_range, ambiguous };

inline const char* to_string(InferenceStatus s) {
  switch (s) {
    case InferenceStatus::ok: return "ok";
    case InferenceStatus::out_of_range: return "out_of_range";
    case InferenceStatus::ambiguous: return "ambiguous";
  }
  return "unknown";
}

struct InverterOptions {
  double t_glob_min_k = 0.02;
  double t_glob_max_k = 1.0;
  double t_loc_min_k = 0.05;
  double t_loc_max_k = 4.0;
  int grid_points = 12;  // per axis, log spaced
  int starts = 8;
  int max_iterations = 60;
  double residual_tol = 1e-10;   // converged root, |t| units
  double accept_tol = 1e-6;      // anything worse counts as unreachable
  double basin_rel_tol = 0.02;   // relative temperature gap merging basins
  double sensitivity_floor = 1e-3;
  double a_in = 0.0;

  void validate() const {
    if (!(t_glob_min_k > 0.0) || !(t_glob_min_k < t_glob_max_k) ||
        !(t_loc_min_k > 0.0) || !(t_loc_min_k < t_loc_max_k))
      throw validation_error("InverterOptions: bad temperature ranges");
    if (grid_points < 4 || starts < 1 || max_iterations < 1)
      throw validation_error("InverterOptions: bad grid/start/iteration counts");
  }
};

struct InferenceResult {
  InferenceStatus status = InferenceStatus::out_of_range;
  double t_glob_k = 0.0;
  double t_loc_k = 0.0;
  double residual = 0.0;
  int basin_count = 0;
  std::array<double, 2> nearest_pair{0.0, 0.0};  // attainable (|t_00B|, |t_DD'|)
  double local_sensitivity = 0.0;
  std::vector<std::array<double, 2>> candidates;  // (T_glob, T_loc) per basin
  std::string message;
};

/// Two-temperature inversion of a measured (|t_00B|, |t_DD'|) pair.  A coarse
/// forward grid computed up front seeds damped Newton iterations on
/// log-temperatures; distinct converged basins are reported, not hidden.
class TemperatureInverter {
 public:
  explicit TemperatureInverter(const TransmissionModel& model,
                               InverterOptions opts = {})
      : model_(&model), opts_(opts) {
    opts_.validate();
    f_bright_ = model.resolve(Transition::bright_00B).freq_ghz;
    f_dark_ = model.resolve(Transition::dark_DDp).freq_ghz;
    a_in_ = opts_.a_in > 0.0 ? opts_.a_in
                             : default_probe_a_in(model.gamma_glob_mhz());
    tg_ = logspace(opts_.t_glob_min_k, opts_.t_glob_max_k, opts_.grid_points);
    tl_ = logspace(opts_.t_loc_min_k, opts_.t_loc_max_k, opts_.grid_points);
    grid_.resize(tg_.size() * tl_.size());
    parallel_for(grid_.size(), [&](size_t i) {
      grid_[i] = forward(tg_[i / tl_.size()], tl_[i % tl_.size()]);
    });
  }

  double f_bright_ghz() const { return f_bright_; }
  double f_dark_ghz() const { return f_dark_; }
  double a_in() const { return a_in_; }

  /// (|t_00B|, |t_DD'|) at one temperature pair.
  std::array<double, 2> forward(double t_glob_k, double t_loc_k) const {
    const BathTemps temps{t_glob_k, t_loc_k};
    return {std::abs(model_->transmission(f_bright_, a_in_, temps)),
            std::abs(model_->transmission(f_dark_, a_in_, temps))};
  }

  InferenceResult invert(double t_00B_abs, double t_DDp_abs) const {
    if (!std::isfinite(t_00B_abs) || !std::isfinite(t_DDp_abs) ||
        t_00B_abs < 0.0 || t_DDp_abs < 0.0)
      throw validation_error("invert: target magnitudes must be finite and >= 0");
    const Eigen::Vector2d target(t_00B_abs, t_DDp_abs);

    // Seed from the grid nodes closest to the target, index-ordered on ties.
    std::vector<size_t> order(grid_.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
      return node_dist2(a, target) < node_dist2(b, target);
    });
    const size_t nstarts = std::min<size_t>(opts_.starts, order.size());

    std::vector<NewtonEnd> ends(nstarts);
    parallel_for(nstarts, [&](size_t s) {
      const size_t node = order[s];
      Eigen::Vector2d u(std::log(tg_[node / tl_.size()]),
                        std::log(tl_[node % tl_.size()]));
      ends[s] = newton(u, target);
    });

    size_t best = 0;
    for (size_t s = 1; s < nstarts; ++s)
      if (ends[s].res < ends[best].res) best = s;

    InferenceResult out;
    out.residual = ends[best].res;
    out.t_glob_k = std::exp(ends[best].u(0));
    out.t_loc_k = std::exp(ends[best].u(1));

    if (ends[best].res > opts_.accept_tol) {
      out.status = InferenceStatus::out_of_range;
      out.nearest_pair = {ends[best].f(0), ends[best].f(1)};
      std::ostringstream msg;
      msg << "target (" << t_00B_abs << ", " << t_DDp_abs
          << ") is outside the attainable range; nearest pair (" << out.nearest_pair[0]
          << ", " << out.nearest_pair[1] << ") at T_glob = " << out.t_glob_k
          << " K, T_loc = " << out.t_loc_k << " K";
      out.message = msg.str();
      return out;
    }

    // Cluster the converged endpoints into basins.
    std::vector<std::array<double, 2>> basins;
    for (size_t s = 0; s < nstarts; ++s) {
      if (ends[s].res > opts_.accept_tol) continue;
      const std::array<double, 2> cand{std::exp(ends[s].u(0)),
                                       std::exp(ends[s].u(1))};
      bool merged = false;
      for (const auto& b : basins) {
        if (std::abs(cand[0] - b[0]) <= opts_.basin_rel_tol * b[0] &&
            std::abs(cand[1] - b[1]) <= opts_.basin_rel_tol * b[1]) {
          merged = true;
          break;
        }
      }
      if (!merged) basins.push_back(cand);
    }
    out.basin_count = int(basins.size());
    out.candidates = basins;
    out.nearest_pair = {ends[best].f(0), ends[best].f(1)};
    out.local_sensitivity = local_sensitivity(ends[best].u);

    if (basins.size() > 1) {
      out.status = InferenceStatus::ambiguous;
      std::ostringstream msg;
      msg << basins.size() << " distinct temperature pairs reproduce the target;"
          << " candidates:";
      for (const auto& b : basins)
        msg << " (" << b[0] << " K, " << b[1] << " K)";
      out.message = msg.str();
      return out;
    }

    out.status = InferenceStatus::ok;
    if (out.local_sensitivity < opts_.sensitivity_floor) {
      std::ostringstream msg;
      msg << "local-bath sensitivity " << out.local_sensitivity << " below "
          << opts_.sensitivity_floor << "; T_loc is weakly constrained";
      out.message = msg.str();
    }
    return out;
  }

 private:
  struct NewtonEnd {
    Eigen::Vector2d u{0.0, 0.0};
    Eigen::Vector2d f{0.0, 0.0};
    double res = std::numeric_limits<double>::infinity();
  };

  double node_dist2(size_t node, const Eigen::Vector2d& target) const {
    const double dx = grid_[node][0] - target(0);
    const double dy = grid_[node][1] - target(1);
    return dx * dx + dy * dy;
  }

  Eigen::Vector2d eval(const Eigen::Vector2d& u) const {
    const auto v = forward(std::exp(u(0)), std::exp(u(1)));
    return Eigen::Vector2d(v[0], v[1]);
  }

  Eigen::Vector2d clamp_log(Eigen::Vector2d u) const {
    u(0) = std::clamp(u(0), std::log(opts_.t_glob_min_k),
                      std::log(opts_.t_glob_max_k));
    u(1) = std::clamp(u(1), std::log(opts_.t_loc_min_k),
                      std::log(opts_.t_loc_max_k));
    return u;
  }

  NewtonEnd newton(Eigen::Vector2d u, const Eigen::Vector2d& target) const {
    const double h = 1e-4;
    u = clamp_log(u);
    NewtonEnd end;
    end.u = u;
    end.f = eval(u);
    end.res = (end.f - target).norm();
    for (int iter = 0; iter < opts_.max_iterations; ++iter) {
      if (end.res < opts_.residual_tol) break;
      Eigen::Matrix2d j;
      for (int c = 0; c < 2; ++c) {
        Eigen::Vector2d up = end.u;
        const double step = up(c) + h > std::log(c == 0 ? opts_.t_glob_max_k
                                                        : opts_.t_loc_max_k)
                                ? -h
                                : h;
        up(c) += step;
        j.col(c) = (eval(up) - end.f) / step;
      }
      const Eigen::Vector2d r = end.f - target;
      Eigen::FullPivLU<Eigen::Matrix2d> lu(j);
      Eigen::Vector2d s = lu.isInvertible() ? lu.solve(-r).eval()
                                            : (-j.transpose() * r).eval();
      const double cap = 2.0;  // log units per iteration
      if (s.norm() > cap) s *= cap / s.norm();

      bool accepted = false;
      for (int back = 0; back < 12; ++back) {
        const Eigen::Vector2d un = clamp_log(end.u + s);
        const Eigen::Vector2d fn = eval(un);
        const double rn = (fn - target).norm();
        if (rn < end.res) {
          end.u = un;
          end.f = fn;
          end.res = rn;
          accepted = true;
          break;
        }
        s *= 0.5;
      }
      if (!accepted) break;
    }
    return end;
  }

  /// Norm of d(|t_00B|, |t_DD'|)/dlog T_loc, the quantity that must stay
  /// finite for the local temperature to be identifiable.
  double local_sensitivity(const Eigen::Vector2d& u) const {
    const double h = 1e-4;
    Eigen::Vector2d up = u;
    up(1) += up(1) + h > std::log(opts_.t_loc_max_k) ? -h : h;
    return (eval(up) - eval(u)).norm() / h;
  }

  const TransmissionModel* model_;
  InverterOptions opts_;
  double f_bright_ = 0.0;
  double f_dark_ = 0.0;
  double a_in_ = 0.0;
  std::vector<double> tg_, tl_;
  std::vector<std::array<double, 2>> grid_;
};

}  // namespace darkbright
