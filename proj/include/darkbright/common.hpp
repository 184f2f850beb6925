#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace darkbright {

using complexd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

inline constexpr complexd imag_unit{0.0, 1.0};

/// Bad parameters, malformed configuration, or unsatisfiable requests.
struct validation_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// The linear-algebra layer could not produce a trustworthy solution.
struct solver_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace darkbright
