#pragma once

#include <cmath>
#include <string>
#include <vector>

#include <unsupported/Eigen/KroneckerProduct>

#include "darkbright/common.hpp"
#include "darkbright/constants.hpp"
#include "darkbright/operators.hpp"
#include "darkbright/rates.hpp"

namespace darkbright {

/// Column-stacking vectorization: vec(A rho B) = (B^T kron A) vec(rho).
inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, int n) {
  if (v.size() != Eigen::Index(n) * n)
    throw validation_error("unvec: length is not a perfect square of the dimension");
  return Eigen::Map<const Matrix>(v.data(), n, n);
}

/// n^2 x n^2 generator acting on column-vectorized density matrices, 1/ns.
struct Superoperator {
  int hilbert_dim = 0;
  Matrix mat;
};

/// Vectorized commutator part -i(H rho - rho H).
inline Matrix hamiltonian_superop(const Matrix& h) {
  const int n = int(h.rows());
  const Matrix id = Matrix::Identity(n, n);
  return -imag_unit * (Matrix(Eigen::kroneckerProduct(id, h)) -
                       Matrix(Eigen::kroneckerProduct(h.transpose(), id)));
}

/// Vectorized cross dissipator D(a,b)[rho] = a rho b^dag - {b^dag a, rho}/2.
inline Matrix dissipator_superop(const Matrix& a, const Matrix& b) {
  const int n = int(a.rows());
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw validation_error("dissipator_superop: operators must be square and same size");
  const Matrix id = Matrix::Identity(n, n);
  const Matrix bda = b.adjoint() * a;
  return Matrix(Eigen::kroneckerProduct(b.conjugate(), a)) -
         0.5 * Matrix(Eigen::kroneckerProduct(id, bda)) -
         0.5 * Matrix(Eigen::kroneckerProduct(bda.transpose(), id));
}

/// Assemble the full generator from a rotating-frame Hamiltonian (rad/ns)
/// and the pairwise rate matrix (MHz; converted here so that a rate constant
/// of x MHz means a zero-temperature energy decay rate of 2 pi x e-3 /ns).
inline Superoperator build_liouvillian(const Matrix& h_rad_per_ns,
                                       const RateMatrix& rates,
                                       const JumpTable& jumps) {
  const int n = jumps.dim;
  if (h_rad_per_ns.rows() != n || h_rad_per_ns.cols() != n)
    throw validation_error("build_liouvillian: Hamiltonian dimension mismatch");
  const double hscale = std::max(1.0, h_rad_per_ns.cwiseAbs().maxCoeff());
  if ((h_rad_per_ns - h_rad_per_ns.adjoint()).cwiseAbs().maxCoeff() >
      1e-12 * hscale)
    throw validation_error("build_liouvillian: Hamiltonian is not Hermitian");
  const int m = int(jumps.records.size());
  if (rates.down_mhz.rows() != m || rates.up_mhz.rows() != m)
    throw validation_error("build_liouvillian: rate matrix does not match jump table");

  Superoperator l;
  l.hilbert_dim = n;
  l.mat = hamiltonian_superop(h_rad_per_ns);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      if (!rates.active(a, b)) continue;
      const double dn = rates.down_mhz(a, b) * rate_mhz_to_per_ns;
      const double up = rates.up_mhz(a, b) * rate_mhz_to_per_ns;
      const Matrix& sa = jumps.records[a].lower;
      const Matrix& sb = jumps.records[b].lower;
      if (dn != 0.0) l.mat += dn * dissipator_superop(sa, sb);
      if (up != 0.0)
        l.mat += up * dissipator_superop(sa.adjoint(), sb.adjoint());
    }
  }
  return l;
}

inline Matrix apply(const Superoperator& l, const Matrix& rho) {
  if (rho.rows() != l.hilbert_dim || rho.cols() != l.hilbert_dim)
    throw validation_error("apply: state dimension mismatch");
  return unvec(l.mat * vec(rho), l.hilbert_dim);
}

struct SteadyStateOptions {
  double rank_tol = 1e-8;       // relative to the largest singular value
  double residual_tol = 1e-9;   // absolute, generator in 1/ns
  double negativity_tol = 1e-3;
  bool compute_rank = true;     // run the SVD diagnostics unconditionally
};

struct SteadyStateReport {
  Matrix rho;
  double residual = 0.0;
  int null_space_dim = 1;
  bool degenerate = false;
  std::string branch = "unique";
  double min_eigenvalue = 0.0;
  double trace_error = 0.0;  // |tr - 1| before renormalization
};

/// Half the sum of absolute eigenvalues of the (Hermitian) difference.
inline double trace_distance(const Matrix& a, const Matrix& b) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a - b);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

namespace detail {

inline Matrix hermitized_unit_trace(const Vector& v, int n, double* trace_error) {
  Matrix rho = unvec(v, n);
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double tr = rho.trace().real();
  if (trace_error) *trace_error = std::abs(rho.trace() - complexd(1.0, 0.0));
  if (std::abs(tr) < 1e-10)
    throw solver_error("steady_state: candidate state has (near) zero trace");
  rho /= tr;
  return rho;
}

}  // namespace detail

/// Null vector of the generator with unit trace.  The trace condition
/// replaces the row of the (0,0) matrix element; one iterative-refinement
/// pass sharpens the LU solution.  If the kernel turns out to be
/// multi-dimensional (protected dark sector), the state is picked by
/// spectrally projecting |0...0><0...0| onto the kernel: that is the state
/// the experiment prepares before the baths act.
inline SteadyStateReport steady_state(const Superoperator& l,
                                      const SteadyStateOptions& opts = {}) {
  const int n = l.hilbert_dim;
  const Eigen::Index nn = l.mat.rows();
  if (nn != Eigen::Index(n) * n)
    throw validation_error("steady_state: malformed superoperator");

  Matrix a = l.mat;
  for (Eigen::Index j = 0; j < nn; ++j) a(0, j) = 0.0;
  for (int j = 0; j < n; ++j) a(0, Eigen::Index(j) * n + j) = 1.0;
  Vector b = Vector::Zero(nn);
  b(0) = 1.0;

  Eigen::PartialPivLU<Matrix> lu(a);
  Vector x = lu.solve(b);
  x += lu.solve(b - a * x);

  SteadyStateReport rep;
  rep.rho = detail::hermitized_unit_trace(x, n, &rep.trace_error);
  rep.residual = (l.mat * vec(rep.rho)).norm();

  const bool need_diagnostics =
      opts.compute_rank || !(rep.residual <= opts.residual_tol);
  if (need_diagnostics) {
    Eigen::BDCSVD<Matrix> svd(l.mat);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() ? sv(0) : 0.0;
    const double zero_tol = opts.rank_tol * smax;
    rep.null_space_dim = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) <= zero_tol) ++rep.null_space_dim;

    if (rep.null_space_dim > 1) {
      rep.degenerate = true;
      Eigen::ComplexEigenSolver<Matrix> ces(l.mat);
      if (ces.info() != Eigen::Success)
        throw solver_error("steady_state: eigendecomposition of the generator failed");
      const Matrix& v = ces.eigenvectors();
      Vector rho0 = Vector::Zero(nn);
      rho0(0) = 1.0;  // vec(|0...0><0...0|)
      const Vector c = v.partialPivLu().solve(rho0);
      Vector proj = Vector::Zero(nn);
      int used = 0;
      for (Eigen::Index i = 0; i < nn; ++i) {
        if (std::abs(ces.eigenvalues()(i)) <= zero_tol) {
          proj += v.col(i) * c(i);
          ++used;
        }
      }
      if (used == 0)
        throw solver_error("steady_state: degenerate kernel reported but no zero eigenvalues found");
      rep.rho = detail::hermitized_unit_trace(proj, n, &rep.trace_error);
      rep.residual = (l.mat * vec(rep.rho)).norm();
      rep.branch = "projected |0...0><0...0| onto " +
                   std::to_string(rep.null_space_dim) + "-dim kernel";
    } else if (!(rep.residual <= opts.residual_tol)) {
      throw solver_error(
          "steady_state: no null vector within tolerance (residual " +
          std::to_string(rep.residual) + ")");
    }
  }

  if (!(rep.residual <= std::max(opts.residual_tol, 1e-8)))
    throw solver_error("steady_state: residual " + std::to_string(rep.residual) +
                       " exceeds tolerance");

  Eigen::SelfAdjointEigenSolver<Matrix> es(rep.rho);
  rep.min_eigenvalue = es.eigenvalues().minCoeff();
  if (rep.min_eigenvalue < -opts.negativity_tol)
    throw solver_error("steady_state: state negativity " +
                       std::to_string(rep.min_eigenvalue) +
                       " beyond tolerance");
  return rep;
}

}  // namespace darkbright
