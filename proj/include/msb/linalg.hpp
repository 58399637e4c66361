// linalg.hpp - matrix aliases and small dense helpers
#pragma once

#include <complex>
#include <cstddef>
#include <functional>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace msb {

using Complex = std::complex<double>;
using Vector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;

// Finite-dimensional surrogate for operators on the Fock space and on the
// excitation sectors. Column-major, absent entries are exact zeros.
using OperatorMatrix = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<Complex>;

struct PowerIterationResult {
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Largest singular value of a linear map given by `apply` and `apply_adjoint`
// (both acting on vectors of length `dim`), by power iteration on T^*T.
// The start vector is deterministic so repeated calls agree bit for bit.
PowerIterationResult operator_norm(const std::function<Vector(const Vector&)>& apply,
                                   const std::function<Vector(const Vector&)>& apply_adjoint, Eigen::Index dim,
                                   double rel_tol = 1e-8, int max_iter = 10000);

PowerIterationResult operator_norm(const Matrix& m, double rel_tol = 1e-8, int max_iter = 10000);

// max_ij |a_ij - b_ij|
double max_abs_diff(const Matrix& a, const Matrix& b);

// ||a - b||_F / max(||b||_F, tiny)
double relative_frobenius(const Matrix& a, const Matrix& b);

}  // namespace msb
