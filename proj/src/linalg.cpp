#include "msb/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace msb {

PowerIterationResult operator_norm(const std::function<Vector(const Vector&)>& apply,
                                   const std::function<Vector(const Vector&)>& apply_adjoint, Eigen::Index dim,
                                   double rel_tol, int max_iter) {
  PowerIterationResult out;
  if (dim == 0) {
    out.converged = true;
    return out;
  }
  // deterministic and not aligned with any basis-structured subspace
  Vector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double t = static_cast<double>(i + 1);
    v[i] = Complex(1.0 + 0.5 * std::sin(1.7 * t), 0.3 * std::cos(2.3 * t));
  }
  v.normalize();

  double sigma = 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    Vector w = apply(v);
    const double next = w.norm();
    out.iterations = it;
    if (next == 0.0) {
      // generic start vector annihilated: the map is zero
      sigma = 0.0;
      out.converged = true;
      break;
    }
    Vector u = apply_adjoint(w);
    const double un = u.norm();
    if (un == 0.0) {
      sigma = next;
      out.converged = true;
      break;
    }
    v = u / un;
    if (std::abs(next - sigma) <= rel_tol * next) {
      sigma = next;
      out.converged = true;
      break;
    }
    sigma = next;
  }
  out.value = sigma;
  return out;
}

PowerIterationResult operator_norm(const Matrix& m, double rel_tol, int max_iter) {
  return operator_norm([&](const Vector& x) -> Vector { return m * x; },
                       [&](const Vector& x) -> Vector { return m.adjoint() * x; }, m.cols(), rel_tol, max_iter);
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).cwiseAbs().maxCoeff();
}

double relative_frobenius(const Matrix& a, const Matrix& b) {
  const double denom = std::max(b.norm(), std::numeric_limits<double>::min());
  return (a - b).norm() / denom;
}

}  // namespace msb
