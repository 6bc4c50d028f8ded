#pragma once

// Internal Lanczos eigensolver (lowest eigenpair, full reorthogonalization).

#include <mpdc/tensor.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

namespace mpdc::detail {

template <typename Vec>
struct LanczosOut {
  double value = 0.0;
  Vec vector;
  int iterations = 0;
  bool converged = false;
};

// apply(x, y) must compute y = A x for a hermitian A.
template <typename Vec, typename Apply>
LanczosOut<Vec> lanczos_lowest(Apply&& apply, const Vec& v0, int max_iter, double tol) {
  using Scalar = typename Vec::Scalar;
  const Eigen::Index n = v0.size();
  if (n == 0) throw Error("lanczos: empty problem");
  const int m = std::max(1, static_cast<int>(std::min<Eigen::Index>(max_iter, n)));

  LanczosOut<Vec> out;
  std::vector<Vec> basis;
  basis.reserve(std::min(m, 64));
  {
    Vec v = v0;
    const double nv = v.norm();
    if (!(nv > 0)) throw Error("lanczos: zero start vector");
    v /= nv;
    basis.push_back(std::move(v));
  }

  std::vector<double> alpha, beta;
  Vec w(n);
  Eigen::VectorXd ritz;
  double theta = 0;

  for (int k = 0; k < m; ++k) {
    apply(basis[k], w);
    const double a = std::real(Scalar(basis[k].dot(w)));
    alpha.push_back(a);
    w -= Scalar(a) * basis[k];
    if (k > 0) w -= Scalar(beta[k - 1]) * basis[k - 1];
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : basis) w -= b.dot(w) * b;

    Eigen::Map<const Eigen::VectorXd> diag(alpha.data(), alpha.size());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    if (beta.empty())
      es.computeFromTridiagonal(diag, Eigen::VectorXd());
    else
      es.computeFromTridiagonal(diag, Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size()));
    theta = es.eigenvalues()(0);
    ritz = es.eigenvectors().col(0);

    const double b = w.norm();
    const double resid = b * std::abs(ritz(ritz.size() - 1));
    out.iterations = k + 1;
    if (resid <= tol * std::max(1.0, std::abs(theta))) {
      out.converged = true;
      break;
    }
    if (b < 1e-14 * std::max(1.0, std::abs(a))) {
      out.converged = true;  // krylov space is exactly invariant
      break;
    }
    if (k + 1 == m) break;
    beta.push_back(b);
    basis.push_back(w / Scalar(b));
  }

  out.value = theta;
  out.vector = Vec::Zero(n);
  for (Eigen::Index i = 0; i < ritz.size(); ++i) out.vector += Scalar(ritz(i)) * basis[i];
  out.vector.normalize();
  return out;
}

}  // namespace mpdc::detail
