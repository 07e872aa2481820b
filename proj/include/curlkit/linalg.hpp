#pragma once

#include <algorithm>
#include <complex>
#include <numeric>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "errors.hpp"

namespace curlkit {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

struct EigenResult {
  CVector values;
  CMatrix vectors;  // empty unless requested
};

// Hessenberg reduction followed by shifted complex QR (Eigen's ComplexSchur),
// capped at 100·d² sweeps.
inline EigenResult eigen_decompose(const CMatrix& A, bool vectors = false) {
  const auto d = A.rows();
  if (!A.allFinite()) throw EigenNoConvergence("eigen_decompose: non-finite matrix entries");
  Eigen::ComplexEigenSolver<CMatrix> es;
  es.setMaxIterations(static_cast<Eigen::Index>(100 * d * d));
  es.compute(A, vectors);
  if (es.info() != Eigen::Success) throw EigenNoConvergence("eigen_decompose: QR iteration did not converge");
  EigenResult r;
  r.values = es.eigenvalues();
  if (vectors) r.vectors = es.eigenvectors();
  return r;
}

inline double spectral_radius(const CMatrix& A) { return eigen_decompose(A).values.cwiseAbs().maxCoeff(); }

// Largest distance between matched eigenvalues, minimized over pairings
// (exhaustive for up to 8 values).
inline double eigenvalue_mismatch(const CVector& a, const CVector& b) {
  if (a.size() != b.size()) throw ValidationError("eigenvalue_mismatch: size differs");
  const auto n = a.size();
  if (n > 8) throw ValidationError("eigenvalue_mismatch: at most 8 values");
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = n ? std::numeric_limits<double>::infinity() : 0.0;
  do {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) worst = std::max(worst, std::abs(a(i) - b(perm[i])));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Orthonormal basis of the null space of the rows of F (SVD, relative threshold).
inline CMatrix null_space(const CMatrix& F, double scale, double rel_tol = 1e-10) {
  const auto n = F.cols();
  Eigen::JacobiSVD<CMatrix> svd(F, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double ref = std::max(scale, s.size() ? s(0) : 0.0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > rel_tol * ref) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

}  // namespace curlkit
