#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <vector>

#include "linalg.hpp"
#include "parallel.hpp"
#include "semidiscrete.hpp"
#include "timeint.hpp"

namespace curlkit {

// Nondimensional wavenumbers kx·Δx, ky·Δy. A neighbour shifted by (i,j) zones
// carries the factor e^{i(i·kxΔx + j·kyΔy)}.
struct FourierMode {
  double kxdx = 0.0, kydy = 0.0;
};

// Edge data of a single Fourier mode: u = (jy modes of the reference right y-edge,
// jx modes of the reference top x-edge).
struct FourierAccess {
  int n = 1;
  const cplx* u = nullptr;
  FourierMode mode;
  static constexpr int R = 4;
  std::array<cplx, (2 * R + 1) * (2 * R + 1)> phase{};

  FourierAccess(int n_, const cplx* u_, FourierMode k) : n(n_), u(u_), mode(k) {
    for (int j = -R; j <= R; ++j)
      for (int i = -R; i <= R; ++i)
        phase[(j + R) * (2 * R + 1) + (i + R)] = std::exp(cplx(0.0, i * k.kxdx + j * k.kydy));
  }
  cplx ph(int i, int j) const {
    if (std::abs(i) <= R && std::abs(j) <= R) return phase[(j + R) * (2 * R + 1) + (i + R)];
    return std::exp(cplx(0.0, i * mode.kxdx + j * mode.kydy));
  }
  EdgeCoeffs<cplx> jy(int i, int j) const {
    EdgeCoeffs<cplx> c{};
    const cplx p = ph(i, j);
    for (int m = 0; m < n; ++m) c[m] = u[m] * p;
    return c;
  }
  EdgeCoeffs<cplx> jx(int i, int j) const {
    EdgeCoeffs<cplx> c{};
    const cplx p = ph(i, j);
    for (int m = 0; m < n; ++m) c[m] = u[n + m] * p;
    return c;
  }
};

struct FourierOperator {
  CMatrix A;  // d × d on the constrained subspace
  CMatrix B;  // 2(N+1) × d, orthonormal columns
  CMatrix constraint;  // 1 × 2(N+1) circulation functional
  SchemeSpec spec;
  FourierMode mode;
  Velocity v;
  double dx = 1.0, dy = 1.0;
  double invariance_residual = 0.0;
  int dim() const { return static_cast<int>(A.rows()); }
};

inline constexpr double kInvarianceTolerance = 1e-10;

// Image of one full-space DOF vector under the semi-discrete operator.
inline CVector apply_fourier_rhs(const Discretization& d, const FourierMode& k, const CVector& u) {
  const int n = d.N() + 1;
  FourierAccess acc(n, u.data(), k);
  const auto [ry, rx] = reference_rhs<cplx>(d, acc);
  CVector r(2 * n);
  for (int m = 0; m < n; ++m) {
    r(m) = ry[m];
    r(n + m) = rx[m];
  }
  return r;
}

// The reference zone's compatibility functional (trace-system left null vector applied
// to the completed, length-scaled edges) as a row over the full DOFs.
inline CMatrix circulation_functional(const Discretization& d, const FourierMode& k) {
  const int n = d.N() + 1, M = d.M(), np = M + 1;
  const auto& sys = trace_system(M);
  CMatrix f(1, 2 * n);
  for (int c = 0; c < 2 * n; ++c) {
    CVector u = CVector::Zero(2 * n);
    u(c) = 1.0;
    FourierAccess acc(n, u.data(), k);
    auto cjy = [&](int i, int j) { return d.complete<cplx>([&](int o) { return acc.jy(i, j + o); }); };
    auto cjx = [&](int i, int j) { return d.complete<cplx>([&](int o) { return acc.jx(i + o, j); }); };
    const std::array<EdgeCoeffs<cplx>, 4> e = {cjy(0, 0), cjy(-1, 0), cjx(0, 0), cjx(0, -1)};
    const std::array<double, 4> h = {d.dy, d.dy, d.dx, d.dx};
    cplx s = 0.0;
    for (int b = 0; b < 4; ++b)
      for (int m = 0; m < np; ++m) s += sys.compat[b * np + m] * h[b] * e[b][m];
    f(0, c) = s;
  }
  return f;
}

inline FourierOperator assemble_A(const SchemeSpec& spec, const FourierMode& k, const Velocity& v, double dx,
                                  double dy) {
  const Discretization d(spec, v, dx, dy);
  FourierOperator op;
  op.spec = spec;
  op.mode = k;
  op.v = v;
  op.dx = dx;
  op.dy = dy;
  op.constraint = circulation_functional(d, k);
  op.B = null_space(op.constraint, std::max(dx, dy));
  const auto dim = op.B.cols();
  CMatrix image(op.B.rows(), dim);
  for (Eigen::Index c = 0; c < dim; ++c) image.col(c) = apply_fourier_rhs(d, k, op.B.col(c));
  op.A = op.B.adjoint() * image;
  const double scale = std::max(1.0, image.norm());
  op.invariance_residual = (image - op.B * op.A).norm() / scale;
  if (op.invariance_residual > kInvarianceTolerance)
    throw SubspaceNotInvariant("assemble_A: operator leaves the constrained subspace");
  return op;
}

// Closed-form N=1 matrix, transcribed term by term. kxdx, kydy are Δx·kx and Δy·ky.
inline CMatrix closed_form_n1_matrix(const FourierMode& k, const Velocity& v, double dx, double dy) {
  const cplx I(0.0, 1.0);
  const double cx = std::cos(k.kxdx), sx = std::sin(k.kxdx), cy = std::cos(k.kydy), sy = std::sin(k.kydy);
  const double vx = v.vx, vy = v.vy, ax = std::abs(vx), ay = std::abs(vy);
  auto E = [](cplx z) { return std::exp(z); };
  CMatrix A = CMatrix::Zero(3, 3);
  A(0, 0) = ((dx * cy - dx) * ay - I * dx * sy * vy + (dy * cx - dy) * ax - I * dy * sx * vx) / (dx * dy);
  A(0, 1) = -(I * sx * ax + (1.0 - cx) * vx) / (2.0 * dx);
  const double pp = (k.kydy + k.kxdx) / 2.0, pm = (k.kydy - k.kxdx) / 2.0;
  A(0, 2) = -((I * std::sin(pp) - I * std::sin(pm)) * ay + (std::cos(pm) - std::cos(pp)) * vy) / (2.0 * dx);
  A(1, 0) = (6.0 * I * sx * ax + (6.0 - 6.0 * cx) * vx) / dx;
  A(1, 1) = ((cy - 1.0) * ay - I * sy * vy + (-3.0 * cx - 3.0) * ax + 3.0 * I * sx * vx) / dx;
  A(1, 2) = 0.0;
  const cplx den = dy * dy * E((3.0 * I * k.kydy + I * k.kxdx) / 2.0) - dy * dy * E(-3.0 * I * k.kydy / 2.0);
  const cplx num = 3.0 * dx * E((3.0 * I * k.kydy + I * k.kxdx) / 2.0) * ay -
                   3.0 * dx * E((2.0 * I * k.kydy + I * k.kxdx) / 2.0) * ay -
                   3.0 * dx * E((I * k.kydy + I * k.kxdx) / 2.0) * ay + 3.0 * dx * E(I * k.kxdx / 2.0) * ay -
                   3.0 * dx * E((3.0 * I * k.kydy + I * k.kxdx) / 2.0) * vy +
                   9.0 * dx * E((2.0 * I * k.kydy + I * k.kxdx) / 2.0) * vy -
                   9.0 * dx * E((I * k.kydy + I * k.kxdx) / 2.0) * vy + 3.0 * dx * E(I * k.kxdx / 2.0) * vy;
  A(2, 0) = num / den;
  A(2, 1) = 0.0;
  A(2, 2) = -((3.0 * cy + 3.0) * ay - 3.0 * I * sy * vy + (1.0 - cx) * ax + I * sx * vx) / dy;
  return A;
}

struct AmplificationResult {
  CMatrix G;
  CVector eigenvalues;
  CMatrix eigenvectors;
  double spectral_radius = 0.0;
};

// G from the same stage recursion the solver uses, applied to matrices.
inline CMatrix amplification_matrix(const CMatrix& A, double dt, RKMethod method) {
  const CMatrix I = CMatrix::Identity(A.rows(), A.cols());
  return rk_step(I, [&](const CMatrix& U) -> CMatrix { return A * U; }, dt, method);
}

inline AmplificationResult amplification(const FourierOperator& op, double dt, RKMethod method,
                                         bool vectors = false) {
  if (!(dt >= 0.0)) throw ValidationError("amplification: dt must be non-negative");
  AmplificationResult r;
  r.G = amplification_matrix(op.A, dt, method);
  auto e = eigen_decompose(r.G, vectors);
  r.eigenvalues = e.values;
  r.eigenvectors = e.vectors;
  r.spectral_radius = r.eigenvalues.size() ? r.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

// Stability function R(z) evaluated by running the stage recursion on y' = λy.
inline cplx stability_function(cplx z, RKMethod method) {
  return rk_step(cplx(1.0), [z](cplx y) { return z * y; }, 1.0, method);
}

struct SweepOptions {
  int n_angles = 65;
  int n_k = 65;
  double k_extent = std::numbers::pi;  // sweep (kxΔx, kyΔy) over [−k_extent, k_extent]²
  double tolerance = 1e-4;
  double threshold = 1.0 + 1e-9;
};

inline std::vector<FourierMode> k_grid(const SweepOptions& o) {
  // A(−k) = conj(A(k)) and R has real coefficients, so half the grid suffices.
  std::vector<FourierMode> ks;
  for (int jy = 0; jy < o.n_k; ++jy)
    for (int jx = 0; jx < o.n_k; ++jx) {
      const double a = o.n_k == 1 ? 0.0 : -o.k_extent + 2.0 * o.k_extent * jx / (o.n_k - 1);
      const double b = o.n_k == 1 ? 0.0 : -o.k_extent + 2.0 * o.k_extent * jy / (o.n_k - 1);
      const int mx = o.n_k - 1 - jx, my = o.n_k - 1 - jy;  // mirror index of −k
      if (jy * o.n_k + jx < my * o.n_k + mx) continue;
      ks.push_back({a, b});
    }
  return ks;
}

// Eigenvalues of A for every grid wavenumber at velocity v (unit Δx = Δy).
inline std::vector<cplx> spectrum(const SchemeSpec& spec, const Velocity& v, const std::vector<FourierMode>& ks) {
  std::vector<cplx> lam;
  for (const auto& k : ks) {
    const auto op = assemble_A(spec, k, v, 1.0, 1.0);
    const auto e = eigen_decompose(op.A);
    for (Eigen::Index i = 0; i < e.values.size(); ++i) lam.push_back(e.values(i));
  }
  return lam;
}

inline double max_amplification(const std::vector<cplx>& lam, double C, RKMethod method) {
  double m = 0.0;
  for (const auto& l : lam) m = std::max(m, std::abs(stability_function(C * l, method)));
  return m;
}

struct MaxCflResult {
  double nu = 0.0;
  bool unstable = false;
  std::vector<double> angles;   // radians
  std::vector<double> per_angle;
};

inline MaxCflResult max_cfl(const SchemeSpec& spec, RKMethod method, const SweepOptions& o = {}) {
  spec.validate();
  const auto ks = k_grid(o);
  MaxCflResult res;
  res.angles.resize(o.n_angles);
  res.per_angle.assign(o.n_angles, 0.0);
  std::vector<char> bad(o.n_angles, 0);
  parallel_for(o.n_angles, [&](std::size_t ia) {
    const double th = o.n_angles == 1 ? 0.0 : (std::numbers::pi / 4.0) * ia / (o.n_angles - 1);
    res.angles[ia] = th;
    const auto lam = spectrum(spec, {std::cos(th), std::sin(th)}, ks);
    auto stable = [&](double C) { return max_amplification(lam, C, method) <= o.threshold; };
    if (!stable(1e-3)) {
      bad[ia] = 1;
      return;
    }
    double lo = 1e-3, hi = 1.0;
    while (stable(hi) && hi < 64.0) {
      lo = hi;
      hi *= 2.0;
    }
    while (hi - lo > o.tolerance) {
      const double mid = 0.5 * (lo + hi);
      (stable(mid) ? lo : hi) = mid;
    }
    res.per_angle[ia] = lo;
  });
  if (std::any_of(bad.begin(), bad.end(), [](char b) { return b != 0; })) {
    res.unstable = true;
    res.nu = 0.0;
    return res;
  }
  res.nu = *std::min_element(res.per_angle.begin(), res.per_angle.end());
  return res;
}

struct StabilityMapCell {
  double cx, cy, radius;
};

// Max spectral radius of G over the k-sweep at each (Cx, Cy); v points along (Cx, Cy).
inline std::vector<StabilityMapCell> stability_map(const SchemeSpec& spec, RKMethod method,
                                                   const std::vector<double>& cxs, const std::vector<double>& cys,
                                                   const SweepOptions& o = {}) {
  spec.validate();
  const auto ks = k_grid(o);
  std::vector<StabilityMapCell> cells(cxs.size() * cys.size());
  parallel_for(cells.size(), [&](std::size_t idx) {
    const double cx = cxs[idx % cxs.size()], cy = cys[idx / cxs.size()];
    const double C = std::hypot(cx, cy);
    const double rmax = C > 0.0 ? max_amplification(spectrum(spec, {cx / C, cy / C}, ks), C, method) : 1.0;
    cells[idx] = {cx, cy, rmax};
  });
  return cells;
}

// Edge-moment projection of ∇e^{i k·x} onto the reference edges (zone centred at 0).
inline CVector exact_gradient_mode(int N, const FourierMode& k, double dx, double dy) {
  const double kx = k.kxdx / dx, ky = k.kydy / dy;
  const cplx I(0.0, 1.0);
  const auto& q = gauss_rule(24);
  const auto cy = project_edge([&](double xi) { return I * ky * std::exp(I * (kx * dx / 2 + ky * xi * dy)); }, N, q);
  const auto cx = project_edge([&](double xi) { return I * kx * std::exp(I * (kx * xi * dx + ky * dy / 2)); }, N, q);
  CVector m(2 * (N + 1));
  for (int i = 0; i <= N; ++i) {
    m(i) = cy[i];
    m(N + 1 + i) = cx[i];
  }
  return m;
}

struct DispersionRow {
  double angle_deg = 0.0;  // wave vector relative to velocity
  double one_minus_amp = 0.0;
  double phase_err = 0.0;
  double wavelength = 0.0;  // in units of Δx
  double v_angle_deg = 0.0;
  bool degenerate = false;  // k ⊥ v: phase_err holds |arg g|
};

inline constexpr double kDominantOverlap = 0.9;

inline DispersionRow dispersion_point(const SchemeSpec& spec, RKMethod method, double v_angle_deg,
                                      double rel_angle_deg, double wavelength, double cfl) {
  const double deg = std::numbers::pi / 180.0;
  const double tv = v_angle_deg * deg, tk = tv + rel_angle_deg * deg;
  const double kmag = 2.0 * std::numbers::pi / wavelength;
  const FourierMode k{kmag * std::cos(tk), kmag * std::sin(tk)};
  const Velocity v{std::cos(tv), std::sin(tv)};
  const double dt = cfl;  // unit Δx, |v| = 1
  const auto op = assemble_A(spec, k, v, 1.0, 1.0);
  const auto amp = amplification(op, dt, method, true);
  const CVector target = op.B.adjoint() * exact_gradient_mode(spec.N, k, 1.0, 1.0);
  const double kv = k.kxdx * v.vx + k.kydy * v.vy;
  const cplx gex = std::exp(cplx(0.0, -kv * dt));
  const auto ne = amp.eigenvalues.size();
  std::vector<double> ov(ne);
  Eigen::Index best = 0;
  for (Eigen::Index i = 0; i < ne; ++i) {
    const auto vec = amp.eigenvectors.col(i);
    ov[i] = std::abs(vec.dot(target)) / (vec.norm() * target.norm());
    if (ov[i] > ov[best]) best = i;
  }
  // The exact mode splits over several eigenvectors near k ⊥ v; there the
  // eigenvalue closest to the exact one among the strong overlaps is taken.
  if (ov[best] < kDominantOverlap) {
    const double floor = 0.5 * ov[best];
    for (Eigen::Index i = 0; i < ne; ++i)
      if (ov[i] >= floor && std::abs(amp.eigenvalues(i) - gex) < std::abs(amp.eigenvalues(best) - gex)) best = i;
  }
  const cplx g = amp.eigenvalues(best);
  DispersionRow row;
  row.angle_deg = rel_angle_deg;
  row.one_minus_amp = 1.0 - std::abs(g);
  row.wavelength = wavelength;
  row.v_angle_deg = v_angle_deg;
  const double aex = std::arg(gex);
  if (std::abs(aex) < 1e-12) {
    row.degenerate = true;
    row.phase_err = std::abs(std::arg(g));
  } else {
    row.phase_err = std::abs(std::arg(g / gex)) / std::abs(aex);
  }
  return row;
}

// Relative angles −180..180 in 1° steps.
inline std::vector<DispersionRow> dispersion_sweep(const SchemeSpec& spec, RKMethod method, double v_angle_deg,
                                                   double wavelength, double cfl) {
  std::vector<DispersionRow> rows(361);
  parallel_for(rows.size(), [&](std::size_t i) {
    rows[i] = dispersion_point(spec, method, v_angle_deg, -180.0 + double(i), wavelength, cfl);
  });
  return rows;
}

}  // namespace curlkit
