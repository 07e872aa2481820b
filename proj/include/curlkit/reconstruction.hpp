#pragma once

#include <array>
#include <cmath>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "basis.hpp"
#include "errors.hpp"
#include "mesh.hpp"

namespace curlkit {

// Potential ψ = Σ c_ab X^a Y^b with X = x/Δx, Y = y/Δy measured from the zone centre.
// Terms with a ≥ 2 and b ≥ 2 span the bubble directions. They are left out of the
// trace solve, which leaves 4p+3 unknowns and a system of full column rank. At p = 3
// the X²Y² coefficient is needed for fourth order; it is carried as an extra last
// term whose value comes from outside the four edges (see volumetric_coefficient).
inline constexpr int kMaxTerms = 4 * kMaxDegree + 4;

struct PotentialTerm {
  int a, b;
};

namespace detail {

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int k = 0; k < n; ++k) r *= x;
  return r;
}

// modal coefficients (degree ≤ p) of ξ^n
inline std::vector<double> monomial_to_modal(int n, int p) {
  const auto& q = gauss_rule(8);
  std::vector<double> c(p + 1, 0.0);
  for (int m = 0; m <= p; ++m) {
    double s = 0.0;
    for (std::size_t k = 0; k < q.nodes.size(); ++k) s += q.weights[k] * ipow(q.nodes[k], n) * basis_value(m, q.nodes[k]);
    c[m] = s / kMass[m];
  }
  return c;
}

}  // namespace detail

struct TraceSystem {
  int p = 0;
  std::vector<PotentialTerm> terms;  // trace-solved terms, then X²Y² at p = 3
  int nsolved = 0;
  // pinv is terms × 4(p+1), row-major. Input blocks: right y-edge, left y-edge, top x-edge,
  // bottom x-edge, each scaled by the edge length (Δy for y-edges, Δx for x-edges).
  std::vector<double> pinv;
  // left null vector of the trace matrix: the single compatibility (circulation) functional
  std::vector<double> compat;
  int rows() const { return 4 * (p + 1); }
  int nterms() const { return static_cast<int>(terms.size()); }
  bool has_bubble() const { return nterms() > nsolved; }
  std::vector<double> bubble_trace;  // scaled traces of X²Y², p = 3 only
  // ∂ψ/∂X at X=±1/2 and ∂ψ/∂Y at Y=±1/2, sampled at the (p+2) edge Gauss nodes: nq × terms
  std::vector<double> dX_plus, dX_minus, dY_plus, dY_minus;
};

inline TraceSystem build_trace_system(int p) {
  TraceSystem s;
  s.p = p;
  for (int a = 0; a <= p + 1; ++a)
    for (int b = 0; b <= p + 1; ++b)
      if ((a || b) && std::min(a, b) <= 1) s.terms.push_back({a, b});
  s.nsolved = s.nterms();
  if (p == 3) s.terms.push_back({2, 2});

  const int n = s.nterms(), r = s.rows(), np = p + 1;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(r, n);
  for (int k = 0; k < n; ++k) {
    const auto [a, b] = s.terms[k];
    if (b >= 1) {
      const auto mm = detail::monomial_to_modal(b - 1, p);
      for (int m = 0; m <= p; ++m) {
        T(0 * np + m, k) += b * detail::ipow(0.5, a) * mm[m];
        T(1 * np + m, k) += b * detail::ipow(-0.5, a) * mm[m];
      }
    }
    if (a >= 1) {
      const auto mm = detail::monomial_to_modal(a - 1, p);
      for (int m = 0; m <= p; ++m) {
        T(2 * np + m, k) += a * detail::ipow(0.5, b) * mm[m];
        T(3 * np + m, k) += a * detail::ipow(-0.5, b) * mm[m];
      }
    }
  }
  if (s.has_bubble()) s.bubble_trace.assign(T.col(n - 1).data(), T.col(n - 1).data() + r);
  const int ns = s.nsolved;
  Eigen::MatrixXd Ts = T.leftCols(ns);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Ts, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(ns, r);
  for (int k = 0; k < sv.size(); ++k)
    if (sv(k) > 1e-12 * sv(0)) P += svd.matrixV().col(k) * svd.matrixU().col(k).transpose() / sv(k);
  s.pinv.resize(std::size_t(ns) * r);
  for (int i = 0; i < ns; ++i)
    for (int j = 0; j < r; ++j) s.pinv[std::size_t(i) * r + j] = P(i, j);
  Eigen::VectorXd w = svd.matrixU().col(r - 1);
  s.compat.assign(w.data(), w.data() + r);

  const auto& q = gauss_rule(p + 2);
  const int nq = static_cast<int>(q.nodes.size());
  for (auto* v : {&s.dX_plus, &s.dX_minus, &s.dY_plus, &s.dY_minus}) v->assign(std::size_t(nq) * n, 0.0);
  for (int iq = 0; iq < nq; ++iq) {
    const double t = q.nodes[iq];
    for (int k = 0; k < n; ++k) {
      const auto [a, b] = s.terms[k];
      if (a >= 1) {
        s.dX_plus[iq * n + k] = a * detail::ipow(0.5, a - 1) * detail::ipow(t, b);
        s.dX_minus[iq * n + k] = a * detail::ipow(-0.5, a - 1) * detail::ipow(t, b);
      }
      if (b >= 1) {
        s.dY_plus[iq * n + k] = b * detail::ipow(t, a) * detail::ipow(0.5, b - 1);
        s.dY_minus[iq * n + k] = b * detail::ipow(t, a) * detail::ipow(-0.5, b - 1);
      }
    }
  }
  return s;
}

inline const TraceSystem& trace_system(int p) {
  static const std::array<TraceSystem, kMaxDegree + 1> table = [] {
    std::array<TraceSystem, kMaxDegree + 1> t;
    for (int k = 0; k <= kMaxDegree; ++k) t[k] = build_trace_system(k);
    return t;
  }();
  if (p < 0 || p > kMaxDegree) throw ValidationError("trace_system: degree must be in 0..3");
  return table[p];
}

inline constexpr double kCirculationTolerance = 1e-10;

template <class S>
struct ZoneReconstruction {
  int p = 0;
  double dx = 1.0, dy = 1.0;
  std::array<S, kMaxTerms> c{};

  const TraceSystem& system() const { return trace_system(p); }

  // local coordinates X, Y ∈ [-1/2, 1/2]
  std::pair<S, S> gradient(double X, double Y) const {
    const auto& terms = system().terms;
    S jx{}, jy{};
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto [a, b] = terms[k];
      if (a >= 1) jx += c[k] * (a * detail::ipow(X, a - 1) * detail::ipow(Y, b));
      if (b >= 1) jy += c[k] * (b * detail::ipow(X, a) * detail::ipow(Y, b - 1));
    }
    return {jx / dx, jy / dy};
  }

  S potential(double X, double Y) const {
    const auto& terms = system().terms;
    S v{};
    for (std::size_t k = 0; k < terms.size(); ++k) v += c[k] * (detail::ipow(X, terms[k].a) * detail::ipow(Y, terms[k].b));
    return v;
  }

  // ∂Jy/∂x − ∂Jx/∂y, each differentiated from its own component polynomial
  S curl(double X, double Y) const {
    const auto& terms = system().terms;
    S dJy_dx{}, dJx_dy{};
    for (std::size_t k = 0; k < terms.size(); ++k) {
      const auto [a, b] = terms[k];
      if (a >= 1 && b >= 1) {
        dJy_dx += c[k] * (double(b) * a * detail::ipow(X, a - 1) * detail::ipow(Y, b - 1)) / dy / dx;
        dJx_dy += c[k] * (double(a) * b * detail::ipow(X, a - 1) * detail::ipow(Y, b - 1)) / dx / dy;
      }
    }
    return dJy_dx - dJx_dy;
  }
};

// X²Y² coefficient from the slopes of the x-edges at Y = 3/2, 1/2, -1/2, -3/2 and of the
// y-edges at X = 3/2, 1/2, -1/2, -3/2 (second differences of the b1 modes, averaged).
template <class S>
S volumetric_coefficient(std::span<const S> jx_up, std::span<const S> jx_top, std::span<const S> jx_bottom,
                         std::span<const S> jx_down, std::span<const S> jy_right2, std::span<const S> jy_right,
                         std::span<const S> jy_left, std::span<const S> jy_left2, double dx, double dy) {
  const S sx = dx * (jx_up[1] + jx_down[1] - jx_top[1] - jx_bottom[1]);
  const S sy = dy * (jy_right2[1] + jy_left2[1] - jy_right[1] - jy_left[1]);
  return (sx + sy) / 16.0;
}

// Edge inputs are modal vectors of degree p (right, left: Jy; top, bottom: Jx).
// `bubble` is the X²Y² coefficient, used only at p = 3. The circulation check is
// relative to the larger of the zone's own scaled edge data and `scale`.
template <class S>
ZoneReconstruction<S> reconstruct_zone(std::span<const S> right, std::span<const S> left, std::span<const S> top,
                                       std::span<const S> bottom, int p, double dx, double dy, S bubble = S{},
                                       double scale = 0.0) {
  const auto& sys = trace_system(p);
  const int np = p + 1, r = sys.rows(), n = sys.nsolved;
  std::array<S, 4 * (kMaxDegree + 1)> e{};
  for (int m = 0; m < np; ++m) {
    e[m] = dy * right[m];
    e[np + m] = dy * left[m];
    e[2 * np + m] = dx * top[m];
    e[3 * np + m] = dx * bottom[m];
  }
  S compat{};
  double emax = scale;
  for (int k = 0; k < r; ++k) {
    compat += sys.compat[k] * e[k];
    emax = std::max(emax, double(std::abs(e[k])));
  }
  if (std::abs(compat) > kCirculationTolerance * emax)
    throw ConstraintViolation("reconstruct_zone: edge data has nonzero circulation");
  if (sys.has_bubble())
    for (int k = 0; k < r; ++k) e[k] -= sys.bubble_trace[k] * bubble;
  ZoneReconstruction<S> z;
  z.p = p;
  z.dx = dx;
  z.dy = dy;
  if (sys.has_bubble()) z.c[n] = bubble;
  for (int i = 0; i < n; ++i) {
    S s{};
    const double* row = sys.pinv.data() + std::size_t(i) * r;
    for (int k = 0; k < r; ++k) s += row[k] * e[k];
    z.c[i] = s;
  }
  return z;
}

// Completion of unevolved moments along an edge's own grid line.
// For N = 0 the inputs are the edge means at `offsets`; for N = 1 they are
// (own mean, own slope, mean at -1, mean at +1).
struct CompletionStencil {
  int N = 0, M = 0;
  std::vector<int> offsets;
  std::vector<double> weights;  // (M+1) × inputs, row-major
  int inputs() const { return static_cast<int>(N == 0 ? offsets.size() : 4); }
  int reach() const {
    int r = 0;
    for (int o : offsets) r = std::max(r, std::abs(o));
    return r;
  }
};

inline CompletionStencil build_completion(int N, int M) {
  if (N < 0 || N > 1 || M <= N || M > kMaxDegree) throw ValidationError("completion: need N in {0,1} and N < M <= 3");
  CompletionStencil s;
  s.N = N;
  s.M = M;
  auto cell_avg = [](int j, int n) {  // average of ξ^n over [j-1/2, j+1/2]
    return (detail::ipow(j + 0.5, n + 1) - detail::ipow(j - 0.5, n + 1)) / (n + 1);
  };
  Eigen::MatrixXd A;
  if (N == 0) {
    s.offsets = (M == 3) ? std::vector<int>{-2, -1, 0, 1, 2} : std::vector<int>{-1, 0, 1};
    const int k = static_cast<int>(s.offsets.size());
    A.resize(k, k);
    for (int r = 0; r < k; ++r)
      for (int n = 0; n < k; ++n) A(r, n) = cell_avg(s.offsets[r], n);
  } else {
    s.offsets = {-1, 1};
    A.resize(4, 4);
    const auto slope_row = [&](int n) { return detail::monomial_to_modal(n, 1)[1]; };
    for (int n = 0; n < 4; ++n) {
      A(0, n) = cell_avg(0, n);
      A(1, n) = slope_row(n);
      A(2, n) = cell_avg(-1, n);
      A(3, n) = cell_avg(1, n);
    }
  }
  const int deg = static_cast<int>(A.cols());
  Eigen::MatrixXd proj(M + 1, deg);
  for (int n = 0; n < deg; ++n) {
    const auto mm = detail::monomial_to_modal(n, M);
    for (int m = 0; m <= M; ++m) proj(m, n) = mm[m];
  }
  Eigen::MatrixXd W = proj * A.inverse();
  if (N == 0 && M == 3) {
    // curvature from the centred three-point quadratic; slope and cubic from the quartic
    Eigen::MatrixXd A3(3, 3), P3(M + 1, 3);
    for (int r = 0; r < 3; ++r)
      for (int n = 0; n < 3; ++n) A3(r, n) = cell_avg(r - 1, n);
    for (int n = 0; n < 3; ++n) {
      const auto mm = detail::monomial_to_modal(n, M);
      for (int m = 0; m <= M; ++m) P3(m, n) = mm[m];
    }
    W.row(2).setZero();
    W.block(2, 1, 1, 3) = (P3 * A3.inverse()).row(2);
  }
  s.weights.resize(std::size_t(M + 1) * deg);
  for (int m = 0; m <= M; ++m)
    for (int c = 0; c < deg; ++c) s.weights[std::size_t(m) * deg + c] = W(m, c);
  return s;
}

inline const CompletionStencil& completion_stencil(int N, int M) {
  static const auto table = [] {
    std::array<std::array<CompletionStencil, kMaxDegree + 1>, 2> t;
    for (int n = 0; n <= 1; ++n)
      for (int m = n + 1; m <= kMaxDegree; ++m) t[n][m] = build_completion(n, m);
    return t;
  }();
  if (N < 0 || N > 1 || M <= N || M > kMaxDegree) throw ValidationError("completion: need N in {0,1} and N < M <= 3");
  return table[N][M];
}

// line(o) returns the evolved modal vector (length N+1) at line offset o.
// Writes M+1 coefficients; evolved moments are copied through unchanged.
template <class S, class Line>
void complete_line(const CompletionStencil& st, Line&& line, std::span<S> out) {
  const int k = st.inputs();
  std::array<S, 5> in{};
  if (st.N == 0) {
    for (int r = 0; r < k; ++r) in[r] = line(st.offsets[r])[0];
  } else {
    auto own = line(0);
    in[0] = own[0];
    in[1] = own[1];
    in[2] = line(-1)[0];
    in[3] = line(1)[0];
  }
  for (int m = 0; m <= st.M; ++m) {
    S v{};
    const double* w = st.weights.data() + std::size_t(m) * k;
    for (int c = 0; c < k; ++c) v += w[c] * in[c];
    out[m] = v;
  }
  auto own = line(0);
  for (int m = 0; m <= st.N; ++m) out[m] = own[m];
}

template <class S>
EdgeMomentField<S> complete_moments(const EdgeMomentField<S>& f, int M) {
  const int N = f.degree();
  if (M == N) return f;
  const auto& st = completion_stencil(N, M);
  EdgeMomentField<S> g(f.mesh(), M);
  for (int j = 0; j < f.mesh().ny; ++j)
    for (int i = 0; i < f.mesh().nx; ++i) {
      complete_line<S>(st, [&](int o) { return f.jy(i, j + o); }, g.jy(i, j));
      complete_line<S>(st, [&](int o) { return f.jx(i + o, j); }, g.jx(i, j));
    }
  return g;
}

}  // namespace curlkit
