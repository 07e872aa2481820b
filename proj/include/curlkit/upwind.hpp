#pragma once

#include <array>
#include <cmath>
#include <span>

#include "basis.hpp"
#include "reconstruction.hpp"

namespace curlkit {

struct Velocity {
  double vx = 0.0, vy = 0.0;
};

// Fixed-capacity modal vector; only the first p+1 entries are meaningful.
template <class S>
using EdgeCoeffs = std::array<S, kMaxDegree + 1>;

template <class S>
S upwind(double v, const S& from_minus, const S& from_plus) {
  if (v > 0.0) return from_minus;
  if (v < 0.0) return from_plus;
  return 0.5 * (from_minus + from_plus);
}

// Vertex at the top-right corner of zone (i,j). x-edges jx(i,j) and jx(i+1,j) meet
// there from the left and right; y-edges jy(i,j) and jy(i,j+1) from below and above.
template <class S>
S vertex_potential(std::span<const S> jx_left, std::span<const S> jx_right, std::span<const S> jy_below,
                   std::span<const S> jy_above, const Velocity& v) {
  const S jx = upwind(v.vx, eval_edge_poly(jx_left, 0.5), eval_edge_poly(jx_right, -0.5));
  const S jy = upwind(v.vy, eval_edge_poly(jy_below, 0.5), eval_edge_poly(jy_above, -0.5));
  return v.vx * jx + v.vy * jy;
}

namespace detail {

template <class S>
S row_dot(const std::vector<double>& mat, int row, int n, const std::array<S, kMaxTerms>& c) {
  S s{};
  const double* r = mat.data() + std::size_t(row) * n;
  for (int k = 0; k < n; ++k) s += r[k] * c[k];
  return s;
}

}  // namespace detail

// φ* at the p+2 Gauss nodes of a y-edge shared by zones `left` and `right`.
template <class S>
std::array<S, kMaxDegree + 2> y_edge_potential_profile(const ZoneReconstruction<S>& left,
                                                       const ZoneReconstruction<S>& right,
                                                       std::span<const S> jy_edge, const Velocity& v) {
  const auto& sys = trace_system(left.p);
  const auto& q = gauss_rule(left.p + 2);
  const int n = sys.nterms();
  std::array<S, kMaxDegree + 2> phi{};
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const int r = static_cast<int>(k);
    S side;
    if (v.vx > 0.0)
      side = detail::row_dot(sys.dX_plus, r, n, left.c);
    else if (v.vx < 0.0)
      side = detail::row_dot(sys.dX_minus, r, n, right.c);
    else
      side = 0.5 * (detail::row_dot(sys.dX_plus, r, n, left.c) + detail::row_dot(sys.dX_minus, r, n, right.c));
    phi[k] = v.vx * (side / left.dx) + v.vy * eval_edge_poly(jy_edge, q.nodes[k]);
  }
  return phi;
}

// φ* on an x-edge shared by zones `below` and `above`.
template <class S>
std::array<S, kMaxDegree + 2> x_edge_potential_profile(const ZoneReconstruction<S>& below,
                                                       const ZoneReconstruction<S>& above,
                                                       std::span<const S> jx_edge, const Velocity& v) {
  const auto& sys = trace_system(below.p);
  const auto& q = gauss_rule(below.p + 2);
  const int n = sys.nterms();
  std::array<S, kMaxDegree + 2> phi{};
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    const int r = static_cast<int>(k);
    S side;
    if (v.vy > 0.0)
      side = detail::row_dot(sys.dY_plus, r, n, below.c);
    else if (v.vy < 0.0)
      side = detail::row_dot(sys.dY_minus, r, n, above.c);
    else
      side = 0.5 * (detail::row_dot(sys.dY_plus, r, n, below.c) + detail::row_dot(sys.dY_minus, r, n, above.c));
    phi[k] = v.vx * eval_edge_poly(jx_edge, q.nodes[k]) + v.vy * (side / below.dy);
  }
  return phi;
}

// (⟨φ*⟩, ⟨ξφ*⟩, ⟨(ξ²−1/20)φ*⟩) as line averages, using the rule matching the node count.
template <class S>
std::array<S, 3> edge_body_integrals(std::span<const S> phi) {
  const auto& q = gauss_rule(static_cast<int>(phi.size()));
  std::array<S, 3> r{};
  for (std::size_t k = 0; k < phi.size(); ++k) {
    const double x = q.nodes[k], w = q.weights[k];
    r[0] += w * phi[k];
    r[1] += (w * x) * phi[k];
    r[2] += (w * (x * x - 0.05)) * phi[k];
  }
  return r;
}

}  // namespace curlkit
