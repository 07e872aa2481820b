#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "errors.hpp"

namespace curlkit {

inline constexpr int kMaxDegree = 3;

// ∫ b_m² dξ over [-1/2, 1/2]
inline constexpr std::array<double, 4> kMass = {1.0, 1.0 / 12.0, 1.0 / 180.0, 1.0 / 2800.0};

inline constexpr double basis_value(int m, double xi) {
  switch (m) {
    case 0: return 1.0;
    case 1: return xi;
    case 2: return xi * xi - 1.0 / 12.0;
    case 3: return xi * xi * xi - 0.15 * xi;
  }
  return 0.0;
}

inline constexpr double basis_derivative(int m, double xi) {
  switch (m) {
    case 1: return 1.0;
    case 2: return 2.0 * xi;
    case 3: return 3.0 * xi * xi - 0.15;
  }
  return 0.0;
}

struct GaussRule {
  std::vector<double> nodes;    // on [-1/2, 1/2], ascending
  std::vector<double> weights;  // sum to 1
};

namespace detail {

inline GaussRule build_gauss(int n) {
  GaussRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = -std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
    r.nodes[i] = 0.5 * x;
    r.weights[i] = 1.0 / ((1.0 - x * x) * dp * dp);  // half of the [-1,1] weight
  }
  return r;
}

}  // namespace detail

inline constexpr int kMaxGaussPoints = 64;

// n-point Gauss–Legendre on [-1/2, 1/2]
inline const GaussRule& gauss_rule(int n) {
  static const std::vector<GaussRule> table = [] {
    std::vector<GaussRule> t(kMaxGaussPoints + 1);
    for (int k = 1; k <= kMaxGaussPoints; ++k) t[k] = detail::build_gauss(k);
    return t;
  }();
  if (n < 1 || n > kMaxGaussPoints) throw ValidationError("gauss_rule: unsupported point count");
  return table[n];
}

struct EdgeBasis {
  int degree = 0;

  explicit EdgeBasis(int p) : degree(p) {
    if (p < 0 || p > kMaxDegree) throw ValidationError("EdgeBasis: degree must be in 0..3");
  }
  int size() const { return degree + 1; }
  const GaussRule& quadrature() const { return gauss_rule(degree + 2); }
};

template <class S>
S eval_edge_poly(std::span<const S> coeffs, double xi) {
  S s{};
  for (std::size_t m = 0; m < coeffs.size(); ++m) s += coeffs[m] * basis_value(static_cast<int>(m), xi);
  return s;
}

template <class S>
S eval_edge_slope(std::span<const S> coeffs, double xi) {
  S s{};
  for (std::size_t m = 1; m < coeffs.size(); ++m) s += coeffs[m] * basis_derivative(static_cast<int>(m), xi);
  return s;
}

// L2 projection onto b_0..b_p using the basis' own (p+2)-point rule.
template <class F>
auto project_edge(F&& f, const EdgeBasis& basis) {
  using S = decltype(f(0.0));
  const auto& q = basis.quadrature();
  std::vector<S> c(basis.size(), S{});
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    S fx = f(q.nodes[k]);
    for (int m = 0; m <= basis.degree; ++m) c[m] += q.weights[k] * fx * basis_value(m, q.nodes[k]);
  }
  for (int m = 0; m <= basis.degree; ++m) c[m] /= kMass[m];
  return c;
}

// Same with an explicit rule; used where the integrand is not polynomial.
template <class F>
auto project_edge(F&& f, int p, const GaussRule& q) {
  using S = decltype(f(0.0));
  std::vector<S> c(p + 1, S{});
  for (std::size_t k = 0; k < q.nodes.size(); ++k) {
    S fx = f(q.nodes[k]);
    for (int m = 0; m <= p; ++m) c[m] += q.weights[k] * fx * basis_value(m, q.nodes[k]);
  }
  for (int m = 0; m <= p; ++m) c[m] /= kMass[m];
  return c;
}

}  // namespace curlkit
