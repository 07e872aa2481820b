#include <gtest/gtest.h>

#include <curlkit/reconstruction.hpp>
#include <curlkit/semidiscrete.hpp>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace curlkit;

namespace {

struct EdgeSet {
  std::vector<double> right, left, top, bottom;
};

// Edge moments of ∇ψ on the zone centred at (xc, yc).
EdgeSet edges_of(const oracle::Poly2& psi, int p, double xc, double yc, double dx, double dy) {
  EdgeSet e;
  e.right = oracle::modes([&](double s) { return psi.dy(xc + dx / 2, yc + s * dy); }, p);
  e.left = oracle::modes([&](double s) { return psi.dy(xc - dx / 2, yc + s * dy); }, p);
  e.top = oracle::modes([&](double s) { return psi.dx(xc + s * dx, yc + dy / 2); }, p);
  e.bottom = oracle::modes([&](double s) { return psi.dx(xc + s * dx, yc - dy / 2); }, p);
  return e;
}

ZoneReconstruction<double> rec(const EdgeSet& e, int p, double dx, double dy, double bubble = 0.0) {
  return reconstruct_zone<double>(e.right, e.left, e.top, e.bottom, p, dx, dy, bubble);
}

oracle::Poly2 all_monomials(int max_degree, std::mt19937& rng, bool skip_x2y2 = false) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  oracle::Poly2 psi;
  for (int a = 0; a <= max_degree; ++a)
    for (int b = 0; a + b <= max_degree; ++b) {
      if (skip_x2y2 && a == 2 && b == 2) continue;
      psi.terms.push_back({u(rng), double(a), double(b)});
    }
  return psi;
}

void expect_gradient(const ZoneReconstruction<double>& z, const oracle::Poly2& psi, double xc, double yc, double tol) {
  for (double X : {-0.5, -0.2, 0.1, 0.45})
    for (double Y : {-0.5, -0.35, 0.0, 0.3}) {
      const auto [jx, jy] = z.gradient(X, Y);
      EXPECT_NEAR(jx, psi.dx(xc + X * z.dx, yc + Y * z.dy), tol) << X << "," << Y;
      EXPECT_NEAR(jy, psi.dy(xc + X * z.dx, yc + Y * z.dy), tol) << X << "," << Y;
    }
}

}  // namespace

TEST(Reconstruction, ReproducesPolynomialGradients) {
  std::mt19937 rng(7);
  const double dx = 0.7, dy = 1.3, xc = 0.2, yc = -0.4;
  for (int p = 0; p <= 2; ++p) {
    const auto psi = all_monomials(p + 1, rng);
    expect_gradient(rec(edges_of(psi, p, xc, yc, dx, dy), p, dx, dy), psi, xc, yc, 1e-11);
  }
  // degree 4 at p = 3: everything except X²Y² comes from the own edges
  const auto psi = all_monomials(4, rng, true);
  expect_gradient(rec(edges_of(psi, 3, xc, yc, dx, dy), 3, dx, dy), psi, xc, yc, 1e-10);
}

TEST(Reconstruction, BubbleTermIsInvisibleToOwnEdgesButCarried) {
  // ψ = x²y² in zone coordinates; its traces equal those of a bubble-free potential
  const double dx = 1.0, dy = 1.0;
  oracle::Poly2 psi{{{1.0, 2.0, 2.0}}};
  const auto e = edges_of(psi, 3, 0.0, 0.0, dx, dy);
  expect_gradient(rec(e, 3, dx, dy, 1.0), psi, 0.0, 0.0, 1e-11);
  const auto z0 = rec(e, 3, dx, dy, 0.0);
  const auto [jx, jy] = z0.gradient(0.3, 0.4);
  EXPECT_GT(std::abs(jx - psi.dx(0.3, 0.4)) + std::abs(jy - psi.dy(0.3, 0.4)), 1e-3);
}

TEST(Reconstruction, VolumetricTermFromNeighboursReproducesQuartics) {
  std::mt19937 rng(11);
  const auto psi = all_monomials(4, rng);
  const double dx = 0.6, dy = 0.9;
  const Discretization d(SchemeSpec::dg(3, RKMethod::SSPRK54), {1.0, 1.0}, dx, dy);
  auto cjy = [&](int i, int j) {
    EdgeCoeffs<double> c{};
    const auto m = oracle::modes([&](double s) { return psi.dy((i + 1) * dx, (j + 0.5 + s) * dy); }, 3);
    std::copy(m.begin(), m.end(), c.begin());
    return c;
  };
  auto cjx = [&](int i, int j) {
    EdgeCoeffs<double> c{};
    const auto m = oracle::modes([&](double s) { return psi.dx((i + 0.5 + s) * dx, (j + 1) * dy); }, 3);
    std::copy(m.begin(), m.end(), c.begin());
    return c;
  };
  const auto z = d.zone<double>(cjy, cjx, 1, -2);
  expect_gradient(z, psi, 1.5 * dx, -1.5 * dy, 1e-10);
}

TEST(Reconstruction, TracesMatchEdgeData) {
  std::mt19937 rng(3);
  std::normal_distribution<double> n01;
  for (int p = 0; p <= kMaxDegree; ++p) {
    const double dx = 0.8, dy = 1.7;
    EdgeSet e;
    for (auto* v : {&e.right, &e.left, &e.top, &e.bottom}) {
      v->resize(p + 1);
      for (auto& x : *v) x = n01(rng);
    }
    // remove the circulation through the right edge mean
    e.right[0] = e.left[0] + (e.top[0] - e.bottom[0]) * dx / dy;
    const auto z = rec(e, p, dx, dy, p == 3 ? 0.37 : 0.0);
    const auto r = oracle::modes([&](double s) { return z.gradient(0.5, s).second; }, p);
    const auto l = oracle::modes([&](double s) { return z.gradient(-0.5, s).second; }, p);
    const auto t = oracle::modes([&](double s) { return z.gradient(s, 0.5).first; }, p);
    const auto b = oracle::modes([&](double s) { return z.gradient(s, -0.5).first; }, p);
    for (int m = 0; m <= p; ++m) {
      EXPECT_NEAR(r[m], e.right[m], 1e-11) << "p=" << p << " m=" << m;
      EXPECT_NEAR(l[m], e.left[m], 1e-11);
      EXPECT_NEAR(t[m], e.top[m], 1e-11);
      EXPECT_NEAR(b[m], e.bottom[m], 1e-11);
    }
    for (double X : {-0.4, 0.0, 0.3})
      for (double Y : {-0.2, 0.25}) EXPECT_NEAR(z.curl(X, Y), 0.0, 1e-11);
  }
}

TEST(Reconstruction, RejectsCirculation) {
  for (int p = 0; p <= kMaxDegree; ++p) {
    std::vector<double> r(p + 1, 0.0), l(p + 1, 0.0), t(p + 1, 0.0), b(p + 1, 0.0);
    r[0] = 1.0;
    EXPECT_THROW(reconstruct_zone<double>(r, l, t, b, p, 1.0, 1.0), ConstraintViolation);
  }
}

TEST(Reconstruction, CompatibilityFunctionalIsTheCirculation) {
  for (int p = 0; p <= kMaxDegree; ++p) {
    const auto& s = trace_system(p);
    const int np = p + 1;
    // blocks: right, left (Jy·Δy), top, bottom (Jx·Δx); circulation ∝ R0 − L0 − T0 + B0
    const double ref = s.compat[0];
    EXPECT_GT(std::abs(ref), 0.1);
    EXPECT_NEAR(s.compat[np], -ref, 1e-12);
    EXPECT_NEAR(s.compat[2 * np], -ref, 1e-12);
    EXPECT_NEAR(s.compat[3 * np], ref, 1e-12);
    for (int blk = 0; blk < 4; ++blk)
      for (int m = 1; m <= p; ++m) EXPECT_NEAR(s.compat[blk * np + m], 0.0, 1e-12);
    EXPECT_EQ(s.nsolved, 4 * p + 3);
  }
}

namespace {

// Cell averages of f over [o − 1/2, o + 1/2] and modes of f on the centre cell.
double cell_average(const std::function<double(double)>& f, int o) { return oracle::integrate(f, o - 0.5, o + 0.5); }

}  // namespace

TEST(Completion, MeanOnlyStencilsReproducePolynomials) {
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int M = 1; M <= 3; ++M) {
    const int exact_degree = M == 3 ? 3 : 2;
    std::vector<double> a(exact_degree + 1);
    for (auto& x : a) x = u(rng);
    auto f = [&](double x) {
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * std::pow(x, double(k));
      return s;
    };
    const auto& st = completion_stencil(0, M);
    std::vector<double> out(M + 1);
    complete_line<double>(st, [&](int o) { return std::vector<double>{cell_average(f, o)}; }, std::span<double>(out));
    const auto ref = oracle::modes(f, M);
    for (int m = 0; m <= M; ++m) EXPECT_NEAR(out[m], ref[m], 1e-12) << "M=" << M << " m=" << m;
  }
}

TEST(Completion, MeanAndSlopeStencilsReproduceCubics) {
  auto f = [](double x) { return 0.3 - 1.2 * x + 0.8 * x * x + 0.45 * x * x * x; };
  for (int M = 2; M <= 3; ++M) {
    const auto& st = completion_stencil(1, M);
    std::vector<double> out(M + 1);
    complete_line<double>(
        st,
        [&](int o) {
          auto c = oracle::modes([&](double s) { return f(o + s); }, 1);
          return c;
        },
        std::span<double>(out));
    const auto ref = oracle::modes(f, M);
    for (int m = 0; m <= M; ++m) EXPECT_NEAR(out[m], ref[m], 1e-12) << "M=" << M << " m=" << m;
  }
}

TEST(Completion, KeepsEvolvedMoments) {
  const auto& st = completion_stencil(1, 3);
  std::vector<double> out(4);
  complete_line<double>(st, [](int o) { return std::vector<double>{1.0 + o, 0.25 * o - 0.5}; }, std::span<double>(out));
  EXPECT_DOUBLE_EQ(out[0], 1.0);
  EXPECT_DOUBLE_EQ(out[1], -0.5);
  EXPECT_THROW(completion_stencil(2, 3), ValidationError);
}
