#include <gtest/gtest.h>

#include <curlkit/semidiscrete.hpp>

#include <cmath>
#include <random>
#include <vector>

using namespace curlkit;

namespace {

std::vector<SchemeSpec> all_schemes() {
  std::vector<SchemeSpec> s;
  for (int p = 0; p <= 3; ++p) s.push_back(SchemeSpec::dg(p));
  for (int m = 1; m <= 3; ++m) s.push_back(SchemeSpec::pnpm(0, m));
  for (int m = 2; m <= 3; ++m) s.push_back(SchemeSpec::pnpm(1, m));
  return s;
}

// Random curl-free field: gradient of a random periodic potential.
RealField random_field(const MeshSpec& m, int N, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double W = m.width(), H = m.height();
  std::vector<std::array<double, 4>> modes;
  for (int k = 0; k < 6; ++k) modes.push_back({double(int(4 * u(rng))), double(int(4 * u(rng))), u(rng), u(rng)});
  GradientFunction g{[=](double x, double y) {
                       double s = 0.0;
                       for (auto [a, b, c, ph] : modes)
                         s += -c * (2 * M_PI * a / W) * std::sin(2 * M_PI * (a * x / W + b * y / H) + ph);
                       return s;
                     },
                     [=](double x, double y) {
                       double s = 0.0;
                       for (auto [a, b, c, ph] : modes)
                         s += -c * (2 * M_PI * b / H) * std::sin(2 * M_PI * (a * x / W + b * y / H) + ph);
                       return s;
                     }};
  return init_from_gradient(g, m, N);
}

double max_diff(const RealField& a, const RealField& b) {
  double d = 0.0;
  for (std::size_t k = 0; k < a.data().size(); ++k) d = std::max(d, std::abs(a.data()[k] - b.data()[k]));
  return d;
}

const MeshSpec kMesh{10, 10, 0.13, 0.17, -0.4, 0.2};

}  // namespace

TEST(Rhs, IsLinear) {
  for (const auto& s : all_schemes()) {
    const Discretization d(s, {0.8, -0.45}, kMesh.dx, kMesh.dy);
    const auto a = random_field(kMesh, s.N, 1), b = random_field(kMesh, s.N, 2);
    const auto lhs = rhs(d, 2.5 * a + (-1.5) * b);
    const auto ref = 2.5 * rhs(d, a) + (-1.5) * rhs(d, b);
    EXPECT_LT(max_diff(lhs, ref), 1e-11 * ref.max_abs()) << s.name();
  }
}

TEST(Rhs, UniformFieldIsSteady) {
  for (const auto& s : all_schemes()) {
    const Discretization d(s, {-0.7, 1.1}, kMesh.dx, kMesh.dy);
    RealField f(kMesh, s.N);
    for (int j = 0; j < kMesh.ny; ++j)
      for (int i = 0; i < kMesh.nx; ++i) {
        f.jy(i, j)[0] = 0.6;
        f.jx(i, j)[0] = -1.3;
      }
    // roundoff on the scale |v| |J| / Δx
    EXPECT_LT(rhs(d, f).max_abs(), 1e-12 * 1.3 * 1.3 / kMesh.dx) << s.name();
  }
}

TEST(Rhs, ConservesCirculation) {
  for (const auto& s : all_schemes()) {
    const Discretization d(s, {0.3, 0.9}, kMesh.dx, kMesh.dy);
    const auto r = rhs(d, random_field(kMesh, s.N, 4));
    EXPECT_LT(max_abs_circulation(r), 1e-12 * r.max_abs() / kMesh.dx) << s.name();
  }
}

TEST(Rhs, TranslationEquivariant) {
  for (const auto& s : all_schemes()) {
    const Discretization d(s, {1.0, -0.6}, kMesh.dx, kMesh.dy);
    const auto f = random_field(kMesh, s.N, 6);
    RealField g(kMesh, s.N);
    const int si = 3, sj = -2;
    for (int j = 0; j < kMesh.ny; ++j)
      for (int i = 0; i < kMesh.nx; ++i)
        for (int m = 0; m <= s.N; ++m) {
          g.jy(i + si, j + sj)[m] = f.jy(i, j)[m];
          g.jx(i + si, j + sj)[m] = f.jx(i, j)[m];
        }
    const auto rf = rhs(d, f), rg = rhs(d, g);
    double diff = 0.0;
    for (int j = 0; j < kMesh.ny; ++j)
      for (int i = 0; i < kMesh.nx; ++i)
        for (int m = 0; m <= s.N; ++m) {
          diff = std::max(diff, std::abs(rg.jy(i + si, j + sj)[m] - rf.jy(i, j)[m]));
          diff = std::max(diff, std::abs(rg.jx(i + si, j + sj)[m] - rf.jx(i, j)[m]));
        }
    EXPECT_LT(diff, 1e-13 * rf.max_abs()) << s.name();
  }
}

TEST(Rhs, MirrorSymmetricUnderAxisSwap) {
  const MeshSpec sq{8, 8, 0.2, 0.2, 0.0, 0.0};
  for (const auto& s : all_schemes()) {
    const auto f = random_field(sq, s.N, 8);
    RealField g(sq, s.N);
    for (int j = 0; j < sq.ny; ++j)
      for (int i = 0; i < sq.nx; ++i)
        for (int m = 0; m <= s.N; ++m) {
          g.jy(j, i)[m] = f.jx(i, j)[m];
          g.jx(j, i)[m] = f.jy(i, j)[m];
        }
    const auto rf = rhs(Discretization(s, {0.4, -1.2}, sq.dx, sq.dy), f);
    const auto rg = rhs(Discretization(s, {-1.2, 0.4}, sq.dx, sq.dy), g);
    double diff = 0.0;
    for (int j = 0; j < sq.ny; ++j)
      for (int i = 0; i < sq.nx; ++i)
        for (int m = 0; m <= s.N; ++m) {
          diff = std::max(diff, std::abs(rg.jy(j, i)[m] - rf.jx(i, j)[m]));
          diff = std::max(diff, std::abs(rg.jx(j, i)[m] - rf.jy(i, j)[m]));
        }
    EXPECT_LT(diff, 1e-12 * rf.max_abs()) << s.name();
  }
}

// Lowest order: edge means updated by differences of upwinded vertex fluxes.
TEST(Rhs, LowestOrderMatchesDirectUpdate) {
  for (Velocity v : {Velocity{0.7, 1.2}, Velocity{-0.5, 0.9}, Velocity{1.1, -0.3}, Velocity{-0.8, -0.6},
                     Velocity{0.0, 1.0}}) {
    const auto f = random_field(kMesh, 0, 12);
    const auto r = rhs(Discretization(SchemeSpec::dg(0, RKMethod::RK1), v, kMesh.dx, kMesh.dy), f);
    auto pick = [](double vel, double minus, double plus) {
      return vel > 0 ? minus : vel < 0 ? plus : 0.5 * (minus + plus);
    };
    // φ at the top-right corner of zone (i,j)
    auto phi = [&](int i, int j) {
      return v.vx * pick(v.vx, f.jx(i, j)[0], f.jx(i + 1, j)[0]) + v.vy * pick(v.vy, f.jy(i, j)[0], f.jy(i, j + 1)[0]);
    };
    for (int j = 0; j < kMesh.ny; ++j)
      for (int i = 0; i < kMesh.nx; ++i) {
        EXPECT_NEAR(r.jy(i, j)[0], -(phi(i, j) - phi(i, j - 1)) / kMesh.dy, 1e-12);
        EXPECT_NEAR(r.jx(i, j)[0], -(phi(i, j) - phi(i - 1, j)) / kMesh.dx, 1e-12);
      }
  }
}

TEST(Rhs, ReferenceStencilAgreesWithMeshSweep) {
  for (const auto& s : all_schemes()) {
    const Discretization d(s, {0.9, 0.35}, kMesh.dx, kMesh.dy);
    const auto f = random_field(kMesh, s.N, 21);
    const auto r = rhs(d, f);
    for (auto [i0, j0] : {std::pair{0, 0}, std::pair{4, 7}}) {
      struct Acc {
        const RealField& f;
        int i0, j0;
        EdgeCoeffs<double> jy(int i, int j) const { return load(f.jy(i0 + i, j0 + j)); }
        EdgeCoeffs<double> jx(int i, int j) const { return load(f.jx(i0 + i, j0 + j)); }
      } acc{f, i0, j0};
      const auto [ry, rx] = reference_rhs<double>(d, acc);
      for (int m = 0; m <= s.N; ++m) {
        EXPECT_NEAR(ry[m], r.jy(i0, j0)[m], 1e-12 * r.max_abs()) << s.name();
        EXPECT_NEAR(rx[m], r.jx(i0, j0)[m], 1e-12 * r.max_abs()) << s.name();
      }
    }
  }
}

TEST(Rhs, RejectsMismatchedDegree) {
  const Discretization d(SchemeSpec::dg(2, RKMethod::SSPRK3), {1.0, 0.0}, kMesh.dx, kMesh.dy);
  EXPECT_THROW(rhs(d, RealField(kMesh, 1)), ValidationError);
}

TEST(Scheme, Validation) {
  EXPECT_THROW(SchemeSpec::pnpm(2, 3).validate(), ValidationError);
  EXPECT_THROW(SchemeSpec::pnpm(1, 0).validate(), ValidationError);
  EXPECT_THROW(SchemeSpec::dg(4).validate(), ValidationError);
  EXPECT_NO_THROW(SchemeSpec::pnpm(0, 3).validate());
  EXPECT_EQ(SchemeSpec::pnpm(1, 3).name(), "P1P3");
}

TEST(Energy, PositiveAndQuadratic) {
  const auto s = SchemeSpec::dg(2, RKMethod::SSPRK3);
  const Discretization d(s, {1.0, 1.0}, kMesh.dx, kMesh.dy);
  const auto f = random_field(kMesh, 2, 30);
  const double e = total_quadratic_energy(d, f);
  EXPECT_GT(e, 0.0);
  EXPECT_NEAR(total_quadratic_energy(d, 3.0 * f), 9.0 * e, 1e-12 * e);
}
