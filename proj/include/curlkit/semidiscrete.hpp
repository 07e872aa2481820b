#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <string>
#include <vector>

#include "basis.hpp"
#include "errors.hpp"
#include "mesh.hpp"
#include "reconstruction.hpp"
#include "timeint.hpp"
#include "upwind.hpp"

namespace curlkit {

enum class Family { DG, PNPM };

struct SchemeSpec {
  Family family = Family::DG;
  int N = 1;  // evolved degree
  int M = 1;  // reconstructed degree
  RKMethod rk = RKMethod::SSPRK2;
  double cfl_fraction = 0.95;
  bool volumetric = true;  // M = 3: X²Y² term from neighbouring edge slopes (false: zero)

  static SchemeSpec dg(int p, RKMethod rk = RKMethod::SSPRK2) { return {Family::DG, p, p, rk}; }
  static SchemeSpec pnpm(int n, int m, RKMethod rk = RKMethod::SSPRK2) {
    return {n == m ? Family::DG : Family::PNPM, n, m, rk};
  }

  void validate() const {
    if (N < 0 || N > kMaxDegree || M < N || M > kMaxDegree) throw ValidationError("SchemeSpec: need 0 <= N <= M <= 3");
    if (family == Family::DG && N != M) throw ValidationError("SchemeSpec: DG requires N == M");
    if (family == Family::PNPM && N > 1 && N != M) throw ValidationError("SchemeSpec: completion needs N in {0,1}");
    if (!(cfl_fraction > 0.0) || cfl_fraction > 1.0) throw ValidationError("SchemeSpec: CFL fraction must be in (0,1]");
  }
  std::string name() const { return "P" + std::to_string(N) + "P" + std::to_string(M); }
};

// The operator pieces shared by the mesh solver and the Fourier analysis.
// All edge inputs here are already completed to degree M.
struct Discretization {
  SchemeSpec spec;
  Velocity v;
  double dx = 1.0, dy = 1.0;

  Discretization(const SchemeSpec& s, const Velocity& vel, double dx_, double dy_)
      : spec(s), v(vel), dx(dx_), dy(dy_) {
    spec.validate();
    if (!(dx > 0.0) || !(dy > 0.0)) throw ValidationError("Discretization: dx and dy must be positive");
  }

  int M() const { return spec.M; }
  int N() const { return spec.N; }

  // line(o) gives the evolved coefficients at offset o along the edge's own line
  template <class S, class Line>
  EdgeCoeffs<S> complete(Line&& line) const {
    EdgeCoeffs<S> out{};
    if (spec.N == spec.M) {
      auto own = line(0);
      for (int m = 0; m <= spec.N; ++m) out[m] = own[m];
    } else {
      complete_line<S>(completion_stencil(spec.N, spec.M), line, std::span<S>(out.data(), spec.M + 1));
    }
    return out;
  }

  template <class S>
  std::span<const S> span(const EdgeCoeffs<S>& c) const {
    return {c.data(), std::size_t(spec.M + 1)};
  }

  bool uses_bubble() const { return spec.M == 3 && spec.volumetric; }

  // Zone (i,j) from completed-edge getters cjy(i,j), cjx(i,j).
  template <class S, class GetY, class GetX>
  ZoneReconstruction<S> zone(GetY&& cjy, GetX&& cjx, int i, int j, double scale = 0.0) const {
    const EdgeCoeffs<S> right = cjy(i, j), left = cjy(i - 1, j), top = cjx(i, j), bottom = cjx(i, j - 1);
    S bubble{};
    if (uses_bubble()) {
      const EdgeCoeffs<S> up = cjx(i, j + 1), down = cjx(i, j - 2), right2 = cjy(i + 1, j), left2 = cjy(i - 2, j);
      bubble = volumetric_coefficient<S>(span(up), span(top), span(bottom), span(down), span(right2), span(right),
                                         span(left), span(left2), dx, dy);
    }
    return reconstruct_zone<S>(span(right), span(left), span(top), span(bottom), spec.M, dx, dy, bubble, scale);
  }

  template <class S>
  S vertex(const EdgeCoeffs<S>& jx_left, const EdgeCoeffs<S>& jx_right, const EdgeCoeffs<S>& jy_below,
           const EdgeCoeffs<S>& jy_above) const {
    return vertex_potential<S>(span(jx_left), span(jx_right), span(jy_below), span(jy_above), v);
  }

  // Moment updates from the end-point potentials and the body integrals, truncated to N.
  template <class S>
  EdgeCoeffs<S> moment_update(const S& end_plus, const S& end_minus, const std::array<S, 3>& body, double h) const {
    EdgeCoeffs<S> d{};
    d[0] = -(end_plus - end_minus) / h;
    if (spec.N >= 1) d[1] = 12.0 * (-(end_plus + end_minus) / (2.0 * h) + body[0] / h);
    if (spec.N >= 2) d[2] = 180.0 * (-(end_plus - end_minus) / (6.0 * h) + 2.0 * body[1] / h);
    if (spec.N >= 3) d[3] = 2800.0 * (-(end_plus + end_minus) / (20.0 * h) + 3.0 * body[2] / h);
    return d;
  }

  // y-edge between zones `left` and `right`; vertices on top and bottom
  template <class S>
  EdgeCoeffs<S> y_edge_rhs(const S& phi_top, const S& phi_bottom, const ZoneReconstruction<S>& left,
                           const ZoneReconstruction<S>& right, const EdgeCoeffs<S>& jy) const {
    const auto phi = y_edge_potential_profile<S>(left, right, span(jy), v);
    const auto body = edge_body_integrals<S>(std::span<const S>(phi.data(), std::size_t(spec.M + 2)));
    return moment_update<S>(phi_top, phi_bottom, body, dy);
  }

  // x-edge between zones `below` and `above`; vertices on right and left
  template <class S>
  EdgeCoeffs<S> x_edge_rhs(const S& phi_right, const S& phi_left, const ZoneReconstruction<S>& below,
                           const ZoneReconstruction<S>& above, const EdgeCoeffs<S>& jx) const {
    const auto phi = x_edge_potential_profile<S>(below, above, span(jx), v);
    const auto body = edge_body_integrals<S>(std::span<const S>(phi.data(), std::size_t(spec.M + 2)));
    return moment_update<S>(phi_right, phi_left, body, dx);
  }
};

// Evaluates the right-hand side for the two edges owned by zone (0,0), using an
// accessor that returns evolved coefficients of jy(i,j) / jx(i,j) at relative
// zone offsets. Nothing is cached, so each piece is recomputed on demand.
template <class S, class Access>
std::pair<EdgeCoeffs<S>, EdgeCoeffs<S>> reference_rhs(const Discretization& d, const Access& acc) {
  auto cjy = [&](int i, int j) { return d.complete<S>([&](int o) { return acc.jy(i, j + o); }); };
  auto cjx = [&](int i, int j) { return d.complete<S>([&](int o) { return acc.jx(i + o, j); }); };
  auto zone = [&](int i, int j) { return d.zone<S>(cjy, cjx, i, j); };
  auto vert = [&](int i, int j) { return d.vertex<S>(cjx(i, j), cjx(i + 1, j), cjy(i, j), cjy(i, j + 1)); };
  const auto z00 = zone(0, 0);
  const auto ry = d.y_edge_rhs<S>(vert(0, 0), vert(0, -1), z00, zone(1, 0), cjy(0, 0));
  const auto rx = d.x_edge_rhs<S>(vert(0, 0), vert(-1, 0), z00, zone(0, 1), cjx(0, 0));
  return {ry, rx};
}

// Completed edges and zone reconstructions of a whole field.
template <class S>
struct FieldReconstruction {
  EdgeMomentField<S> completed;
  std::vector<ZoneReconstruction<S>> zones;  // index j*nx + i
  const ZoneReconstruction<S>& at(int i, int j) const {
    const auto& m = completed.mesh();
    return zones[std::size_t(m.wrap_j(j)) * m.nx + m.wrap_i(i)];
  }
};

template <class S>
EdgeCoeffs<S> load(std::span<const S> s) {
  EdgeCoeffs<S> c{};
  for (std::size_t k = 0; k < s.size(); ++k) c[k] = s[k];
  return c;
}

template <class S>
FieldReconstruction<S> reconstruct_field(const Discretization& d, const EdgeMomentField<S>& f) {
  FieldReconstruction<S> r;
  r.completed = complete_moments(f, d.M());
  const auto& m = f.mesh();
  const auto& g = r.completed;
  r.zones.resize(std::size_t(m.nx) * m.ny);
  auto cjy = [&](int i, int j) { return load(g.jy(i, j)); };
  auto cjx = [&](int i, int j) { return load(g.jx(i, j)); };
  // roundoff in the circulation follows the field's magnitude, not the zone's
  const double scale = g.max_abs() * std::max(m.dx, m.dy);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) r.zones[std::size_t(j) * m.nx + i] = d.zone<S>(cjy, cjx, i, j, scale);
  return r;
}

// Full-mesh right-hand side. Same kernels as reference_rhs, with the per-zone and
// per-vertex pieces computed once.
template <class S>
EdgeMomentField<S> rhs(const Discretization& d, const EdgeMomentField<S>& f) {
  if (f.degree() != d.N()) throw ValidationError("rhs: field degree does not match the scheme");
  const auto& m = f.mesh();
  const auto rec = reconstruct_field(d, f);
  const auto& g = rec.completed;
  std::vector<S> phi(std::size_t(m.nx) * m.ny);
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i)
      phi[std::size_t(j) * m.nx + i] =
          d.vertex<S>(load(g.jx(i, j)), load(g.jx(i + 1, j)), load(g.jy(i, j)), load(g.jy(i, j + 1)));
  auto vert = [&](int i, int j) { return phi[std::size_t(m.wrap_j(j)) * m.nx + m.wrap_i(i)]; };
  EdgeMomentField<S> out(m, d.N());
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      const auto ry = d.y_edge_rhs<S>(vert(i, j), vert(i, j - 1), rec.at(i, j), rec.at(i + 1, j), load(g.jy(i, j)));
      const auto rx = d.x_edge_rhs<S>(vert(i, j), vert(i - 1, j), rec.at(i, j), rec.at(i, j + 1), load(g.jx(i, j)));
      auto oy = out.jy(i, j);
      auto ox = out.jx(i, j);
      for (int k = 0; k <= d.N(); ++k) {
        oy[k] = ry[k];
        ox[k] = rx[k];
      }
    }
  return out;
}

// Σ_zones ΔxΔy · Gauss average of (Jx²+Jy²)/2 on the interior reconstruction.
inline double total_quadratic_energy(const Discretization& d, const RealField& f) {
  const auto rec = reconstruct_field(d, f);
  const auto& m = f.mesh();
  const auto& q = gauss_rule(d.M() + 2);
  double e = 0.0;
  for (const auto& z : rec.zones) {
    double s = 0.0;
    for (std::size_t a = 0; a < q.nodes.size(); ++a)
      for (std::size_t b = 0; b < q.nodes.size(); ++b) {
        const auto [jx, jy] = z.gradient(q.nodes[a], q.nodes[b]);
        s += q.weights[a] * q.weights[b] * 0.5 * (jx * jx + jy * jy);
      }
    e += s * m.dx * m.dy;
  }
  return e;
}

}  // namespace curlkit
