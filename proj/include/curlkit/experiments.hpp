#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <ostream>
#include <string>
#include <tuple>
#include <vector>

#include "mesh.hpp"
#include "semidiscrete.hpp"
#include "timeint.hpp"
#include "vonneumann.hpp"

namespace curlkit {

enum class Problem { PlaneWave, Vortex };

inline Problem parse_problem(const std::string& s) {
  if (s == "planewave") return Problem::PlaneWave;
  if (s == "vortex") return Problem::Vortex;
  throw ValidationError("unknown problem: " + s);
}

// RK method whose order matches the reconstructed degree.
inline RKMethod default_rk(int M) {
  switch (M) {
    case 0: return RKMethod::RK1;
    case 1: return RKMethod::SSPRK2;
    case 2: return RKMethod::SSPRK3;
    default: return RKMethod::SSPRK54;
  }
}

struct ProblemSpec {
  Problem problem = Problem::PlaneWave;
  int n = 32;
  double tf = -1.0;  // negative: problem default
  Velocity v{1.0, 1.0};
  SchemeSpec scheme = SchemeSpec::dg(1);
  double nu = 0.0;  // 0: computed with max_cfl
  int snapshots = 100;
  bool monitor_curl = false;
};

struct ProblemSetup {
  double lo, hi, tf;
  // exact field at time 0
  std::function<std::pair<double, double>(double, double)> J0;
};

inline ProblemSetup problem_setup(Problem p) {
  if (p == Problem::PlaneWave) {
    const double k = 2.0 * std::numbers::pi;
    return {-0.5, 0.5, 1.0, [k](double x, double y) {
              const double g = -k * std::sin(k * x + k * y);
              return std::pair{g, g};
            }};
  }
  return {-10.0, 10.0, 20.0, [](double x, double y) {
            const double phi = std::exp(0.5 * (1.0 - x * x - y * y));
            return std::pair{-phi * x, -phi * y};
          }};
}

struct CurlSample {
  double t, max_curl;
};

struct RunReport {
  int n = 0;
  double l1 = 0.0, linf = 0.0;
  double energy_initial = 0.0, energy_final = 0.0, energy_fraction = 0.0;
  double max_field = 0.0;
  double max_curl_relative = 0.0;
  std::vector<CurlSample> curl;
  double dt = 0.0, nu = 0.0;
  long steps = 0;
  double wall_seconds = 0.0;
};

// Cached max_cfl of the default sweep, keyed by scheme and RK method.
inline double cached_max_cfl(const SchemeSpec& s, RKMethod rk) {
  static std::mutex mu;
  static std::map<std::tuple<int, int, int, bool>, double> cache;
  const auto key = std::make_tuple(s.N, s.M, static_cast<int>(rk), s.volumetric);
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double nu = max_cfl(s, rk).nu;
  std::lock_guard lock(mu);
  cache[key] = nu;
  return nu;
}

// Max over (M+1)² interior points of |∂Jy/∂x − ∂Jx/∂y + zone circulation|.
inline double max_pointwise_curl(const Discretization& d, const RealField& f) {
  const auto rec = reconstruct_field(d, f);
  const auto& m = f.mesh();
  const int np = d.M() + 1;
  double mx = 0.0;
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      const auto& z = rec.at(i, j);
      const double circ = discrete_circulation(f, i, j);
      for (int a = 0; a < np; ++a)
        for (int b = 0; b < np; ++b) {
          const double X = -0.5 + (a + 1.0) / (np + 1.0), Y = -0.5 + (b + 1.0) / (np + 1.0);
          mx = std::max(mx, std::abs(z.curl(X, Y) + circ));
        }
    }
  return mx;
}

struct ErrorNorms {
  double l1 = 0.0, linf = 0.0, max_field = 0.0;
};

template <class Exact>
ErrorNorms error_norms(const Discretization& d, const RealField& f, Exact&& exact) {
  const auto rec = reconstruct_field(d, f);
  const auto& m = f.mesh();
  const auto& q = gauss_rule(d.M() + 2);
  ErrorNorms e;
  double sum = 0.0;
  for (int j = 0; j < m.ny; ++j)
    for (int i = 0; i < m.nx; ++i) {
      const auto& z = rec.at(i, j);
      double zs = 0.0;
      for (std::size_t a = 0; a < q.nodes.size(); ++a)
        for (std::size_t b = 0; b < q.nodes.size(); ++b) {
          const auto [jx, jy] = z.gradient(q.nodes[a], q.nodes[b]);
          const auto [ex, ey] = exact(m.xc(i) + q.nodes[a] * m.dx, m.yc(j) + q.nodes[b] * m.dy);
          const double dxe = std::abs(jx - ex), dye = std::abs(jy - ey);
          zs += q.weights[a] * q.weights[b] * 0.5 * (dxe + dye);
          e.linf = std::max({e.linf, dxe, dye});
          e.max_field = std::max({e.max_field, std::abs(jx), std::abs(jy)});
        }
      sum += zs * m.dx * m.dy;
    }
  e.l1 = sum / m.area();
  return e;
}

inline RunReport run_problem(const ProblemSpec& ps) {
  ps.scheme.validate();
  if (ps.n < 4) throw ValidationError("run_problem: resolution must be >= 4");
  if (ps.v.vx == 0.0 && ps.v.vy == 0.0) throw ValidationError("run_problem: velocity must be nonzero");
  const auto t_start = std::chrono::steady_clock::now();
  const auto setup = problem_setup(ps.problem);
  const double tf = ps.tf >= 0.0 ? ps.tf : setup.tf;
  const auto mesh = square_mesh(ps.n, setup.lo, setup.hi);
  const Discretization d(ps.scheme, ps.v, mesh.dx, mesh.dy);

  GradientFunction g{[&](double x, double y) { return setup.J0(x, y).first; },
                     [&](double x, double y) { return setup.J0(x, y).second; }};
  RealField u = init_from_gradient(g, mesh, ps.scheme.N);

  RunReport r;
  r.n = ps.n;
  r.nu = ps.nu > 0.0 ? ps.nu : cached_max_cfl(ps.scheme, ps.scheme.rk);
  if (!(r.nu > 0.0)) throw NumericalError("run_problem: scheme has no stable CFL number");
  r.dt = compute_dt(r.nu, ps.v, mesh, ps.scheme.cfl_fraction);
  r.energy_initial = total_quadratic_energy(d, u);
  r.max_field = u.max_abs();

  auto L = [&](const RealField& f) { return rhs(d, f); };
  double t = 0.0;
  int next_snap = 1;
  if (ps.monitor_curl) r.curl.push_back({0.0, max_pointwise_curl(d, u)});
  // with the monitor on, steps are clipped so every snapshot lands on its own time
  auto snap_time = [&](int k) { return k >= ps.snapshots ? tf : tf * k / ps.snapshots; };
  while (t < tf) {
    const double target = ps.monitor_curl ? snap_time(next_snap) : tf;
    const double h = std::min(r.dt, target - t);
    u = rk_step(u, L, h, ps.scheme.rk);
    t = (target - t <= r.dt) ? target : t + h;
    ++r.steps;
    if (!u.all_finite()) throw Blowup("run_problem: non-finite field", r.steps);
    if (ps.monitor_curl && t == target) {
      r.curl.push_back({t, max_pointwise_curl(d, u)});
      ++next_snap;
    }
  }

  const double W = mesh.width(), H = mesh.height();
  auto wrap = [](double x, double lo, double len) { return lo + std::fmod(std::fmod(x - lo, len) + len, len); };
  const auto norms = error_norms(d, u, [&](double x, double y) {
    return setup.J0(wrap(x - ps.v.vx * tf, mesh.x0, W), wrap(y - ps.v.vy * tf, mesh.y0, H));
  });
  r.l1 = norms.l1;
  r.linf = norms.linf;
  r.energy_final = total_quadratic_energy(d, u);
  r.energy_fraction = r.energy_final / r.energy_initial;
  for (const auto& c : r.curl) r.max_curl_relative = std::max(r.max_curl_relative, c.max_curl / r.max_field);
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  return r;
}

struct ConvergenceRow {
  int res = 0;
  double l1 = 0.0, l1_order = std::nan(""), linf = 0.0, linf_order = std::nan(""), energy_fraction = 0.0;
};

inline std::vector<ConvergenceRow> convergence_suite(ProblemSpec base, const std::vector<int>& resolutions) {
  if (resolutions.size() < 2) throw ValidationError("convergence_suite: need at least two resolutions");
  for (int n : resolutions)
    if (n < 8) throw ValidationError("convergence_suite: resolutions must be >= 8");
  std::vector<ConvergenceRow> rows;
  for (std::size_t k = 0; k < resolutions.size(); ++k) {
    base.n = resolutions[k];
    const auto r = run_problem(base);
    ConvergenceRow row{r.n, r.l1, std::nan(""), r.linf, std::nan(""), r.energy_fraction};
    if (k > 0) {
      const double ratio = std::log2(double(resolutions[k]) / resolutions[k - 1]);
      row.l1_order = std::log2(rows.back().l1 / r.l1) / ratio;
      row.linf_order = std::log2(rows.back().linf / r.linf) / ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

namespace csv {

inline std::string num(double x) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

inline void write_dispersion(std::ostream& os, const std::vector<DispersionRow>& rows, bool header = true) {
  if (header) os << "angle_deg,one_minus_amp,phase_err,wavelength,v_angle_deg\n";
  for (const auto& r : rows)
    os << num(r.angle_deg) << ',' << num(r.one_minus_amp) << ',' << num(r.phase_err) << ',' << num(r.wavelength)
       << ',' << num(r.v_angle_deg) << '\n';
}

inline void write_convergence(std::ostream& os, const std::vector<ConvergenceRow>& rows) {
  os << "res,l1,l1_order,linf,linf_order,energy_fraction\n";
  for (const auto& r : rows)
    os << r.res << ',' << num(r.l1) << ',' << num(r.l1_order) << ',' << num(r.linf) << ',' << num(r.linf_order) << ','
       << num(r.energy_fraction) << '\n';
}

inline void write_stability_map(std::ostream& os, const std::vector<StabilityMapCell>& cells) {
  os << "cx,cy,spectral_radius\n";
  for (const auto& c : cells) os << num(c.cx) << ',' << num(c.cy) << ',' << num(c.radius) << '\n';
}

inline void write_curl(std::ostream& os, const std::vector<CurlSample>& s) {
  os << "t,max_curl\n";
  for (const auto& c : s) os << num(c.t) << ',' << num(c.max_curl) << '\n';
}

}  // namespace csv

}  // namespace curlkit
