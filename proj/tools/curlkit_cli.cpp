#include <CLI11.hpp>

#include <curlkit/experiments.hpp>
#include <curlkit/vonneumann.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

using namespace curlkit;

namespace {

struct SchemeArgs {
  std::string family = "dg";
  int n = 1;
  int m = -1;
  std::string rk;
  double cfl_fraction = 0.95;
  bool no_volumetric = false;

  void attach(CLI::App* app) {
    app->add_option("--scheme", family, "dg | p0pm | p1pm")->check(CLI::IsMember({"dg", "p0pm", "p1pm"}));
    app->add_option("--n", n, "evolved degree (dg: the degree)");
    app->add_option("--m", m, "reconstructed degree (p0pm, p1pm)");
    app->add_option("--rk", rk, "rk1 | ssprk2 | ssprk3 | ssprk54 (default by degree)");
    app->add_option("--cfl-fraction", cfl_fraction, "fraction of the maximal CFL used by runs");
    app->add_flag("--no-volumetric", no_volumetric, "zero the X^2Y^2 term at degree 3");
  }

  SchemeSpec build() const {
    SchemeSpec s;
    if (family == "dg") {
      if (m >= 0 && m != n) throw ValidationError("dg scheme: --m must equal --n");
      s = SchemeSpec::dg(n);
    } else {
      const int N = family == "p0pm" ? 0 : 1;
      if (m < 0) throw ValidationError(family + ": --m is required");
      s = SchemeSpec::pnpm(N, m);
      s.family = N == m ? Family::DG : Family::PNPM;
    }
    s.rk = rk.empty() ? default_rk(s.M) : parse_rk(rk);
    s.cfl_fraction = cfl_fraction;
    s.volumetric = !no_volumetric;
    s.validate();
    return s;
  }
};

struct SweepArgs {
  int angles = 65, nk = 65;
  double tol = 1e-4;
  bool half_nyquist = false;

  void attach(CLI::App* app) {
    app->add_option("--angles", angles, "velocity angles in [0, 45] degrees")->check(CLI::PositiveNumber);
    app->add_option("--nk", nk, "wavenumbers per direction")->check(CLI::PositiveNumber);
    app->add_option("--tol", tol, "bisection tolerance")->check(CLI::PositiveNumber);
    app->add_flag("--half-nyquist", half_nyquist, "sweep k over [-pi/2, pi/2]^2");
  }
  SweepOptions build() const {
    SweepOptions o;
    o.n_angles = angles;
    o.n_k = nk;
    o.tolerance = tol;
    if (half_nyquist) o.k_extent = std::numbers::pi / 2.0;
    return o;
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// key=value lines become --key=value arguments unless the key is already on the
// command line. "true"/"false" values toggle flags.
std::vector<std::string> merge_config(std::vector<std::string> args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty()) return rest;
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config file: " + path);
  std::set<std::string> given;
  for (const auto& a : rest)
    if (a.rfind("--", 0) == 0) given.insert(a.substr(2, a.find('=') == std::string::npos ? a.npos : a.find('=') - 2));
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line.substr(0, line.find('#')));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ValidationError(path + ":" + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    if (key.empty()) throw ValidationError(path + ":" + std::to_string(lineno) + ": empty key");
    if (given.count(key)) continue;
    if (value == "true")
      rest.push_back("--" + key);
    else if (value != "false")
      rest.push_back("--" + key + "=" + value);
  }
  return rest;
}

void print_matrix(std::ostream& os, const std::string& name, const CMatrix& A) {
  os << name << " (" << A.rows() << "x" << A.cols() << ")\n";
  for (Eigen::Index i = 0; i < A.rows(); ++i) {
    for (Eigen::Index j = 0; j < A.cols(); ++j)
      os << "  " << std::setw(14) << A(i, j).real() << (A(i, j).imag() < 0 ? " - " : " + ") << std::setw(12)
         << std::abs(A(i, j).imag()) << "i";
    os << '\n';
  }
}

void print_values(std::ostream& os, const std::string& name, const CVector& v) {
  os << name << ":";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << "  " << v(i).real() << (v(i).imag() < 0 ? "-" : "+") << std::abs(v(i).imag()) << "i";
  os << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ValidationError("cannot write " + path);
  return f;
}

template <class Fn>
void emit(const std::string& path, Fn&& fn) {
  if (path.empty() || path == "-") {
    fn(std::cout);
  } else {
    auto f = open_out(path);
    fn(f);
  }
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> v(n);
  for (int i = 0; i < n; ++i) v[i] = n == 1 ? lo : lo + (hi - lo) * i / (n - 1);
  return v;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"curl-free edge-moment advection solver and von Neumann stability lab"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");
  std::string config_path;
  app.add_option("--config", config_path, "key=value file; command-line flags take precedence");

  // matrix
  auto* matrix = app.add_subcommand("matrix", "print A, G and eigenvalues for one Fourier mode");
  SchemeArgs ms;
  ms.attach(matrix);
  int mp = -1;
  double kx = 0.3, ky = 0.2, vx = 1.0, vy = 1.0, mdx = 1.0, mdy = 1.0, dt = 0.0;
  bool oracle = false;
  matrix->add_option("--p", mp, "dg degree (shorthand for --scheme dg --n)");
  matrix->add_option("--kx", kx, "kx*dx");
  matrix->add_option("--ky", ky, "ky*dy");
  matrix->add_option("--vx", vx);
  matrix->add_option("--vy", vy);
  matrix->add_option("--dx", mdx)->check(CLI::PositiveNumber);
  matrix->add_option("--dy", mdy)->check(CLI::PositiveNumber);
  matrix->add_option("--dt", dt, "time step for G (0: skip)")->check(CLI::NonNegativeNumber);
  matrix->add_flag("--oracle", oracle, "compare with the closed-form N=1 matrix");

  // cfl
  auto* cfl = app.add_subcommand("cfl", "largest stable CFL number");
  SchemeArgs cs;
  SweepArgs cw;
  bool cfl_verbose = false;
  cs.attach(cfl);
  cw.attach(cfl);
  cfl->add_flag("--verbose", cfl_verbose, "print the per-angle limits");

  // stability-map
  auto* smap = app.add_subcommand("stability-map", "spectral radius over a (Cx, Cy) grid, as CSV");
  SchemeArgs ss;
  SweepArgs sw;
  sw.nk = 33;
  double cmax = 1.0;
  int cells = 21;
  std::string smap_out;
  ss.attach(smap);
  sw.attach(smap);
  smap->add_option("--cmax", cmax, "grid covers [0, cmax]^2")->check(CLI::PositiveNumber);
  smap->add_option("--cells", cells, "grid points per direction")->check(CLI::PositiveNumber);
  smap->add_option("--out", smap_out, "CSV path (default stdout)");

  // dispersion
  auto* disp = app.add_subcommand("dispersion", "dissipation and phase error against wave-vector angle, as CSV");
  SchemeArgs ds;
  SweepArgs dw;
  std::vector<double> d_angles{0.0, 15.0, 30.0, 45.0}, d_lambdas{5.0, 10.0, 15.0};
  double d_cfl = 0.0;
  std::string d_out;
  ds.attach(disp);
  dw.attach(disp);
  disp->add_option("--angle", d_angles, "velocity angle(s) in degrees");
  disp->add_option("--wavelength", d_lambdas, "wavelength(s) in zones")->check(CLI::PositiveNumber);
  disp->add_option("--cfl", d_cfl, "CFL number (default 0.9 of the maximal)");
  disp->add_option("--out", d_out, "CSV path (default stdout)");

  // run / convergence share problem options
  struct ProblemArgs {
    std::string problem = "planewave";
    double tf = -1.0, vx = 1.0, vy = 1.0, nu = 0.0;
    int snapshots = 100;
    void attach(CLI::App* app) {
      app->add_option("--problem", problem)->check(CLI::IsMember({"planewave", "vortex"}));
      app->add_option("--tf", tf, "final time (default by problem)");
      app->add_option("--vx", vx);
      app->add_option("--vy", vy);
      app->add_option("--nu", nu, "CFL number (default: maximal stable)")->check(CLI::NonNegativeNumber);
      app->add_option("--snapshots", snapshots, "curl monitor samples")->check(CLI::PositiveNumber);
    }
    ProblemSpec build(const SchemeSpec& s) const {
      ProblemSpec p;
      p.problem = parse_problem(problem);
      p.tf = tf;
      p.v = {vx, vy};
      p.scheme = s;
      p.nu = nu;
      p.snapshots = snapshots;
      return p;
    }
  };

  auto* run = app.add_subcommand("run", "advect one problem and report errors");
  SchemeArgs rs;
  ProblemArgs rp;
  int res = 32;
  std::string curl_out;
  rs.attach(run);
  rp.attach(run);
  run->add_option("--res", res, "zones per direction")->check(CLI::PositiveNumber);
  run->add_option("--curl-out", curl_out, "write the curl monitor series to this CSV");

  auto* conv = app.add_subcommand("convergence", "error table over resolutions, as CSV");
  SchemeArgs vs;
  ProblemArgs vp;
  std::vector<int> resolutions{8, 16, 32, 64};
  std::string conv_out;
  vs.attach(conv);
  vp.attach(conv);
  conv->add_option("--res", resolutions, "resolutions");
  conv->add_option("--out", conv_out, "CSV path (default stdout)");

  std::vector<std::string> args(argv + 1, argv + argc);
  args = merge_config(args);
  std::reverse(args.begin(), args.end());
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  std::cout << std::setprecision(10);

  if (*matrix) {
    if (mp >= 0) {
      ms.family = "dg";
      ms.n = mp;
    }
    const auto spec = ms.build();
    const FourierMode k{kx, ky};
    const auto op = assemble_A(spec, k, {vx, vy}, mdx, mdy);
    std::cout << spec.name() << " subspace dimension " << op.dim() << ", invariance residual "
              << op.invariance_residual << '\n';
    print_matrix(std::cout, "A", op.A);
    print_values(std::cout, "eig(A)", eigen_decompose(op.A).values);
    if (dt > 0.0) {
      const auto amp = amplification(op, dt, spec.rk);
      print_matrix(std::cout, "G", amp.G);
      print_values(std::cout, "eig(G)", amp.eigenvalues);
      std::cout << "spectral radius " << amp.spectral_radius << '\n';
    }
    if (oracle) {
      if (spec.N != 1 || spec.M != 1) throw ValidationError("--oracle needs the dg scheme with degree 1");
      const auto ref = eigen_decompose(closed_form_n1_matrix(k, {vx, vy}, mdx, mdy)).values;
      print_values(std::cout, "eig(closed form)", ref);
      const double diff = eigenvalue_mismatch(eigen_decompose(op.A).values, ref);
      std::cout << "oracle max |eig difference| " << diff << (diff <= 1e-10 ? " (agree)" : " (differ)") << '\n';
    }
    return 0;
  }

  if (*cfl) {
    const auto spec = cs.build();
    const auto r = max_cfl(spec, spec.rk, cw.build());
    if (cfl_verbose)
      for (std::size_t i = 0; i < r.angles.size(); ++i)
        std::cout << "angle " << r.angles[i] * 180.0 / std::numbers::pi << " deg: " << r.per_angle[i] << '\n';
    std::cout << spec.name() << ' ' << to_string(spec.rk) << ' ';
    if (r.unstable)
      std::cout << "unstable\n";
    else
      std::cout << std::fixed << std::setprecision(4) << r.nu << '\n';
    return 0;
  }

  if (*smap) {
    const auto spec = ss.build();
    const auto g = linspace(0.0, cmax, cells);
    const auto map = stability_map(spec, spec.rk, g, g, sw.build());
    emit(smap_out, [&](std::ostream& os) { csv::write_stability_map(os, map); });
    return 0;
  }

  if (*disp) {
    const auto spec = ds.build();
    double c = d_cfl;
    if (!(c > 0.0)) {
      const auto r = max_cfl(spec, spec.rk, dw.build());
      if (r.unstable) throw NumericalError("dispersion: scheme is unstable for every CFL");
      c = 0.9 * r.nu;
    }
    std::vector<DispersionRow> rows;
    for (double lam : d_lambdas)
      for (double a : d_angles) {
        const auto part = dispersion_sweep(spec, spec.rk, a, lam, c);
        rows.insert(rows.end(), part.begin(), part.end());
      }
    emit(d_out, [&](std::ostream& os) { csv::write_dispersion(os, rows); });
    return 0;
  }

  if (*run) {
    auto ps = rp.build(rs.build());
    ps.n = res;
    ps.monitor_curl = !curl_out.empty();
    const auto r = run_problem(ps);
    std::cout << ps.scheme.name() << ' ' << to_string(ps.scheme.rk) << " res " << r.n << " nu " << r.nu << " dt "
              << r.dt << " steps " << r.steps << '\n'
              << "l1 " << r.l1 << "\nlinf " << r.linf << "\nenergy_fraction " << r.energy_fraction << '\n';
    if (ps.monitor_curl) {
      std::cout << "max_curl_relative " << r.max_curl_relative << '\n';
      emit(curl_out, [&](std::ostream& os) { csv::write_curl(os, r.curl); });
    }
    std::cout << "wall_seconds " << r.wall_seconds << '\n';
    return 0;
  }

  if (*conv) {
    const auto rows = convergence_suite(vp.build(vs.build()), resolutions);
    emit(conv_out, [&](std::ostream& os) { csv::write_convergence(os, rows); });
    return 0;
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const Blowup& e) {
    std::cerr << "numerical failure: " << e.what() << " (step " << e.step << ")\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
