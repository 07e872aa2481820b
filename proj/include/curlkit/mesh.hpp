#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "basis.hpp"
#include "errors.hpp"

namespace curlkit {

struct MeshSpec {
  int nx = 0, ny = 0;
  double dx = 1.0, dy = 1.0;
  double x0 = 0.0, y0 = 0.0;

  void validate() const {
    if (nx < 4 || ny < 4) throw ValidationError("MeshSpec: nx and ny must be >= 4");
    if (!(dx > 0.0) || !(dy > 0.0)) throw ValidationError("MeshSpec: dx and dy must be positive");
  }
  int wrap_i(int i) const { return ((i % nx) + nx) % nx; }
  int wrap_j(int j) const { return ((j % ny) + ny) % ny; }
  double width() const { return nx * dx; }
  double height() const { return ny * dy; }
  double area() const { return width() * height(); }
  // zone centre
  double xc(int i) const { return x0 + (i + 0.5) * dx; }
  double yc(int j) const { return y0 + (j + 0.5) * dy; }
};

inline MeshSpec square_mesh(int n, double lo, double hi) {
  MeshSpec m{n, n, (hi - lo) / n, (hi - lo) / n, lo, lo};
  m.validate();
  return m;
}

// jy(i,j) lives on the right y-edge of zone (i,j), jx(i,j) on its top x-edge.
// Flat layout: all jy blocks first, then all jx blocks; each block holds p+1 modes.
template <class S>
class EdgeMomentField {
 public:
  EdgeMomentField() = default;
  EdgeMomentField(const MeshSpec& mesh, int p) : mesh_(mesh), p_(p) {
    mesh_.validate();
    if (p < 0 || p > kMaxDegree) throw ValidationError("EdgeMomentField: degree must be in 0..3");
    data_.assign(static_cast<std::size_t>(2) * mesh_.nx * mesh_.ny * (p + 1), S{});
  }

  const MeshSpec& mesh() const { return mesh_; }
  int degree() const { return p_; }
  int modes() const { return p_ + 1; }

  std::span<S> jy(int i, int j) { return {data_.data() + offset(i, j, 0), std::size_t(p_ + 1)}; }
  std::span<S> jx(int i, int j) { return {data_.data() + offset(i, j, 1), std::size_t(p_ + 1)}; }
  std::span<const S> jy(int i, int j) const { return {data_.data() + offset(i, j, 0), std::size_t(p_ + 1)}; }
  std::span<const S> jx(int i, int j) const { return {data_.data() + offset(i, j, 1), std::size_t(p_ + 1)}; }

  std::vector<S>& data() { return data_; }
  const std::vector<S>& data() const { return data_; }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(), [](const S& s) { return std::isfinite(std::abs(s)); });
  }
  double max_abs() const {
    double m = 0.0;
    for (const auto& s : data_) m = std::max(m, double(std::abs(s)));
    return m;
  }

  EdgeMomentField& operator+=(const EdgeMomentField& o) {
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
    return *this;
  }
  EdgeMomentField& operator*=(double a) {
    for (auto& s : data_) s *= a;
    return *this;
  }
  friend EdgeMomentField operator+(EdgeMomentField a, const EdgeMomentField& b) { return a += b; }
  friend EdgeMomentField operator*(double a, EdgeMomentField f) { return f *= a; }

 private:
  std::size_t offset(int i, int j, int comp) const {
    const int wi = mesh_.wrap_i(i), wj = mesh_.wrap_j(j);
    return ((static_cast<std::size_t>(comp) * mesh_.ny + wj) * mesh_.nx + wi) * (p_ + 1);
  }

  MeshSpec mesh_{};
  int p_ = 0;
  std::vector<S> data_;
};

using RealField = EdgeMomentField<double>;

struct GradientFunction {
  std::function<double(double, double)> gx, gy;
};

// Projects ∂φ/∂x onto x-edges and ∂φ/∂y onto y-edges. A rule with more points than
// the basis' own is used because the gradient is generally not polynomial.
inline RealField init_from_gradient(const GradientFunction& g, const MeshSpec& mesh, int p,
                                    int quad_points = 12) {
  RealField f(mesh, p);
  const auto& q = gauss_rule(quad_points);
  for (int j = 0; j < mesh.ny; ++j) {
    for (int i = 0; i < mesh.nx; ++i) {
      const double xe = mesh.x0 + (i + 1) * mesh.dx, ye = mesh.y0 + (j + 1) * mesh.dy;
      const double xm = mesh.xc(i), ym = mesh.yc(j);
      auto cy = project_edge([&](double xi) { return g.gy(xe, ym + xi * mesh.dy); }, p, q);
      auto cx = project_edge([&](double xi) { return g.gx(xm + xi * mesh.dx, ye); }, p, q);
      std::copy(cy.begin(), cy.end(), f.jy(i, j).begin());
      std::copy(cx.begin(), cx.end(), f.jx(i, j).begin());
    }
  }
  return f;
}

template <class S>
S discrete_circulation(const EdgeMomentField<S>& f, int i, int j) {
  const auto& m = f.mesh();
  return (f.jy(i, j)[0] - f.jy(i - 1, j)[0]) / m.dx - (f.jx(i, j)[0] - f.jx(i, j - 1)[0]) / m.dy;
}

template <class S>
double max_abs_circulation(const EdgeMomentField<S>& f) {
  double m = 0.0;
  for (int j = 0; j < f.mesh().ny; ++j)
    for (int i = 0; i < f.mesh().nx; ++i) m = std::max(m, double(std::abs(discrete_circulation(f, i, j))));
  return m;
}

}  // namespace curlkit
