#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "mesh.hpp"
#include "upwind.hpp"

namespace curlkit {

enum class RKMethod { RK1, SSPRK2, SSPRK3, SSPRK54 };

inline std::string_view to_string(RKMethod m) {
  switch (m) {
    case RKMethod::RK1: return "rk1";
    case RKMethod::SSPRK2: return "ssprk2";
    case RKMethod::SSPRK3: return "ssprk3";
    case RKMethod::SSPRK54: return "ssprk54";
  }
  return "?";
}

inline RKMethod parse_rk(std::string_view s) {
  if (s == "rk1") return RKMethod::RK1;
  if (s == "ssprk2") return RKMethod::SSPRK2;
  if (s == "ssprk3") return RKMethod::SSPRK3;
  if (s == "ssprk54") return RKMethod::SSPRK54;
  throw ValidationError("unknown RK method: " + std::string(s));
}

inline int rk_order(RKMethod m) {
  switch (m) {
    case RKMethod::RK1: return 1;
    case RKMethod::SSPRK2: return 2;
    case RKMethod::SSPRK3: return 3;
    case RKMethod::SSPRK54: return 4;
  }
  return 0;
}

// Shu–Osher form: u_i = Σ_{k<i} alpha[i][k] u_k + dt·beta[i][k] L(u_k), i = 1..s.
struct ShuOsherTableau {
  int stages = 0;
  std::vector<std::vector<double>> alpha, beta;
};

inline const ShuOsherTableau& tableau(RKMethod m) {
  static const ShuOsherTableau rk1{1, {{}, {1.0}}, {{}, {1.0}}};
  static const ShuOsherTableau rk2{2, {{}, {1.0}, {0.5, 0.5}}, {{}, {1.0}, {0.0, 0.5}}};
  static const ShuOsherTableau rk3{
      3, {{}, {1.0}, {0.75, 0.25}, {1.0 / 3.0, 0.0, 2.0 / 3.0}}, {{}, {1.0}, {0.0, 0.25}, {0.0, 0.0, 2.0 / 3.0}}};
  // Spiteri–Ruuth SSP(5,4)
  static const ShuOsherTableau rk54{
      5,
      {{},
       {1.0},
       {0.444370493651235, 0.555629506348765},
       {0.620101851488403, 0.0, 0.379898148511597},
       {0.178079954393132, 0.0, 0.0, 0.821920045606868},
       {0.0, 0.0, 0.517231671970585, 0.096059710526147, 0.386708617503269}},
      {{},
       {0.391752226571890},
       {0.0, 0.368410593050371},
       {0.0, 0.0, 0.251891774271694},
       {0.0, 0.0, 0.0, 0.544974750228521},
       {0.0, 0.0, 0.0, 0.063692468666290, 0.226007483236906}}};
  switch (m) {
    case RKMethod::RK1: return rk1;
    case RKMethod::SSPRK2: return rk2;
    case RKMethod::SSPRK3: return rk3;
    case RKMethod::SSPRK54: return rk54;
  }
  return rk1;
}

// State needs `State + State` and `double * State`. L(u) returns the time derivative.
template <class State, class Op>
State rk_step(const State& u0, Op&& L, double dt, RKMethod method) {
  const auto& tb = tableau(method);
  std::vector<State> u{u0};
  std::vector<std::optional<State>> Lu(tb.stages);
  u.reserve(tb.stages + 1);
  for (int i = 1; i <= tb.stages; ++i) {
    std::optional<State> acc;
    for (int k = 0; k < i; ++k) {
      const double a = tb.alpha[i][k], b = tb.beta[i][k];
      if (a != 0.0) acc = acc ? State(*acc + a * u[k]) : State(a * u[k]);
      if (b != 0.0) {
        if (!Lu[k]) Lu[k] = L(u[k]);
        acc = acc ? State(*acc + (dt * b) * *Lu[k]) : State((dt * b) * *Lu[k]);
      }
    }
    u.push_back(std::move(*acc));
  }
  return u.back();
}

inline double compute_dt(double nu, const Velocity& v, const MeshSpec& mesh, double fraction) {
  const double rate = std::hypot(v.vx / mesh.dx, v.vy / mesh.dy);
  if (!(rate > 0.0)) throw ValidationError("compute_dt: velocity must be nonzero");
  if (!(nu > 0.0) || !(fraction > 0.0)) throw ValidationError("compute_dt: CFL and fraction must be positive");
  return fraction * nu / rate;
}

}  // namespace curlkit
