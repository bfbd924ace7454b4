#pragma once

// Logit demand duopoly: demand, profit, best responses and the two reference
// prices (Bertrand-Nash and cartel) that bound the collusive price band.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "../errors.hpp"
#include "../kernel/config.hpp"

namespace coopsim::bc {

struct EconParams {
  double a = 2.0;   // quality index, same for both firms
  double a0 = 0.0;  // outside good
  double mu = 0.25; // horizontal differentiation
  double c = 1.0;   // marginal cost
  double price_grid_step = 0.01;
};

struct Demand {
  double q1 = 0.0;
  double q2 = 0.0;
  double q0 = 0.0;  // outside good share
};

struct ReferencePrices {
  double p_bertrand = 0.0;
  double p_cartel = 0.0;
};

inline void check_params(const EconParams& p) {
  if (!(p.mu > 0.0) || !std::isfinite(p.mu)) throw SolverFailure("mu must be finite and > 0");
  if (!(p.c >= 0.0) || !std::isfinite(p.c)) throw SolverFailure("c must be finite and >= 0");
  if (!std::isfinite(p.a) || !std::isfinite(p.a0)) throw SolverFailure("quality indices must be finite");
}

inline Demand logit_demand(double p1, double p2, const EconParams& prm) {
  const double u1 = (prm.a - p1) / prm.mu;
  const double u2 = (prm.a - p2) / prm.mu;
  const double u0 = prm.a0 / prm.mu;
  const double m = std::max({u1, u2, u0});
  const double e1 = std::exp(u1 - m);
  const double e2 = std::exp(u2 - m);
  const double e0 = std::exp(u0 - m);
  const double total = e1 + e2 + e0;
  return {e1 / total, e2 / total, e0 / total};
}

inline double profit(double p, double c, double q) { return (p - c) * q; }

// Profit of a firm pricing at `own` against `rival`.
inline double own_profit(double own, double rival, const EconParams& prm) {
  return profit(own, prm.c, logit_demand(own, rival, prm).q1);
}

namespace detail {
// Root of an increasing function on [lo, inf): grows the bracket, then bisects.
inline double increasing_root(const std::function<double(double)>& g, double lo, double scale) {
  double hi = lo + scale;
  int grow = 0;
  while (g(hi) < 0.0) {
    hi = lo + (hi - lo) * 2.0;
    if (++grow > 200 || !std::isfinite(hi)) throw SolverFailure("could not bracket root");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-14 * std::max(1.0, std::abs(hi)); ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}
}  // namespace detail

// Continuous best response from the first-order condition (p - c)(1 - q_own) = mu.
inline double best_response(double rival, const EconParams& prm) {
  check_params(prm);
  return detail::increasing_root(
      [&](double p) { return (p - prm.c) * (1.0 - logit_demand(p, rival, prm).q1) - prm.mu; }, prm.c,
      prm.mu);
}

// Common price maximizing joint profit; FOC (p - c)(1 - q1 - q2) = mu.
inline double cartel_price(const EconParams& prm) {
  check_params(prm);
  return detail::increasing_root(
      [&](double p) {
        const auto d = logit_demand(p, p, prm);
        return (p - prm.c) * (1.0 - d.q1 - d.q2) - prm.mu;
      },
      prm.c, prm.mu);
}

// Symmetric fixed point of best-response iteration, then checked against every
// unilateral deviation on the price grid over [c, 2 * p_cartel].
inline double bertrand_equilibrium(const EconParams& prm, int max_iterations = 10000) {
  check_params(prm);
  double p = prm.c + prm.mu;
  bool converged = false;
  for (int it = 0; it < max_iterations; ++it) {
    const double next = best_response(p, prm);
    if (std::abs(next - p) < 1e-12) {
      p = next;
      converged = true;
      break;
    }
    p = next;
  }
  if (!converged) throw SolverFailure("best-response iteration did not converge");

  const double base = own_profit(p, p, prm);
  const double hi = 2.0 * cartel_price(prm);
  const double step = prm.price_grid_step > 0.0 ? prm.price_grid_step : 0.01;
  for (double dev = prm.c; dev <= hi; dev += step) {
    if (own_profit(dev, p, prm) > base + 1e-6) throw SolverFailure("equilibrium admits a profitable deviation");
  }
  return p;
}

inline ReferencePrices solve_references(const EconParams& prm) {
  ReferencePrices refs{bertrand_equilibrium(prm), cartel_price(prm)};
  if (!(prm.c < refs.p_bertrand && refs.p_bertrand < refs.p_cartel)) {
    throw SolverFailure("degenerate reference prices");
  }
  return refs;
}

// Finds (a, mu) with c and a0 held fixed so that the solvers return the target
// Bertrand and cartel prices. Damped Newton on the two residuals in log-space
// for the margins, so (a - c) and mu stay positive.
inline EconParams calibrate(double c, double a0, double target_bertrand, double target_cartel,
                            double grid_step = 0.01) {
  if (!(c < target_bertrand && target_bertrand < target_cartel)) {
    throw SolverFailure("calibration targets must satisfy c < bertrand < cartel");
  }
  auto make = [&](double log_margin, double log_mu) {
    EconParams p;
    p.c = c;
    p.a0 = a0;
    p.a = c + std::exp(log_margin);
    p.mu = std::exp(log_mu);
    p.price_grid_step = grid_step;
    return p;
  };
  auto residual = [&](double x, double y, double& r1, double& r2) {
    const auto p = make(x, y);
    double pb = p.c + p.mu;
    for (int i = 0; i < 10000; ++i) {
      const double next = best_response(pb, p);
      if (std::abs(next - pb) < 1e-13) break;
      pb = next;
    }
    r1 = pb - target_bertrand;
    r2 = cartel_price(p) - target_cartel;
  };

  // Start from the canonical (a - c = 1, mu = 0.25) shape scaled to the target markup.
  const double scale = (target_bertrand - c) / 0.473;
  double x = std::log(scale), y = std::log(0.25 * scale);
  double r1, r2;
  residual(x, y, r1, r2);
  for (int it = 0; it < 200; ++it) {
    const double norm = std::hypot(r1, r2);
    if (norm < 1e-11) return make(x, y);
    const double h = 1e-6;
    double a1, a2, b1, b2;
    residual(x + h, y, a1, a2);
    residual(x, y + h, b1, b2);
    const double j11 = (a1 - r1) / h, j21 = (a2 - r2) / h;
    const double j12 = (b1 - r1) / h, j22 = (b2 - r2) / h;
    const double det = j11 * j22 - j12 * j21;
    if (std::abs(det) < 1e-300) break;
    const double dx = -(j22 * r1 - j12 * r2) / det;
    const double dy = -(-j21 * r1 + j11 * r2) / det;
    double t = 1.0;
    bool improved = false;
    for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
      double n1, n2;
      residual(x + t * dx, y + t * dy, n1, n2);
      if (std::hypot(n1, n2) < norm) {
        x += t * dx;
        y += t * dy;
        r1 = n1;
        r2 = n2;
        improved = true;
        break;
      }
    }
    if (!improved) break;
  }
  if (std::hypot(r1, r2) < 1e-8) return make(x, y);
  throw SolverFailure("calibration did not converge");
}

inline EconParams econ_params_from_json(const json& j) {
  EconParams p;
  p.a = j.value("a", p.a);
  p.a0 = j.value("a0", p.a0);
  p.mu = j.value("mu", p.mu);
  p.c = j.value("c", p.c);
  p.price_grid_step = j.value("price_grid_step", p.price_grid_step);
  return p;
}

inline json to_json(const EconParams& p) {
  return json{{"a", p.a}, {"a0", p.a0}, {"mu", p.mu}, {"c", p.c}, {"price_grid_step", p.price_grid_step}};
}

}  // namespace coopsim::bc
