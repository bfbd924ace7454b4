#include <gtest/gtest.h>

#include <cmath>

#include "coopsim/agents/scripted.hpp"
#include "coopsim/bc/economics.hpp"
#include "coopsim/kernel/rng.hpp"

using namespace coopsim;
using namespace coopsim::bc;

namespace {

// Oracle demand written out directly, no shifting.
double oracle_share(double own, double rival, const EconParams& p) {
  const double e1 = std::exp((p.a - own) / p.mu);
  const double e2 = std::exp((p.a - rival) / p.mu);
  const double e0 = std::exp(p.a0 / p.mu);
  return e1 / (e1 + e2 + e0);
}

double oracle_profit(double own, double rival, const EconParams& p) { return (own - p.c) * oracle_share(own, rival, p); }

std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> g;
  const long n = std::lround((hi - lo) / step);
  for (long i = 0; i <= n; ++i) g.push_back(lo + static_cast<double>(i) * step);
  return g;
}

double grid_argmax_response(double rival, const EconParams& p, const std::vector<double>& g) {
  double best = g.front(), best_v = -1e300;
  for (double x : g) {
    const double v = oracle_profit(x, rival, p);
    if (v > best_v) best_v = v, best = x;
  }
  return best;
}

// Grid Bertrand oracle: the symmetric grid price whose best grid deviation is
// itself (or nearest to it). gap(p) = BR(p) - p is decreasing, so bisect on
// the grid index; each probe is a full scan over deviations.
double grid_bertrand(const EconParams& p, double hi, double step) {
  const auto g = grid(p.c, hi, step);
  std::size_t lo = 0, up = g.size() - 1;
  while (up - lo > 1) {
    const std::size_t mid = (lo + up) / 2;
    (grid_argmax_response(g[mid], p, g) > g[mid] ? lo : up) = mid;
  }
  const double gl = std::abs(grid_argmax_response(g[lo], p, g) - g[lo]);
  const double gu = std::abs(grid_argmax_response(g[up], p, g) - g[up]);
  return gl <= gu ? g[lo] : g[up];
}

double grid_cartel(const EconParams& p, double hi, double step) {
  double best = p.c, best_v = -1e300;
  for (double x : grid(p.c, hi, step)) {
    const double v = 2.0 * oracle_profit(x, x, p);
    if (v > best_v) best_v = v, best = x;
  }
  return best;
}

EconParams calibrated() {
  EconParams p;
  p.a = 6.012380501893249;
  p.mu = 3.3312699187262047;
  p.c = 1.0;
  p.a0 = 0.0;
  return p;
}

}  // namespace

TEST(LogitDemand, SharesSumToOneAndMoveTheRightWay) {
  RngStream rng(7);
  for (int i = 0; i < 1000; ++i) {
    EconParams p;
    p.a = 1.0 + 9.0 * rng.uniform01();
    p.a0 = -2.0 + 4.0 * rng.uniform01();
    p.mu = 0.1 + 4.9 * rng.uniform01();
    p.c = 2.0 * rng.uniform01();
    const double p1 = p.c + 10.0 * rng.uniform01();
    const double p2 = p.c + 10.0 * rng.uniform01();
    const auto d = logit_demand(p1, p2, p);
    ASSERT_LT(std::abs(d.q1 + d.q2 + d.q0 - 1.0), 1e-12);
    ASSERT_NEAR(d.q1, oracle_share(p1, p2, p), 1e-12);

    const double h = 1e-5;
    const auto up1 = logit_demand(p1 + h, p2, p), dn1 = logit_demand(p1 - h, p2, p);
    const auto up2 = logit_demand(p1, p2 + h, p), dn2 = logit_demand(p1, p2 - h, p);
    // A dominant share can sit at 1.0 in double precision; each share only has
    // to move weakly the right way, with at least one firm share moving.
    EXPECT_LE(up1.q1 - dn1.q1, 0.0) << "own-price effect, sample " << i;
    EXPECT_GE(up1.q2 - dn1.q2, 0.0) << "cross-price effect, sample " << i;
    EXPECT_GE(up1.q0 - dn1.q0, 0.0) << "outside good, sample " << i;
    EXPECT_TRUE(up1.q1 < dn1.q1 || up1.q2 > dn1.q2) << "sample " << i;
    EXPECT_LE(up2.q2 - dn2.q2, 0.0);
    EXPECT_GE(up2.q1 - dn2.q1, 0.0);
    EXPECT_TRUE(up2.q2 < dn2.q2 || up2.q1 > dn2.q1) << "sample " << i;
  }
}

TEST(LogitDemand, StableForExtremeUtilities) {
  EconParams p;
  p.mu = 0.01;
  const auto d = logit_demand(1.0, 30.0, p);
  EXPECT_TRUE(std::isfinite(d.q1));
  EXPECT_NEAR(d.q1 + d.q2 + d.q0, 1.0, 1e-12);
  EXPECT_GT(d.q1, 0.99);
}

TEST(LogitDemand, EqualPricesSplitEvenly) {
  const auto d = logit_demand(1.7, 1.7, EconParams{});
  EXPECT_DOUBLE_EQ(d.q1, d.q2);
}

TEST(ReferencePrices, CanonicalParametersMatchGridOracle) {
  const EconParams p;  // a=2, a0=0, mu=0.25, c=1
  const auto refs = solve_references(p);
  EXPECT_NEAR(refs.p_bertrand, 1.473, 1e-3);
  EXPECT_NEAR(refs.p_cartel, 1.925, 1e-3);
  EXPECT_NEAR(refs.p_bertrand, grid_bertrand(p, 3.0, 0.001), 1e-3);
  EXPECT_NEAR(refs.p_cartel, grid_cartel(p, 3.0, 0.001), 1e-3);
}

TEST(ReferencePrices, CalibratedDefaultsGiveSixAndEight) {
  const EconParams p = calibrated();
  const auto refs = solve_references(p);
  EXPECT_NEAR(refs.p_bertrand, 6.0, 0.1);
  EXPECT_NEAR(refs.p_cartel, 8.0, 0.1);
  EXPECT_NEAR(refs.p_bertrand, grid_bertrand(p, 12.0, 0.001), 1e-3);
  EXPECT_NEAR(refs.p_cartel, grid_cartel(p, 12.0, 0.001), 1e-3);
}

TEST(ReferencePrices, BertrandBelowCartel) {
  RngStream rng(11);
  for (int i = 0; i < 50; ++i) {
    EconParams p;
    p.a = 1.5 + 5.0 * rng.uniform01();
    p.mu = 0.1 + 2.0 * rng.uniform01();
    p.c = rng.uniform01();
    const auto refs = solve_references(p);
    EXPECT_LT(p.c, refs.p_bertrand);
    EXPECT_LT(refs.p_bertrand, refs.p_cartel);
  }
}

TEST(ReferencePrices, BestResponseIsMonotoneInRivalPrice) {
  const EconParams p = calibrated();
  double prev = best_response(1.0, p);
  for (double r = 1.5; r < 15.0; r += 0.5) {
    const double br = best_response(r, p);
    EXPECT_GT(br, prev);
    EXPECT_LT(br - prev, 0.5);  // slope below one
    prev = br;
  }
}

TEST(ReferencePrices, InvalidParametersThrow) {
  EconParams p;
  p.mu = 0.0;
  EXPECT_THROW(solve_references(p), SolverFailure);
  p.mu = -1.0;
  EXPECT_THROW(best_response(1.0, p), SolverFailure);
  p = EconParams{};
  p.c = std::nan("");
  EXPECT_THROW(cartel_price(p), SolverFailure);
}

TEST(Calibration, RecoversTargets) {
  const EconParams p = calibrate(1.0, 0.0, 6.0, 8.0);
  const auto refs = solve_references(p);
  EXPECT_NEAR(refs.p_bertrand, 6.0, 1e-6);
  EXPECT_NEAR(refs.p_cartel, 8.0, 1e-6);
  EXPECT_NEAR(p.a, 6.0123805, 1e-6);
  EXPECT_NEAR(p.mu, 3.3312699, 1e-6);
  EXPECT_THROW(calibrate(1.0, 0.0, 8.0, 6.0), SolverFailure);
}

TEST(BestResponseDynamics, ConvergeToBertrandFromRandomStarts) {
  for (const EconParams& p : {EconParams{}, calibrated()}) {
    const auto refs = solve_references(p);
    RngStream rng(3);
    for (int start = 0; start < 10; ++start) {
      double p1 = p.c + (2.0 * refs.p_cartel - p.c) * rng.uniform01();
      double p2 = p.c + (2.0 * refs.p_cartel - p.c) * rng.uniform01();
      int it = 0;
      for (; it < 200; ++it) {
        const double n1 = br_price(p2, p, 0.001), n2 = br_price(p1, p, 0.001);
        p1 = n1, p2 = n2;
        if (std::abs(p1 - refs.p_bertrand) < 1e-2 && std::abs(p2 - refs.p_bertrand) < 1e-2) break;
      }
      EXPECT_LT(it, 200) << "start " << start;
    }
  }
}

TEST(BestResponseGrid, FirstMaximumOnGrid) {
  const EconParams p;
  const double br = br_price(1.5, p, 0.01);
  EXPECT_NEAR(br, best_response(1.5, p), 0.01);
  EXPECT_NEAR(std::fmod(br - p.c + 1e-9, 0.01), 0.0, 1e-6);
}
