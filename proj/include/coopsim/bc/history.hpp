#pragma once

#include <algorithm>
#include <cstdio>
#include <string>
#include <vector>

#include "economics.hpp"

namespace coopsim::bc {

struct PriceRecord {
  int round = 0;
  double p1 = 0.0, p2 = 0.0;
  double q1 = 0.0, q2 = 0.0;
  double profit1 = 0.0, profit2 = 0.0;
};

using PriceHistory = std::vector<PriceRecord>;

struct CollusionWindow {
  int streak = 0;
  double close_price_threshold = 0.5;
  double band_tolerance = 0.1;
};

inline bool collusive(const PriceRecord& r, const ReferencePrices& refs, const CollusionWindow& w) {
  auto in_band = [&](double p) {
    return p >= refs.p_bertrand - w.band_tolerance && p <= refs.p_cartel + w.band_tolerance;
  };
  return std::abs(r.p1 - r.p2) <= w.close_price_threshold && in_band(r.p1) && in_band(r.p2);
}

// Length of the longest suffix of `history` in which every round is collusive.
inline int detect_collusion(const PriceHistory& history, const ReferencePrices& refs, const CollusionWindow& w) {
  int streak = 0;
  for (auto it = history.rbegin(); it != history.rend() && collusive(*it, refs, w); ++it) ++streak;
  return streak;
}

struct VerbatimRow {
  int round = 0;
  double own_price = 0.0, own_demand = 0.0, own_profit = 0.0, rival_price = 0.0;
};

struct HistoryBin {
  int first_round = 0;
  int last_round = 0;
  double own_price = 0.0, own_demand = 0.0, own_profit = 0.0, rival_price = 0.0;
};

struct StatisticsBlock {
  std::vector<HistoryBin> bins;       // oldest first
  std::vector<VerbatimRow> verbatim;  // oldest first

  std::string render_bins() const {
    if (bins.empty()) return "None";
    std::string out;
    char buf[160];
    for (const auto& b : bins) {
      std::snprintf(buf, sizeof buf, "Rounds #%d - #%d: [%.2f, %.3f, %.3f, %.2f]", b.first_round, b.last_round,
                    b.own_price, b.own_demand, b.own_profit, b.rival_price);
      out += (out.empty() ? "" : "\n") + std::string(buf);
    }
    return out;
  }

  std::string render_verbatim() const {
    if (verbatim.empty()) return "No decisions yet.";
    std::string out = "Your decisions in the most recent rounds ([your price, your demand, your profit, the other "
                      "player's price]):";
    char buf[160];
    for (const auto& r : verbatim) {
      std::snprintf(buf, sizeof buf, "\nRound #%d: [%.2f, %.3f, %.3f, %.2f]", r.round, r.own_price, r.own_demand,
                    r.own_profit, r.rival_price);
      out += buf;
    }
    return out;
  }

  std::string render() const { return render_bins() + "\n" + render_verbatim(); }
};

inline constexpr int kVerbatimRounds = 20;
inline constexpr int kBinRounds = 20;
inline constexpr int kMaxSummarizedRounds = 400;

// Prompt view of the past from firm `firm`'s side (0 or 1). The most recent
// min(20, r - 1) rounds are given row by row; older rounds, back to at most 400
// rounds before `current_round`, are averaged in consecutive 20-round bins
// starting from the oldest covered round.
inline StatisticsBlock summarize_history(const PriceHistory& history, int current_round, int firm = 0) {
  if (current_round < 1) throw std::invalid_argument("current_round must be >= 1");
  StatisticsBlock block;
  const int last = current_round - 1;
  const int verbatim_first = std::max(1, current_round - kVerbatimRounds);
  const int covered_first = std::max(1, current_round - kMaxSummarizedRounds);

  auto own = [&](const PriceRecord& r) {
    return firm == 0 ? VerbatimRow{r.round, r.p1, r.q1, r.profit1, r.p2} : VerbatimRow{r.round, r.p2, r.q2, r.profit2, r.p1};
  };

  // History is kept in round order.
  auto range = [&](int lo, int hi) {
    auto cmp = [](const PriceRecord& r, int round) { return r.round < round; };
    auto b = std::lower_bound(history.begin(), history.end(), lo, cmp);
    auto e = std::lower_bound(b, history.end(), hi + 1, cmp);
    return std::make_pair(b, e);
  };

  for (auto [it, end] = range(verbatim_first, last); it != end; ++it) block.verbatim.push_back(own(*it));

  for (int first = covered_first; first < verbatim_first; first += kBinRounds) {
    const int bin_last = std::min(first + kBinRounds - 1, verbatim_first - 1);
    HistoryBin bin{first, bin_last};
    int n = 0;
    for (auto [it, end] = range(first, bin_last); it != end; ++it) {
      const auto v = own(*it);
      bin.own_price += v.own_price;
      bin.own_demand += v.own_demand;
      bin.own_profit += v.own_profit;
      bin.rival_price += v.rival_price;
      ++n;
    }
    if (n > 0) {
      bin.own_price /= n;
      bin.own_demand /= n;
      bin.own_profit /= n;
      bin.rival_price /= n;
    }
    block.bins.push_back(bin);
  }
  return block;
}

}  // namespace coopsim::bc
