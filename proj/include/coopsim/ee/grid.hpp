#pragma once

// Evacuation room: 1-based (x, y) cells, x grows downward (rows), y grows to the
// right (columns), (1, 1) is the top-left corner. Exits are spans of boundary cells.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <optional>
#include <string>
#include <vector>

#include "../kernel/types.hpp"

namespace coopsim::ee {

struct Cell {
  int x = 1;
  int y = 1;
  bool operator==(const Cell&) const = default;
  auto operator<=>(const Cell&) const = default;
};

inline int chebyshev(Cell p, Cell q) { return std::max(std::abs(p.x - q.x), std::abs(p.y - q.y)); }

inline std::string to_string(Cell c) { return "(" + std::to_string(c.x) + ", " + std::to_string(c.y) + ")"; }

struct ExitSpec {
  ExitId id = ExitId::Left;
  std::vector<Cell> cells;
  Cell center;
};

// Span of `width` cells centered on the wall's midpoint.
inline ExitSpec make_exit(ExitId id, int height, int width, int span) {
  ExitSpec e;
  e.id = id;
  const int mid_row = (height + 1) / 2;
  const int mid_col = (width + 1) / 2;
  const int half = span / 2;
  auto along = [&](int mid, int i) { return mid - half + i; };
  for (int i = 0; i < span; ++i) {
    switch (id) {
      case ExitId::Left: e.cells.push_back({along(mid_row, i), 1}); break;
      case ExitId::Right: e.cells.push_back({along(mid_row, i), width}); break;
      case ExitId::Bottom: e.cells.push_back({height, along(mid_col, i)}); break;
    }
  }
  switch (id) {
    case ExitId::Left: e.center = {mid_row, 1}; break;
    case ExitId::Right: e.center = {mid_row, width}; break;
    case ExitId::Bottom: e.center = {height, mid_col}; break;
  }
  return e;
}

inline int exit_distance(Cell pos, const ExitSpec& exit) {
  int best = std::numeric_limits<int>::max();
  for (const auto& c : exit.cells) best = std::min(best, chebyshev(pos, c));
  return best;
}

class Grid {
 public:
  Grid(int height = 33, int width = 33, int exit_span = 3)
      : height_(height), width_(width), cells_(static_cast<std::size_t>(height * width)) {
    if (height < 3 || width < 3) throw ConfigError("grid must be at least 3x3");
    if (exit_span < 1 || exit_span > std::min(height, width) - 2) throw ConfigError("bad exit span");
    for (auto id : kAllExits) exits_.push_back(make_exit(id, height, width, exit_span));
  }

  int height() const { return height_; }
  int width() const { return width_; }
  const std::vector<ExitSpec>& exits() const { return exits_; }
  const ExitSpec& exit(ExitId id) const {
    for (const auto& e : exits_) {
      if (e.id == id) return e;
    }
    throw std::out_of_range("no such exit");
  }

  bool in_bounds(Cell c) const { return c.x >= 1 && c.x <= height_ && c.y >= 1 && c.y <= width_; }

  std::optional<ExitId> exit_at(Cell c) const {
    for (const auto& e : exits_) {
      if (std::find(e.cells.begin(), e.cells.end(), c) != e.cells.end()) return e.id;
    }
    return std::nullopt;
  }

  // Empty string when vacant.
  const AgentId& at(Cell c) const { return cells_.at(index(c)); }
  bool occupied(Cell c) const { return !at(c).empty(); }

  void place(const AgentId& id, Cell c) {
    if (id.empty()) throw std::invalid_argument("empty agent id");
    auto& slot = cells_.at(index(c));
    if (!slot.empty()) throw std::logic_error("cell " + to_string(c) + " already occupied by " + slot);
    slot = id;
  }
  void vacate(Cell c) { cells_.at(index(c)).clear(); }

  std::size_t population() const {
    return static_cast<std::size_t>(std::count_if(cells_.begin(), cells_.end(), [](const auto& s) { return !s.empty(); }));
  }

  template <typename F>
  void for_each_occupied(F&& f) const {
    for (int x = 1; x <= height_; ++x) {
      for (int y = 1; y <= width_; ++y) {
        const auto& id = cells_[index({x, y})];
        if (!id.empty()) f(Cell{x, y}, id);
      }
    }
  }

 private:
  std::size_t index(Cell c) const {
    if (!in_bounds(c)) throw std::out_of_range("cell " + to_string(c) + " outside grid");
    return static_cast<std::size_t>((c.x - 1) * width_ + (c.y - 1));
  }

  int height_;
  int width_;
  std::vector<AgentId> cells_;
  std::vector<ExitSpec> exits_;
};

// Other agents inside the rectangle spanned by `pos` and the exit's center,
// restricted to Chebyshev radius `view_radius` around `pos`.
inline int congestion_count(Cell pos, const ExitSpec& exit, const Grid& grid, int view_radius) {
  const int x0 = std::max(std::min(pos.x, exit.center.x), pos.x - view_radius);
  const int x1 = std::min(std::max(pos.x, exit.center.x), pos.x + view_radius);
  const int y0 = std::max(std::min(pos.y, exit.center.y), pos.y - view_radius);
  const int y1 = std::min(std::max(pos.y, exit.center.y), pos.y + view_radius);
  int count = 0;
  for (int x = std::max(1, x0); x <= std::min(grid.height(), x1); ++x) {
    for (int y = std::max(1, y0); y <= std::min(grid.width(), y1); ++y) {
      const Cell c{x, y};
      if (c != pos && grid.occupied(c)) ++count;
    }
  }
  return count;
}

// Agents within Chebyshev `radius` of `pos`, excluding whoever stands on `pos`, in row-major order.
inline std::vector<AgentId> agents_within(Cell pos, const Grid& grid, int radius) {
  std::vector<AgentId> out;
  for (int x = std::max(1, pos.x - radius); x <= std::min(grid.height(), pos.x + radius); ++x) {
    for (int y = std::max(1, pos.y - radius); y <= std::min(grid.width(), pos.y + radius); ++y) {
      const Cell c{x, y};
      if (c != pos && grid.occupied(c)) out.push_back(grid.at(c));
    }
  }
  return out;
}

inline std::vector<AgentId> hearable_agents(Cell pos, const Grid& grid, int radius = 5) {
  return agents_within(pos, grid, radius);
}

struct MoveOption {
  char code = 'S';
  Cell target;
  const char* direction = "stay";
};

struct Direction {
  char code;
  int dx;
  int dy;
  const char* name;
};

inline constexpr std::array<Direction, 9> kDirections{{{'A', -1, -1, "up-left"},
                                                       {'B', -1, 0, "up"},
                                                       {'C', -1, 1, "up-right"},
                                                       {'D', 0, -1, "left"},
                                                       {'E', 0, 1, "right"},
                                                       {'F', 1, -1, "down-left"},
                                                       {'G', 1, 0, "down"},
                                                       {'H', 1, 1, "down-right"},
                                                       {'S', 0, 0, "stay"}}};

inline std::optional<Cell> move_target(Cell pos, char code) {
  for (const auto& d : kDirections) {
    if (d.code == code) return Cell{pos.x + d.dx, pos.y + d.dy};
  }
  return std::nullopt;
}

// Stay plus every in-grid, unoccupied 8-neighbour, in canonical code order.
inline std::vector<MoveOption> legal_moves(Cell pos, const Grid& grid) {
  std::vector<MoveOption> out;
  for (const auto& d : kDirections) {
    const Cell t{pos.x + d.dx, pos.y + d.dy};
    if (d.code == 'S') {
      out.push_back({d.code, pos, d.name});
    } else if (grid.in_bounds(t) && !grid.occupied(t)) {
      out.push_back({d.code, t, d.name});
    }
  }
  return out;
}

struct MoveRequest {
  AgentId agent;
  Cell from;
  Cell target;
};

struct MoveOutcome {
  AgentId agent;
  Cell from;
  Cell to;
  bool downgraded = false;  // target was taken earlier in the round
};

struct EscapeEvent {
  AgentId agent;
  ExitId exit;
  Cell cell;
};

struct ApplyResult {
  std::vector<MoveOutcome> moves;
  std::vector<EscapeEvent> escapes;
};

// Applies requests in order. A request whose target is occupied at its turn (or
// is not adjacent) becomes a stay. Agents that end on an exit cell leave the grid
// after all requests are processed, so each exit cell passes at most one agent per round.
inline ApplyResult apply_moves(const std::vector<MoveRequest>& requests, Grid& grid) {
  ApplyResult result;
  for (const auto& r : requests) {
    if (grid.at(r.from) != r.agent) throw std::logic_error("agent " + r.agent + " is not at " + to_string(r.from));
    MoveOutcome out{r.agent, r.from, r.from, false};
    if (r.target != r.from) {
      if (grid.in_bounds(r.target) && chebyshev(r.from, r.target) == 1 && !grid.occupied(r.target)) {
        grid.vacate(r.from);
        grid.place(r.agent, r.target);
        out.to = r.target;
      } else {
        out.downgraded = true;
      }
    }
    result.moves.push_back(out);
  }
  for (const auto& m : result.moves) {
    if (auto exit = grid.exit_at(m.to)) {
      grid.vacate(m.to);
      result.escapes.push_back({m.agent, *exit, m.to});
    }
  }
  return result;
}

}  // namespace coopsim::ee
