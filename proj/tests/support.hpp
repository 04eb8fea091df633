#pragma once

// Shared helpers for the test binaries.

#include <functional>
#include <random>
#include <string>
#include <unordered_set>
#include <vector>

#include "rex/board.hpp"

namespace rex::test {

inline int cell(const char* name, Dims d) { return index_of(parse_cell(name, d), d); }

inline CellSet cells(std::initializer_list<const char*> names, Dims d) {
  CellSet s;
  for (const char* n : names) s.insert(cell(n, d));
  return s;
}

/// Plays the named cells alternately, starting with the player to move.
inline GameState play(GameState s, std::initializer_list<const char*> moves) {
  for (const char* m : moves) s = s.play(cell(m, s.pos.dims()));
  return s;
}

inline GameState after_bd1() { return play(GameState::empty({4, 4}), {"d1"}); }

/// Every non-terminal state reachable from the empty board by alternating
/// play with at most `max_stones` stones, Black first.
inline std::vector<GameState> reachable_states(Dims d, int max_stones) {
  std::vector<GameState> out;
  std::unordered_set<std::uint64_t> seen;
  std::function<void(const GameState&)> walk = [&](const GameState& s) {
    if (!seen.insert(exact_hash(s)).second) return;
    out.push_back(s);
    if (d.cells() - s.pos.num_empty() >= max_stones) return;
    for (int c : s.pos.empty_cells()) {
      GameState t = s.play(c);
      if (!t.pos.terminal_loser()) walk(t);
    }
  };
  walk(GameState::empty(d));
  return out;
}

/// A random non-terminal state reached by alternating random play from the
/// empty board with `stones` stones (fewer if play ends earlier).
inline GameState random_state(Dims d, int stones, std::mt19937_64& rng) {
  GameState s = GameState::empty(d);
  for (int k = 0; k < stones; ++k) {
    std::vector<int> empty = s.pos.empty_cells().to_vector();
    GameState t = s.play(empty[rng() % empty.size()]);
    if (t.pos.terminal_loser()) break;
    s = t;
  }
  return s;
}

/// Random position with independently colored cells (not necessarily
/// reachable), no side joined.
inline Position random_position(Dims d, double fill, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  Position p(d);
  for (int c = 0; c < d.cells(); ++c) {
    if (u(rng) >= fill) continue;
    Position q = p.colored(c, rng() & 1 ? Player::Black : Player::White);
    if (!q.terminal_loser()) p = q;
  }
  return p;
}

}  // namespace rex::test
