#pragma once

// Brute-force reference for small boards. Nothing here uses the union-find,
// hashing or pattern code of the other modules: adjacency is recomputed from
// the offsets and connectivity is a flood fill over 64-bit masks.

#include <cstdint>
#include <vector>

#include "rex/board.hpp"
#include "rex/inferior.hpp"
#include "rex/pairvc.hpp"

namespace rex {

struct OracleResult {
  Player winner = Player::Black;
  /// Winner after each legal move, row-major.
  std::vector<std::pair<int, Player>> move_winners;
};

/// Exhaustive negamax with a 2-bit memo indexed by the exact position.
/// One instance per board size; the memo persists across calls.
class Oracle {
 public:
  static constexpr int kMaxCells = 16;

  explicit Oracle(Dims d, bool memo = true);

  Dims dims() const { return dims_; }
  Player winner(const GameState& s);
  OracleResult solve(const GameState& s);
  std::uint64_t nodes() const { return nodes_; }

 private:
  Player negamax(std::uint32_t black, std::uint32_t white, Player to_move,
                 std::uint64_t index);

  Dims dims_;
  bool memo_on_;
  std::vector<std::uint8_t> memo_;
  std::vector<std::uint64_t> pow3_;
  std::uint64_t nodes_ = 0;
};

OracleResult oracle_solve(const GameState& s);

/// Independent join test: do x's stones in `stones` connect x's sides?
/// Boards up to 64 cells.
bool oracle_joined(Dims d, std::uint64_t stones, Player x);

struct JoinsetList {
  std::vector<CellSet> sets;
  bool partial = false;  // cap reached
};

/// Every minimal x-joinset, by subset enumeration (at most 22 empty cells).
JoinsetList enumerate_joinsets(const Position& p, Player x,
                               std::size_t cap = 1'000'000);

/// Empty cells in no minimal joinset of either player.
CellSet true_dead_cells(const Position& p);

/// Exhaustive selection check: for every choice of one cell per pair (plus
/// the key for a semi), owner-coloring the choice together with empty cell
/// endpoints joins the two endpoints.
bool verify_pairing_vc(const Position& p, const PairingVC& vc);

/// Every choice of one cell per pair, owner-colored, leaves every other
/// certificate cell dead (against the enumerated joinsets).
bool verify_capture(const Position& p, const CaptureCertificate& cert);

}  // namespace rex
