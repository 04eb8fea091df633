#pragma once

// Inferior cell analysis for Reverse Hex: dead cells, captured sets,
// winner-preserving fillin and move pruning by domination.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rex/board.hpp"

namespace rex {

/// A partition of an even-sized cell set into pairs. Cells are board
/// indices.
class Pairing {
 public:
  Pairing() = default;
  explicit Pairing(std::vector<std::pair<int, int>> pairs);

  const std::vector<std::pair<int, int>>& pairs() const { return pairs_; }
  const CellSet& cells() const { return cells_; }
  int size() const { return static_cast<int>(pairs_.size()); }
  bool empty() const { return pairs_.empty(); }
  bool contains(int cell) const { return cells_.contains(cell); }
  /// Partner of a paired cell; kNoCell for cells outside the pairing.
  int mate(int cell) const;

  void add(int a, int b);
  bool operator==(const Pairing& o) const { return pairs_ == o.pairs_; }

 private:
  std::vector<std::pair<int, int>> pairs_;
  CellSet cells_;
};

struct CaptureCertificate {
  Player owner;
  CellSet cells;
  Pairing pairing;
};

enum class FillinReason { Captured, DeadPair, MutualFillin };
std::string to_string(FillinReason r);

struct FillinStep {
  int cell;
  Player color;
  FillinReason reason;
};
using FillinRecord = std::vector<FillinStep>;

enum class PruneReason {
  DeadDominatesAll,
  VictimOverKiller,
  VulnerableOverOppKiller,
  CaptureeOverCapturer,
  MutualFillinCreator,
  PreJoinKey,
};
std::string to_string(PruneReason r);

struct PrunedMove {
  int cell;
  PruneReason reason;
  int dominator;  // kNoCell for pre-join keys
};

struct PruneReport {
  CellSet kept;
  std::vector<PrunedMove> removed;
};

/// One instance of mutual fillin: coloring `a` for `x` and `b` for the
/// opponent preserves the winner. `a_set` is x-captured once b is
/// opponent-colored; `b_set` is opponent-captured once a is x-colored.
struct MutualFillin {
  Player x;
  int a;
  CellSet a_set;
  int b;
  CellSet b_set;
};

struct DeadOptions {
  /// Also report whole empty regions whose boundary is a clique.
  bool clique_cutset = true;
};

struct FillinOptions {
  bool capture = true;
  bool dead = true;
  bool mutual = true;
  bool clique_cutset = true;
};

struct PruneOptions {
  bool clique_cutset = true;
  bool mutual_creator = true;
};

/// Clique test for one empty cell and one player: true when the cell's
/// neighbourhood in the player's graph (own groups and sides contracted,
/// opponent stones removed) is a clique, so the cell lies in no minimal
/// joinset of that player.
bool dead_for(const Position& p, int cell, Player x);
/// Dead for both players.
bool is_dead(const Position& p, int cell);

/// Sound, possibly incomplete set of dead empty cells.
CellSet find_dead_cells(const Position& p, const DeadOptions& opt = {});

/// Whether {u, v} is x-captured with the single pair {u, v}.
bool captures_pair(const Position& p, int u, int v, Player x);

/// Pattern-based x-captured sets; certificates are pairwise disjoint, chosen
/// greedily in row-major order.
std::vector<CaptureCertificate> find_captured(const Position& p, Player x);

/// Mutual fillin instances from the three-cell pattern class (a and b both
/// adjacent to a middle cell m, a and b not adjacent; captured sets {a, m}
/// and {m, b}). `near`, when given, restricts the middle cell to that set.
std::vector<MutualFillin> find_mutual_fillin(const Position& p,
                                             const CellSet* near = nullptr);

/// Applies captured-set fillin, paired dead-cell fillin and mutual fillin
/// until none applies. The returned state has the same winner and the same
/// player to move.
std::pair<GameState, FillinRecord> fillin(const GameState& s,
                                          const FillinOptions& opt = {});

/// Candidate moves for the player to move after domination pruning. Never
/// empties the candidate set of a state with empty cells.
PruneReport prune_moves(const GameState& s, const PruneOptions& opt = {});

}  // namespace rex
