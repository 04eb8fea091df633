#pragma once

// Focused depth-first proof-number search for Reverse Hex.
//
// Proof and disproof numbers are kept from the point of view of the player
// to move at each node (negamax form): proof = min over children disproof,
// disproof = sum over children proof.

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rex/board.hpp"
#include "rex/inferior.hpp"
#include "rex/pairvc.hpp"

namespace rex {

enum class Feature {
  CaptureFillin,
  DeadFillin,
  MutualFillin,
  InferiorPrune,
  HSearch,
  AugmentedHSearch,
  ColorSymmetry,
  DeadCliqueCutset,
  ResistanceOrdering,
  VcDecomp,
};
inline constexpr int kNumFeatures = 10;

/// Flag spelling used on the command line, e.g. "capture-fillin".
std::string_view feature_name(Feature f);
std::optional<Feature> parse_feature(std::string_view name);
const std::array<Feature, kNumFeatures>& all_features();

struct SearchConfig {
  int threads = 1;
  std::size_t tt_bytes = std::size_t{256} << 20;  // 0 disables the table
  /// Children searched before widening; doubled each time the focused set
  /// is refuted.
  int initial_width = 4;
  /// Child disproof threshold is second-best * (1 + epsilon).
  double epsilon = 0.25;
  /// Time limit in seconds; <= 0 means none.
  double time_limit = 0;
  std::uint64_t seed = 0;
  /// Rex polarity: prefer moves that keep the mover's own side-to-side
  /// resistance high relative to the opponent's.
  bool resistance_rex_polarity = true;
  /// Upper bound on entries in each worker's knowledge cache.
  std::size_t knowledge_cache_entries = 1 << 17;
  HSearchOptions hsearch;

  std::array<bool, kNumFeatures> features = {true, true, true, true, true,
                                             true, true, true, true, false};
  bool on(Feature f) const { return features[static_cast<int>(f)]; }
  void set(Feature f, bool v) { features[static_cast<int>(f)] = v; }
};

/// Saturating proof/disproof pair.
struct PDN {
  static constexpr std::uint64_t kInf = std::uint64_t{1} << 40;
  std::uint64_t proof = 1;
  std::uint64_t disproof = 1;

  bool proved() const { return proof == 0; }
  bool disproved() const { return disproof == 0; }
  bool solved() const { return proof == 0 || disproof == 0; }
  static PDN win() { return {0, kInf}; }
  static PDN loss() { return {kInf, 0}; }
};

struct TTEntry {
  std::uint64_t key = 0;
  std::uint64_t proof = 1, disproof = 1;
  std::uint64_t work = 0;
  std::uint16_t depth = 0;
  std::uint8_t best = kNoCell;  // in the canonical frame
  bool used = false;

  bool solved() const { return proof == 0 || disproof == 0; }
};

/// Shared table keyed by the rotation-canonical state hash. Buckets of four
/// entries with striped locks. Replacement prefers keeping solved entries,
/// then larger work, then greater depth; solved entries are never replaced
/// by unsolved data for the same key.
class TranspositionTable {
 public:
  explicit TranspositionTable(std::size_t bytes);

  bool enabled() const { return !entries_.empty(); }
  std::optional<TTEntry> probe(std::uint64_t key) const;
  void store(const TTEntry& e);
  void clear();
  std::size_t capacity() const { return entries_.size(); }

 private:
  static constexpr int kWays = 4;
  static constexpr int kStripes = 1024;
  std::vector<TTEntry> entries_;
  std::size_t mask_ = 0;  // bucket index mask
  mutable std::array<std::mutex, kStripes> locks_;
};

enum class KnowledgeSource {
  None,
  Terminal,
  Transposition,
  ColorSymmetry,
  Certificate,
  AllKeysLose,
};
std::string to_string(KnowledgeSource k);

struct KnowledgeResult {
  GameState reduced;
  FillinRecord fillin;
  PruneReport prune;
  CellSet pruned_keys;
  std::optional<Player> winner;
  KnowledgeSource source = KnowledgeSource::None;
  std::optional<WinCertificate> certificate;
  /// Candidate moves of the reduced state, best first. Empty when solved.
  std::vector<int> moves;
};

/// Knowledge pipeline for one state: fillin, table probe, color symmetry,
/// pruning, H-search for both players, early-win detection, key pruning and
/// move ordering. `tt` may be null.
KnowledgeResult evaluate_leaf(const GameState& s, const SearchConfig& cfg,
                              const TranspositionTable* tt = nullptr);

/// Orders `moves` for the player to move by the electrical resistance
/// heuristic. Ties keep row-major order.
std::vector<int> resistance_order(const GameState& s, const std::vector<int>& moves,
                                  bool rex_polarity = true);

/// Side-to-side resistance of player x's network: empty cells have
/// conductance 1, x groups are contracted, opponent stones removed.
/// Infinity when the sides are disconnected, 0 when already joined.
double side_resistance(const Position& p, Player x);

struct SearchStats {
  std::uint64_t nodes = 0;
  std::uint64_t knowledge_calls = 0;
  std::uint64_t knowledge_cache_hits = 0;
  std::uint64_t tt_hits = 0;
  double seconds = 0;

  SearchStats& operator+=(const SearchStats& o);
};

enum class SolveStatus { Solved, Timeout };

struct SolveResult {
  SolveStatus status = SolveStatus::Timeout;
  std::optional<Player> winner;
  std::vector<int> principal_line;
  /// Winner after each legal root move (solve_all_moves only).
  std::vector<std::pair<int, Player>> move_values;
  SearchStats stats;
};

class Solver {
 public:
  explicit Solver(SearchConfig cfg = {});
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  const SearchConfig& config() const { return cfg_; }
  SolveResult solve(const GameState& s);
  /// Solves every legal move of s; the table is shared between the moves.
  SolveResult solve_all_moves(const GameState& s);
  void clear();

 private:
  struct Shared;
  SolveResult run(const GameState& s, std::chrono::steady_clock::time_point deadline,
                  bool have_deadline);

  SearchConfig cfg_;
  std::unique_ptr<Shared> shared_;
};

SolveResult solve(const GameState& s, const SearchConfig& cfg = {});
SolveResult solve_all_moves(const GameState& s, const SearchConfig& cfg = {});

}  // namespace rex
