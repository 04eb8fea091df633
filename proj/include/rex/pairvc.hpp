#pragma once

// Pairing-based virtual connections for Reverse Hex.
//
// A connection for player x between two endpoints is carried by a pairing:
// whenever x owns at least one cell of every pair (plus the key, for a semi
// connection), the endpoints are joined by x stones. In Rex such a
// connection between x's own sides is a liability: the opponent can force x
// to complete it.

#include <optional>
#include <string>
#include <vector>

#include "rex/board.hpp"
#include "rex/inferior.hpp"

namespace rex {

/// Connection endpoint: one of a player's sides, or a cell. A cell endpoint
/// that holds a stone stands for the stone's group; an empty cell endpoint is
/// treated as colored by the connection's owner.
struct Endpoint {
  enum class Kind : std::uint8_t { Side, Cell };
  Kind kind = Kind::Cell;
  int id = 0;  // side node id or cell index

  static Endpoint side(int node) { return {Kind::Side, node}; }
  static Endpoint cell(int c) { return {Kind::Cell, c}; }
  bool operator==(const Endpoint&) const = default;
};
std::string to_string(const Endpoint& e, Dims d);

enum class VcKind : std::uint8_t { Full, Semi };

struct PairingVC {
  Player player = Player::Black;
  Endpoint a, b;
  VcKind kind = VcKind::Full;
  int key = kNoCell;
  Pairing pairing;

  /// Pairing cells plus the key.
  CellSet carrier() const;
  bool side_to_side() const;
};

struct WinCertificate {
  enum class Kind { JoinPairing, PreJoinPairing };
  Player winner;
  Kind kind;
  PairingVC vc;
};
std::string to_string(WinCertificate::Kind k);

struct HSearchOptions {
  /// Let two semi connections share pairs when the OR rule combines them.
  bool augmented = true;
  int max_pairing_cells = 16;
  int max_per_list = 16;
  /// Upper bound on processed connections, keeps the cost per call bounded.
  int max_work = 40000;
  /// Stop as soon as a full side-to-side connection is found.
  bool stop_at_full_join = false;
  /// Return every connection, not just the side-to-side ones.
  bool collect_all = false;
};

struct HSearchResult {
  Player player = Player::Black;
  std::vector<PairingVC> side_fulls;
  std::vector<PairingVC> side_semis;
  std::vector<PairingVC> all;  // only filled with collect_all
  int processed = 0;
};

/// Bottom-up AND/OR composition of pairing connections for player x.
HSearchResult hsearch(const Position& p, Player x,
                      const HSearchOptions& opt = {});

/// Early win from a full side-to-side connection (either player to move) or
/// a semi side-to-side connection held by the Last player.
std::optional<WinCertificate> detect_early_win(const GameState& s,
                                               const HSearchResult& black,
                                               const HSearchResult& white);

/// Keys of the mover's own semi side-to-side connections: each such move
/// completes a join-pairing for the mover and loses.
CellSet prune_keys(const GameState& s, const HSearchResult& mover);

/// Pairing-strategy move for `owner`, who is to move in `s`.
/// `opponent_move` is the opponent's previous move (kNoCell if none).
/// `forbidden` cells are never chosen while any other legal choice remains.
/// Throws std::logic_error if no cell is available.
int pairing_reply(const GameState& s, Player owner, const Pairing& pairing,
                  int opponent_move, const CellSet& forbidden = {});

/// Move for the certificate's winner: plays the pairing strategy over the
/// certificate pairing and never takes the key while another move exists.
int forcing_reply(const GameState& s, const WinCertificate& cert,
                  int opponent_move);

}  // namespace rex
