#pragma once

// Board geometry, positions and game states for Reverse Hex.
//
// Cells are indexed row-major: index = row * width + col. Black owns the top
// (row 0) and bottom (row height-1) edges, White owns the left (col 0) and
// right (col width-1) edges. The acute corners are a1 and the cell at
// (width-1, height-1).

#include <array>
#include <bit>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace rex {

enum class Player : std::uint8_t { Black = 0, White = 1 };

constexpr Player opponent(Player p) {
  return p == Player::Black ? Player::White : Player::Black;
}
char to_char(Player p);
std::string to_string(Player p);

enum class Color : std::uint8_t { Empty = 0, Black = 1, White = 2 };

constexpr Color color_of(Player p) {
  return p == Player::Black ? Color::Black : Color::White;
}

/// Raised for contract violations by callers (out-of-range cells, coloring
/// an occupied cell, unsupported board shapes).
class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed position text. Line and column are 1-based.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int column);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

inline constexpr int kMaxSide = 13;
inline constexpr int kMaxCells = kMaxSide * kMaxSide;
inline constexpr int kNoCell = 255;

// Union-find node ids for the virtual side nodes, after the cell ids.
inline constexpr int kBlackNorth = kMaxCells;
inline constexpr int kBlackSouth = kMaxCells + 1;
inline constexpr int kWhiteWest = kMaxCells + 2;
inline constexpr int kWhiteEast = kMaxCells + 3;
inline constexpr int kNumNodes = kMaxCells + 4;

constexpr std::pair<int, int> side_nodes(Player p) {
  return p == Player::Black ? std::pair{kBlackNorth, kBlackSouth}
                            : std::pair{kWhiteWest, kWhiteEast};
}

struct Dims {
  int width = 0;
  int height = 0;

  int cells() const { return width * height; }
  bool square() const { return width == height; }
  bool operator==(const Dims&) const = default;
};

void validate(Dims d);

struct Coord {
  int col = 0;
  int row = 0;

  bool operator==(const Coord&) const = default;
  auto operator<=>(const Coord&) const = default;
};

inline int index_of(Coord c, Dims d) { return c.row * d.width + c.col; }
inline Coord coord_of(int cell, Dims d) {
  return {cell % d.width, cell / d.width};
}
bool in_bounds(Coord c, Dims d);

/// "a1"-style name. Columns are letters, rows are 1-based numbers.
std::string cell_name(Coord c);
std::string cell_name(int cell, Dims d);
/// Parses "c3" (optionally prefixed with B/W, which is ignored here).
Coord parse_cell(std::string_view text, Dims d);

/// Fixed-capacity bitset over cell indices (also reused for union-find node
/// ids, which fit in the same capacity). Iteration is in increasing index
/// order, i.e. row-major for cells.
class CellSet {
 public:
  static constexpr int kWords = 3;
  static constexpr int kCapacity = kWords * 64;

  constexpr CellSet() = default;

  static CellSet of(std::initializer_list<int> cells) {
    CellSet s;
    for (int c : cells) s.insert(c);
    return s;
  }

  bool contains(int i) const { return (w_[i >> 6] >> (i & 63)) & 1U; }
  void insert(int i) { w_[i >> 6] |= std::uint64_t{1} << (i & 63); }
  void erase(int i) { w_[i >> 6] &= ~(std::uint64_t{1} << (i & 63)); }

  int size() const {
    return std::popcount(w_[0]) + std::popcount(w_[1]) + std::popcount(w_[2]);
  }
  bool empty() const { return (w_[0] | w_[1] | w_[2]) == 0; }
  bool intersects(const CellSet& o) const {
    return ((w_[0] & o.w_[0]) | (w_[1] & o.w_[1]) | (w_[2] & o.w_[2])) != 0;
  }
  bool is_subset_of(const CellSet& o) const {
    return ((w_[0] & ~o.w_[0]) | (w_[1] & ~o.w_[1]) | (w_[2] & ~o.w_[2])) ==
           0;
  }
  /// Lowest index, or -1 when empty.
  int first() const {
    for (int k = 0; k < kWords; ++k)
      if (w_[k]) return k * 64 + std::countr_zero(w_[k]);
    return -1;
  }

  CellSet& operator|=(const CellSet& o) {
    for (int k = 0; k < kWords; ++k) w_[k] |= o.w_[k];
    return *this;
  }
  CellSet& operator&=(const CellSet& o) {
    for (int k = 0; k < kWords; ++k) w_[k] &= o.w_[k];
    return *this;
  }
  CellSet& operator-=(const CellSet& o) {
    for (int k = 0; k < kWords; ++k) w_[k] &= ~o.w_[k];
    return *this;
  }
  friend CellSet operator|(CellSet a, const CellSet& b) { return a |= b; }
  friend CellSet operator&(CellSet a, const CellSet& b) { return a &= b; }
  friend CellSet operator-(CellSet a, const CellSet& b) { return a -= b; }
  bool operator==(const CellSet&) const = default;

  class Iterator {
   public:
    Iterator(const CellSet* s, int k, std::uint64_t bits)
        : s_(s), k_(k), bits_(bits) {
      advance();
    }
    int operator*() const { return k_ * 64 + std::countr_zero(bits_); }
    Iterator& operator++() {
      bits_ &= bits_ - 1;
      advance();
      return *this;
    }
    bool operator!=(const Iterator& o) const {
      return k_ != o.k_ || bits_ != o.bits_;
    }

   private:
    void advance() {
      while (bits_ == 0 && k_ < kWords - 1) bits_ = s_->w_[++k_];
      if (bits_ == 0) k_ = kWords;
    }
    const CellSet* s_;
    int k_;
    std::uint64_t bits_;
  };
  Iterator begin() const { return Iterator(this, 0, w_[0]); }
  Iterator end() const { return Iterator(this, kWords, 0); }

  std::vector<int> to_vector() const;
  std::uint64_t word(int k) const { return w_[k]; }

 private:
  std::array<std::uint64_t, kWords> w_{};
};

/// Precomputed adjacency and edge masks for one board size. Obtained through
/// geometry(); instances are immutable and shared.
struct Geometry {
  Dims dims;
  CellSet board;
  CellSet north, south, west, east;
  std::array<CellSet, kMaxCells> nbr_set;
  std::array<std::array<std::uint8_t, 6>, kMaxCells> nbr;
  std::array<std::uint8_t, kMaxCells> degree{};

  /// Edge cells touching a side node.
  const CellSet& edge(int side_node) const;
  /// Cells within hex distance 2 of cell (excluding the cell).
  std::array<CellSet, kMaxCells> ball2;
};

const Geometry& geometry(Dims d);

/// In-bounds neighbors of c, offsets (+-1,0), (0,+-1), (+1,-1), (-1,+1).
CellSet neighbors(Coord c, Dims d);

/// Hex distance between two cells.
int hex_distance(Coord a, Coord b);

/// A board with stones and group structure. Group membership is kept as a
/// flattened union-find over cells plus the four side nodes, so find() is a
/// single lookup.
class Position {
 public:
  Position() = default;
  explicit Position(Dims d);

  Dims dims() const { return dims_; }
  const Geometry& geom() const { return geom_ ? *geom_ : geometry(dims_); }

  Color at(int cell) const {
    if (black_.contains(cell)) return Color::Black;
    if (white_.contains(cell)) return Color::White;
    return Color::Empty;
  }
  Color at(Coord c) const;

  const CellSet& stones(Player p) const {
    return p == Player::Black ? black_ : white_;
  }
  CellSet empty_cells() const { return geom().board - black_ - white_; }
  int num_empty() const { return dims_.cells() - black_.size() - white_.size(); }

  /// Value-semantics move: returns a copy with the cell colored.
  Position colored(int cell, Player p) const {
    Position q = *this;
    q.play(cell, p);
    return q;
  }
  Position colored(Coord c, Player p) const;

  /// In-place coloring; throws UsageError when the cell is occupied.
  void play(int cell, Player p);

  int find(int node) const { return root_[node]; }
  bool sides_joined(Player p) const {
    auto [a, b] = side_nodes(p);
    return root_[a] == root_[b];
  }
  std::optional<Player> terminal_loser() const;

  std::uint64_t hash() const { return hash_; }
  std::uint64_t hash_rotated() const { return hash_rot_; }

  Position rotate180() const;
  /// Reflects across the long diagonal and swaps colors. Square boards only.
  Position color_swap_transpose() const;

  bool operator==(const Position& o) const {
    return dims_ == o.dims_ && black_ == o.black_ && white_ == o.white_;
  }

 private:
  void unite(int a, int b);

  Dims dims_{};
  const Geometry* geom_ = nullptr;
  CellSet black_, white_;
  std::uint64_t hash_ = 0;
  std::uint64_t hash_rot_ = 0;
  std::array<std::uint8_t, kNumNodes> root_{};
};

/// Free-function forms of the core position operations.
Position color_cell(const Position& p, Coord c, Player x);
bool sides_joined(const Position& p, Player x);
std::optional<Player> terminal_loser(const Position& p);
Position color_swap_transpose(const Position& p);

struct GameState {
  Position pos;
  Player to_move = Player::Black;

  GameState() = default;
  GameState(Position p, Player x) : pos(std::move(p)), to_move(x) {}
  static GameState empty(Dims d, Player x = Player::Black) {
    return {Position(d), x};
  }

  /// The player who would color the last cell of a fully played-out board.
  Player last_player() const {
    return pos.num_empty() % 2 == 1 ? to_move : opponent(to_move);
  }
  bool is_last(Player p) const { return last_player() == p; }

  GameState play(int cell) const {
    return {pos.colored(cell, to_move), opponent(to_move)};
  }
  GameState rotate180() const { return {pos.rotate180(), to_move}; }

  bool operator==(const GameState&) const = default;
};

/// Transposition key canonical under 180 degree rotation.
struct CanonicalKey {
  std::uint64_t key;
  bool rotated;  // true when the key was taken from the rotated image
};
CanonicalKey canonical_key(const GameState& s);
inline std::uint64_t canonical_hash(const GameState& s) {
  return canonical_key(s).key;
}
/// Key of the exact (non-canonical) state.
std::uint64_t exact_hash(const GameState& s);

inline int rotate_cell(int cell, Dims d) { return d.cells() - 1 - cell; }

/// Text format:
///   rex <width> <height>
///   <height rows of width chars from . b w, row 1 first>
///   toplay b|w
/// Lines may also be separated by '/' or ';' (single-line form).
GameState parse_position(std::string_view text);
std::string format_position(const GameState& s);
/// Multi-line diagram with column letters and row numbers, for humans.
std::string diagram(const Position& p);

std::string format_move(int cell, Dims d, std::optional<Player> p = {});

}  // namespace rex
