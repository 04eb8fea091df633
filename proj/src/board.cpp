#include "rex/board.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <memory>
#include <mutex>
#include <random>
#include <sstream>

namespace rex {

char to_char(Player p) { return p == Player::Black ? 'B' : 'W'; }

std::string to_string(Player p) {
  return p == Player::Black ? "black" : "white";
}

ParseError::ParseError(const std::string& what, int line, int column)
    : std::runtime_error("line " + std::to_string(line) + ", column " +
                         std::to_string(column) + ": " + what),
      line_(line),
      column_(column) {}

void validate(Dims d) {
  if (d.width < 1 || d.height < 1 || d.width > kMaxSide ||
      d.height > kMaxSide)
    throw UsageError("board dimensions must be between 1 and " +
                     std::to_string(kMaxSide));
}

bool in_bounds(Coord c, Dims d) {
  return c.col >= 0 && c.row >= 0 && c.col < d.width && c.row < d.height;
}

std::string cell_name(Coord c) {
  return std::string(1, static_cast<char>('a' + c.col)) +
         std::to_string(c.row + 1);
}

std::string cell_name(int cell, Dims d) { return cell_name(coord_of(cell, d)); }

Coord parse_cell(std::string_view text, Dims d) {
  std::size_t i = 0;
  if (!text.empty() && (text[0] == 'B' || text[0] == 'W')) i = 1;
  if (i >= text.size() || !std::islower(static_cast<unsigned char>(text[i])))
    throw UsageError("bad cell name '" + std::string(text) + "'");
  Coord c{text[i] - 'a', 0};
  ++i;
  if (i >= text.size()) throw UsageError("bad cell name '" + std::string(text) + "'");
  int row = 0;
  for (; i < text.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(text[i])))
      throw UsageError("bad cell name '" + std::string(text) + "'");
    row = row * 10 + (text[i] - '0');
  }
  c.row = row - 1;
  if (!in_bounds(c, d))
    throw UsageError("cell '" + std::string(text) + "' is off the board");
  return c;
}

std::vector<int> CellSet::to_vector() const {
  std::vector<int> out;
  out.reserve(size());
  for (int c : *this) out.push_back(c);
  return out;
}

namespace {

constexpr std::array<std::pair<int, int>, 6> kOffsets{
    {{-1, 0}, {1, 0}, {0, -1}, {0, 1}, {1, -1}, {-1, 1}}};

std::unique_ptr<Geometry> build_geometry(Dims d) {
  auto g = std::make_unique<Geometry>();
  g->dims = d;
  for (int r = 0; r < d.height; ++r) {
    for (int c = 0; c < d.width; ++c) {
      int i = r * d.width + c;
      g->board.insert(i);
      if (r == 0) g->north.insert(i);
      if (r == d.height - 1) g->south.insert(i);
      if (c == 0) g->west.insert(i);
      if (c == d.width - 1) g->east.insert(i);
      int n = 0;
      for (auto [dc, dr] : kOffsets) {
        Coord o{c + dc, r + dr};
        if (!in_bounds(o, d)) continue;
        int j = index_of(o, d);
        g->nbr_set[i].insert(j);
        g->nbr[i][n++] = static_cast<std::uint8_t>(j);
      }
      g->degree[i] = static_cast<std::uint8_t>(n);
    }
  }
  for (int i = 0; i < d.cells(); ++i) {
    CellSet b = g->nbr_set[i];
    for (int j : g->nbr_set[i]) b |= g->nbr_set[j];
    b.erase(i);
    g->ball2[i] = b;
  }
  return g;
}

}  // namespace

const CellSet& Geometry::edge(int side_node) const {
  switch (side_node) {
    case kBlackNorth: return north;
    case kBlackSouth: return south;
    case kWhiteWest: return west;
    default: return east;
  }
}

const Geometry& geometry(Dims d) {
  static std::array<std::atomic<const Geometry*>, (kMaxSide + 1) * (kMaxSide + 1)>
      cache{};
  static std::mutex mu;
  if (d.width >= 1 && d.height >= 1 && d.width <= kMaxSide && d.height <= kMaxSide) {
    const Geometry* g = cache[d.width * (kMaxSide + 1) + d.height].load(std::memory_order_acquire);
    if (g) return *g;
  }
  validate(d);
  auto& slot = cache[d.width * (kMaxSide + 1) + d.height];
  std::lock_guard lock(mu);
  const Geometry* g = slot.load(std::memory_order_relaxed);
  if (!g) {
    g = build_geometry(d).release();  // lives for the program
    slot.store(g, std::memory_order_release);
  }
  return *g;
}

CellSet neighbors(Coord c, Dims d) {
  if (!in_bounds(c, d)) throw UsageError("coordinate out of bounds");
  return geometry(d).nbr_set[index_of(c, d)];
}

int hex_distance(Coord a, Coord b) {
  int dc = b.col - a.col;
  int dr = b.row - a.row;
  // Axial coordinates where (+1,-1) is a unit step.
  return (std::abs(dc) + std::abs(dr) + std::abs(dc + dr)) / 2;
}

namespace {

struct Zobrist {
  std::array<std::array<std::uint64_t, 2>, kMaxCells> cell;
  std::array<std::uint64_t, (kMaxSide + 1) * (kMaxSide + 1)> dims;
  std::uint64_t white_to_move;

  Zobrist() {
    std::mt19937_64 rng(0x5eed4e7e12345ULL);
    for (auto& c : cell) c = {rng(), rng()};
    for (auto& d : dims) d = rng();
    white_to_move = rng();
  }
};

const Zobrist& zobrist() {
  static const Zobrist z;
  return z;
}

}  // namespace

Position::Position(Dims d) : dims_(d) {
  validate(d);
  geom_ = &geometry(d);
  for (int i = 0; i < kNumNodes; ++i) root_[i] = static_cast<std::uint8_t>(i);
  hash_ = hash_rot_ = zobrist().dims[d.width * (kMaxSide + 1) + d.height];
}

Color Position::at(Coord c) const {
  if (!in_bounds(c, dims_)) throw UsageError("coordinate out of bounds");
  return at(index_of(c, dims_));
}

Position Position::colored(Coord c, Player p) const {
  if (!in_bounds(c, dims_)) throw UsageError("coordinate out of bounds");
  return colored(index_of(c, dims_), p);
}

void Position::unite(int a, int b) {
  int ra = root_[a];
  int rb = root_[b];
  if (ra == rb) return;
  if (rb < ra) std::swap(ra, rb);
  // Relabel rb -> ra over the used cells and the side nodes.
  int n = dims_.cells();
  for (int i = 0; i < n; ++i)
    if (root_[i] == rb) root_[i] = static_cast<std::uint8_t>(ra);
  for (int i = kMaxCells; i < kNumNodes; ++i)
    if (root_[i] == rb) root_[i] = static_cast<std::uint8_t>(ra);
}

void Position::play(int cell, Player p) {
  if (cell < 0 || cell >= dims_.cells())
    throw UsageError("cell index out of bounds");
  if (at(cell) != Color::Empty)
    throw UsageError("cell " + cell_name(cell, dims_) + " is already colored");
  const Geometry& g = geom();
  CellSet& own = p == Player::Black ? black_ : white_;
  own.insert(cell);
  int ci = static_cast<int>(p);
  hash_ ^= zobrist().cell[cell][ci];
  hash_rot_ ^= zobrist().cell[rotate_cell(cell, dims_)][ci];
  for (int k = 0; k < g.degree[cell]; ++k) {
    int n = g.nbr[cell][k];
    if (own.contains(n)) unite(cell, n);
  }
  auto [s1, s2] = side_nodes(p);
  if (g.edge(s1).contains(cell)) unite(cell, s1);
  if (g.edge(s2).contains(cell)) unite(cell, s2);
}

std::optional<Player> Position::terminal_loser() const {
  if (sides_joined(Player::Black)) return Player::Black;
  if (sides_joined(Player::White)) return Player::White;
  return std::nullopt;
}

Position Position::rotate180() const {
  Position q(dims_);
  for (int c : black_) q.play(rotate_cell(c, dims_), Player::Black);
  for (int c : white_) q.play(rotate_cell(c, dims_), Player::White);
  return q;
}

Position Position::color_swap_transpose() const {
  if (!dims_.square())
    throw UsageError("color swap transpose requires a square board");
  Position q(dims_);
  for (int c : black_) {
    Coord k = coord_of(c, dims_);
    q.play(index_of({k.row, k.col}, dims_), Player::White);
  }
  for (int c : white_) {
    Coord k = coord_of(c, dims_);
    q.play(index_of({k.row, k.col}, dims_), Player::Black);
  }
  return q;
}

Position color_cell(const Position& p, Coord c, Player x) {
  return p.colored(c, x);
}
bool sides_joined(const Position& p, Player x) { return p.sides_joined(x); }
std::optional<Player> terminal_loser(const Position& p) {
  return p.terminal_loser();
}
Position color_swap_transpose(const Position& p) {
  return p.color_swap_transpose();
}

CanonicalKey canonical_key(const GameState& s) {
  std::uint64_t side = s.to_move == Player::White ? zobrist().white_to_move : 0;
  std::uint64_t a = s.pos.hash() ^ side;
  std::uint64_t b = s.pos.hash_rotated() ^ side;
  return b < a ? CanonicalKey{b, true} : CanonicalKey{a, false};
}

std::uint64_t exact_hash(const GameState& s) {
  return s.pos.hash() ^
         (s.to_move == Player::White ? zobrist().white_to_move : 0);
}

namespace {

struct Line {
  std::string text;
  int number;
};

std::vector<Line> split_lines(std::string_view text) {
  std::vector<Line> lines;
  std::string cur;
  int number = 1;
  auto flush = [&] {
    std::size_t b = cur.find_first_not_of(" \t\r");
    std::size_t e = cur.find_last_not_of(" \t\r");
    if (b != std::string::npos) lines.push_back({cur.substr(b, e - b + 1), number});
    cur.clear();
  };
  for (char ch : text) {
    if (ch == '\n' || ch == '/' || ch == ';') {
      flush();
      ++number;
    } else {
      cur.push_back(ch);
    }
  }
  flush();
  return lines;
}

}  // namespace

GameState parse_position(std::string_view text) {
  auto lines = split_lines(text);
  if (lines.empty()) throw ParseError("empty position text", 1, 1);
  std::istringstream head(lines[0].text);
  std::string tag;
  Dims d;
  head >> tag >> d.width >> d.height;
  if (tag != "rex") throw ParseError("expected 'rex <width> <height>'", lines[0].number, 1);
  if (head.fail()) throw ParseError("bad board dimensions", lines[0].number, 5);
  std::string extra;
  if (head >> extra) throw ParseError("trailing text after dimensions", lines[0].number, 1);
  try {
    validate(d);
  } catch (const UsageError& e) {
    throw ParseError(e.what(), lines[0].number, 5);
  }
  if (static_cast<int>(lines.size()) != d.height + 2) {
    int at = static_cast<int>(std::min(lines.size(), static_cast<std::size_t>(d.height + 1)));
    int ln = at < static_cast<int>(lines.size()) ? lines[at].number : lines.back().number + 1;
    throw ParseError("expected " + std::to_string(d.height) +
                         " board rows followed by 'toplay b|w'",
                     ln, 1);
  }
  Position p(d);
  for (int r = 0; r < d.height; ++r) {
    const Line& ln = lines[1 + r];
    if (static_cast<int>(ln.text.size()) != d.width)
      throw ParseError("row has " + std::to_string(ln.text.size()) +
                           " cells, expected " + std::to_string(d.width),
                       ln.number, static_cast<int>(std::min(ln.text.size(), static_cast<std::size_t>(d.width))) + 1);
    for (int c = 0; c < d.width; ++c) {
      char ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ln.text[c])));
      int cell = index_of({c, r}, d);
      if (ch == 'b') p.play(cell, Player::Black);
      else if (ch == 'w') p.play(cell, Player::White);
      else if (ch != '.') throw ParseError(std::string("unexpected character '") + ln.text[c] + "'", ln.number, c + 1);
    }
  }
  const Line& last = lines.back();
  std::istringstream tail(last.text);
  std::string kw, who;
  tail >> kw >> who;
  if (kw != "toplay") throw ParseError("expected 'toplay b|w'", last.number, 1);
  Player x;
  if (who == "b" || who == "B") x = Player::Black;
  else if (who == "w" || who == "W") x = Player::White;
  else throw ParseError("expected 'b' or 'w' after toplay", last.number, 8);
  if (tail >> extra) throw ParseError("trailing text after toplay", last.number, 1);
  return {p, x};
}

std::string format_position(const GameState& s) {
  Dims d = s.pos.dims();
  std::string out = "rex " + std::to_string(d.width) + " " + std::to_string(d.height) + "\n";
  for (int r = 0; r < d.height; ++r) {
    for (int c = 0; c < d.width; ++c) {
      switch (s.pos.at(index_of({c, r}, d))) {
        case Color::Black: out += 'b'; break;
        case Color::White: out += 'w'; break;
        default: out += '.'; break;
      }
    }
    out += '\n';
  }
  out += s.to_move == Player::Black ? "toplay b\n" : "toplay w\n";
  return out;
}

std::string diagram(const Position& p) {
  Dims d = p.dims();
  std::string out = "  ";
  for (int c = 0; c < d.width; ++c) {
    out += ' ';
    out += static_cast<char>('a' + c);
  }
  out += '\n';
  for (int r = 0; r < d.height; ++r) {
    std::string num = std::to_string(r + 1);
    out += std::string(r, ' ');
    out += std::string(2 - std::min<std::size_t>(2, num.size()), ' ') + num;
    for (int c = 0; c < d.width; ++c) {
      out += ' ';
      switch (p.at(index_of({c, r}, d))) {
        case Color::Black: out += 'B'; break;
        case Color::White: out += 'W'; break;
        default: out += '.'; break;
      }
    }
    out += '\n';
  }
  return out;
}

std::string format_move(int cell, Dims d, std::optional<Player> p) {
  std::string s = p ? std::string(1, to_char(*p)) : std::string();
  return s + cell_name(cell, d);
}

}  // namespace rex
