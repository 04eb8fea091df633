#include "rex/oracle.hpp"

#include <algorithm>
#include <bit>
#include <deque>

namespace rex {

namespace {

struct Masks {
  Dims d;
  std::vector<std::uint64_t> nbr;
  std::uint64_t north = 0, south = 0, west = 0, east = 0;
};

Masks make_masks(Dims d) {
  if (d.cells() > 64) throw UsageError("oracle: board larger than 64 cells");
  Masks m{d, std::vector<std::uint64_t>(d.cells(), 0)};
  static constexpr int kDc[6] = {1, -1, 0, 0, 1, -1};
  static constexpr int kDr[6] = {0, 0, 1, -1, -1, 1};
  for (int r = 0; r < d.height; ++r) {
    for (int c = 0; c < d.width; ++c) {
      std::uint64_t bit = std::uint64_t{1} << (r * d.width + c);
      if (r == 0) m.north |= bit;
      if (r == d.height - 1) m.south |= bit;
      if (c == 0) m.west |= bit;
      if (c == d.width - 1) m.east |= bit;
      for (int k = 0; k < 6; ++k) {
        int cc = c + kDc[k], rr = r + kDr[k];
        if (cc < 0 || rr < 0 || cc >= d.width || rr >= d.height) continue;
        m.nbr[r * d.width + c] |= std::uint64_t{1} << (rr * d.width + cc);
      }
    }
  }
  return m;
}

const Masks& masks(Dims d) {
  thread_local std::deque<Masks> cache;
  for (const auto& m : cache)
    if (m.d == d) return m;
  cache.push_back(make_masks(d));
  return cache.back();
}

std::uint64_t flood(const Masks& m, std::uint64_t stones, std::uint64_t seed) {
  std::uint64_t reached = seed & stones, frontier = reached;
  while (frontier) {
    std::uint64_t next = 0;
    for (std::uint64_t f = frontier; f; f &= f - 1)
      next |= m.nbr[std::countr_zero(f)];
    next &= stones & ~reached;
    reached |= next;
    frontier = next;
  }
  return reached;
}

bool joined(const Masks& m, std::uint64_t stones, Player x) {
  std::uint64_t s1 = x == Player::Black ? m.north : m.west;
  std::uint64_t s2 = x == Player::Black ? m.south : m.east;
  return (flood(m, stones, s1) & s2) != 0;
}

std::uint64_t to_mask(const CellSet& s) { return s.word(0); }

CellSet from_mask(std::uint64_t v) {
  CellSet s;
  for (; v; v &= v - 1) s.insert(std::countr_zero(v));
  return s;
}

}  // namespace

bool oracle_joined(Dims d, std::uint64_t stones, Player x) {
  return joined(masks(d), stones, x);
}

Oracle::Oracle(Dims d, bool memo) : dims_(d), memo_on_(memo) {
  validate(d);
  if (d.cells() > kMaxCells) throw UsageError("oracle: board larger than 16 cells");
  pow3_.resize(d.cells() + 1);
  pow3_[0] = 1;
  for (int i = 1; i <= d.cells(); ++i) pow3_[i] = pow3_[i - 1] * 3;
  if (memo_on_) memo_.assign((pow3_[d.cells()] * 2 + 3) / 4, 0);
}

Player Oracle::negamax(std::uint32_t black, std::uint32_t white, Player to_move,
                       std::uint64_t index) {
  const Masks& m = masks(dims_);
  // A move can only join the mover's own sides, so the previous mover is
  // the only candidate loser.
  Player prev = opponent(to_move);
  if (joined(m, prev == Player::Black ? black : white, prev)) return to_move;
  std::uint64_t slot = index * 2 + static_cast<int>(to_move);
  if (memo_on_) {
    int v = (memo_[slot >> 2] >> ((slot & 3) * 2)) & 3;
    if (v) return static_cast<Player>(v - 1);
  }
  ++nodes_;
  std::uint32_t full = (dims_.cells() == 32) ? ~0U : ((1U << dims_.cells()) - 1);
  std::uint32_t empty = full & ~(black | white);
  Player result = opponent(to_move);
  int digit = to_move == Player::Black ? 1 : 2;
  for (std::uint32_t e = empty; e; e &= e - 1) {
    int c = std::countr_zero(e);
    std::uint32_t bit = 1U << c;
    Player w = to_move == Player::Black
                   ? negamax(black | bit, white, opponent(to_move), index + digit * pow3_[c])
                   : negamax(black, white | bit, opponent(to_move), index + digit * pow3_[c]);
    if (w == to_move) {
      result = to_move;
      break;
    }
  }
  if (memo_on_)
    memo_[slot >> 2] |= static_cast<std::uint8_t>((static_cast<int>(result) + 1)
                                                  << ((slot & 3) * 2));
  return result;
}

OracleResult Oracle::solve(const GameState& s) {
  if (s.pos.dims() != dims_) throw UsageError("oracle: board size mismatch");
  auto black = static_cast<std::uint32_t>(to_mask(s.pos.stones(Player::Black)));
  auto white = static_cast<std::uint32_t>(to_mask(s.pos.stones(Player::White)));
  const Masks& m = masks(dims_);
  OracleResult res;
  // Either player already joined: that player has lost.
  if (joined(m, black, Player::Black)) {
    res.winner = Player::White;
    return res;
  }
  if (joined(m, white, Player::White)) {
    res.winner = Player::Black;
    return res;
  }
  std::uint64_t index = 0;
  for (int c = 0; c < dims_.cells(); ++c) {
    if (black >> c & 1) index += pow3_[c];
    if (white >> c & 1) index += 2 * pow3_[c];
  }
  res.winner = opponent(s.to_move);
  for (int c = 0; c < dims_.cells(); ++c) {
    if (((black | white) >> c) & 1) continue;
    std::uint32_t bit = 1U << c;
    int digit = s.to_move == Player::Black ? 1 : 2;
    Player w = s.to_move == Player::Black
                   ? negamax(black | bit, white, Player::White, index + digit * pow3_[c])
                   : negamax(black, white | bit, Player::Black, index + digit * pow3_[c]);
    res.move_winners.emplace_back(c, w);
    if (w == s.to_move) res.winner = s.to_move;
  }
  return res;
}

Player Oracle::winner(const GameState& s) {
  if (s.pos.dims() != dims_) throw UsageError("oracle: board size mismatch");
  auto black = static_cast<std::uint32_t>(to_mask(s.pos.stones(Player::Black)));
  auto white = static_cast<std::uint32_t>(to_mask(s.pos.stones(Player::White)));
  const Masks& m = masks(dims_);
  if (joined(m, black, Player::Black)) return Player::White;
  if (joined(m, white, Player::White)) return Player::Black;
  std::uint64_t index = 0;
  for (int c = 0; c < dims_.cells(); ++c) {
    if (black >> c & 1) index += pow3_[c];
    if (white >> c & 1) index += 2 * pow3_[c];
  }
  return negamax(black, white, s.to_move, index);
}

OracleResult oracle_solve(const GameState& s) {
  Oracle o(s.pos.dims());
  return o.solve(s);
}

JoinsetList enumerate_joinsets(const Position& p, Player x, std::size_t cap) {
  const Masks& m = masks(p.dims());
  std::uint64_t own = to_mask(p.stones(x));
  std::vector<int> empty = p.empty_cells().to_vector();
  int n = static_cast<int>(empty.size());
  if (n > 22) throw UsageError("enumerate_joinsets: too many empty cells");
  JoinsetList out;
  if (joined(m, own, x)) return out;  // already joined: no minimal nonempty set
  std::uint32_t limit = n == 32 ? ~0U : (1U << n);
  std::vector<std::uint8_t> joins(limit, 0);
  auto expand = [&](std::uint32_t sub) {
    std::uint64_t v = 0;
    for (std::uint32_t s = sub; s; s &= s - 1) v |= std::uint64_t{1} << empty[std::countr_zero(s)];
    return v;
  };
  // Increasing numeric order visits every proper subset first.
  for (std::uint32_t sub = 1; sub < limit; ++sub) {
    bool j = false, any_sub_joins = false;
    for (std::uint32_t s = sub; s; s &= s - 1) {
      if (joins[sub ^ (s & (0U - s))]) {
        any_sub_joins = true;
        break;
      }
    }
    if (any_sub_joins) {
      joins[sub] = 1;
      continue;
    }
    j = joined(m, own | expand(sub), x);
    if (!j) continue;
    joins[sub] = 1;
    if (out.sets.size() >= cap) {
      out.partial = true;
      break;
    }
    out.sets.push_back(from_mask(expand(sub)));
  }
  return out;
}

CellSet true_dead_cells(const Position& p) {
  CellSet live;
  for (Player x : {Player::Black, Player::White})
    for (const auto& s : enumerate_joinsets(p, x).sets) live |= s;
  return p.empty_cells() - live;
}

bool verify_pairing_vc(const Position& p, const PairingVC& vc) {
  const Masks& m = masks(p.dims());
  CellSet empty = p.empty_cells();
  CellSet carrier;
  for (auto [a, b] : vc.pairing.pairs()) {
    if (a == b || !empty.contains(a) || !empty.contains(b)) return false;
    carrier.insert(a);
    carrier.insert(b);
  }
  if (vc.kind == VcKind::Semi) {
    if (vc.key == kNoCell || !empty.contains(vc.key) || carrier.contains(vc.key))
      return false;
  }
  std::uint64_t base = to_mask(p.stones(vc.player));
  if (vc.kind == VcKind::Semi) base |= std::uint64_t{1} << vc.key;
  auto seed = [&](const Endpoint& e) -> std::uint64_t {
    if (e.kind == Endpoint::Kind::Cell) return std::uint64_t{1} << e.id;
    switch (e.id) {
      case kBlackNorth: return m.north;
      case kBlackSouth: return m.south;
      case kWhiteWest: return m.west;
      default: return m.east;
    }
  };
  for (const Endpoint* e : {&vc.a, &vc.b}) {
    if (e->kind == Endpoint::Kind::Side) {
      auto [s1, s2] = side_nodes(vc.player);
      if (e->id != s1 && e->id != s2) return false;
    } else {
      Color c = p.at(e->id);
      if (c == color_of(opponent(vc.player))) return false;
      base |= std::uint64_t{1} << e->id;
    }
  }
  const auto& pairs = vc.pairing.pairs();
  std::size_t np = pairs.size();
  if (np > 16) return false;
  // A side counts as one node: reaching any stone on it reaches them all.
  auto [side1, side2] = side_nodes(vc.player);
  std::uint64_t edge1 = seed(Endpoint::side(side1)), edge2 = seed(Endpoint::side(side2));
  for (std::uint32_t sel = 0; sel < (1U << np); ++sel) {
    std::uint64_t stones = base;
    for (std::size_t i = 0; i < np; ++i)
      stones |= std::uint64_t{1} << ((sel >> i & 1) ? pairs[i].second : pairs[i].first);
    std::uint64_t from = seed(vc.a), reached = 0;
    for (;;) {
      reached = flood(m, stones, from);
      std::uint64_t grown = from;
      if (reached & edge1) grown |= edge1;
      if (reached & edge2) grown |= edge2;
      if (grown == from) break;
      from = grown;
    }
    if (!(reached & seed(vc.b))) return false;
  }
  return true;
}

bool verify_capture(const Position& p, const CaptureCertificate& cert) {
  const auto& pairs = cert.pairing.pairs();
  std::size_t np = pairs.size();
  if (cert.pairing.cells() != cert.cells || np > 16) return false;
  for (std::uint32_t sel = 0; sel < (1U << np); ++sel) {
    Position q = p;
    CellSet rest = cert.cells;
    for (std::size_t i = 0; i < np; ++i) {
      int c = (sel >> i & 1) ? pairs[i].second : pairs[i].first;
      q.play(c, cert.owner);
      rest.erase(c);
    }
    // If the owner is now joined, nothing in the remainder matters.
    if (oracle_joined(q.dims(), to_mask(q.stones(cert.owner)), cert.owner)) continue;
    CellSet dead = true_dead_cells(q);
    if (!rest.is_subset_of(dead)) return false;
  }
  return true;
}

}  // namespace rex
