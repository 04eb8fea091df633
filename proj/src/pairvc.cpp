#include "rex/pairvc.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace rex {

std::string to_string(const Endpoint& e, Dims d) {
  if (e.kind == Endpoint::Kind::Cell) return cell_name(e.id, d);
  switch (e.id) {
    case kBlackNorth: return "north";
    case kBlackSouth: return "south";
    case kWhiteWest: return "west";
    default: return "east";
  }
}

std::string to_string(WinCertificate::Kind k) {
  return k == WinCertificate::Kind::JoinPairing ? "join-pairing"
                                                : "pre-join-pairing";
}

CellSet PairingVC::carrier() const {
  CellSet c = pairing.cells();
  if (key != kNoCell) c.insert(key);
  return c;
}

bool PairingVC::side_to_side() const {
  auto [s1, s2] = side_nodes(player);
  auto is = [](const Endpoint& e, int s) {
    return e.kind == Endpoint::Kind::Side && e.id == s;
  };
  return (is(a, s1) && is(b, s2)) || (is(a, s2) && is(b, s1));
}

namespace {

constexpr int kMaxPairs = 8;

struct Vc {
  std::uint8_t a = 0, b = 0;  // compact endpoint ids, a < b
  std::uint8_t key = kNoCell;
  std::uint8_t npairs = 0;
  bool alive = true;
  std::array<std::array<std::uint8_t, 2>, kMaxPairs> pairs{};
  CellSet cells;  // pair cells, key excluded
};

class HSearchEngine {
 public:
  HSearchEngine(const Position& p, Player x, const HSearchOptions& opt)
      : p_(p), x_(x), opt_(opt), g_(p.geom()) {}

  HSearchResult run();

 private:
  int slot(int a, int b) const { return a * n_ + b; }
  bool is_group(int id) const { return group_[id]; }
  int cell_of(int id) const { return group_[id] ? -1 : node_[id]; }

  void add(VcKind kind, int a, int b, int key, const Vc& src1, const Vc* src2,
           int extra_a = kNoCell, int extra_b = kNoCell);
  void process_full(int idx);
  void process_semi(int idx);
  bool disjoint_ends(const Vc& v, int end) const {
    int c = cell_of(end);
    return c < 0 || (!v.cells.contains(c) && v.key != c);
  }
  PairingVC to_public(const Vc& v, VcKind kind) const;
  Endpoint endpoint(int id) const;

  const Position& p_;
  Player x_;
  HSearchOptions opt_;
  const Geometry& g_;

  int n_ = 0;
  std::vector<int> node_;   // compact id -> cell index or group root
  std::vector<bool> group_;
  std::array<int, kNumNodes> compact_{};
  int side1_ = -1, side2_ = -1;  // compact ids of the side tokens

  std::vector<Vc> arena_;
  std::vector<std::vector<int>> fulls_, semis_;
  std::vector<CellSet> full_nbrs_, semi_nbrs_;
  std::deque<std::pair<VcKind, int>> queue_;
  bool stop_ = false;
  int processed_ = 0;
};

void HSearchEngine::add(VcKind kind, int a, int b, int key, const Vc& s1,
                        const Vc* s2, int extra_a, int extra_b) {
  if (a == b) return;
  if (a > b) std::swap(a, b);
  Vc v;
  v.a = static_cast<std::uint8_t>(a);
  v.b = static_cast<std::uint8_t>(b);
  v.key = static_cast<std::uint8_t>(key);
  v.pairs = s1.pairs;
  v.npairs = s1.npairs;
  v.cells = s1.cells;
  if (s2) {
    for (int i = 0; i < s2->npairs; ++i) {
      const auto& pr = s2->pairs[i];
      if (v.cells.contains(pr[0])) continue;  // shared pair (augmented OR)
      if (v.npairs >= kMaxPairs) return;
      v.pairs[v.npairs++] = pr;
      v.cells.insert(pr[0]);
      v.cells.insert(pr[1]);
    }
  }
  if (extra_a != kNoCell) {
    if (v.npairs >= kMaxPairs) return;
    v.pairs[v.npairs++] = {static_cast<std::uint8_t>(extra_a),
                           static_cast<std::uint8_t>(extra_b)};
    v.cells.insert(extra_a);
    v.cells.insert(extra_b);
  }
  if (v.cells.size() > opt_.max_pairing_cells) return;

  auto& list = kind == VcKind::Full ? fulls_[slot(a, b)] : semis_[slot(a, b)];
  int alive = 0;
  for (int i : list) {
    Vc& o = arena_[i];
    if (!o.alive) continue;
    if (o.key == v.key && o.cells.is_subset_of(v.cells)) return;
  }
  for (int i : list) {
    Vc& o = arena_[i];
    if (!o.alive) continue;
    if (o.key == v.key && v.cells.is_subset_of(o.cells)) o.alive = false;
    else ++alive;
  }
  if (alive >= opt_.max_per_list) return;

  int idx = static_cast<int>(arena_.size());
  arena_.push_back(v);
  list.push_back(idx);
  if (kind == VcKind::Full) {
    full_nbrs_[a].insert(b);
    full_nbrs_[b].insert(a);
  } else {
    semi_nbrs_[a].insert(b);
    semi_nbrs_[b].insert(a);
  }
  queue_.emplace_back(kind, idx);
  if (kind == VcKind::Full && opt_.stop_at_full_join && a == std::min(side1_, side2_) &&
      b == std::max(side1_, side2_))
    stop_ = true;
}

void HSearchEngine::process_full(int idx) {
  const Vc f = arena_[idx];
  for (int side = 0; side < 2 && !stop_; ++side) {
    int mid = side == 0 ? f.b : f.a;
    int end = side == 0 ? f.a : f.b;
    bool group_mid = is_group(mid);
    for (int c : full_nbrs_[mid]) {
      if (c == end) continue;
      for (int gi : fulls_[slot(std::min(mid, c), std::max(mid, c))]) {
        const Vc& gv = arena_[gi];
        if (!gv.alive || gi == idx) continue;
        if (f.cells.intersects(gv.cells)) continue;
        if (!disjoint_ends(gv, end) || !disjoint_ends(f, c)) continue;
        if (f.npairs + gv.npairs > kMaxPairs) continue;
        if (group_mid) {
          add(VcKind::Full, end, c, kNoCell, f, &gv);
        } else {
          add(VcKind::Semi, end, c, node_[mid], f, &gv);
        }
        if (stop_) return;
      }
    }
    if (!group_mid) continue;
    for (int c : semi_nbrs_[mid]) {
      if (c == end) continue;
      for (int si : semis_[slot(std::min(mid, c), std::max(mid, c))]) {
        const Vc& sv = arena_[si];
        if (!sv.alive) continue;
        if (f.cells.intersects(sv.cells) || f.cells.contains(sv.key)) continue;
        if (!disjoint_ends(sv, end) || !disjoint_ends(f, c)) continue;
        if (f.npairs + sv.npairs > kMaxPairs) continue;
        add(VcKind::Semi, end, c, sv.key, sv, &f);
      }
    }
  }
}

void HSearchEngine::process_semi(int idx) {
  const Vc s = arena_[idx];
  // OR with the other semis between the same endpoints.
  for (int ti : semis_[slot(s.a, s.b)]) {
    if (ti == idx) continue;
    const Vc& t = arena_[ti];
    if (!t.alive || t.key == s.key) continue;
    if (t.cells.contains(s.key) || s.cells.contains(t.key)) continue;
    if (s.cells.intersects(t.cells)) {
      if (!opt_.augmented) continue;
      // Overlap is allowed only on pairs both pairings share.
      CellSet shared = s.cells & t.cells;
      bool ok = true;
      for (int i = 0; i < s.npairs && ok; ++i) {
        const auto& pr = s.pairs[i];
        bool in0 = shared.contains(pr[0]), in1 = shared.contains(pr[1]);
        if (!in0 && !in1) continue;
        if (!(in0 && in1)) {
          ok = false;
          break;
        }
        bool found = false;
        for (int j = 0; j < t.npairs; ++j)
          if (t.pairs[j] == pr) found = true;
        ok = found;
      }
      if (!ok) continue;
    }
    add(VcKind::Full, s.a, s.b, kNoCell, s, &t, std::min(s.key, t.key),
        std::max(s.key, t.key));
    if (stop_) return;
  }
  // AND through a group midpoint keeps the key.
  for (int side = 0; side < 2; ++side) {
    int mid = side == 0 ? s.b : s.a;
    int end = side == 0 ? s.a : s.b;
    if (!is_group(mid)) continue;
    for (int c : full_nbrs_[mid]) {
      if (c == end) continue;
      for (int gi : fulls_[slot(std::min(mid, c), std::max(mid, c))]) {
        const Vc& gv = arena_[gi];
        if (!gv.alive) continue;
        if (s.cells.intersects(gv.cells) || gv.cells.contains(s.key)) continue;
        if (cell_of(c) == s.key) continue;
        if (!disjoint_ends(gv, end) || !disjoint_ends(s, c)) continue;
        if (s.npairs + gv.npairs > kMaxPairs) continue;
        add(VcKind::Semi, end, c, s.key, s, &gv);
      }
    }
  }
}

Endpoint HSearchEngine::endpoint(int id) const {
  auto [s1, s2] = side_nodes(x_);
  if (id == side1_) return Endpoint::side(s1);
  if (id == side2_) return Endpoint::side(s2);
  return Endpoint::cell(node_[id]);
}

PairingVC HSearchEngine::to_public(const Vc& v, VcKind kind) const {
  PairingVC out;
  out.player = x_;
  out.a = endpoint(v.a);
  out.b = endpoint(v.b);
  out.kind = kind;
  out.key = kind == VcKind::Semi ? v.key : kNoCell;
  for (int i = 0; i < v.npairs; ++i) out.pairing.add(v.pairs[i][0], v.pairs[i][1]);
  return out;
}

HSearchResult HSearchEngine::run() {
  HSearchResult res;
  res.player = x_;
  auto [s1, s2] = side_nodes(x_);
  CellSet empty = p_.empty_cells();
  const CellSet& own = p_.stones(x_);

  // Endpoint tokens: x groups (sides included), then empty cells.
  compact_.fill(-1);
  std::vector<CellSet> libs;
  auto token = [&](int root) {
    if (compact_[root] < 0) {
      compact_[root] = n_++;
      node_.push_back(root);
      group_.push_back(true);
      libs.emplace_back();
    }
    return compact_[root];
  };
  int r1 = p_.find(s1), r2 = p_.find(s2);
  side1_ = token(r1);
  side2_ = token(r2);
  libs[side1_] |= g_.edge(s1) & empty;
  libs[side2_] |= g_.edge(s2) & empty;
  for (int c : own) {
    int t = token(p_.find(c));
    libs[t] |= g_.nbr_set[c] & empty;
  }
  // Sides merged into groups also contribute their edge cells.
  for (int s : {s1, s2}) libs[compact_[p_.find(s)]] |= g_.edge(s) & empty;
  int groups = n_;
  for (int c : empty) {
    compact_[c] = n_++;
    node_.push_back(c);
    group_.push_back(false);
  }
  if (n_ > CellSet::kCapacity) throw UsageError("too many endpoints for H-search");
  fulls_.assign(static_cast<std::size_t>(n_) * n_, {});
  semis_.assign(static_cast<std::size_t>(n_) * n_, {});
  full_nbrs_.assign(n_, CellSet());
  semi_nbrs_.assign(n_, CellSet());

  if (side1_ == side2_) {
    // Already joined: an empty pairing carries the connection.
    Vc v;
    res.side_fulls.push_back(to_public(v, VcKind::Full));
    return res;
  }

  Vc base;
  for (int t = 0; t < groups; ++t)
    for (int c : libs[t]) add(VcKind::Full, t, compact_[c], kNoCell, base, nullptr);
  for (int c : empty)
    for (int d : g_.nbr_set[c] & empty)
      if (c < d) add(VcKind::Full, compact_[c], compact_[d], kNoCell, base, nullptr);

  while (!queue_.empty() && !stop_ && processed_ < opt_.max_work) {
    auto [kind, idx] = queue_.front();
    queue_.pop_front();
    if (!arena_[idx].alive) continue;
    ++processed_;
    if (kind == VcKind::Full) process_full(idx);
    else process_semi(idx);
  }
  res.processed = processed_;

  int lo = std::min(side1_, side2_), hi = std::max(side1_, side2_);
  for (int i : fulls_[slot(lo, hi)])
    if (arena_[i].alive) res.side_fulls.push_back(to_public(arena_[i], VcKind::Full));
  for (int i : semis_[slot(lo, hi)])
    if (arena_[i].alive) res.side_semis.push_back(to_public(arena_[i], VcKind::Semi));
  if (opt_.collect_all) {
    for (int a = 0; a < n_; ++a) {
      for (int b = a + 1; b < n_; ++b) {
        for (int i : fulls_[slot(a, b)])
          if (arena_[i].alive) res.all.push_back(to_public(arena_[i], VcKind::Full));
        for (int i : semis_[slot(a, b)])
          if (arena_[i].alive) res.all.push_back(to_public(arena_[i], VcKind::Semi));
      }
    }
  }
  return res;
}

}  // namespace

HSearchResult hsearch(const Position& p, Player x, const HSearchOptions& opt) {
  HSearchEngine engine(p, x, opt);
  return engine.run();
}

std::optional<WinCertificate> detect_early_win(const GameState& s,
                                               const HSearchResult& black,
                                               const HSearchResult& white) {
  for (const HSearchResult* r : {&black, &white})
    if (!r->side_fulls.empty())
      return WinCertificate{opponent(r->player), WinCertificate::Kind::JoinPairing,
                            r->side_fulls.front()};
  for (const HSearchResult* r : {&black, &white})
    if (!r->side_semis.empty() && s.is_last(r->player))
      return WinCertificate{opponent(r->player),
                            WinCertificate::Kind::PreJoinPairing,
                            r->side_semis.front()};
  return std::nullopt;
}

CellSet prune_keys(const GameState& s, const HSearchResult& mover) {
  CellSet keys;
  if (mover.player != s.to_move) return keys;
  for (const auto& vc : mover.side_semis) keys.insert(vc.key);
  return keys;
}

int pairing_reply(const GameState& s, Player owner, const Pairing& pairing,
                  int opponent_move, const CellSet& forbidden) {
  if (s.to_move != owner) throw UsageError("pairing_reply: owner is not to move");
  CellSet empty = s.pos.empty_cells();
  if (empty.empty()) throw std::logic_error("pairing_reply: no empty cell");
  if (opponent_move != kNoCell && pairing.contains(opponent_move)) {
    int m = pairing.mate(opponent_move);
    if (empty.contains(m)) return m;
  }
  CellSet outside = empty - pairing.cells() - forbidden;
  if (!outside.empty()) return outside.first();
  if (s.is_last(owner)) {
    // The Last player always has a cell outside a join-pairing;
    // reaching here means the caller's pairing state is inconsistent.
    throw std::logic_error("pairing_reply: no cell outside the pairing for Last");
  }
  CellSet inside = (empty & pairing.cells()) - forbidden;
  if (!inside.empty()) return inside.first();
  CellSet rest = empty - forbidden;
  if (!rest.empty()) return rest.first();
  return empty.first();
}

int forcing_reply(const GameState& s, const WinCertificate& cert,
                  int opponent_move) {
  CellSet forbidden;
  if (cert.vc.key != kNoCell) forbidden.insert(cert.vc.key);
  CellSet empty = s.pos.empty_cells();
  if (opponent_move != kNoCell && cert.vc.pairing.contains(opponent_move)) {
    int m = cert.vc.pairing.mate(opponent_move);
    if (empty.contains(m)) return m;
  }
  CellSet outside = empty - cert.vc.pairing.cells() - forbidden;
  if (!outside.empty()) return outside.first();
  CellSet inside = (empty & cert.vc.pairing.cells()) - forbidden;
  if (!inside.empty()) return inside.first();
  return empty.first();
}

}  // namespace rex
