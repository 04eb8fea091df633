#include "rex/inferior.hpp"

#include <algorithm>

namespace rex {

Pairing::Pairing(std::vector<std::pair<int, int>> pairs) {
  for (auto [a, b] : pairs) add(a, b);
}

void Pairing::add(int a, int b) {
  if (a == b || cells_.contains(a) || cells_.contains(b))
    throw UsageError("pairing cells must be distinct");
  pairs_.emplace_back(std::min(a, b), std::max(a, b));
  cells_.insert(a);
  cells_.insert(b);
}

int Pairing::mate(int cell) const {
  for (auto [a, b] : pairs_) {
    if (a == cell) return b;
    if (b == cell) return a;
  }
  return kNoCell;
}

std::string to_string(FillinReason r) {
  switch (r) {
    case FillinReason::Captured: return "captured";
    case FillinReason::DeadPair: return "dead-pair";
    case FillinReason::MutualFillin: return "mutual-fillin";
  }
  return "?";
}

std::string to_string(PruneReason r) {
  switch (r) {
    case PruneReason::DeadDominatesAll: return "dead-dominates-all";
    case PruneReason::VictimOverKiller: return "victim-over-killer";
    case PruneReason::VulnerableOverOppKiller: return "vulnerable-over-opp-killer";
    case PruneReason::CaptureeOverCapturer: return "capturee-over-capturer";
    case PruneReason::MutualFillinCreator: return "mutual-fillin-creator";
    case PruneReason::PreJoinKey: return "pre-join-key";
  }
  return "?";
}

namespace {

struct Tokens {
  std::array<std::uint8_t, 8> r{};
  int n = 0;

  bool has(int x) const {
    for (int i = 0; i < n; ++i)
      if (r[i] == x) return true;
    return false;
  }
  void add(int x) {
    if (!has(x)) r[n++] = static_cast<std::uint8_t>(x);
  }
  bool shares(const Tokens& o) const {
    for (int i = 0; i < n; ++i)
      if (o.has(r[i])) return true;
    return false;
  }
};

// Roots of x's groups (sides included) touching cell u.
Tokens tokens_of(const Position& p, const Geometry& g, const CellSet& own,
                 int u, Player x) {
  Tokens t;
  for (int k = 0; k < g.degree[u]; ++k) {
    int n = g.nbr[u][k];
    if (own.contains(n)) t.add(p.find(n));
  }
  auto [s1, s2] = side_nodes(x);
  if (g.edge(s1).contains(u)) t.add(p.find(s1));
  if (g.edge(s2).contains(u)) t.add(p.find(s2));
  return t;
}

}  // namespace

bool dead_for(const Position& p, int c, Player x) {
  const Geometry& g = p.geom();
  const CellSet& own = p.stones(x);
  const CellSet& opp = p.stones(opponent(x));
  Tokens tc = tokens_of(p, g, own, c, x);
  if (tc.n >= 2) return false;
  std::array<int, 6> us{};
  std::array<Tokens, 6> ut{};
  int m = 0;
  for (int k = 0; k < g.degree[c]; ++k) {
    int n = g.nbr[c][k];
    if (own.contains(n) || opp.contains(n)) continue;
    us[m] = n;
    ut[m] = tokens_of(p, g, own, n, x);
    ++m;
  }
  if (tc.n == 1) {
    for (int i = 0; i < m; ++i)
      if (!ut[i].has(tc.r[0])) return false;
    return true;
  }
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (!g.nbr_set[us[i]].contains(us[j]) && !ut[i].shares(ut[j]))
        return false;
  return true;
}

bool is_dead(const Position& p, int cell) {
  if (p.terminal_loser()) return true;
  return dead_for(p, cell, Player::Black) && dead_for(p, cell, Player::White);
}

namespace {

// Empty regions touching at most one token of each player: every path
// through such a region enters and leaves via the same token.
CellSet dead_regions(const Position& p) {
  const Geometry& g = p.geom();
  CellSet empty = p.empty_cells();
  CellSet out;
  CellSet rem = empty;
  while (!rem.empty()) {
    CellSet comp, frontier;
    frontier.insert(rem.first());
    while (!frontier.empty()) {
      comp |= frontier;
      CellSet next;
      for (int c : frontier) next |= g.nbr_set[c];
      frontier = (next & empty) - comp;
    }
    rem -= comp;
    bool dead = true;
    for (Player x : {Player::Black, Player::White}) {
      Tokens all;
      const CellSet& own = p.stones(x);
      for (int c : comp) {
        Tokens t = tokens_of(p, g, own, c, x);
        for (int i = 0; i < t.n && all.n < 2; ++i) all.add(t.r[i]);
        if (all.n >= 2) break;
      }
      if (all.n >= 2) {
        dead = false;
        break;
      }
    }
    if (dead) out |= comp;
  }
  return out;
}

// Cheap necessary condition for {u, v} to be x-captured: after x takes one,
// the other must be dead for the opponent, which needs at most one opponent
// token around it (coloring for x never adds opponent tokens).
bool capture_prefilter(const Position& p, int u, int v, Player x) {
  const Geometry& g = p.geom();
  Player y = opponent(x);
  const CellSet& own = p.stones(y);
  return tokens_of(p, g, own, u, y).n <= 1 && tokens_of(p, g, own, v, y).n <= 1;
}

bool dead_after(const Position& p, int colored, Player x, int target) {
  Position q = p.colored(colored, x);
  return is_dead(q, target);
}

}  // namespace

CellSet find_dead_cells(const Position& p, const DeadOptions& opt) {
  CellSet out;
  CellSet empty = p.empty_cells();
  if (p.terminal_loser()) return empty;
  for (int c : empty)
    if (is_dead(p, c)) out.insert(c);
  if (opt.clique_cutset) out |= dead_regions(p);
  return out;
}

bool captures_pair(const Position& p, int u, int v, Player x) {
  if (p.at(u) != Color::Empty || p.at(v) != Color::Empty || u == v)
    return false;
  if (!capture_prefilter(p, u, v, x)) return false;
  return dead_after(p, u, x, v) && dead_after(p, v, x, u);
}

std::vector<CaptureCertificate> find_captured(const Position& p, Player x) {
  std::vector<CaptureCertificate> out;
  const Geometry& g = p.geom();
  CellSet empty = p.empty_cells();
  CellSet used;
  for (int u : empty) {
    if (used.contains(u)) continue;
    for (int v : g.nbr_set[u] & empty) {
      if (v < u || used.contains(v)) continue;
      if (!captures_pair(p, u, v, x)) continue;
      CaptureCertificate cert{x, CellSet::of({u, v}), Pairing({{u, v}})};
      used |= cert.cells;
      out.push_back(std::move(cert));
      break;
    }
  }
  return out;
}

std::vector<MutualFillin> find_mutual_fillin(const Position& p,
                                             const CellSet* near) {
  std::vector<MutualFillin> out;
  if (p.terminal_loser()) return out;
  const Geometry& g = p.geom();
  CellSet empty = p.empty_cells();
  CellSet middles = near ? (empty & *near) : empty;
  for (int m : middles) {
    CellSet around = g.nbr_set[m] & empty;
    for (int a : around) {
      for (int b : around) {
        if (a == b || g.nbr_set[a].contains(b)) continue;
        for (Player x : {Player::Black, Player::White}) {
          Player y = opponent(x);
          // B = {m, b} y-captured once a is x-colored.
          Position pa = p.colored(a, x);
          if (pa.terminal_loser() || !captures_pair(pa, m, b, y)) continue;
          // A = {a, m} x-captured once b is y-colored.
          Position pb = p.colored(b, y);
          if (pb.terminal_loser() || !captures_pair(pb, a, m, x)) continue;
          out.push_back({x, a, CellSet::of({a, m}), b, CellSet::of({m, b})});
        }
      }
    }
  }
  return out;
}

std::pair<GameState, FillinRecord> fillin(const GameState& s,
                                          const FillinOptions& opt) {
  GameState cur = s;
  FillinRecord record;
  bool changed = true;
  while (changed && !cur.pos.terminal_loser()) {
    changed = false;
    if (opt.capture) {
      for (Player x : {Player::Black, Player::White}) {
        for (const auto& cert : find_captured(cur.pos, x)) {
          if (cur.pos.terminal_loser()) break;
          auto [u, v] = cert.pairing.pairs().front();
          if (!captures_pair(cur.pos, u, v, x)) continue;
          cur.pos.play(u, x);
          cur.pos.play(v, x);
          record.push_back({u, x, FillinReason::Captured});
          record.push_back({v, x, FillinReason::Captured});
          changed = true;
        }
      }
      if (cur.pos.terminal_loser()) break;
    }
    if (opt.dead) {
      std::vector<int> dead =
          find_dead_cells(cur.pos, {opt.clique_cutset}).to_vector();
      for (std::size_t i = 0; i + 1 < dead.size(); i += 2) {
        cur.pos.play(dead[i], Player::Black);
        cur.pos.play(dead[i + 1], Player::White);
        record.push_back({dead[i], Player::Black, FillinReason::DeadPair});
        record.push_back({dead[i + 1], Player::White, FillinReason::DeadPair});
        changed = true;
      }
    }
    if (opt.mutual && !changed) {
      auto found = find_mutual_fillin(cur.pos);
      if (!found.empty()) {
        const MutualFillin& mf = found.front();
        cur.pos.play(mf.a, mf.x);
        cur.pos.play(mf.b, opponent(mf.x));
        record.push_back({mf.a, mf.x, FillinReason::MutualFillin});
        record.push_back({mf.b, opponent(mf.x), FillinReason::MutualFillin});
        changed = true;
      }
    }
  }
  return {cur, record};
}

PruneReport prune_moves(const GameState& s, const PruneOptions& opt) {
  const Position& p = s.pos;
  const Geometry& g = p.geom();
  const Player x = s.to_move;
  const Player y = opponent(x);
  CellSet empty = p.empty_cells();
  PruneReport report;
  report.kept = empty;
  if (empty.empty() || p.terminal_loser()) return report;

  CellSet dead = find_dead_cells(p, {opt.clique_cutset});
  if (!dead.empty()) {
    int keep = dead.first();
    report.kept = CellSet::of({keep});
    for (int c : empty)
      if (c != keep) report.removed.push_back({c, PruneReason::DeadDominatesAll, keep});
    return report;
  }

  struct Arc {
    int from, to;
    PruneReason reason;
  };
  std::vector<Arc> killer, vulnerable, capturer, creator;
  for (int k : empty) {
    CellSet local = g.ball2[k] & empty;
    Position mine = p.colored(k, x);
    if (mine.terminal_loser()) continue;  // self-joining; left to the search
    Position theirs = p.colored(k, y);
    for (int c : local) {
      if (is_dead(mine, c)) killer.push_back({k, c, PruneReason::VictimOverKiller});
      if (!theirs.terminal_loser() && is_dead(theirs, c))
        vulnerable.push_back({k, c, PruneReason::VulnerableOverOppKiller});
    }
    // x-captured pairs created next to k.
    std::vector<std::pair<int, int>> seen;
    for (int u : g.nbr_set[k] & empty) {
      for (int v : g.nbr_set[u] & empty) {
        if (v == k) continue;
        std::pair<int, int> e{std::min(u, v), std::max(u, v)};
        if (std::find(seen.begin(), seen.end(), e) != seen.end()) continue;
        seen.push_back(e);
        auto [lo, hi] = e;
        if (!captures_pair(mine, lo, hi, x)) continue;
        capturer.push_back({k, lo, PruneReason::CaptureeOverCapturer});
        capturer.push_back({k, hi, PruneReason::CaptureeOverCapturer});
      }
    }
    if (opt.mutual_creator) {
      CellSet near = g.ball2[k];
      for (const auto& mf : find_mutual_fillin(mine, &near))
        if (mf.x == x) creator.push_back({k, mf.a, PruneReason::MutualFillinCreator});
    }
  }

  // Domination is transitive, so a move may go whenever some move it
  // reaches in the arc graph is kept. Keep one move per sink component.
  std::array<CellSet, kMaxCells> succ{};
  std::array<PruneReason, kMaxCells> why{};
  std::array<bool, kMaxCells> has_arc{};
  for (auto* list : {&killer, &vulnerable, &capturer, &creator}) {
    for (const Arc& a : *list) {
      if (a.from == a.to) continue;
      succ[a.from].insert(a.to);
      if (!has_arc[a.from]) why[a.from] = a.reason;
      has_arc[a.from] = true;
    }
  }
  std::array<CellSet, kMaxCells> reach{};
  for (int k : empty) {
    CellSet seen = CellSet::of({k});
    std::vector<int> stack{k};
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : succ[u] - seen) {
        seen.insert(v);
        stack.push_back(v);
      }
    }
    reach[k] = seen;
  }
  CellSet kept;
  for (int k : empty) {
    bool sink = true;
    int rep = k;
    for (int j : reach[k]) {
      if (!reach[j].contains(k)) {
        sink = false;
        break;
      }
      rep = std::min(rep, j);
    }
    if (sink && rep == k) kept.insert(k);
  }
  for (int k : empty) {
    if (kept.contains(k)) continue;
    int dom = (reach[k] & kept).first();
    report.removed.push_back({k, why[k], dom});
  }
  report.kept = kept;
  return report;
}

}  // namespace rex
