#include "rex/search.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>
#include <unordered_map>

#include <Eigen/Dense>

namespace rex {

namespace {

constexpr std::array<std::pair<Feature, std::string_view>, kNumFeatures> kFeatureNames = {{
    {Feature::CaptureFillin, "capture-fillin"},
    {Feature::DeadFillin, "dead-fillin"},
    {Feature::MutualFillin, "mutual-fillin"},
    {Feature::InferiorPrune, "inferior-prune"},
    {Feature::HSearch, "hsearch"},
    {Feature::AugmentedHSearch, "augmented-hsearch"},
    {Feature::ColorSymmetry, "color-symmetry"},
    {Feature::DeadCliqueCutset, "dead-clique-cutset"},
    {Feature::ResistanceOrdering, "resistance-ordering"},
    {Feature::VcDecomp, "vc-decomp"},
}};

constexpr std::uint64_t kInf = PDN::kInf;

std::uint64_t sat_add(std::uint64_t a, std::uint64_t b) {
  return std::min(kInf, a + b);
}

}  // namespace

std::string_view feature_name(Feature f) {
  return kFeatureNames[static_cast<int>(f)].second;
}

std::optional<Feature> parse_feature(std::string_view name) {
  for (auto [f, n] : kFeatureNames)
    if (n == name) return f;
  return std::nullopt;
}

const std::array<Feature, kNumFeatures>& all_features() {
  static const std::array<Feature, kNumFeatures> all = [] {
    std::array<Feature, kNumFeatures> a{};
    for (int i = 0; i < kNumFeatures; ++i) a[i] = kFeatureNames[i].first;
    return a;
  }();
  return all;
}

std::string to_string(KnowledgeSource k) {
  switch (k) {
    case KnowledgeSource::None: return "none";
    case KnowledgeSource::Terminal: return "terminal";
    case KnowledgeSource::Transposition: return "transposition";
    case KnowledgeSource::ColorSymmetry: return "color-symmetry";
    case KnowledgeSource::Certificate: return "certificate";
    case KnowledgeSource::AllKeysLose: return "all-keys-lose";
  }
  return "?";
}

SearchStats& SearchStats::operator+=(const SearchStats& o) {
  nodes += o.nodes;
  knowledge_calls += o.knowledge_calls;
  knowledge_cache_hits += o.knowledge_cache_hits;
  tt_hits += o.tt_hits;
  return *this;
}

// ---------------------------------------------------------------------------
// Transposition table

TranspositionTable::TranspositionTable(std::size_t bytes) {
  std::size_t n = bytes / sizeof(TTEntry) / kWays;
  if (n == 0) return;
  std::size_t buckets = std::bit_floor(n);
  entries_.resize(buckets * kWays);
  mask_ = buckets - 1;
}

std::optional<TTEntry> TranspositionTable::probe(std::uint64_t key) const {
  if (entries_.empty()) return std::nullopt;
  std::size_t b = key & mask_;
  std::lock_guard lock(locks_[b % kStripes]);
  for (int w = 0; w < kWays; ++w) {
    const TTEntry& e = entries_[b * kWays + w];
    if (e.used && e.key == key) return e;
  }
  return std::nullopt;
}

void TranspositionTable::store(const TTEntry& in) {
  if (entries_.empty()) return;
  std::size_t b = in.key & mask_;
  std::lock_guard lock(locks_[b % kStripes]);
  TTEntry* slot = nullptr;
  for (int w = 0; w < kWays; ++w) {
    TTEntry& e = entries_[b * kWays + w];
    if (e.used && e.key == in.key) {
      if (e.solved() && !in.solved()) return;
      slot = &e;
      break;
    }
  }
  if (!slot) {
    auto value = [](const TTEntry& e) {
      return std::tuple(e.used, e.solved(), e.work, e.depth);
    };
    slot = &entries_[b * kWays];
    for (int w = 1; w < kWays; ++w) {
      TTEntry& e = entries_[b * kWays + w];
      if (value(e) < value(*slot)) slot = &e;
    }
    if (slot->used && value(in) < value(*slot)) return;
  }
  *slot = in;
  slot->used = true;
}

void TranspositionTable::clear() {
  std::fill(entries_.begin(), entries_.end(), TTEntry{});
}

// ---------------------------------------------------------------------------
// Resistance

double side_resistance(const Position& p, Player x) {
  if (p.sides_joined(x)) return 0.0;
  const Geometry& g = p.geom();
  auto [s1, s2] = side_nodes(x);
  CellSet empty = p.empty_cells();
  const CellSet& own = p.stones(x);

  // Node ids: contracted x groups (sides included) then empty cells.
  std::array<int, kNumNodes> id;
  id.fill(-1);
  int n = 0;
  auto node = [&](int root) {
    if (id[root] < 0) id[root] = n++;
    return id[root];
  };
  int a = node(p.find(s1)), b = node(p.find(s2));
  for (int c : own) node(p.find(c));
  std::vector<int> cell_id(kMaxCells, -1);
  for (int c : empty) cell_id[c] = n++;

  std::vector<std::vector<int>> adj(n);
  auto link = [&](int u, int v) {
    if (u == v) return;
    if (std::find(adj[u].begin(), adj[u].end(), v) != adj[u].end()) return;
    adj[u].push_back(v);
    adj[v].push_back(u);
  };
  for (int c : empty) {
    int u = cell_id[c];
    for (int d : g.nbr_set[c]) {
      if (empty.contains(d)) link(u, cell_id[d]);
      else if (own.contains(d)) link(u, id[p.find(d)]);
    }
    if (g.edge(s1).contains(c)) link(u, id[p.find(s1)]);
    if (g.edge(s2).contains(c)) link(u, id[p.find(s2)]);
  }

  // Restrict to the component of side a.
  std::vector<int> comp(n, -1);
  std::vector<int> order{a};
  comp[a] = 0;
  for (std::size_t i = 0; i < order.size(); ++i)
    for (int v : adj[order[i]])
      if (comp[v] < 0) {
        comp[v] = static_cast<int>(order.size());
        order.push_back(v);
      }
  if (comp[b] < 0) return std::numeric_limits<double>::infinity();

  // Ground b, inject unit current at a.
  int m = static_cast<int>(order.size());
  std::vector<int> row(m, -1);
  int k = 0;
  for (int i = 0; i < m; ++i)
    if (order[i] != b) row[i] = k++;
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(k, k);
  for (int i = 0; i < m; ++i) {
    int u = order[i];
    if (row[i] < 0) continue;
    for (int v : adj[u]) {
      lap(row[i], row[i]) += 1.0;
      int j = comp[v];
      if (row[j] >= 0) lap(row[i], row[j]) -= 1.0;
    }
  }
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
  rhs(row[comp[a]]) = 1.0;
  Eigen::VectorXd v = lap.ldlt().solve(rhs);
  return v(row[comp[a]]);
}

std::vector<int> resistance_order(const GameState& s, const std::vector<int>& moves,
                                  bool rex_polarity) {
  auto lg = [](double r) {
    if (r <= 0) return -1e9;
    if (std::isinf(r)) return 1e9;
    return std::log(r);
  };
  Player x = s.to_move;
  std::vector<std::pair<double, int>> scored;
  scored.reserve(moves.size());
  for (int m : moves) {
    Position q = s.pos.colored(m, x);
    double score = lg(side_resistance(q, x)) - lg(side_resistance(q, opponent(x)));
    scored.emplace_back(rex_polarity ? -score : score, m);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& l, const auto& r) { return l.first < r.first; });
  std::vector<int> out;
  out.reserve(moves.size());
  for (auto& [score, m] : scored) out.push_back(m);
  return out;
}

// ---------------------------------------------------------------------------
// Knowledge

KnowledgeResult evaluate_leaf(const GameState& s, const SearchConfig& cfg,
                              const TranspositionTable* tt) {
  KnowledgeResult k;
  k.reduced = s;
  auto decide = [&](Player w, KnowledgeSource src) {
    k.winner = w;
    k.source = src;
    k.moves.clear();
    return k;
  };
  if (auto l = s.pos.terminal_loser()) return decide(opponent(*l), KnowledgeSource::Terminal);

  FillinOptions fo;
  fo.capture = cfg.on(Feature::CaptureFillin);
  fo.dead = cfg.on(Feature::DeadFillin);
  fo.mutual = cfg.on(Feature::MutualFillin);
  fo.clique_cutset = cfg.on(Feature::DeadCliqueCutset);
  if (fo.capture || fo.dead || fo.mutual) std::tie(k.reduced, k.fillin) = fillin(s, fo);
  const GameState& r = k.reduced;
  if (auto l = r.pos.terminal_loser()) return decide(opponent(*l), KnowledgeSource::Terminal);

  if (tt && tt->enabled()) {
    if (auto e = tt->probe(canonical_key(r).key); e && e->solved())
      return decide(e->proof == 0 ? r.to_move : opponent(r.to_move),
                    KnowledgeSource::Transposition);
  }

  if (cfg.on(Feature::ColorSymmetry) && r.pos.dims().square() &&
      r.pos == r.pos.color_swap_transpose())
    return decide(opponent(r.last_player()), KnowledgeSource::ColorSymmetry);

  CellSet cands;
  if (cfg.on(Feature::InferiorPrune)) {
    PruneOptions po;
    po.clique_cutset = cfg.on(Feature::DeadCliqueCutset);
    po.mutual_creator = cfg.on(Feature::MutualFillin);
    k.prune = prune_moves(r, po);
  } else {
    k.prune.kept = r.pos.empty_cells();
  }
  cands = k.prune.kept;

  if (cfg.on(Feature::HSearch)) {
    HSearchOptions ho = cfg.hsearch;
    ho.augmented = cfg.on(Feature::AugmentedHSearch);
    HSearchResult hb = hsearch(r.pos, Player::Black, ho);
    HSearchResult hw = hsearch(r.pos, Player::White, ho);
    if (auto cert = detect_early_win(r, hb, hw)) {
      k.certificate = cert;
      return decide(cert->winner, KnowledgeSource::Certificate);
    }
    CellSet keys = prune_keys(r, r.to_move == Player::Black ? hb : hw) & cands;
    k.pruned_keys = keys;
    for (int c : keys) k.prune.removed.push_back({c, PruneReason::PreJoinKey, kNoCell});
    cands -= keys;
    k.prune.kept = cands;
    if (cands.empty()) return decide(opponent(r.to_move), KnowledgeSource::AllKeysLose);
  }

  k.moves = cands.to_vector();
  if (cfg.on(Feature::ResistanceOrdering))
    k.moves = resistance_order(r, k.moves, cfg.resistance_rex_polarity);
  return k;
}

// ---------------------------------------------------------------------------
// Search

struct Solver::Shared {
  explicit Shared(std::size_t bytes) : tt(bytes) {}
  TranspositionTable tt;
};

namespace {

struct Knowledge {
  GameState reduced;
  std::optional<Player> winner;
  std::vector<int> moves;
};

class Worker {
 public:
  Worker(const SearchConfig& cfg, TranspositionTable& tt, std::atomic<bool>& stop,
         std::chrono::steady_clock::time_point deadline, bool have_deadline, int index)
      : cfg_(cfg),
        tt_(tt),
        stop_(stop),
        deadline_(deadline),
        have_deadline_(have_deadline),
        rng_(cfg.seed + static_cast<std::uint64_t>(index) * 0x9e3779b97f4a7c15ULL),
        randomize_(index > 0) {}

  PDN mid(const GameState& s, std::uint64_t thp, std::uint64_t thd, int depth,
          std::uint64_t& work);
  std::shared_ptr<const Knowledge> knowledge(const GameState& s);
  std::optional<TTEntry> probe(const GameState& s, int* best);
  void store(const GameState& s, PDN v, int best, std::uint64_t work, int depth);
  std::vector<int> principal_line(const GameState& root);

  SearchStats stats;

 private:
  struct Child {
    int move;
    GameState state;
    PDN pdn;
  };
  bool out_of_time();

  const SearchConfig& cfg_;
  TranspositionTable& tt_;
  std::atomic<bool>& stop_;
  std::chrono::steady_clock::time_point deadline_;
  bool have_deadline_;
  std::mt19937_64 rng_;
  bool randomize_;
  std::unordered_map<std::uint64_t, std::shared_ptr<const Knowledge>> cache_;
};

bool Worker::out_of_time() {
  if (stop_.load(std::memory_order_relaxed)) return true;
  if (have_deadline_ && std::chrono::steady_clock::now() >= deadline_) {
    stop_.store(true);
    return true;
  }
  return false;
}

std::shared_ptr<const Knowledge> Worker::knowledge(const GameState& s) {
  std::uint64_t h = exact_hash(s);
  if (auto it = cache_.find(h); it != cache_.end()) {
    ++stats.knowledge_cache_hits;
    return it->second;
  }
  ++stats.knowledge_calls;
  KnowledgeResult k = evaluate_leaf(s, cfg_, &tt_);
  if (k.source == KnowledgeSource::Transposition) ++stats.tt_hits;
  auto entry = std::make_shared<Knowledge>(Knowledge{k.reduced, k.winner, std::move(k.moves)});
  if (cache_.size() >= cfg_.knowledge_cache_entries) cache_.clear();
  cache_.emplace(h, entry);
  return entry;
}

std::optional<TTEntry> Worker::probe(const GameState& s, int* best) {
  if (!tt_.enabled()) return std::nullopt;
  CanonicalKey ck = canonical_key(s);
  auto e = tt_.probe(ck.key);
  if (e && best) {
    *best = e->best;
    if (ck.rotated && e->best != kNoCell) *best = rotate_cell(e->best, s.pos.dims());
  }
  return e;
}

void Worker::store(const GameState& s, PDN v, int best, std::uint64_t work, int depth) {
  if (!tt_.enabled()) return;
  CanonicalKey ck = canonical_key(s);
  TTEntry e;
  e.key = ck.key;
  e.proof = v.proof;
  e.disproof = v.disproof;
  e.work = work;
  e.depth = static_cast<std::uint16_t>(std::min(depth, 65535));
  int b = best;
  if (ck.rotated && b != kNoCell) b = rotate_cell(b, s.pos.dims());
  e.best = static_cast<std::uint8_t>(b);
  tt_.store(e);
}

PDN Worker::mid(const GameState& s, std::uint64_t thp, std::uint64_t thd, int depth,
                std::uint64_t& work) {
  ++stats.nodes;
  work = 1;
  auto kn = knowledge(s);
  if (kn->winner) {
    PDN v = *kn->winner == s.to_move ? PDN::win() : PDN::loss();
    store(s, v, kNoCell, 1, depth);
    return v;
  }
  const GameState& r = kn->reduced;
  bool reduced_differs = !(r.pos == s.pos);
  if (reduced_differs) {
    if (auto e = probe(r, nullptr); e && e->solved()) {
      ++stats.tt_hits;
      PDN v{e->proof, e->disproof};
      store(s, v, kNoCell, 1, depth);
      return v;
    }
  }

  std::vector<Child> kids;
  kids.reserve(kn->moves.size());
  for (int m : kn->moves) {
    Child c{m, r.play(m), {}};
    if (auto e = probe(c.state, nullptr)) {
      ++stats.tt_hits;
      c.pdn = {e->proof, e->disproof};
    } else {
      c.pdn = {1, static_cast<std::uint64_t>(std::max(1, c.state.pos.num_empty()))};
    }
    kids.push_back(std::move(c));
  }
  const int n = static_cast<int>(kids.size());
  int width = std::min(n, std::max(1, cfg_.initial_width));

  PDN cur;
  auto recompute = [&] {
    for (;;) {
      bool all_refuted = true;
      for (int i = 0; i < width; ++i)
        if (kids[i].pdn.proof != 0) all_refuted = false;
      if (!all_refuted || width >= n) break;
      width = std::min(n, width * 2);
    }
    std::uint64_t p = kInf, d = 0;
    for (int i = 0; i < width; ++i) {
      p = std::min(p, kids[i].pdn.disproof);
      d = sat_add(d, kids[i].pdn.proof);
    }
    for (int i = width; i < n; ++i)
      if (kids[i].pdn.proof != 0) d = sat_add(d, 1);
    if (p == 0) d = kInf;
    if (d == 0) p = kInf;
    cur = {p, d};
  };
  recompute();

  int best = kNoCell;
  while (cur.proof < thp && cur.disproof < thd) {
    if (out_of_time()) break;
    // Most proving child: smallest disproof among the focused children.
    int b1 = -1;
    std::uint64_t d1 = kInf + 1, d2 = kInf;
    int ties = 0;
    for (int i = 0; i < width; ++i) {
      const PDN& c = kids[i].pdn;
      if (c.proof == 0) continue;
      if (c.disproof < d1) {
        d2 = d1;
        d1 = c.disproof;
        b1 = i;
        ties = 1;
      } else if (c.disproof == d1) {
        d2 = d1;
        if (randomize_ && std::uniform_int_distribution<int>(0, ties)(rng_) == 0) b1 = i;
        ++ties;
      } else if (c.disproof < d2) {
        d2 = c.disproof;
      }
    }
    if (b1 < 0) break;
    Child& c = kids[b1];
    d2 = std::min(d2, kInf);
    std::uint64_t child_thp = std::min(kInf, thd - cur.disproof + c.pdn.proof);
    std::uint64_t grown = static_cast<std::uint64_t>(std::ceil(static_cast<double>(d2) * (1.0 + cfg_.epsilon)));
    std::uint64_t child_thd = std::min({thp, std::max(d2 + 1, grown), kInf});
    std::uint64_t child_work = 0;
    c.pdn = mid(c.state, child_thp, child_thd, depth + 1, child_work);
    work += child_work;
    recompute();
  }

  // Best move: a winning child if proved, otherwise the most promising one.
  std::uint64_t bd = kInf + 1;
  for (int i = 0; i < width; ++i) {
    if (kids[i].pdn.disproof < bd) {
      bd = kids[i].pdn.disproof;
      best = kids[i].move;
    }
  }
  if (best == kNoCell && n > 0) best = kids[0].move;
  store(s, cur, best, work, depth);
  if (reduced_differs && cur.solved()) store(r, cur, best, work, depth);
  return cur;
}

std::vector<int> Worker::principal_line(const GameState& root) {
  std::vector<int> line;
  GameState s = root;
  for (int guard = 0; guard < kMaxCells; ++guard) {
    auto kn = knowledge(s);
    if (kn->winner || kn->moves.empty()) break;
    const GameState& r = kn->reduced;
    auto self = probe(r, nullptr);
    if (!self) self = probe(s, nullptr);
    bool mover_wins = self && self->proof == 0;
    int pick = kNoCell;
    std::uint64_t most = 0;
    for (int m : kn->moves) {
      auto e = probe(r.play(m), nullptr);
      if (!e || !e->solved()) continue;
      bool child_loses = e->disproof == 0;
      if (mover_wins && child_loses) {
        pick = m;
        break;
      }
      // Losing side: follow the longest resistance (largest work).
      if (!mover_wins && e->work + 1 > most) {
        most = e->work + 1;
        pick = m;
      }
    }
    if (pick == kNoCell) break;
    line.push_back(pick);
    s = r.play(pick);
  }
  return line;
}

}  // namespace

Solver::Solver(SearchConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.threads < 1) throw UsageError("thread count must be positive");
  shared_ = std::make_unique<Shared>(cfg_.tt_bytes);
}

Solver::~Solver() = default;

void Solver::clear() { shared_->tt.clear(); }

SolveResult Solver::run(const GameState& s, std::chrono::steady_clock::time_point deadline,
                        bool have_deadline) {
  validate(s.pos.dims());
  auto t0 = std::chrono::steady_clock::now();
  std::atomic<bool> stop{false};
  std::optional<PDN> root;
  std::mutex root_mutex;
  int nthreads = std::max(1, cfg_.threads);
  std::vector<std::unique_ptr<Worker>> workers;
  for (int i = 0; i < nthreads; ++i)
    workers.push_back(std::make_unique<Worker>(cfg_, shared_->tt, stop, deadline,
                                               have_deadline, i));
  auto body = [&](Worker& w) {
    while (!stop.load()) {
      std::uint64_t work = 0;
      PDN v = w.mid(s, kInf - 1, kInf - 1, 0, work);
      if (v.solved()) {
        std::lock_guard lock(root_mutex);
        if (!root) root = v;
        stop.store(true);
      }
    }
  };
  if (nthreads == 1) {
    body(*workers[0]);
  } else {
    std::vector<std::jthread> pool;
    for (int i = 0; i < nthreads; ++i) pool.emplace_back([&, i] { body(*workers[i]); });
  }
  SolveResult res;
  for (auto& w : workers) res.stats += w->stats;
  if (root) {
    res.status = SolveStatus::Solved;
    res.winner = root->proof == 0 ? s.to_move : opponent(s.to_move);
    res.principal_line = workers[0]->principal_line(s);
  }
  res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

namespace {
std::chrono::steady_clock::time_point deadline_for(const SearchConfig& cfg) {
  auto now = std::chrono::steady_clock::now();
  if (cfg.time_limit <= 0) return now;
  return now + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                   std::chrono::duration<double>(cfg.time_limit));
}
}  // namespace

SolveResult Solver::solve(const GameState& s) {
  return run(s, deadline_for(cfg_), cfg_.time_limit > 0);
}

SolveResult Solver::solve_all_moves(const GameState& s) {
  auto deadline = deadline_for(cfg_);
  bool have = cfg_.time_limit > 0;
  SolveResult res;
  res.status = SolveStatus::Solved;
  auto t0 = std::chrono::steady_clock::now();
  if (auto l = s.pos.terminal_loser()) {
    res.winner = opponent(*l);
    return res;
  }
  Player best = opponent(s.to_move);
  for (int m : s.pos.empty_cells()) {
    GameState child = s.play(m);
    SolveResult r = run(child, deadline, have);
    res.stats += r.stats;
    if (r.status != SolveStatus::Solved) {
      res.status = SolveStatus::Timeout;
      break;
    }
    res.move_values.emplace_back(m, *r.winner);
    if (*r.winner == s.to_move && best != s.to_move) {
      best = s.to_move;
      res.principal_line = {m};
      res.principal_line.insert(res.principal_line.end(), r.principal_line.begin(),
                                r.principal_line.end());
    }
  }
  if (res.status == SolveStatus::Solved) res.winner = best;
  res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

SolveResult solve(const GameState& s, const SearchConfig& cfg) {
  Solver solver(cfg);
  return solver.solve(s);
}

SolveResult solve_all_moves(const GameState& s, const SearchConfig& cfg) {
  Solver solver(cfg);
  return solver.solve_all_moves(s);
}

}  // namespace rex
