// Acceptance suite: one line per criterion, nonzero exit if any gating
// criterion fails. Runs single-threaded unless noted.

#include <bit>
#include <chrono>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rex/cli.hpp"
#include "rex/oracle.hpp"
#include "rex/search.hpp"
#include "support.hpp"

using namespace rex;
using rex::test::cell;
using rex::test::cells;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  bool gating;
  std::function<Outcome()> run;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt_seconds(double s) {
  std::ostringstream o;
  o.precision(s < 10 ? 2 : 1);
  o << std::fixed << s << "s";
  return o.str();
}

bool env_flag(const char* name) {
  const char* v = std::getenv(name);
  return v && std::string(v) == "1";
}

SearchConfig config_tt(std::size_t mb) {
  SearchConfig cfg;
  cfg.tt_bytes = mb << 20;
  return cfg;
}

std::optional<Player> solve_winner(const GameState& s, const SearchConfig& cfg) {
  SolveResult r = solve(s, cfg);
  return r.status == SolveStatus::Solved ? r.winner : std::nullopt;
}

// ---------------------------------------------------------------------------

Outcome parity() {
  Outcome o;
  std::ostringstream msg;
  bool ok = true;
  auto t0 = std::chrono::steady_clock::now();
  SearchConfig plain = config_tt(64), no_symmetry = config_tt(64);
  no_symmetry.set(Feature::ColorSymmetry, false);
  for (int n = 1; n <= 4; ++n) {
    GameState s = GameState::empty({n, n});
    Player want = n % 2 == 0 ? Player::Black : Player::White;
    for (const SearchConfig* cfg : {&plain, &no_symmetry}) {
      auto w = solve_winner(s, *cfg);
      if (w != want) {
        ok = false;
        msg << n << "x" << n << " wrong winner; ";
      }
    }
    if (n <= 3 || env_flag("REX_LONG_TESTS")) {
      if (oracle_solve(s).winner != want) {
        ok = false;
        msg << n << "x" << n << " oracle disagrees; ";
      }
    }
  }
  double small = seconds_since(t0);
  if (small > 120) {
    ok = false;
    msg << "n<=4 took " << fmt_seconds(small) << "; ";
  }
  auto t1 = std::chrono::steady_clock::now();
  GameState five = GameState::empty({5, 5});
  for (const SearchConfig* cfg : {&plain, &no_symmetry}) {
    if (solve_winner(five, *cfg) != Player::White) {
      ok = false;
      msg << "5x5 wrong winner; ";
    }
  }
  double big = seconds_since(t1);
  if (big > 1800) {
    ok = false;
    msg << "5x5 took " << fmt_seconds(big) << "; ";
  }
  msg << "n<=4 " << fmt_seconds(small) << ", 5x5 " << fmt_seconds(big)
      << (env_flag("REX_LONG_TESTS") ? ", oracle n<=4" : ", oracle n<=3");
  o.pass = ok;
  o.detail = msg.str();
  return o;
}

Outcome four_by_four_openings() {
  SolveResult r = solve_all_moves(GameState::empty({4, 4}), config_tt(64));
  if (r.status != SolveStatus::Solved) return {false, "timeout"};
  Dims d{4, 4};
  std::string winners;
  bool ok = true;
  for (auto [m, w] : r.move_values) {
    if (w == Player::Black) winners += cell_name(m, d) + " ";
    if (cells({"a1", "b1", "d1"}, d).contains(m) && w != Player::Black) ok = false;
  }
  return {ok, "winning openings: " + winners};
}

Outcome knowledge_reduction() {
  Dims d{4, 4};
  PruneReport r = prune_moves(test::after_bd1());
  std::string kept;
  for (int c : r.kept) kept += cell_name(c, d) + " ";
  return {r.kept == cells({"a1", "c1", "a4", "b4", "d4"}, d), "kept: " + kept};
}

// The certificate is read off the knowledge pipeline at the child itself.
// The symmetry rule is switched off for this check because it can decide a
// child first; with it on the child must still be decided without search.
Outcome early_win_classification() {
  SearchConfig no_symmetry;
  no_symmetry.set(Feature::ColorSymmetry, false);
  bool ok = true;
  std::ostringstream msg;
  for (const char* m : {"a4", "b4", "d4"}) {
    GameState s = test::play(test::after_bd1(), {m});
    KnowledgeResult k = evaluate_leaf(s, no_symmetry);
    bool good = k.winner == Player::Black && k.source == KnowledgeSource::Certificate &&
                k.certificate &&
                k.certificate->kind == WinCertificate::Kind::PreJoinPairing &&
                k.certificate->vc.player == Player::White &&
                verify_pairing_vc(k.reduced.pos, k.certificate->vc);
    KnowledgeResult plain = evaluate_leaf(s, {});
    good = good && plain.winner == Player::Black;
    SolveResult sr = solve(s, config_tt(16));
    good = good && sr.winner == Player::Black && sr.stats.nodes <= 1;
    msg << "2.W" << m << (good ? " pre-join" : " MISSING") << "; ";
    ok = ok && good;
  }
  return {ok, msg.str()};
}

Outcome five_by_five() {
  auto t0 = std::chrono::steady_clock::now();
  SolveResult all = solve_all_moves(GameState::empty({5, 5}), config_tt(256));
  bool ok = all.status == SolveStatus::Solved && all.move_values.size() == 25;
  int losing = 0;
  for (auto [m, w] : all.move_values) losing += w == Player::White;
  ok = ok && losing == 25;
  double openings = seconds_since(t0);
  auto t1 = std::chrono::steady_clock::now();
  Solver solver(config_tt(256));
  int solved = 0;
  for (const GameState& s : cli::suite("5x5-acute-replies"))
    solved += solver.solve(s).status == SolveStatus::Solved;
  double replies = seconds_since(t1);
  ok = ok && solved == 24 && openings + replies < 1800;
  std::ostringstream msg;
  msg << losing << "/25 openings lose (" << fmt_seconds(openings) << "), " << solved
      << "/24 acute replies solved (" << fmt_seconds(replies) << ")";
  return {ok, msg.str()};
}

Outcome six_by_six() {
  double limit = 300;
  if (const char* v = std::getenv("REX_STRETCH_SECONDS")) limit = std::atof(v);
  SearchConfig cfg = config_tt(1024);
  cfg.time_limit = limit;
  auto empty = solve_winner(GameState::empty({6, 6}), cfg);
  auto t0 = std::chrono::steady_clock::now();
  SolveResult a1 = solve(test::play(GameState::empty({6, 6}), {"a1"}), cfg);
  std::ostringstream msg;
  msg << "empty: " << (empty ? to_string(*empty) : "unsolved") << ", 1.a1: "
      << (a1.winner ? to_string(*a1.winner) + " wins" : "unsolved within limit") << " ("
      << fmt_seconds(seconds_since(t0)) << ", " << a1.stats.nodes << " nodes)";
  // White is to move after 1.a1, so a Black win means the opening wins.
  bool ok = empty == Player::Black && a1.winner == Player::Black;
  return {ok, msg.str()};
}

Outcome oracle_equivalence() {
  int compared = 0, mismatches = 0;
  {
    Oracle o({3, 3});
    Solver solver(config_tt(64));
    for (const GameState& s : test::reachable_states({3, 3}, 4)) {
      ++compared;
      if (solver.solve(s).winner != o.winner(s)) ++mismatches;
    }
  }
  for (Dims d : {Dims{2, 3}, Dims{3, 2}, Dims{2, 4}, Dims{4, 2}, Dims{3, 4}, Dims{4, 3}}) {
    Oracle o(d);
    Solver solver(config_tt(64));
    GameState e = GameState::empty(d);
    for (int c = 0; c < d.cells(); ++c) {
      GameState s = e.play(c);
      Player want = s.pos.terminal_loser() ? opponent(*s.pos.terminal_loser()) : o.winner(s);
      ++compared;
      if (solver.solve(s).winner != want) ++mismatches;
    }
  }
  return {mismatches == 0,
          std::to_string(compared) + " states, " + std::to_string(mismatches) + " mismatches"};
}

Outcome fillin_preservation() {
  std::mt19937_64 rng(20240611);
  int sampled = 0, mismatches = 0, changed = 0;
  for (Dims d : {Dims{3, 3}, Dims{3, 4}}) {
    Oracle o(d);
    for (int i = 0; i < 1000; ++i) {
      GameState s = test::random_state(d, static_cast<int>(rng() % d.cells()), rng);
      auto [r, rec] = fillin(s);
      ++sampled;
      changed += !rec.empty();
      Player before = o.winner(s);
      Player after = r.pos.terminal_loser() ? opponent(*r.pos.terminal_loser()) : o.winner(r);
      if (before != after) ++mismatches;
    }
  }
  return {mismatches == 0, std::to_string(sampled) + " states (" + std::to_string(changed) +
                               " with fillin), " + std::to_string(mismatches) + " mismatches"};
}

// Every 3x3 coloring with no side joined and at least one empty cell, with
// either player to move.
Outcome pruning_safety() {
  Dims d{3, 3};
  Oracle o(d);
  int wins = 0, violations = 0;
  int total = 1;
  for (int i = 0; i < 9; ++i) total *= 3;
  for (int code = 0; code < total; ++code) {
    Position p(d);
    int v = code;
    for (int c = 0; c < 9; ++c, v /= 3)
      if (v % 3) p.play(c, v % 3 == 1 ? Player::Black : Player::White);
    if (p.terminal_loser() || p.num_empty() == 0) continue;
    for (Player x : {Player::Black, Player::White}) {
      GameState s{p, x};
      OracleResult res = o.solve(s);
      if (res.winner != x) continue;
      ++wins;
      PruneReport r = prune_moves(s);
      bool ok = false;
      for (auto [m, w] : res.move_winners) ok |= w == x && r.kept.contains(m);
      violations += !ok;
    }
  }
  return {violations == 0, std::to_string(wins) + " winning states, " +
                               std::to_string(violations) + " violations"};
}

Outcome vc_soundness() {
  std::mt19937_64 rng(5000);
  HSearchOptions opt;
  opt.collect_all = true;
  long vcs = 0, failures = 0;
  for (int i = 0; i < 5000; ++i) {
    int n = 3 + i % 3;
    Dims d{n, n};
    Position p = i % 2 ? test::random_position(d, 0.05 + 0.5 * (rng() % 100) / 100.0, rng)
                       : test::random_state(d, static_cast<int>(rng() % (n * n / 2 + 1)), rng).pos;
    for (Player x : {Player::Black, Player::White}) {
      HSearchResult h = hsearch(p, x, opt);
      for (const auto& vc : h.all) {
        ++vcs;
        failures += !verify_pairing_vc(p, vc);
      }
    }
  }
  return {failures == 0 && vcs > 0,
          std::to_string(vcs) + " connections, " + std::to_string(failures) + " failed"};
}

Outcome knockouts() {
  std::ostringstream msg;
  bool ok = true;
  for (const char* suite : {"3x3-all", "4x4-openings", "5x5-acute-replies"}) {
    std::vector<const char*> argv = {"rex",        "bench", "--suite", suite,
                                     "--knockout", "all",   "--machine"};
    std::ostringstream out, err;
    auto t0 = std::chrono::steady_clock::now();
    int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    ok = ok && code == cli::kSolved;
    msg << suite << ": exit " << code << " (" << fmt_seconds(seconds_since(t0)) << ")";
    std::istringstream in(out.str());
    int knockouts = 0;
    for (std::string line; std::getline(in, line);) {
      auto j = nlohmann::json::parse(line);
      const auto& det = j["details"];
      if (!det.contains("knockout")) continue;
      ++knockouts;
      if (!det["mismatches"].empty()) ok = false;
      if (det["knockout"] == "hsearch") {
        std::ostringstream r;
        r.precision(1);
        r << std::fixed << det["node_ratio"].get<double>();
        msg << ", no-hsearch node ratio " << r.str();
      }
    }
    ok = ok && knockouts == kNumFeatures - 1;
    msg << "; ";
  }
  return {ok, msg.str()};
}

// Every pairing of every even subset of a 1 x n board, n <= 8, owner moving
// first or second; the adversary tries every move.
Outcome pairing_playout() {
  long instances = 0, terminals = 0, violations = 0;
  for (int n = 1; n <= 8; ++n) {
    Dims d{n, 1};
    std::vector<Pairing> pairings;
    std::function<void(std::vector<int>, Pairing)> build = [&](std::vector<int> rest,
                                                               Pairing pi) {
      if (rest.empty()) {
        pairings.push_back(pi);
        return;
      }
      int a = rest.front();
      for (std::size_t i = 1; i < rest.size(); ++i) {
        std::vector<int> next;
        for (std::size_t j = 1; j < rest.size(); ++j)
          if (j != i) next.push_back(rest[j]);
        Pairing q = pi;
        q.add(a, rest[i]);
        build(next, q);
      }
    };
    for (std::uint32_t sub = 0; sub < (1U << n); ++sub) {
      if (std::popcount(sub) % 2) continue;
      std::vector<int> members;
      for (int c = 0; c < n; ++c)
        if ((sub >> c) & 1) members.push_back(c);
      build(members, Pairing());
    }
    for (const Pairing& pi : pairings) {
      for (Player owner : {Player::Black, Player::White}) {
        for (Player first : {Player::Black, Player::White}) {
          ++instances;
          std::function<void(const GameState&, int)> walk = [&](const GameState& s, int last) {
            const CellSet& own = s.pos.stones(owner);
            for (auto [a, b] : pi.pairs())
              if (own.contains(a) && own.contains(b)) {
                ++violations;
                return;
              }
            if (s.pos.num_empty() == 0) {
              ++terminals;
              return;
            }
            if (s.to_move == owner) {
              walk(s.play(pairing_reply(s, owner, pi, last)), kNoCell);
            } else {
              for (int c : s.pos.empty_cells()) walk(s.play(c), c);
            }
          };
          walk(GameState::empty(d, first), kNoCell);
        }
      }
    }
  }

  // Forcing driver on every reachable 3x3 state whose connections give a
  // win certificate.
  Dims d3{3, 3};
  long certified = 0, lost = 0;
  for (const GameState& s : test::reachable_states(d3, 9)) {
    if (s.pos.num_empty() == 0) continue;
    auto cert = detect_early_win(s, hsearch(s.pos, Player::Black), hsearch(s.pos, Player::White));
    if (!cert) continue;
    ++certified;
    bool all_won = true;
    std::function<void(const GameState&, int)> walk = [&](const GameState& t, int last) {
      if (!all_won) return;
      if (auto l = t.pos.terminal_loser()) {
        if (*l == cert->winner) all_won = false;
        return;
      }
      if (t.pos.num_empty() == 0) {
        all_won = false;
        return;
      }
      if (t.to_move == cert->winner) {
        int m = forcing_reply(t, *cert, last);
        walk(t.play(m), m);
      } else {
        for (int c : t.pos.empty_cells()) walk(t.play(c), c);
      }
    };
    walk(s, kNoCell);
    lost += !all_won;
  }
  std::ostringstream msg;
  msg << instances << " pairing instances, " << terminals << " playouts, " << violations
      << " violations; " << certified << " certified 3x3 states, " << lost << " not won";
  return {violations == 0 && lost == 0 && certified > 0, msg.str()};
}

}  // namespace

int main() {
  std::vector<Criterion> criteria = {
      {1, "parity on empty n x n boards", true, parity},
      {2, "4x4 winning openings a1, b1, d1", true, four_by_four_openings},
      {3, "4x4 pruning after 1.Bd1 keeps exactly a1 c1 a4 b4 d4", true, knowledge_reduction},
      {4, "4x4 replies a4, b4, d4 lose by pre-join certificate", true,
       early_win_classification},
      {5, "5x5 openings lose and acute-reply suite completes", true, five_by_five},
      {6, "6x6 first player wins, 1.a1 wins (stretch)", false, six_by_six},
      {7, "solver matches oracle on small boards", true, oracle_equivalence},
      {8, "fillin preserves the winner", true, fillin_preservation},
      {9, "pruning keeps a winning move", true, pruning_safety},
      {10, "every H-search connection verifies", true, vc_soundness},
      {11, "knockouts leave winners unchanged", true, knockouts},
      {12, "pairing and forcing playouts beat every adversary", true, pairing_playout},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const char* tag = o.pass ? "[PASS]" : c.gating ? "[FAIL]" : "[OPEN]";
    std::cout << tag << " criterion " << c.number << ": " << c.title
              << (c.gating ? "" : " (non-gating)") << " -- " << o.detail << " ["
              << fmt_seconds(seconds_since(t0)) << "]" << std::endl;
    if (!o.pass && c.gating) ++failed;
  }
  std::cout << (failed ? "acceptance: FAILED " + std::to_string(failed) + " criteria"
                       : std::string("acceptance: all gating criteria passed"))
            << std::endl;
  return failed ? 1 : 0;
}
