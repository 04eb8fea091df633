#include <gtest/gtest.h>

#include <functional>
#include <random>

#include "rex/oracle.hpp"
#include "rex/pairvc.hpp"
#include "support.hpp"

using namespace rex;
using rex::test::cell;
using rex::test::cells;

namespace {

const Dims k3{3, 3};

bool has_vc(const std::vector<PairingVC>& vcs, Endpoint a, Endpoint b, VcKind kind, int key,
            const CellSet& carrier_cells) {
  for (const auto& vc : vcs) {
    bool ends = (vc.a == a && vc.b == b) || (vc.a == b && vc.b == a);
    if (ends && vc.kind == kind && vc.key == key && vc.pairing.cells() == carrier_cells)
      return true;
  }
  return false;
}

TEST(HSearch, BridgeToWestOnEmpty3x3) {
  HSearchOptions opt;
  opt.collect_all = true;
  HSearchResult h = hsearch(Position(k3), Player::White, opt);
  EXPECT_TRUE(has_vc(h.all, Endpoint::cell(cell("b2", k3)), Endpoint::side(kWhiteWest),
                     VcKind::Full, kNoCell, cells({"a2", "a3"}, k3)));
  for (const auto& vc : h.all)
    if (vc.kind == VcKind::Full && vc.pairing.cells() == cells({"a2", "a3"}, k3))
      EXPECT_EQ(vc.pairing.mate(cell("a2", k3)), cell("a3", k3));
}

TEST(HSearch, SemiThroughCentreOnEmpty3x3) {
  HSearchResult h = hsearch(Position(k3), Player::White);
  EXPECT_TRUE(has_vc(h.side_semis, Endpoint::side(kWhiteWest), Endpoint::side(kWhiteEast),
                     VcKind::Semi, cell("b2", k3), cells({"a2", "a3", "c1", "c2"}, k3)));
  EXPECT_TRUE(h.side_fulls.empty());
}

TEST(HSearch, AdjacentEndpointsGiveEmptyFull) {
  HSearchOptions opt;
  opt.collect_all = true;
  Position p = Position(k3).colored(cell("b2", k3), Player::Black);
  HSearchResult h = hsearch(p, Player::Black, opt);
  EXPECT_TRUE(has_vc(h.all, Endpoint::cell(cell("b2", k3)), Endpoint::cell(cell("a2", k3)),
                     VcKind::Full, kNoCell, CellSet()));
}

TEST(HSearch, EveryVcVerifies) {
  std::mt19937_64 rng(23);
  int checked = 0;
  HSearchOptions opt;
  opt.collect_all = true;
  for (int trial = 0; trial < 300; ++trial) {
    int n = 3 + trial % 3;
    Position p = test::random_position({n, n}, 0.1 + 0.4 * (trial % 5) / 4.0, rng);
    for (Player x : {Player::Black, Player::White}) {
      HSearchResult h = hsearch(p, x, opt);
      for (const auto& vc : h.all) {
        if (vc.pairing.size() > 8) continue;
        EXPECT_TRUE(verify_pairing_vc(p, vc)) << diagram(p);
        ++checked;
      }
    }
  }
  EXPECT_GT(checked, 1000);
}

TEST(HSearch, AugmentedOffStillSound) {
  std::mt19937_64 rng(29);
  HSearchOptions opt;
  opt.augmented = false;
  for (int trial = 0; trial < 200; ++trial) {
    Position p = test::random_position({4, 4}, 0.3, rng);
    for (Player x : {Player::Black, Player::White}) {
      HSearchResult h = hsearch(p, x, opt);
      for (const auto* list : {&h.side_fulls, &h.side_semis})
        for (const auto& vc : *list) EXPECT_TRUE(verify_pairing_vc(p, vc));
    }
  }
}

TEST(EarlyWin, Empty3x3WhiteToMove) {
  GameState s = GameState::empty(k3, Player::White);
  ASSERT_TRUE(s.is_last(Player::White));
  auto cert = detect_early_win(s, hsearch(s.pos, Player::Black), hsearch(s.pos, Player::White));
  ASSERT_TRUE(cert);
  EXPECT_EQ(cert->winner, Player::Black);
  EXPECT_EQ(cert->kind, WinCertificate::Kind::PreJoinPairing);
  EXPECT_EQ(oracle_solve(s).winner, Player::Black);
}

TEST(EarlyWin, WhitePreJoinAfterBd1Wa4) {
  GameState s = test::play(test::after_bd1(), {"a4"});
  auto cert = detect_early_win(s, hsearch(s.pos, Player::Black), hsearch(s.pos, Player::White));
  ASSERT_TRUE(cert);
  EXPECT_EQ(cert->winner, Player::Black);
  EXPECT_EQ(cert->vc.player, Player::White);
  EXPECT_TRUE(verify_pairing_vc(s.pos, cert->vc));
}

TEST(EarlyWin, NoneWithoutSideConnections) {
  GameState s = GameState::empty({6, 6});
  HSearchResult b = hsearch(s.pos, Player::Black), w = hsearch(s.pos, Player::White);
  ASSERT_TRUE(b.side_fulls.empty() && b.side_semis.empty());
  ASSERT_TRUE(w.side_fulls.empty() && w.side_semis.empty());
  EXPECT_FALSE(detect_early_win(s, b, w));
}

// Early wins agree with the oracle on small reachable states.
TEST(EarlyWin, AgreesWithOracle) {
  int fired = 0;
  for (Dims d : {Dims{3, 3}, Dims{4, 3}, Dims{3, 4}}) {
    Oracle o(d);
    for (const GameState& s : test::reachable_states(d, d.cells() == 9 ? 9 : 5)) {
      HSearchResult b = hsearch(s.pos, Player::Black), w = hsearch(s.pos, Player::White);
      auto cert = detect_early_win(s, b, w);
      if (!cert) continue;
      ++fired;
      EXPECT_EQ(cert->winner, o.winner(s)) << format_position(s);
      EXPECT_EQ(cert->vc.player, opponent(cert->winner));
      EXPECT_TRUE(cert->vc.side_to_side());
      if (cert->kind == WinCertificate::Kind::PreJoinPairing)
        EXPECT_TRUE(s.is_last(cert->vc.player));
    }
  }
  EXPECT_GT(fired, 100);
}

TEST(PruneKeys, CentreOnEmpty3x3) {
  GameState s = GameState::empty(k3, Player::White);
  CellSet keys = prune_keys(s, hsearch(s.pos, Player::White));
  EXPECT_TRUE(keys.contains(cell("b2", k3)));
  EXPECT_EQ(oracle_solve(s.play(cell("b2", k3))).winner, Player::Black);
}

TEST(PruneKeys, EmptyWithoutSemis) {
  GameState s = GameState::empty({6, 6});
  EXPECT_TRUE(prune_keys(s, hsearch(s.pos, Player::Black)).empty());
  // Connections of the player not to move never give keys.
  GameState t = GameState::empty(k3, Player::Black);
  EXPECT_TRUE(prune_keys(t, hsearch(t.pos, Player::White)).empty());
}

TEST(PruneKeys, EveryKeyLoses) {
  Oracle o(k3);
  for (const GameState& s : test::reachable_states(k3, 9)) {
    if (s.pos.num_empty() == 0) continue;
    for (int k : prune_keys(s, hsearch(s.pos, s.to_move))) {
      GameState t = s.play(k);
      Player w = t.pos.terminal_loser() ? opponent(*t.pos.terminal_loser()) : o.winner(t);
      EXPECT_EQ(w, opponent(s.to_move)) << format_position(s) << cell_name(k, k3);
    }
  }
}

TEST(PairingReply, LastAnswersMate) {
  Dims d{6, 1};
  Pairing pi({{0, 1}, {2, 3}});
  GameState s = GameState::empty(d, Player::Black).play(2);  // Black took c1
  ASSERT_TRUE(s.is_last(Player::White));
  EXPECT_EQ(pairing_reply(s, Player::White, pi, 2), 3);
}

TEST(PairingReply, NotlastPlaysOutside) {
  Dims d{7, 1};
  Pairing pi({{0, 1}, {2, 3}});
  GameState s = GameState::empty(d, Player::Black).play(4);  // outside the pairing
  ASSERT_FALSE(s.is_last(Player::White));
  EXPECT_EQ(pairing_reply(s, Player::White, pi, 4), 5);
}

TEST(PairingReply, NotOwnerToMoveIsUsageError) {
  GameState s = GameState::empty({4, 1});
  EXPECT_THROW(pairing_reply(s, Player::White, Pairing({{0, 1}}), kNoCell), UsageError);
}

// Exhaustive adversary on a six-cell board: the owner never holds both
// cells of a pair.
TEST(PairingReply, SixCellPlayout) {
  Dims d{6, 1};
  Pairing pi({{0, 3}, {1, 5}});
  int terminals = 0;
  std::function<void(const GameState&, Player, int)> walk = [&](const GameState& s, Player owner,
                                                               int last) {
    for (auto [a, b] : pi.pairs()) {
      const CellSet& own = s.pos.stones(owner);
      ASSERT_FALSE(own.contains(a) && own.contains(b));
    }
    if (s.pos.num_empty() == 0) {
      ++terminals;
      return;
    }
    if (s.to_move == owner) {
      int m = pairing_reply(s, owner, pi, last);
      walk(s.play(m), owner, m);
    } else {
      for (int c : s.pos.empty_cells()) walk(s.play(c), owner, c);
    }
  };
  for (Player owner : {Player::Black, Player::White})
    for (Player first : {Player::Black, Player::White})
      walk(GameState::empty(d, first), owner, kNoCell);
  EXPECT_GT(terminals, 0);
}

// The certificate winner following forcing_reply wins against every reply.
TEST(ForcingReply, WinsFromEmpty3x3) {
  GameState s = GameState::empty(k3, Player::White);
  auto cert = detect_early_win(s, hsearch(s.pos, Player::Black), hsearch(s.pos, Player::White));
  ASSERT_TRUE(cert);
  std::function<void(const GameState&, int)> walk = [&](const GameState& t, int last) {
    if (auto l = t.pos.terminal_loser()) {
      EXPECT_EQ(*l, opponent(cert->winner));
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
}

}  // namespace
