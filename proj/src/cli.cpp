#include "rex/cli.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "rex/oracle.hpp"

namespace rex::cli {

using nlohmann::json;

namespace {

std::string lower(Player p) { return to_string(p); }

std::string vc_kind(VcKind k) { return k == VcKind::Full ? "full" : "semi"; }

json vc_json(const PairingVC& vc, Dims d) {
  json pairs = json::array();
  for (auto [a, b] : vc.pairing.pairs())
    pairs.push_back({cell_name(a, d), cell_name(b, d)});
  json j = {{"owner", lower(vc.player)},
            {"ends", {to_string(vc.a, d), to_string(vc.b, d)}},
            {"kind", vc_kind(vc.kind)},
            {"pairs", pairs}};
  j["key"] = vc.key == kNoCell ? json(nullptr) : json(cell_name(vc.key, d));
  return j;
}

}  // namespace

json certificate_json(const WinCertificate& cert, Dims d) {
  json j = vc_json(cert.vc, d);
  j["winner"] = lower(cert.winner);
  j["type"] = to_string(cert.kind);
  return j;
}

json stats_json(const SearchStats& s) {
  return {{"nodes", s.nodes},
          {"knowledge_calls", s.knowledge_calls},
          {"knowledge_cache_hits", s.knowledge_cache_hits},
          {"tt_hits", s.tt_hits},
          {"seconds", s.seconds}};
}

json config_json(const SearchConfig& cfg) {
  json features = json::object();
  for (Feature f : all_features()) features[std::string(feature_name(f))] = cfg.on(f);
  return {{"threads", cfg.threads},
          {"tt_bytes", cfg.tt_bytes},
          {"time_limit", cfg.time_limit},
          {"seed", cfg.seed},
          {"features", features}};
}

json to_json(const ResultRecord& r) {
  json moves = json::array();
  for (const auto& [m, w] : r.moves) moves.push_back({m, w});
  json j = {{"command", r.command}, {"board", r.board},     {"to_move", r.to_move},
            {"status", r.status},   {"line", r.line},       {"moves", moves},
            {"stats", r.stats},     {"config", r.config},   {"details", r.details}};
  j["winner"] = r.winner ? json(*r.winner) : json(nullptr);
  j["certificate"] = r.certificate ? *r.certificate : json(nullptr);
  return j;
}

ResultRecord record_from_json(const json& j) {
  ResultRecord r;
  r.command = j.at("command").get<std::string>();
  r.board = j.at("board").get<std::string>();
  r.to_move = j.at("to_move").get<std::string>();
  r.status = j.at("status").get<std::string>();
  if (!j.at("winner").is_null()) r.winner = j.at("winner").get<std::string>();
  r.line = j.at("line").get<std::vector<std::string>>();
  for (const auto& m : j.at("moves"))
    r.moves.emplace_back(m.at(0).get<std::string>(), m.at(1).get<std::string>());
  if (!j.at("certificate").is_null()) r.certificate = j.at("certificate");
  r.stats = j.at("stats");
  r.config = j.at("config");
  r.details = j.at("details");
  return r;
}

std::string inline_position(const GameState& s) {
  std::string text = format_position(s);
  if (!text.empty() && text.back() == '\n') text.pop_back();
  for (char& c : text)
    if (c == '\n') c = '/';
  return text;
}

// ---------------------------------------------------------------------------
// Suites

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names = {"3x3-all", "4x4-openings",
                                                 "5x5-acute-replies", "6x6-openings"};
  return names;
}

std::vector<int> opening_moves(Dims d, bool by_symmetry) {
  std::vector<int> out;
  for (int c = 0; c < d.cells(); ++c)
    if (!by_symmetry || c <= rotate_cell(c, d)) out.push_back(c);
  return out;
}

namespace {

// States reachable by alternating play from the empty board (Black first)
// with at most `max_stones` stones and no side joined.
void reachable(const GameState& s, int max_stones, std::vector<GameState>& out,
               std::vector<std::uint64_t>& seen) {
  std::uint64_t h = exact_hash(s);
  if (std::find(seen.begin(), seen.end(), h) != seen.end()) return;
  seen.push_back(h);
  out.push_back(s);
  int stones = s.pos.dims().cells() - s.pos.num_empty();
  if (stones >= max_stones) return;
  for (int c : s.pos.empty_cells()) {
    GameState t = s.play(c);
    if (t.pos.terminal_loser()) continue;
    reachable(t, max_stones, out, seen);
  }
}

}  // namespace

std::vector<GameState> suite(std::string_view name) {
  std::vector<GameState> out;
  if (name == "3x3-all") {
    std::vector<std::uint64_t> seen;
    reachable(GameState::empty({3, 3}), 4, out, seen);
    std::sort(out.begin(), out.end(), [](const GameState& a, const GameState& b) {
      int na = a.pos.num_empty(), nb = b.pos.num_empty();
      if (na != nb) return na > nb;
      return format_position(a) < format_position(b);
    });
  } else if (name == "4x4-openings") {
    GameState e = GameState::empty({4, 4});
    for (int c : opening_moves(e.pos.dims(), false)) out.push_back(e.play(c));
  } else if (name == "5x5-acute-replies") {
    GameState a1 = GameState::empty({5, 5}).play(0);
    for (int c : a1.pos.empty_cells()) out.push_back(a1.play(c));
  } else if (name == "6x6-openings") {
    GameState e = GameState::empty({6, 6});
    for (int c : opening_moves(e.pos.dims(), true)) out.push_back(e.play(c));
  } else {
    throw UsageError("unknown suite '" + std::string(name) + "'");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Driver

namespace {

struct Common {
  std::optional<int> size;
  std::string board_file;
  std::string board_inline;
  std::string toplay;
  int threads = 1;
  int tt_mb = 256;
  double time_limit = 0;
  bool machine = false;
  std::uint64_t seed = 0;
  std::array<bool, kNumFeatures> disabled{};
};

void add_common(CLI::App* app, Common& c, bool position) {
  if (position) {
    auto* size = app->add_option("--size", c.size, "empty N x N board")->check(CLI::Range(1, kMaxSide));
    auto* file = app->add_option("--board", c.board_file, "position file");
    auto* text = app->add_option("--board-inline", c.board_inline,
                                 "position text, lines separated by '/'");
    size->excludes(file)->excludes(text);
    file->excludes(text);
    app->add_option("--toplay", c.toplay, "player to move (b|w)")
        ->check(CLI::IsMember({"b", "w"}));
  }
  app->add_option("--threads", c.threads, "search threads")->check(CLI::PositiveNumber);
  app->add_option("--tt-mb", c.tt_mb, "transposition table megabytes (0 disables)")
      ->check(CLI::NonNegativeNumber);
  app->add_option("--time-limit", c.time_limit, "seconds per solve")
      ->check(CLI::NonNegativeNumber);
  app->add_flag("--machine", c.machine, "one JSON record per line");
  app->add_option("--seed", c.seed, "worker tie-break seed");
  for (Feature f : all_features())
    app->add_flag("--no-" + std::string(feature_name(f)), c.disabled[static_cast<int>(f)],
                  "disable " + std::string(feature_name(f)));
}

SearchConfig make_config(const Common& c) {
  SearchConfig cfg;
  cfg.threads = c.threads;
  cfg.tt_bytes = static_cast<std::size_t>(c.tt_mb) << 20;
  cfg.time_limit = c.time_limit;
  cfg.seed = c.seed;
  for (Feature f : all_features())
    if (c.disabled[static_cast<int>(f)]) cfg.set(f, false);
  return cfg;
}

GameState load_position(const Common& c) {
  GameState s;
  if (c.size) {
    s = GameState::empty({*c.size, *c.size});
  } else if (!c.board_file.empty()) {
    std::ifstream in(c.board_file);
    if (!in) throw UsageError("cannot read " + c.board_file);
    std::stringstream ss;
    ss << in.rdbuf();
    s = parse_position(ss.str());
  } else if (!c.board_inline.empty()) {
    s = parse_position(c.board_inline);
  } else {
    throw UsageError("one of --size, --board, --board-inline is required");
  }
  if (!c.toplay.empty()) s.to_move = c.toplay == "b" ? Player::Black : Player::White;
  return s;
}

ResultRecord base_record(const std::string& command, const GameState& s,
                         const SearchConfig& cfg) {
  ResultRecord r;
  r.command = command;
  r.board = inline_position(s);
  r.to_move = lower(s.to_move);
  r.status = "solved";
  r.config = config_json(cfg);
  return r;
}

std::vector<std::string> move_names(const std::vector<int>& moves, Dims d) {
  std::vector<std::string> out;
  for (int m : moves) out.push_back(cell_name(m, d));
  return out;
}

void emit(std::ostream& out, const ResultRecord& r) { out << to_json(r).dump() << "\n"; }

std::string stats_line(const SearchStats& s) {
  std::ostringstream o;
  o << "nodes " << s.nodes << ", knowledge " << s.knowledge_calls << ", tt hits " << s.tt_hits
    << ", " << std::fixed << std::setprecision(3) << s.seconds << "s";
  return o.str();
}

std::string join(const std::vector<std::string>& v) {
  std::string s;
  for (const auto& x : v) s += (s.empty() ? "" : " ") + x;
  return s;
}

// Moves alternate colors starting with the player to move.
std::vector<std::string> colored_line(const std::vector<int>& line, const GameState& s) {
  std::vector<std::string> out;
  Player p = s.to_move;
  for (int m : line) {
    out.push_back(format_move(m, s.pos.dims(), p));
    p = opponent(p);
  }
  return out;
}

int cmd_solve(const Common& c, std::ostream& out) {
  GameState s = load_position(c);
  SearchConfig cfg = make_config(c);
  Solver solver(cfg);
  SolveResult res = solver.solve(s);
  ResultRecord r = base_record("solve", s, cfg);
  r.status = res.status == SolveStatus::Solved ? "solved" : "timeout";
  if (res.winner) r.winner = lower(*res.winner);
  r.line = colored_line(res.principal_line, s);
  r.stats = stats_json(res.stats);
  KnowledgeResult k = evaluate_leaf(s, cfg);
  if (k.certificate) r.certificate = certificate_json(*k.certificate, s.pos.dims());
  if (c.machine) {
    emit(out, r);
  } else {
    out << diagram(s.pos) << lower(s.to_move) << " to move\n";
    if (res.winner) out << "winner: " << *r.winner << "\n";
    else out << "status: timeout\n";
    if (!r.line.empty()) out << "line: " << join(r.line) << "\n";
    if (k.certificate)
      out << "certificate: " << to_string(k.certificate->kind) << " for "
          << lower(k.certificate->vc.player) << "\n";
    out << stats_line(res.stats) << "\n";
  }
  return res.status == SolveStatus::Solved ? kSolved : kTimeout;
}

int cmd_analyze(const Common& c, bool values, std::ostream& out) {
  GameState s = load_position(c);
  SearchConfig cfg = make_config(c);
  Dims d = s.pos.dims();
  ResultRecord r = base_record("analyze", s, cfg);
  KnowledgeResult k = evaluate_leaf(s, cfg);
  const GameState& red = k.reduced;

  json fill = json::array();
  for (const auto& st : k.fillin)
    fill.push_back({{"cell", cell_name(st.cell, d)},
                    {"color", lower(st.color)},
                    {"reason", to_string(st.reason)}});

  // Pruning and connections are listed even when the state is already
  // decided by knowledge, so the reasons stay visible.
  PruneReport pr;
  std::vector<PairingVC> vcs;
  CellSet keys;
  if (!red.pos.terminal_loser()) {
    PruneOptions po;
    po.clique_cutset = cfg.on(Feature::DeadCliqueCutset);
    po.mutual_creator = cfg.on(Feature::MutualFillin);
    pr = cfg.on(Feature::InferiorPrune) ? prune_moves(red, po)
                                        : PruneReport{red.pos.empty_cells(), {}};
    if (cfg.on(Feature::HSearch)) {
      HSearchOptions ho = cfg.hsearch;
      ho.augmented = cfg.on(Feature::AugmentedHSearch);
      for (Player x : {Player::Black, Player::White}) {
        HSearchResult h = hsearch(red.pos, x, ho);
        vcs.insert(vcs.end(), h.side_fulls.begin(), h.side_fulls.end());
        vcs.insert(vcs.end(), h.side_semis.begin(), h.side_semis.end());
        if (x == red.to_move) {
          keys = prune_keys(red, h);
          for (int key : keys & pr.kept) {
            pr.kept.erase(key);
            pr.removed.push_back({key, PruneReason::PreJoinKey, kNoCell});
          }
        }
      }
    }
  }
  json removed = json::array();
  for (const auto& m : pr.removed)
    removed.push_back({{"cell", cell_name(m.cell, d)},
                       {"reason", to_string(m.reason)},
                       {"dominator", m.dominator == kNoCell ? json(nullptr)
                                                            : json(cell_name(m.dominator, d))}});
  json vc_list = json::array();
  for (const auto& vc : vcs) vc_list.push_back(vc_json(vc, d));
  std::vector<int> order = pr.kept.to_vector();
  if (cfg.on(Feature::ResistanceOrdering) && !order.empty())
    order = resistance_order(red, order, cfg.resistance_rex_polarity);

  r.details = {{"knowledge", to_string(k.source)},
               {"reduced", inline_position(red)},
               {"fillin", fill},
               {"kept", move_names(pr.kept.to_vector(), d)},
               {"removed", removed},
               {"keys", move_names(keys.to_vector(), d)},
               {"vcs", vc_list},
               {"order", move_names(order, d)}};
  if (k.winner) r.winner = lower(*k.winner);
  else r.status = "open";
  if (k.certificate) r.certificate = certificate_json(*k.certificate, d);

  int code = kSolved;
  SolveResult all;
  if (values) {
    Solver solver(cfg);
    all = solver.solve_all_moves(s);
    for (auto [m, w] : all.move_values) r.moves.emplace_back(cell_name(m, d), lower(w));
    r.stats = stats_json(all.stats);
    if (all.status == SolveStatus::Solved) {
      r.winner = lower(*all.winner);
      r.status = "solved";
    } else {
      r.status = "timeout";
      code = kTimeout;
    }
  }

  if (c.machine) {
    emit(out, r);
    return code;
  }
  out << diagram(s.pos) << lower(s.to_move) << " to move ("
      << (s.is_last(s.to_move) ? "Last" : "Notlast") << ")\n";
  if (!k.fillin.empty()) {
    out << "fillin:";
    for (const auto& st : k.fillin)
      out << " " << format_move(st.cell, d, st.color) << "(" << to_string(st.reason) << ")";
    out << "\n" << diagram(red.pos);
  }
  out << "knowledge: " << to_string(k.source);
  if (k.winner) out << ", winner " << lower(*k.winner);
  out << "\n";
  if (k.certificate)
    out << "certificate: " << to_string(k.certificate->kind) << " for "
        << lower(k.certificate->vc.player) << "\n";
  out << "kept: " << join(move_names(pr.kept.to_vector(), d)) << "\n";
  for (const auto& m : pr.removed) {
    out << "  " << cell_name(m.cell, d) << " " << to_string(m.reason);
    if (m.dominator != kNoCell) out << " (by " << cell_name(m.dominator, d) << ")";
    out << "\n";
  }
  if (!keys.empty()) out << "pre-join keys: " << join(move_names(keys.to_vector(), d)) << "\n";
  if (!order.empty()) out << "order: " << join(move_names(order, d)) << "\n";
  for (const auto& vc : vcs) {
    out << "vc " << lower(vc.player) << " " << to_string(vc.a, d) << "-" << to_string(vc.b, d)
        << " " << vc_kind(vc.kind);
    if (vc.key != kNoCell) out << " key " << cell_name(vc.key, d);
    out << " pairs";
    for (auto [a, b] : vc.pairing.pairs()) out << " " << cell_name(a, d) << cell_name(b, d);
    out << "\n";
  }
  if (values) {
    out << "values:";
    for (const auto& [m, w] : r.moves) out << " " << m << "=" << w;
    out << "\n" << stats_line(all.stats) << "\n";
  }
  return code;
}

int cmd_openings(const Common& c, int size, bool symmetry, std::ostream& out) {
  SearchConfig cfg = make_config(c);
  Solver solver(cfg);
  GameState e = GameState::empty({size, size});
  Dims d = e.pos.dims();
  int code = kSolved;
  SearchStats total;
  for (int m : opening_moves(d, symmetry)) {
    GameState s = e.play(m);
    SolveResult res = solver.solve(s);
    total += res.stats;
    total.seconds += res.stats.seconds;
    ResultRecord r = base_record("openings", s, cfg);
    r.details = {{"opening", cell_name(m, d)}};
    r.status = res.status == SolveStatus::Solved ? "solved" : "timeout";
    if (res.winner) r.winner = lower(*res.winner);
    r.stats = stats_json(res.stats);
    if (res.status != SolveStatus::Solved) code = kTimeout;
    if (c.machine) {
      emit(out, r);
    } else {
      out << std::left << std::setw(4) << cell_name(m, d) << " "
          << (res.winner ? (*res.winner == Player::Black ? "wins " : "loses")
                         : "timeout")
          << "  " << stats_line(res.stats) << "\n";
    }
  }
  if (!c.machine) out << "total: " << stats_line(total) << "\n";
  return code;
}

struct SuiteRun {
  std::vector<std::optional<Player>> winners;
  SearchStats stats;
  bool timeout = false;
};

SuiteRun run_suite(const std::vector<GameState>& states, const SearchConfig& cfg) {
  SuiteRun run;
  Solver solver(cfg);
  for (const auto& s : states) {
    SolveResult r = solver.solve(s);
    run.stats += r.stats;
    run.stats.seconds += r.stats.seconds;
    if (r.status != SolveStatus::Solved) run.timeout = true;
    run.winners.push_back(r.winner);
  }
  return run;
}

int cmd_bench(const Common& c, const std::string& suite_name,
              const std::vector<std::string>& knockouts, std::ostream& out) {
  std::vector<Feature> features;
  for (const auto& k : knockouts) {
    if (k == "all") {
      for (Feature f : all_features())
        if (f != Feature::VcDecomp) features.push_back(f);
      continue;
    }
    auto f = parse_feature(k);
    if (!f) throw UsageError("unknown feature '" + k + "'");
    features.push_back(*f);
  }
  std::vector<GameState> states = suite(suite_name);
  SearchConfig base = make_config(c);
  SuiteRun baseline = run_suite(states, base);
  int code = baseline.timeout ? kTimeout : kSolved;
  if (!c.machine)
    out << suite_name << ": " << states.size() << " states, baseline "
        << stats_line(baseline.stats) << "\n";
  if (features.empty()) {
    ResultRecord r = base_record("bench", states.front(), base);
    r.board.clear();
    r.status = baseline.timeout ? "timeout" : "solved";
    r.stats = stats_json(baseline.stats);
    r.details = {{"suite", suite_name}, {"states", states.size()}};
    if (c.machine) emit(out, r);
  }
  for (Feature f : features) {
    SearchConfig cfg = base;
    cfg.set(f, !base.on(f));
    SuiteRun ko = run_suite(states, cfg);
    json mismatches = json::array();
    for (std::size_t i = 0; i < states.size(); ++i) {
      if (!baseline.winners[i] || !ko.winners[i]) continue;
      if (*baseline.winners[i] != *ko.winners[i]) mismatches.push_back(inline_position(states[i]));
    }
    if (ko.timeout && code == kSolved) code = kTimeout;
    if (!mismatches.empty()) code = kRegression;
    double ratio = baseline.stats.nodes
                       ? static_cast<double>(ko.stats.nodes) / static_cast<double>(baseline.stats.nodes)
                       : 0.0;
    double tratio = baseline.stats.seconds > 0 ? ko.stats.seconds / baseline.stats.seconds : 0.0;
    ResultRecord r = base_record("bench", states.front(), cfg);
    r.board.clear();
    r.status = ko.timeout || baseline.timeout ? "timeout" : "solved";
    r.stats = stats_json(ko.stats);
    r.details = {{"suite", suite_name},
                 {"knockout", std::string(feature_name(f))},
                 {"states", states.size()},
                 {"baseline_nodes", baseline.stats.nodes},
                 {"knockout_nodes", ko.stats.nodes},
                 {"node_ratio", ratio},
                 {"baseline_seconds", baseline.stats.seconds},
                 {"knockout_seconds", ko.stats.seconds},
                 {"time_ratio", tratio},
                 {"mismatches", mismatches}};
    if (c.machine) {
      emit(out, r);
    } else {
      out << "  " << (base.on(f) ? "no-" : "") << feature_name(f) << ": "
          << (mismatches.empty() ? "winners identical" : "WINNER MISMATCH") << ", node ratio "
          << std::fixed << std::setprecision(2) << ratio << ", time ratio " << tratio << "  "
          << stats_line(ko.stats) << "\n";
    }
  }
  return code;
}

int cmd_oracle(const Common& c, std::ostream& out) {
  GameState s = load_position(c);
  Oracle o(s.pos.dims());
  OracleResult res = o.solve(s);
  Dims d = s.pos.dims();
  ResultRecord r = base_record("oracle", s, SearchConfig{});
  r.config = json::object();
  r.winner = lower(res.winner);
  for (auto [m, w] : res.move_winners) r.moves.emplace_back(cell_name(m, d), lower(w));
  r.stats = {{"nodes", o.nodes()}};
  if (c.machine) {
    emit(out, r);
  } else {
    out << diagram(s.pos) << lower(s.to_move) << " to move\nwinner: " << *r.winner << "\n";
    if (!r.moves.empty()) {
      out << "values:";
      for (const auto& [m, w] : r.moves) out << " " << m << "=" << w;
      out << "\n";
    }
  }
  return kSolved;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reverse Hex solver"};
  app.require_subcommand(1);
  Common c;

  auto* solve_cmd = app.add_subcommand("solve", "solve a position");
  add_common(solve_cmd, c, true);

  bool values = false;
  auto* analyze_cmd = app.add_subcommand("analyze", "fillin, pruning and connections");
  add_common(analyze_cmd, c, true);
  analyze_cmd->add_flag("--values", values, "also solve every legal move");

  int size = 0;
  bool symmetry = false;
  auto* openings_cmd = app.add_subcommand("openings", "winner of every opening");
  add_common(openings_cmd, c, false);
  openings_cmd->add_option("--size", size, "board size")->required()->check(CLI::Range(1, kMaxSide));
  openings_cmd->add_flag("--symmetry", symmetry, "one opening per 180 degree class");

  std::string suite_name;
  std::vector<std::string> knockouts;
  auto* bench_cmd = app.add_subcommand("bench", "suite run with feature knockouts");
  add_common(bench_cmd, c, false);
  bench_cmd->add_option("--suite", suite_name, "suite name")
      ->required()
      ->check(CLI::IsMember(suite_names()));
  bench_cmd->add_option("--knockout", knockouts, "feature to toggle, or 'all'");

  auto* oracle_cmd = app.add_subcommand("oracle", "brute-force value (at most 16 cells)");
  add_common(oracle_cmd, c, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSolved;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kSolved;
    }
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (*solve_cmd) return cmd_solve(c, out);
    if (*analyze_cmd) return cmd_analyze(c, values, out);
    if (*openings_cmd) return cmd_openings(c, size, symmetry, out);
    if (*bench_cmd) return cmd_bench(c, suite_name, knockouts, out);
    if (*oracle_cmd) return cmd_oracle(c, out);
  } catch (const ParseError& e) {
    err << "error: line " << e.line() << ", column " << e.column() << ": " << e.what() << "\n";
    return kUsage;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace rex::cli
