#pragma once

// Command-line front end: result records, benchmark suites and the
// subcommand driver used by the `rex` executable.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "rex/board.hpp"
#include "rex/pairvc.hpp"
#include "rex/search.hpp"

namespace rex::cli {

enum ExitCode : int { kSolved = 0, kUsage = 1, kTimeout = 2, kRegression = 3 };

/// One line of machine output. Field names are frozen; see README.
struct ResultRecord {
  std::string command;
  std::string board;  // single-line position text
  std::string to_move;
  std::string status;  // "solved" | "timeout"
  std::optional<std::string> winner;
  std::vector<std::string> line;
  std::vector<std::pair<std::string, std::string>> moves;  // move -> winner
  std::optional<nlohmann::json> certificate;
  nlohmann::json stats = nlohmann::json::object();
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json details = nlohmann::json::object();

  bool operator==(const ResultRecord&) const = default;
};

nlohmann::json to_json(const ResultRecord& r);
ResultRecord record_from_json(const nlohmann::json& j);

nlohmann::json certificate_json(const WinCertificate& cert, Dims d);
nlohmann::json stats_json(const SearchStats& s);
nlohmann::json config_json(const SearchConfig& cfg);

/// "rex W H/row/.../toplay b" form of a state.
std::string inline_position(const GameState& s);

/// Named state suites: 3x3-all, 4x4-openings, 5x5-acute-replies,
/// 6x6-openings. Throws UsageError for unknown names.
std::vector<GameState> suite(std::string_view name);
const std::vector<std::string>& suite_names();

/// Openings of an empty n x n board, optionally one per 180 degree class.
std::vector<int> opening_moves(Dims d, bool by_symmetry);

/// Parses argv and runs one subcommand. Returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rex::cli
