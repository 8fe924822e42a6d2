#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

#include "selfint/games.hpp"
#include "selfint/landscape.hpp"
#include "selfint/markov.hpp"

namespace selfint {

// Text formats. '#' starts a comment; blank lines are ignored.
//
//   matrix:     a header line of state labels, then one row per line
//   landscape:  labels, one line of potential values, then the M0 rows
//   game:       "actions1: ..." and "actions2: ..." lines, a "U1" line
//               followed by its rows, then either "U2" with rows or a single
//               "zero_sum" / "potential" tag line
//
// A header made only of numbers is taken as data and the states are
// numbered 0..n-1. Every parse failure is a ParseError carrying the line.

struct LabeledMatrix {
  StateSpace space;
  Matrix entries;
};

struct LabeledChain {
  StateSpace space;
  MarkovMatrix chain;
};

struct LabeledLandscape {
  StateSpace space;
  Landscape landscape;
};

struct LabeledGame {
  StateSpace actions1;
  StateSpace actions2;
  TwoPlayerGame game;
};

using ParsedFile = std::variant<LabeledChain, LabeledLandscape, LabeledGame>;

// Square real matrix (interaction matrices need not be stochastic).
LabeledMatrix parse_matrix(std::istream& in);
LabeledChain parse_chain(std::istream& in);
LabeledLandscape parse_landscape(std::istream& in);
LabeledGame parse_game(std::istream& in);
// Picks the format from the content: game tags, n rows (chain) or n + 1 rows
// (landscape) under an n-label header.
ParsedFile parse_any(std::istream& in);

LabeledMatrix read_matrix(const std::filesystem::path& path);
LabeledChain read_chain(const std::filesystem::path& path);
LabeledLandscape read_landscape(const std::filesystem::path& path);
LabeledGame read_game(const std::filesystem::path& path);
ParsedFile read_any(const std::filesystem::path& path);

void write_matrix(std::ostream& out, const StateSpace& space, const Matrix& m);

}  // namespace selfint
