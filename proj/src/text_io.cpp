#include "selfint/text_io.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "selfint/errors.hpp"

namespace selfint {
namespace {

struct Line {
  int number;
  std::vector<std::string> tokens;
};

std::vector<Line> read_lines(std::istream& in) {
  std::vector<Line> out;
  std::string text;
  int number = 0;
  while (std::getline(in, text)) {
    ++number;
    if (auto hash = text.find('#'); hash != std::string::npos) text.erase(hash);
    std::istringstream words(text);
    Line line{number, {}};
    for (std::string w; words >> w;) line.tokens.push_back(w);
    if (!line.tokens.empty()) out.push_back(std::move(line));
  }
  return out;
}

bool parse_number(const std::string& token, double& value) {
  const char* begin = token.c_str();
  char* end = nullptr;
  value = std::strtod(begin, &end);
  return end != begin && *end == '\0' && std::isfinite(value);
}

bool all_numeric(const Line& line) {
  double v;
  for (const auto& t : line.tokens)
    if (!parse_number(t, v)) return false;
  return true;
}

Vector numbers(const Line& line, Index expected) {
  if (static_cast<Index>(line.tokens.size()) != expected)
    throw ParseError("expected " + std::to_string(expected) + " values, found " +
                         std::to_string(line.tokens.size()),
                     line.number);
  Vector out(expected);
  for (Index i = 0; i < expected; ++i)
    if (!parse_number(line.tokens[i], out[i]))
      throw ParseError("not a number: '" + line.tokens[i] + "'", line.number);
  return out;
}

StateSpace make_space(std::vector<std::string> labels, int line) {
  try {
    return StateSpace(std::move(labels));
  } catch (const Error& e) {
    throw ParseError(e.what(), line);
  }
}

// Header of a matrix-like file: the label space and the index of the first
// data line.
std::pair<StateSpace, std::size_t> header(const std::vector<Line>& lines) {
  if (lines.empty()) throw ParseError("empty input", 0);
  const Line& first = lines.front();
  if (all_numeric(first))
    return {StateSpace::numbered(static_cast<Index>(first.tokens.size())), 0};
  return {make_space(first.tokens, first.number), 1};
}

Matrix block(const std::vector<Line>& lines, std::size_t from, Index rows, Index cols,
             int context_line) {
  if (lines.size() < from + static_cast<std::size_t>(rows))
    throw ParseError("expected " + std::to_string(rows) + " matrix rows", context_line);
  Matrix m(rows, cols);
  for (Index r = 0; r < rows; ++r) m.row(r) = numbers(lines[from + r], cols).transpose();
  return m;
}

void check_stochastic_rows(const Matrix& m, const std::vector<Line>& lines, std::size_t from) {
  for (Index r = 0; r < m.rows(); ++r) {
    const int line = lines[from + r].number;
    if ((m.row(r).array() < 0.0).any()) throw ParseError("negative transition probability", line);
    if (std::abs(m.row(r).sum() - 1.0) > kStochasticTol) throw ParseError("row does not sum to 1", line);
  }
}

int last_line(const std::vector<Line>& lines) { return lines.empty() ? 0 : lines.back().number; }

void expect_end(const std::vector<Line>& lines, std::size_t used) {
  if (lines.size() > used) throw ParseError("unexpected trailing content", lines[used].number);
}

LabeledMatrix matrix_from(const std::vector<Line>& lines) {
  auto [space, start] = header(lines);
  const Index n = space.size();
  Matrix m = block(lines, start, n, n, last_line(lines));
  expect_end(lines, start + n);
  return {std::move(space), std::move(m)};
}

LabeledChain chain_from(const std::vector<Line>& lines) {
  auto [space, start] = header(lines);
  const Index n = space.size();
  Matrix m = block(lines, start, n, n, last_line(lines));
  check_stochastic_rows(m, lines, start);
  expect_end(lines, start + n);
  return {std::move(space), MarkovMatrix(std::move(m))};
}

LabeledLandscape landscape_from(const std::vector<Line>& lines) {
  auto [space, start] = header(lines);
  const Index n = space.size();
  if (lines.size() <= start) throw ParseError("missing potential line", last_line(lines));
  Vector u = numbers(lines[start], n);
  Matrix m = block(lines, start + 1, n, n, last_line(lines));
  check_stochastic_rows(m, lines, start + 1);
  expect_end(lines, start + 1 + n);
  try {
    return {std::move(space), Landscape(MarkovMatrix(std::move(m)), std::move(u))};
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), lines[start + 1].number);
  }
}

StateSpace actions_line(const Line& line, const std::string& tag) {
  if (line.tokens.front() != tag) throw ParseError("expected '" + tag + "'", line.number);
  if (line.tokens.size() < 2) throw ParseError("no actions listed", line.number);
  return make_space({line.tokens.begin() + 1, line.tokens.end()}, line.number);
}

void expect_tag(const std::vector<Line>& lines, std::size_t at, const std::string& tag) {
  if (lines.size() <= at) throw ParseError("missing '" + tag + "' block", last_line(lines));
  const Line& l = lines[at];
  if (l.tokens.size() != 1 || l.tokens.front() != tag)
    throw ParseError("expected '" + tag + "'", l.number);
}

LabeledGame game_from(const std::vector<Line>& lines) {
  if (lines.size() < 2) throw ParseError("game needs actions1 and actions2 lines", last_line(lines));
  StateSpace a1 = actions_line(lines[0], "actions1:");
  StateSpace a2 = actions_line(lines[1], "actions2:");
  const Index n1 = a1.size(), n2 = a2.size();
  expect_tag(lines, 2, "U1");
  Matrix u1 = block(lines, 3, n1, n2, lines[2].number);
  const std::size_t next = 3 + static_cast<std::size_t>(n1);
  if (lines.size() <= next) throw ParseError("missing U2 block or game tag", last_line(lines));
  const Line& tag = lines[next];
  if (tag.tokens.size() == 1 && tag.tokens.front() == "zero_sum") {
    expect_end(lines, next + 1);
    return {std::move(a1), std::move(a2), TwoPlayerGame::zero_sum(std::move(u1))};
  }
  if (tag.tokens.size() == 1 && tag.tokens.front() == "potential") {
    expect_end(lines, next + 1);
    return {std::move(a1), std::move(a2), TwoPlayerGame::potential(std::move(u1))};
  }
  expect_tag(lines, next, "U2");
  Matrix u2 = block(lines, next + 1, n1, n2, tag.number);
  expect_end(lines, next + 1 + n1);
  return {std::move(a1), std::move(a2), TwoPlayerGame(std::move(u1), std::move(u2))};
}

template <class F>
auto from_file(const std::filesystem::path& path, F parse) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file", 0, path.string());
  try {
    return parse(in);
  } catch (const ParseError& e) {
    throw ParseError(e.detail(), e.line(), path.string());
  }
}

}  // namespace

LabeledMatrix parse_matrix(std::istream& in) { return matrix_from(read_lines(in)); }
LabeledChain parse_chain(std::istream& in) { return chain_from(read_lines(in)); }
LabeledLandscape parse_landscape(std::istream& in) { return landscape_from(read_lines(in)); }
LabeledGame parse_game(std::istream& in) { return game_from(read_lines(in)); }

ParsedFile parse_any(std::istream& in) {
  const auto lines = read_lines(in);
  if (lines.empty()) throw ParseError("empty input", 0);
  if (lines.front().tokens.front() == "actions1:") return game_from(lines);
  auto [space, start] = header(lines);
  const Index data = static_cast<Index>(lines.size() - start);
  if (data == space.size()) return chain_from(lines);
  if (data == space.size() + 1) return landscape_from(lines);
  throw ParseError("cannot tell a matrix from a landscape: " + std::to_string(data) +
                       " data lines for " + std::to_string(space.size()) + " states",
                   lines.back().number);
}

LabeledMatrix read_matrix(const std::filesystem::path& p) {
  return from_file(p, [](std::istream& in) { return parse_matrix(in); });
}
LabeledChain read_chain(const std::filesystem::path& p) {
  return from_file(p, [](std::istream& in) { return parse_chain(in); });
}
LabeledLandscape read_landscape(const std::filesystem::path& p) {
  return from_file(p, [](std::istream& in) { return parse_landscape(in); });
}
LabeledGame read_game(const std::filesystem::path& p) {
  return from_file(p, [](std::istream& in) { return parse_game(in); });
}
ParsedFile read_any(const std::filesystem::path& p) {
  return from_file(p, [](std::istream& in) { return parse_any(in); });
}

void write_matrix(std::ostream& out, const StateSpace& space, const Matrix& m) {
  for (Index i = 0; i < space.size(); ++i) out << (i ? " " : "") << space.label(i);
  out << '\n';
  const auto old = out.precision(17);
  for (Index r = 0; r < m.rows(); ++r) {
    for (Index c = 0; c < m.cols(); ++c) out << (c ? " " : "") << m(r, c);
    out << '\n';
  }
  out.precision(old);
}

}  // namespace selfint
