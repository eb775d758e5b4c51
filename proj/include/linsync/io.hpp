#pragma once

#include <cctype>
#include <charconv>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "automaton.hpp"

namespace linsync {

class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// Splits the text format into integer tokens, dropping '#' comments, and
// remembers the line each token came from.
struct Token {
  std::string_view text;
  std::size_t line;
};

inline std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  std::size_t line = 1;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
    } else if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
    } else {
      const std::size_t start = i;
      while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i])) && text[i] != '#') ++i;
      tokens.push_back({text.substr(start, i - start), line});
    }
  }
  return tokens;
}

inline std::uint64_t to_uint(const Token& t) {
  std::uint64_t v = 0;
  const auto* first = t.text.data();
  const auto* last = first + t.text.size();
  auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc{} || ptr != last) {
    throw ParseError("line " + std::to_string(t.line) + ": expected a non-negative integer, got '" +
                     std::string(t.text) + "'");
  }
  return v;
}

inline Automaton parse_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  try {
    const auto n = j.at("n").get<std::size_t>();
    const auto k = j.at("k").get<std::size_t>();
    const auto rows = j.at("delta").get<std::vector<std::vector<State>>>();
    return Automaton(n, k, rows);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed automaton JSON: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
}

}  // namespace detail

// Reads either the plain text format ("n k" header, then n rows of k targets,
// '#' starts a comment) or the JSON object {"n":..,"k":..,"delta":[[..],..]}.
inline Automaton parse(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') return detail::parse_json(text);

  const auto tokens = detail::tokenize(text);
  if (tokens.size() < 2) throw ParseError("missing 'n k' header");
  const std::uint64_t n = detail::to_uint(tokens[0]);
  const std::uint64_t k = detail::to_uint(tokens[1]);
  if (tokens[0].line != tokens[1].line) throw ParseError("header must be 'n k' on one line");
  if (n == 0 || k == 0) throw ParseError("header: n and k must be positive");
  if (n > 0xFFFFFFFFu) throw ParseError("header: too many states");
  if (tokens.size() - 2 != n * k) {
    throw ParseError("expected " + std::to_string(n * k) + " transition entries, found " +
                     std::to_string(tokens.size() - 2));
  }

  std::vector<State> table(n * k);
  std::size_t prev_line = tokens[1].line;
  for (std::size_t q = 0; q < n; ++q) {
    const std::size_t row_start = 2 + q * k;
    const std::size_t line = tokens[row_start].line;
    if (line == prev_line) throw ParseError("line " + std::to_string(line) + ": row " + std::to_string(q) +
                                            " must start on a new line");
    for (std::size_t a = 0; a < k; ++a) {
      const auto& t = tokens[row_start + a];
      if (t.line != line) {
        throw ParseError("line " + std::to_string(line) + ": row " + std::to_string(q) + " has fewer than " +
                         std::to_string(k) + " entries");
      }
      const std::uint64_t v = detail::to_uint(t);
      if (v >= n) {
        throw ParseError("line " + std::to_string(t.line) + ": target " + std::to_string(v) +
                         " is out of range for n=" + std::to_string(n));
      }
      table[q * k + a] = static_cast<State>(v);
    }
    prev_line = line;
  }
  return Automaton(n, k, std::move(table));
}

// Canonical text form: "n k\n" followed by one line per state, entries
// separated by single spaces.
inline std::string serialize(const Automaton& A) {
  std::string out = std::to_string(A.states()) + ' ' + std::to_string(A.letters()) + '\n';
  out.reserve(out.size() + A.states() * A.letters() * 7);
  for (State q = 0; q < A.states(); ++q) {
    const auto r = A.row(q);
    for (std::size_t a = 0; a < r.size(); ++a) {
      if (a) out += ' ';
      out += std::to_string(r[a]);
    }
    out += '\n';
  }
  return out;
}

inline nlohmann::json to_json(const Automaton& A) {
  nlohmann::json rows = nlohmann::json::array();
  for (State q = 0; q < A.states(); ++q) {
    const auto r = A.row(q);
    rows.push_back(std::vector<State>(r.begin(), r.end()));
  }
  return {{"n", A.states()}, {"k", A.letters()}, {"delta", std::move(rows)}};
}

inline std::string serialize_json(const Automaton& A) { return to_json(A).dump() + '\n'; }

}  // namespace linsync
