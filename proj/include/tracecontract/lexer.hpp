#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace tracecontract {

/// Half-open character range [start, end) into a source string.
struct SourceSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool contains(const SourceSpan& other) const { return start <= other.start && other.end <= end; }
  friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

inline SourceSpan cover(const SourceSpan& a, const SourceSpan& b) {
  return {std::min(a.start, b.start), std::max(a.end, b.end)};
}

enum class TokenKind { identifier, number, op, temporal, left_paren, right_paren, end_marker };

inline const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::identifier: return "identifier";
    case TokenKind::number: return "number";
    case TokenKind::op: return "operator";
    case TokenKind::temporal: return "temporal";
    case TokenKind::left_paren: return "left_paren";
    case TokenKind::right_paren: return "right_paren";
    case TokenKind::end_marker: return "end_marker";
  }
  return "?";
}

/// A lexical unit. For temporal tokens `name` holds the modality letter and
/// `radius` the bracketed bound in seconds (absent when no bracket followed).
/// The end marker carries an empty span at the source length.
struct Token {
  TokenKind kind = TokenKind::end_marker;
  std::string value;
  SourceSpan span;
  std::string name;
  std::optional<double> radius;

  friend bool operator==(const Token&, const Token&) = default;
};

class LexError : public std::runtime_error {
 public:
  LexError(SourceSpan span, const std::string& message)
      : std::runtime_error(message), span_(span) {}

  const SourceSpan& span() const { return span_; }

 private:
  SourceSpan span_;
};

/// Names classified as temporal tokens when an identifier matches exactly.
inline bool is_reserved_modality(std::string_view ident) {
  return ident == "N" || ident == "F" || ident == "G" || ident == "U";
}

/// Prefix trie over the declared operator alphabet. Lookup returns the length
/// of the longest operator starting at a position, or 0.
class OperatorTrie {
 public:
  explicit OperatorTrie(const std::vector<std::string>& operators) {
    for (const auto& op : operators) insert(op);
  }

  static const OperatorTrie& standard() {
    static const OperatorTrie trie({"->", "&", "|", "!", "(", ")", "[", "]"});
    return trie;
  }

  std::size_t longest_match(std::string_view text, std::size_t pos) const {
    const Node* node = &root_;
    std::size_t best = 0;
    for (std::size_t i = pos; i < text.size(); ++i) {
      auto it = node->next.find(text[i]);
      if (it == node->next.end()) break;
      node = it->second.get();
      if (node->terminal) best = i - pos + 1;
    }
    return best;
  }

  bool starts_operator(char c) const { return root_.next.count(c) != 0; }

 private:
  struct Node {
    bool terminal = false;
    std::map<char, std::unique_ptr<Node>> next;
  };

  void insert(const std::string& op) {
    Node* node = &root_;
    for (char c : op) {
      auto& child = node->next[c];
      if (!child) child = std::make_unique<Node>();
      node = child.get();
    }
    node->terminal = true;
  }

  Node root_;
};

namespace detail {

inline bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
inline bool is_ident_body(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }
inline bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

// Reads `digits [ '.' digits ]` at pos. Returns the end offset; throws on a
// dot not followed by a digit.
inline std::size_t scan_decimal(std::string_view src, std::size_t pos) {
  std::size_t i = pos;
  while (i < src.size() && is_digit(src[i])) ++i;
  if (i < src.size() && src[i] == '.') {
    if (i + 1 >= src.size() || !is_digit(src[i + 1]))
      throw LexError({pos, i + 1}, "malformed decimal literal '" + std::string(src.substr(pos, i + 1 - pos)) + "'");
    ++i;
    while (i < src.size() && is_digit(src[i])) ++i;
  }
  return i;
}

inline double decimal_value(std::string_view text, SourceSpan span) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw LexError(span, "malformed decimal literal '" + std::string(text) + "'");
  return value;
}

}  // namespace detail

/// Converts contract source text into a token stream terminated by an end
/// marker. Lexing is total over the declared character classes; grammar
/// errors are left to the parser.
inline std::vector<Token> tokenize(std::string_view source,
                                   const OperatorTrie& trie = OperatorTrie::standard()) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = source.size();

  while (i < n) {
    const char c = source[i];
    if (detail::is_space(c)) {
      ++i;
      continue;
    }

    if (detail::is_ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && detail::is_ident_body(source[j])) ++j;
      std::string ident(source.substr(i, j - i));
      if (!is_reserved_modality(ident)) {
        tokens.push_back({TokenKind::identifier, ident, {i, j}, {}, std::nullopt});
        i = j;
        continue;
      }
      Token tok{TokenKind::temporal, ident, {i, j}, ident, std::nullopt};
      if (j < n && source[j] == '[') {
        const std::size_t num_start = j + 1;
        if (num_start >= n || !detail::is_digit(source[num_start])) {
          if (num_start >= n)
            throw LexError({j, j + 1}, "unterminated radius bracket");
          throw LexError({num_start, num_start + 1}, "malformed decimal literal in radius");
        }
        const std::size_t num_end = detail::scan_decimal(source, num_start);
        if (num_end >= n || source[num_end] != ']') {
          if (num_end >= n) throw LexError({j, j + 1}, "unterminated radius bracket");
          throw LexError({num_end, num_end + 1}, "malformed decimal literal in radius");
        }
        const SourceSpan num_span{num_start, num_end};
        tok.radius = detail::decimal_value(source.substr(num_start, num_end - num_start), num_span);
        tok.span.end = num_end + 1;
        tok.value = std::string(source.substr(i, tok.span.end - i));
      }
      i = tok.span.end;
      tokens.push_back(std::move(tok));
      continue;
    }

    if (detail::is_digit(c)) {
      const std::size_t j = detail::scan_decimal(source, i);
      tokens.push_back({TokenKind::number, std::string(source.substr(i, j - i)), {i, j}, {}, std::nullopt});
      i = j;
      continue;
    }

    const std::size_t len = trie.longest_match(source, i);
    if (len == 0)
      throw LexError({i, i + 1}, std::string("unexpected character '") + c + "'");
    std::string op(source.substr(i, len));
    TokenKind kind = TokenKind::op;
    if (op == "(") kind = TokenKind::left_paren;
    if (op == ")") kind = TokenKind::right_paren;
    tokens.push_back({kind, op, {i, i + len}, {}, std::nullopt});
    i += len;
  }

  tokens.push_back({TokenKind::end_marker, "", {n, n}, {}, std::nullopt});
  return tokens;
}

/// Exact source substring over a span; used by diagnostics.
inline std::string span_text(std::string_view source, const SourceSpan& span) {
  if (span.start > span.end || span.end > source.size())
    throw std::out_of_range("span [" + std::to_string(span.start) + "," + std::to_string(span.end) +
                            ") outside source of length " + std::to_string(source.size()));
  return std::string(source.substr(span.start, span.end - span.start));
}

/// Renders a one-line caret diagnostic under the offending span.
inline std::string caret_line(std::string_view source, const SourceSpan& span) {
  std::string out(source);
  out += '\n';
  out.append(std::min(span.start, source.size()), ' ');
  out.append(std::max<std::size_t>(1, span.length()), '^');
  return out;
}

}  // namespace tracecontract
