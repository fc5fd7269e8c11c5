// Copyright 2026 The AICL Toolkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Compact text form of AICL messages.
//
//   message  := '[' TYPE ':' value '|' meta (',' meta)* ']'
//   meta     := key ':' value            (key from the fixed metadata set)
//   value    := string | number | 'true' | 'false' | 't(' rfc3339 ')'
//             | ns '!' local | ns ':' name map | list | map
//   list     := '[' (value (',' value)*)? ']'
//   map      := '{' (key ':' value (',' key ':' value)*)? '}'
//   string   := '"' (char | '\"' | '\\' | '\n' | '\t' | '\u{' hex+ '}')* '"'
//
// Whitespace between tokens is insignificant. Streams (.aicl files) are
// whitespace-separated messages with `#` line comments between them.

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "aicl/message.hpp"
#include "aicl/value.hpp"

namespace aicl {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string expected, std::string found)
      : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": expected " + expected +
                           ", found " + found),
        line_(line),
        column_(column),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
  std::string found_;
};

enum class PrintStyle { Compact, Pretty };

namespace text {

inline constexpr int kMaxDepth = 256;

// Length of the well-formed UTF-8 sequence starting at s[pos], or 0.
inline std::size_t utf8_sequence_length(std::string_view s, std::size_t pos) {
  auto b = [&](std::size_t i) { return static_cast<unsigned char>(s[i]); };
  unsigned char c = b(pos);
  if (c < 0x80) return 1;
  std::size_t len;
  std::uint32_t cp;
  if ((c & 0xE0) == 0xC0) {
    len = 2;
    cp = c & 0x1F;
  } else if ((c & 0xF0) == 0xE0) {
    len = 3;
    cp = c & 0x0F;
  } else if ((c & 0xF8) == 0xF0) {
    len = 4;
    cp = c & 0x07;
  } else {
    return 0;
  }
  if (pos + len > s.size()) return 0;
  for (std::size_t i = 1; i < len; ++i) {
    if ((b(pos + i) & 0xC0) != 0x80) return 0;
    cp = (cp << 6) | (b(pos + i) & 0x3F);
  }
  static constexpr std::uint32_t kMin[] = {0, 0, 0x80, 0x800, 0x10000};
  if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0;
  return len;
}

inline bool is_valid_utf8(std::string_view s) {
  for (std::size_t i = 0; i < s.size();) {
    std::size_t n = utf8_sequence_length(s, i);
    if (n == 0) return false;
    i += n;
  }
  return true;
}

inline void append_utf8(std::string& out, std::uint32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

inline std::string to_hex(std::span<const std::uint8_t> bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (auto b : bytes) {
    out += kDigits[b >> 4];
    out += kDigits[b & 0x0F];
  }
  return out;
}

inline std::optional<std::vector<std::uint8_t>> from_hex(std::string_view s) {
  if (s.size() % 2 != 0) return std::nullopt;
  auto nibble = [](char c) -> int {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  };
  std::vector<std::uint8_t> out;
  out.reserve(s.size() / 2);
  for (std::size_t i = 0; i < s.size(); i += 2) {
    int hi = nibble(s[i]), lo = nibble(s[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>(hi << 4 | lo));
  }
  return out;
}

/// Character-level cursor over text input. Exposed so other line formats
/// (scenario files, CLI arguments) reuse the value grammar.
class Reader {
 public:
  explicit Reader(std::string_view input) : in_(input) {}

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= in_.size(); }
  char peek() const { return at_end() ? '\0' : in_[pos_]; }
  char peek_at(std::size_t ahead) const { return pos_ + ahead < in_.size() ? in_[pos_ + ahead] : '\0'; }

  void skip_ws() {
    while (!at_end() && is_space(in_[pos_])) ++pos_;
  }

  // Whitespace plus `#` comments that run to end of line.
  void skip_ws_and_comments() {
    while (!at_end()) {
      if (is_space(in_[pos_])) {
        ++pos_;
      } else if (in_[pos_] == '#') {
        while (!at_end() && in_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool consume(char c) {
    if (peek() != c || at_end()) return false;
    ++pos_;
    return true;
  }

  void expect(char c, std::string_view what) {
    if (!consume(c)) fail(std::string(what));
  }

  bool at_word_start() const {
    char c = peek();
    return !at_end() && (detail::is_alpha(c) || c == '_');
  }

  std::string read_word(std::string_view what = "bare word") {
    if (!at_word_start()) fail(std::string(what));
    std::size_t start = pos_;
    while (!at_end() && (detail::is_alpha(in_[pos_]) || detail::is_digit(in_[pos_]) || in_[pos_] == '_')) ++pos_;
    return std::string(in_.substr(start, pos_ - start));
  }

  // A field path token such as `content.data.temp_c` or `meta.ctx[0]`.
  std::string read_path() {
    std::size_t start = pos_;
    while (!at_end() && (detail::is_alpha(in_[pos_]) || detail::is_digit(in_[pos_]) || in_[pos_] == '_' ||
                         in_[pos_] == '.' || in_[pos_] == '[' || in_[pos_] == ']')) {
      ++pos_;
    }
    if (pos_ == start) fail("field path");
    return std::string(in_.substr(start, pos_ - start));
  }

  // Looks ahead for `word` followed by a non-word character, without consuming.
  bool peek_keyword(std::string_view word) const {
    if (in_.substr(pos_, word.size()) != word) return false;
    char after = pos_ + word.size() < in_.size() ? in_[pos_ + word.size()] : ' ';
    return !(detail::is_alpha(after) || detail::is_digit(after) || after == '_' || after == '!' || after == ':' ||
             after == '.');
  }

  Identifier read_identifier() {
    std::size_t start = pos_;
    std::string ns = read_word("identifier");
    if (!consume('!')) {
      pos_ = start;
      fail("identifier (ns!local)");
    }
    return Identifier{std::move(ns), read_local()};
  }

  std::string read_string() {
    std::size_t start = pos_;
    expect('"', "string literal");
    std::string out;
    while (true) {
      if (at_end()) {
        pos_ = start;
        fail("closing '\"' of string literal");
      }
      char c = in_[pos_];
      if (c == '"') {
        ++pos_;
        return out;
      }
      if (c == '\\') {
        ++pos_;
        char e = peek();
        switch (e) {
          case '"': out += '"'; ++pos_; break;
          case '\\': out += '\\'; ++pos_; break;
          case 'n': out += '\n'; ++pos_; break;
          case 't': out += '\t'; ++pos_; break;
          case 'u': {
            ++pos_;
            expect('{', "'{' after \\u");
            std::size_t hex_start = pos_;
            std::uint32_t cp = 0;
            while (!at_end() && std::isxdigit(static_cast<unsigned char>(in_[pos_]))) {
              if (pos_ - hex_start >= 6) fail("at most 6 hex digits in \\u{...}");
              char h = in_[pos_];
              cp = cp * 16 + static_cast<std::uint32_t>(h <= '9' ? h - '0' : (h | 0x20) - 'a' + 10);
              ++pos_;
            }
            if (pos_ == hex_start) fail("hex digits in \\u{...}");
            if (cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
              pos_ = hex_start;
              fail("unicode scalar value");
            }
            expect('}', "'}' closing \\u{...}");
            append_utf8(out, cp);
            break;
          }
          default: fail("escape sequence (\\\" \\\\ \\n \\t \\u{HEX})");
        }
        continue;
      }
      if (static_cast<unsigned char>(c) < 0x20 || c == 0x7F) fail("printable character (escape control characters)");
      std::size_t n = utf8_sequence_length(in_, pos_);
      if (n == 0) fail("valid UTF-8");
      out.append(in_.substr(pos_, n));
      pos_ += n;
    }
  }

  Value read_number() {
    std::size_t start = pos_;
    bool is_float = false;
    consume('-');
    if (!digits()) fail("digit");
    if (peek() == '.') {
      ++pos_;
      if (!digits()) fail("digit after '.'");
      is_float = true;
    }
    if (peek() == 'e' || peek() == 'E') {
      ++pos_;
      if (peek() == '+' || peek() == '-') ++pos_;
      if (!digits()) fail("exponent digits");
      is_float = true;
    }
    const char* first = in_.data() + start;
    const char* last = in_.data() + pos_;
    if (is_float) {
      double d = 0;
      auto [p, ec] = std::from_chars(first, last, d);
      if (ec != std::errc{} || p != last || !std::isfinite(d)) {
        pos_ = start;
        fail("finite binary64 number");
      }
      return Value(d);
    }
    std::int64_t i = 0;
    auto [p, ec] = std::from_chars(first, last, i);
    if (ec != std::errc{} || p != last) {
      pos_ = start;
      fail("integer within signed 64-bit range");
    }
    return Value(i);
  }

  Timestamp read_timestamp() {
    std::size_t start = pos_;
    if (!(consume('t') && consume('('))) {
      pos_ = start;
      fail("timestamp literal t(...)");
    }
    std::size_t body = pos_;
    while (!at_end() && in_[pos_] != ')') ++pos_;
    auto ts = Timestamp::parse(in_.substr(body, pos_ - body));
    if (!ts) {
      pos_ = body;
      fail("RFC 3339 UTC timestamp (YYYY-MM-DDTHH:MM:SS[.frac]Z)");
    }
    expect(')', "')' closing timestamp");
    return *ts;
  }

  Value read_value(int depth = 0) {
    if (depth > kMaxDepth) fail("shallower nesting");
    char c = peek();
    if (at_end()) fail("value");
    if (c == '"') return Value(read_string());
    if (c == '-' || detail::is_digit(c)) return read_number();
    if (c == '[') {
      ++pos_;
      List items;
      skip_ws();
      if (consume(']')) return Value(std::move(items));
      while (true) {
        skip_ws();
        items.push_back(read_value(depth + 1));
        skip_ws();
        if (consume(']')) return Value(std::move(items));
        expect(',', "',' or ']' in list");
      }
    }
    if (c == '{') return Value(read_map_body(depth));
    if (at_word_start()) {
      std::size_t start = pos_;
      if (c == 't' && peek_at(1) == '(') return Value(read_timestamp());
      std::string word = read_word();
      if (peek() == '!') {
        ++pos_;
        return Value(Identifier{std::move(word), read_local()});
      }
      if (peek() == ':') {
        ++pos_;
        CallExpr call;
        call.ns = std::move(word);
        call.name = read_word("call name");
        skip_ws();
        if (peek() != '{') fail("'{' opening call arguments");
        call.args = read_map_body(depth);
        return Value(std::move(call));
      }
      if (word == "true") return Value(true);
      if (word == "false") return Value(false);
      pos_ = start;
      fail("value");
    }
    fail("value");
  }

  Map read_map_body(int depth) {
    std::size_t open = pos_;
    expect('{', "'{'");
    Map m;
    skip_ws();
    if (consume('}')) return m;
    while (true) {
      skip_ws();
      std::size_t key_pos = pos_;
      std::string key = read_word("map key");
      skip_ws();
      expect(':', "':' after map key");
      skip_ws();
      Value v = read_value(depth + 1);
      if (!m.emplace(key, std::move(v)).second) {
        pos_ = key_pos;
        fail("unique map key (duplicate '" + key + "')");
      }
      skip_ws();
      if (consume('}')) return m;
      if (at_end()) {
        pos_ = open;
        fail("'}' closing map");
      }
      expect(',', "',' or '}' in map");
    }
  }

  MessageType read_type() {
    std::size_t start = pos_;
    while (!at_end() && ((in_[pos_] >= 'A' && in_[pos_] <= 'Z') || in_[pos_] == '.')) ++pos_;
    auto t = parse_type_name(in_.substr(start, pos_ - start));
    if (!t) {
      pos_ = start;
      fail("message type");
    }
    return *t;
  }

  Message read_message() {
    Message m;
    expect('[', "'[' opening message");
    skip_ws();
    m.type = read_type();
    skip_ws();
    expect(':', "':' after message type");
    skip_ws();
    m.content = read_value();
    skip_ws();
    expect('|', "'|' before metadata");
    bool have_id = false;
    bool have_ts = false;
    std::vector<std::string> seen;
    while (true) {
      skip_ws();
      std::size_t key_pos = pos_;
      std::string key = at_word_start() ? read_word() : std::string();
      if (key.empty() || !is_metadata_field(key)) {
        pos_ = key_pos;
        fail("metadata key");
      }
      for (const auto& s : seen) {
        if (s == key) {
          pos_ = key_pos;
          fail("unique metadata key (duplicate '" + key + "')");
        }
      }
      seen.push_back(key);
      skip_ws();
      expect(':', "':' after metadata key");
      skip_ws();
      read_meta_field(key, m.meta);
      have_id |= key == "id";
      have_ts |= key == "ts";
      skip_ws();
      if (peek() == ']') break;
      expect(',', "',' or ']' after metadata field");
    }
    if (!have_id) fail("metadata field id");
    if (!have_ts) fail("metadata field ts");
    ++pos_;
    return m;
  }

  [[noreturn]] void fail(std::string expected) const {
    auto [line, col] = location(pos_);
    throw ParseError(line, col, std::move(expected), describe_found());
  }

  std::pair<std::size_t, std::size_t> location(std::size_t pos) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos && i < in_.size(); ++i) {
      unsigned char c = static_cast<unsigned char>(in_[i]);
      if (c == '\n') {
        ++line;
        col = 1;
      } else if ((c & 0xC0) != 0x80) {
        ++col;
      }
    }
    return {line, col};
  }

 private:
  static bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }

  bool digits() {
    std::size_t start = pos_;
    while (!at_end() && detail::is_digit(in_[pos_])) ++pos_;
    return pos_ > start;
  }

  std::string read_local() {
    std::size_t start = pos_;
    while (!at_end() && (detail::is_alpha(in_[pos_]) || detail::is_digit(in_[pos_]) || in_[pos_] == '_' ||
                         in_[pos_] == '-')) {
      ++pos_;
    }
    if (pos_ == start) fail("identifier local part [A-Za-z0-9_-]+");
    return std::string(in_.substr(start, pos_ - start));
  }

  std::string describe_found() const {
    if (at_end()) return "end of input";
    std::size_t n = utf8_sequence_length(in_, pos_);
    if (n == 0) return "invalid UTF-8 byte";
    std::string tok(in_.substr(pos_, n));
    if (tok == "\n") return "'\\n'";
    return "'" + tok + "'";
  }

  void read_meta_field(const std::string& key, Metadata& meta) {
    std::size_t start = pos_;
    auto bad = [&](std::string what) {
      pos_ = start;
      fail(std::move(what) + " for " + key);
    };
    auto ident = [&]() -> Identifier {
      if (!at_word_start()) bad("identifier");
      return read_identifier();
    };
    auto number = [&]() -> double {
      if (!(peek() == '-' || detail::is_digit(peek()))) bad("number");
      return *read_number().as_number();
    };
    auto integer = [&]() -> std::int64_t {
      if (!(peek() == '-' || detail::is_digit(peek()))) bad("integer");
      Value v = read_number();
      if (!v.is_int()) bad("integer");
      return v.as_int();
    };
    auto text = [&]() -> std::string {
      if (peek() != '"') bad("string");
      return read_string();
    };

    if (key == "id") {
      meta.id = ident();
    } else if (key == "ts") {
      if (!(peek() == 't' && peek_at(1) == '(')) bad("t(...) timestamp");
      meta.ts = read_timestamp();
    } else if (key == "ver") {
      meta.ver = text();
    } else if (key == "cid") {
      meta.cid = ident();
    } else if (key == "ctx") {
      if (peek() != '[') bad("list of identifiers");
      Value v = read_value();
      std::vector<Identifier> ids;
      for (const auto& item : v.as_list()) {
        if (!item.is_ident()) bad("list of identifiers");
        ids.push_back(item.as_ident());
      }
      meta.ctx = std::move(ids);
    } else if (key == "model_version") {
      meta.model_version = text();
    } else if (key == "conf") {
      meta.conf = number();
    } else if (key == "priors") {
      if (peek() != '{') bad("map of probabilities");
      std::map<std::string, double> priors;
      for (const auto& [k, v] : read_map_body(0)) {
        if (!v.is_number()) bad("map of probabilities");
        priors.emplace(k, *v.as_number());
      }
      meta.priors = std::move(priors);
    } else if (key == "space") {
      meta.space = text();
    } else if (key == "of") {
      meta.of = ident();
    } else if (key == "reasoning_trace") {
      meta.reasoning_trace = ident();
    } else if (key == "cost") {
      if (peek() != '{') bad("map of integer counters");
      std::map<std::string, std::int64_t> cost;
      for (const auto& [k, v] : read_map_body(0)) {
        if (!v.is_int()) bad("map of integer counters");
        cost.emplace(k, v.as_int());
      }
      meta.cost = std::move(cost);
    } else if (key == "latency") {
      meta.latency = integer();
    } else if (key == "sig") {
      auto bytes = from_hex(text());
      if (!bytes) bad("hex string");
      meta.sig = std::move(*bytes);
    } else if (key == "cap") {
      if (peek() != '[') bad("list of strings");
      Value v = read_value();
      std::vector<std::string> tags;
      for (const auto& item : v.as_list()) {
        if (!item.is_text()) bad("list of strings");
        tags.push_back(item.as_text());
      }
      meta.cap = std::move(tags);
    }
  }

  std::string_view in_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Printing

inline std::string format_float(double d) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, d);
  std::string s(buf, end);
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

inline void print_string(std::string& out, std::string_view s) {
  static constexpr char kDigits[] = "0123456789abcdef";
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7F) {
          out += "\\u{";
          auto u = static_cast<unsigned char>(c);
          if (u >= 16) out += kDigits[u >> 4];
          out += kDigits[u & 0x0F];
          out += '}';
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

inline void print_value(std::string& out, const Value& v);

inline void print_map(std::string& out, const Map& m) {
  out += '{';
  bool first = true;
  for (const auto& [k, v] : m) {
    if (!is_bare_word(k)) throw std::invalid_argument("map key '" + k + "' is not a bare word");
    if (!first) out += ", ";
    first = false;
    out += k;
    out += ':';
    print_value(out, v);
  }
  out += '}';
}

inline void print_value(std::string& out, const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Text: print_string(out, v.as_text()); break;
    case Value::Kind::Int: out += std::to_string(v.as_int()); break;
    case Value::Kind::Float: out += format_float(v.as_float()); break;
    case Value::Kind::Bool: out += v.as_bool() ? "true" : "false"; break;
    case Value::Kind::Ident: out += v.as_ident().str(); break;
    case Value::Kind::Time:
      out += "t(";
      out += v.as_time().str();
      out += ')';
      break;
    case Value::Kind::List: {
      out += '[';
      bool first = true;
      for (const auto& item : v.as_list()) {
        if (!first) out += ", ";
        first = false;
        print_value(out, item);
      }
      out += ']';
      break;
    }
    case Value::Kind::Map: print_map(out, v.as_map()); break;
    case Value::Kind::Call: {
      const auto& c = v.as_call();
      out += c.ns;
      out += ':';
      out += c.name;
      print_map(out, c.args);
      break;
    }
  }
}

inline std::string print_value(const Value& v) {
  std::string out;
  print_value(out, v);
  return out;
}

/// Metadata as (key, printed value) pairs in canonical field order.
inline std::vector<std::pair<std::string_view, std::string>> metadata_pairs(const Metadata& m) {
  std::vector<std::pair<std::string_view, std::string>> out;
  auto put = [&](std::string_view k, std::string v) { out.emplace_back(k, std::move(v)); };
  auto quoted = [](std::string_view s) {
    std::string o;
    print_string(o, s);
    return o;
  };
  put("id", m.id.str());
  put("ts", "t(" + m.ts.str() + ")");
  if (m.ver) put("ver", quoted(*m.ver));
  if (m.cid) put("cid", m.cid->str());
  if (m.ctx) {
    List l(m.ctx->begin(), m.ctx->end());
    put("ctx", print_value(Value(std::move(l))));
  }
  if (m.model_version) put("model_version", quoted(*m.model_version));
  if (m.conf) put("conf", format_float(*m.conf));
  if (m.priors) {
    Map mp;
    for (const auto& [k, p] : *m.priors) mp.emplace(k, Value(p));
    put("priors", print_value(Value(std::move(mp))));
  }
  if (m.space) put("space", quoted(*m.space));
  if (m.of) put("of", m.of->str());
  if (m.reasoning_trace) put("reasoning_trace", m.reasoning_trace->str());
  if (m.cost) {
    Map mp;
    for (const auto& [k, n] : *m.cost) mp.emplace(k, Value(n));
    put("cost", print_value(Value(std::move(mp))));
  }
  if (m.latency) put("latency", std::to_string(*m.latency));
  if (m.sig) put("sig", quoted(to_hex(*m.sig)));
  if (m.cap) {
    List l;
    for (const auto& t : *m.cap) l.emplace_back(t);
    put("cap", print_value(Value(std::move(l))));
  }
  return out;
}

}  // namespace text

/// Parses exactly one message; surrounding whitespace is allowed.
inline Message parse_message(std::string_view input) {
  text::Reader r(input);
  r.skip_ws();
  Message m = r.read_message();
  r.skip_ws();
  if (!r.at_end()) r.fail("end of input after message");
  return m;
}

/// Parses a `.aicl` stream: messages separated by whitespace and `#` comments.
inline std::vector<Message> parse_stream(std::string_view input) {
  text::Reader r(input);
  std::vector<Message> out;
  r.skip_ws_and_comments();
  while (!r.at_end()) {
    out.push_back(r.read_message());
    r.skip_ws_and_comments();
  }
  return out;
}

inline Value parse_value(std::string_view input) {
  text::Reader r(input);
  r.skip_ws();
  Value v = r.read_value();
  r.skip_ws();
  if (!r.at_end()) r.fail("end of input after value");
  return v;
}

inline std::string print_message(const Message& m, PrintStyle style = PrintStyle::Compact) {
  std::string out = "[";
  out += type_name(m.type);
  out += ": ";
  text::print_value(out, m.content);
  auto pairs = text::metadata_pairs(m.meta);
  if (style == PrintStyle::Compact) {
    out += " | ";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i) out += ", ";
      out += pairs[i].first;
      out += ':';
      out += pairs[i].second;
    }
  } else {
    out += "\n  | ";
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i) out += ",\n    ";
      out += pairs[i].first;
      out += ':';
      out += pairs[i].second;
    }
  }
  out += ']';
  return out;
}

/// One message per line (Compact) or blank-line separated blocks (Pretty).
inline std::string print_stream(std::span<const Message> msgs, PrintStyle style = PrintStyle::Compact) {
  std::string out;
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    if (i && style == PrintStyle::Pretty) out += '\n';
    out += print_message(msgs[i], style);
    out += '\n';
  }
  return out;
}

}  // namespace aicl
