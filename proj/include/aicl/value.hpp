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

// The recursive value model shared by the text and binary forms.
//
// Every literal that can appear in a message (strings, numbers, booleans,
// `ns!local` identifiers, `t(...)` timestamps, lists, maps and
// `ns:name{...}` call expressions) is a Value. Values are immutable once
// built; copying is the only way to share them.

#include <bit>
#include <chrono>
#include <cmath>
#include <compare>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace aicl {

namespace detail {

inline bool is_alpha(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z'); }
inline bool is_digit(char c) { return c >= '0' && c <= '9'; }

}  // namespace detail

// `[A-Za-z_][A-Za-z0-9_]*` -- map keys, namespaces, call names.
inline bool is_bare_word(std::string_view s) {
  if (s.empty()) return false;
  if (!detail::is_alpha(s[0]) && s[0] != '_') return false;
  for (char c : s) {
    if (!detail::is_alpha(c) && !detail::is_digit(c) && c != '_') return false;
  }
  return true;
}

// `[A-Za-z0-9_-]+` -- the local part of an identifier.
inline bool is_local_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    if (!detail::is_alpha(c) && !detail::is_digit(c) && c != '_' && c != '-') return false;
  }
  return true;
}

/// `<namespace>!<local>`, e.g. `u!q1`. The namespace is an opaque tag.
struct Identifier {
  std::string ns;
  std::string local;

  static Identifier make(std::string ns, std::string local) {
    if (!is_bare_word(ns)) throw std::invalid_argument("invalid identifier namespace: '" + ns + "'");
    if (!is_local_token(local)) throw std::invalid_argument("invalid identifier local part: '" + local + "'");
    return Identifier{std::move(ns), std::move(local)};
  }

  static std::optional<Identifier> parse(std::string_view text) {
    auto bang = text.find('!');
    if (bang == std::string_view::npos) return std::nullopt;
    auto ns = text.substr(0, bang);
    auto local = text.substr(bang + 1);
    if (!is_bare_word(ns) || !is_local_token(local)) return std::nullopt;
    return Identifier{std::string(ns), std::string(local)};
  }

  bool valid() const { return is_bare_word(ns) && is_local_token(local); }
  std::string str() const { return ns + "!" + local; }

  auto operator<=>(const Identifier&) const = default;
  bool operator==(const Identifier&) const = default;
};

/// A UTC instant with nanosecond resolution, printed as RFC 3339 with a `Z`
/// suffix and the shortest fractional part that preserves the value.
class Timestamp {
 public:
  Timestamp() = default;

  static constexpr std::int64_t kMinSeconds = -62167219200;  // 0000-01-01T00:00:00Z
  static constexpr std::int64_t kMaxSeconds = 253402300799;  // 9999-12-31T23:59:59Z

  static Timestamp from_unix(std::int64_t seconds, std::uint32_t nanos = 0) {
    if (seconds < kMinSeconds || seconds > kMaxSeconds || nanos >= 1'000'000'000u) {
      throw std::out_of_range("timestamp outside 0000-01-01..9999-12-31");
    }
    Timestamp t;
    t.seconds_ = seconds;
    t.nanos_ = nanos;
    return t;
  }

  // Accepts `YYYY-MM-DDTHH:MM:SS[.f{1,9}]Z` only.
  static std::optional<Timestamp> parse(std::string_view s) {
    auto num = [&](std::size_t pos, std::size_t len) -> std::optional<int> {
      if (pos + len > s.size()) return std::nullopt;
      int v = 0;
      for (std::size_t i = pos; i < pos + len; ++i) {
        if (!detail::is_digit(s[i])) return std::nullopt;
        v = v * 10 + (s[i] - '0');
      }
      return v;
    };
    if (s.size() < 20) return std::nullopt;
    if (s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':') return std::nullopt;
    auto y = num(0, 4), mo = num(5, 2), d = num(8, 2), h = num(11, 2), mi = num(14, 2), se = num(17, 2);
    if (!y || !mo || !d || !h || !mi || !se) return std::nullopt;
    if (*h > 23 || *mi > 59 || *se > 59) return std::nullopt;
    std::chrono::year_month_day ymd{std::chrono::year{*y}, std::chrono::month{static_cast<unsigned>(*mo)},
                                    std::chrono::day{static_cast<unsigned>(*d)}};
    if (!ymd.ok()) return std::nullopt;

    std::size_t pos = 19;
    std::uint32_t nanos = 0;
    if (s[pos] == '.') {
      ++pos;
      std::size_t digits = 0;
      while (pos < s.size() && detail::is_digit(s[pos])) {
        if (++digits > 9) return std::nullopt;
        nanos = nanos * 10 + static_cast<std::uint32_t>(s[pos] - '0');
        ++pos;
      }
      if (digits == 0) return std::nullopt;
      for (std::size_t i = digits; i < 9; ++i) nanos *= 10;
    }
    if (pos + 1 != s.size() || s[pos] != 'Z') return std::nullopt;

    auto days = std::chrono::sys_days{ymd}.time_since_epoch().count();
    std::int64_t secs = static_cast<std::int64_t>(days) * 86400 + *h * 3600 + *mi * 60 + *se;
    return from_unix(secs, nanos);
  }

  std::string str() const {
    std::int64_t days = seconds_ / 86400;
    std::int64_t rem = seconds_ % 86400;
    if (rem < 0) {
      rem += 86400;
      --days;
    }
    std::chrono::year_month_day ymd{std::chrono::sys_days{std::chrono::days{days}}};
    char buf[40];
    int n = std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                          static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                          static_cast<int>(rem / 3600), static_cast<int>(rem / 60 % 60), static_cast<int>(rem % 60));
    std::string out(buf, static_cast<std::size_t>(n));
    if (nanos_ != 0) {
      std::snprintf(buf, sizeof buf, "%09u", nanos_);
      std::string frac(buf);
      while (frac.back() == '0') frac.pop_back();
      out += '.';
      out += frac;
    }
    out += 'Z';
    return out;
  }

  std::int64_t unix_seconds() const { return seconds_; }
  std::uint32_t nanos() const { return nanos_; }

  Timestamp plus_millis(std::int64_t ms) const {
    std::int64_t total_ns = static_cast<std::int64_t>(nanos_) + (ms % 1000) * 1'000'000;
    std::int64_t secs = seconds_ + ms / 1000;
    if (total_ns < 0) {
      total_ns += 1'000'000'000;
      --secs;
    } else if (total_ns >= 1'000'000'000) {
      total_ns -= 1'000'000'000;
      ++secs;
    }
    return from_unix(secs, static_cast<std::uint32_t>(total_ns));
  }

  Timestamp plus_seconds(std::int64_t s) const { return from_unix(seconds_ + s, nanos_); }

  auto operator<=>(const Timestamp&) const = default;
  bool operator==(const Timestamp&) const = default;

 private:
  std::int64_t seconds_ = 0;
  std::uint32_t nanos_ = 0;
};

class Value;

using List = std::vector<Value>;
// Keys are bare words; std::string ordering is byte-lexicographic.
using Map = std::map<std::string, Value, std::less<>>;

/// `<namespace>:<name>{<args>}`, e.g. `tool:weather_now{location:"Shanghai"}`.
struct CallExpr {
  std::string ns;
  std::string name;
  Map args;

  bool operator==(const CallExpr& other) const;
};

class Value {
 public:
  enum class Kind { Text, Int, Float, Bool, Ident, Time, List, Map, Call };

  Value() : v_(Map{}) {}
  Value(std::string s) : v_(std::move(s)) {}
  Value(std::string_view s) : v_(std::string(s)) {}
  Value(const char* s) : v_(std::string(s)) {}
  Value(std::int64_t i) : v_(i) {}
  Value(int i) : v_(static_cast<std::int64_t>(i)) {}
  Value(double d) : v_(checked_float(d)) {}
  Value(bool b) : v_(b) {}
  Value(Identifier id) : v_(std::move(id)) {}
  Value(Timestamp t) : v_(t) {}
  Value(List l) : v_(std::move(l)) {}
  Value(Map m) : v_(std::move(m)) {}
  Value(CallExpr c) : v_(std::move(c)) {}

  Kind kind() const { return static_cast<Kind>(v_.index()); }

  bool is_text() const { return kind() == Kind::Text; }
  bool is_int() const { return kind() == Kind::Int; }
  bool is_float() const { return kind() == Kind::Float; }
  bool is_number() const { return is_int() || is_float(); }
  bool is_bool() const { return kind() == Kind::Bool; }
  bool is_ident() const { return kind() == Kind::Ident; }
  bool is_time() const { return kind() == Kind::Time; }
  bool is_list() const { return kind() == Kind::List; }
  bool is_map() const { return kind() == Kind::Map; }
  bool is_call() const { return kind() == Kind::Call; }

  const std::string& as_text() const { return std::get<std::string>(v_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(v_); }
  double as_float() const { return std::get<double>(v_); }
  bool as_bool() const { return std::get<bool>(v_); }
  const Identifier& as_ident() const { return std::get<Identifier>(v_); }
  const Timestamp& as_time() const { return std::get<Timestamp>(v_); }
  const List& as_list() const { return std::get<List>(v_); }
  const Map& as_map() const { return std::get<Map>(v_); }
  const CallExpr& as_call() const { return std::get<CallExpr>(v_); }

  // Ints widen to double; anything else is nullopt.
  std::optional<double> as_number() const {
    if (is_int()) return static_cast<double>(as_int());
    if (is_float()) return as_float();
    return std::nullopt;
  }

  // Map lookup; nullptr when this is not a map or the key is absent.
  const Value* find(std::string_view key) const {
    if (!is_map()) return nullptr;
    const auto& m = as_map();
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
  }

  // Floats compare by bit pattern so that equality agrees with canonical
  // encoding (-0.0 and 0.0 are different values).
  friend bool operator==(const Value& a, const Value& b) {
    if (a.v_.index() != b.v_.index()) return false;
    if (a.is_float()) return std::bit_cast<std::uint64_t>(a.as_float()) == std::bit_cast<std::uint64_t>(b.as_float());
    return a.v_ == b.v_;
  }

  static double checked_float(double d) {
    if (!std::isfinite(d)) throw std::invalid_argument("NaN and infinite floats are not representable");
    return d;
  }

 private:
  std::variant<std::string, std::int64_t, double, bool, Identifier, Timestamp, List, Map, CallExpr> v_;
};

inline bool CallExpr::operator==(const CallExpr& other) const {
  return ns == other.ns && name == other.name && args == other.args;
}

inline bool same_float(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

}  // namespace aicl
