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

// Deterministic CBOR (RFC 8949 section 4.2.1): shortest-form arguments,
// definite lengths only, map keys sorted by the bytewise order of their
// encodings, floats in the shortest width that preserves the value.
//
// The reader enforces the same profile and rejects anything else, so every
// accepted byte string is the unique encoding of its item tree.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aicl/text.hpp"

namespace aicl {

using Bytes = std::vector<std::uint8_t>;

class DecodeError : public std::runtime_error {
 public:
  DecodeError(std::size_t offset, std::string rule, const std::string& detail)
      : std::runtime_error(rule + " at byte " + std::to_string(offset) + ": " + detail),
        offset_(offset),
        rule_(std::move(rule)) {}

  std::size_t offset() const { return offset_; }
  const std::string& rule() const { return rule_; }

 private:
  std::size_t offset_;
  std::string rule_;
};

namespace cbor {

enum class Kind { Unsigned, Negative, Bytes, Text, Array, Map, Tag, Bool, Float, Null };

/// One CBOR data item. Negative holds the encoded argument n (value -1-n);
/// Tag holds its number in `number` and its content in items[0].
struct Item {
  Kind kind = Kind::Null;
  std::uint64_t number = 0;
  bool boolean = false;
  double real = 0;
  std::string str;
  std::vector<Item> items;
  std::vector<std::pair<Item, Item>> entries;
  std::size_t offset = 0;

  static Item uint(std::uint64_t v) { return of(Kind::Unsigned, v); }
  static Item integer(std::int64_t v) {
    if (v >= 0) return uint(static_cast<std::uint64_t>(v));
    return of(Kind::Negative, static_cast<std::uint64_t>(-(v + 1)));
  }
  static Item text(std::string s) {
    Item t = of(Kind::Text);
    t.str = std::move(s);
    return t;
  }
  static Item bytes(std::span<const std::uint8_t> b) {
    Item t = of(Kind::Bytes);
    t.str.assign(b.begin(), b.end());
    return t;
  }
  static Item array(std::vector<Item> xs) {
    Item t = of(Kind::Array);
    t.items = std::move(xs);
    return t;
  }
  static Item map(std::vector<std::pair<Item, Item>> es) {
    Item t = of(Kind::Map);
    t.entries = std::move(es);
    return t;
  }
  static Item tag(std::uint64_t n, Item child) {
    Item t = of(Kind::Tag, n);
    t.items.push_back(std::move(child));
    return t;
  }
  static Item boolean_of(bool b) {
    Item t = of(Kind::Bool);
    t.boolean = b;
    return t;
  }
  static Item floating(double d) {
    Item t = of(Kind::Float);
    t.real = d;
    return t;
  }
  static Item null() { return Item{}; }

  static Item of(Kind k, std::uint64_t n = 0) {
    Item t;
    t.kind = k;
    t.number = n;
    return t;
  }

  // Map lookup by text key.
  const Item* find(std::string_view key) const {
    for (const auto& [k, v] : entries) {
      if (k.kind == Kind::Text && k.str == key) return &v;
    }
    return nullptr;
  }
  Item* find(std::string_view key) {
    for (auto& [k, v] : entries) {
      if (k.kind == Kind::Text && k.str == key) return &v;
    }
    return nullptr;
  }
};

// Half-precision bits that represent `v` exactly, if any.
inline std::optional<std::uint16_t> exact_half(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  std::uint16_t sign = std::signbit(v) ? 0x8000 : 0x0000;
  if (v == 0) return sign;
  double a = std::fabs(v);
  int exp = 0;
  double m = std::frexp(a, &exp);  // a = m * 2^exp, m in [0.5, 1)
  int e = exp - 1;
  if (e >= -14 && e <= 15) {
    double frac = (2 * m - 1) * 1024;
    if (frac != std::floor(frac)) return std::nullopt;
    return static_cast<std::uint16_t>(sign | ((e + 15) << 10) | static_cast<int>(frac));
  }
  if (e < -14 && e >= -24) {
    double mant = std::ldexp(a, 24);
    if (mant != std::floor(mant)) return std::nullopt;
    return static_cast<std::uint16_t>(sign | static_cast<int>(mant));
  }
  return std::nullopt;
}

inline double half_to_double(std::uint16_t h) {
  int exp = (h >> 10) & 0x1F;
  int mant = h & 0x3FF;
  double v;
  if (exp == 0) {
    v = std::ldexp(mant, -24);
  } else if (exp != 31) {
    v = std::ldexp(mant + 1024, exp - 25);
  } else {
    v = mant == 0 ? INFINITY : NAN;
  }
  return (h & 0x8000) ? -v : v;
}

inline void write_head(Bytes& out, std::uint8_t major, std::uint64_t arg) {
  std::uint8_t mt = static_cast<std::uint8_t>(major << 5);
  if (arg < 24) {
    out.push_back(static_cast<std::uint8_t>(mt | arg));
    return;
  }
  int width;
  if (arg <= 0xFF) {
    out.push_back(mt | 24);
    width = 1;
  } else if (arg <= 0xFFFF) {
    out.push_back(mt | 25);
    width = 2;
  } else if (arg <= 0xFFFFFFFFull) {
    out.push_back(mt | 26);
    width = 4;
  } else {
    out.push_back(mt | 27);
    width = 8;
  }
  for (int i = width - 1; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(arg >> (8 * i)));
}

inline void write(Bytes& out, const Item& item) {
  switch (item.kind) {
    case Kind::Unsigned: write_head(out, 0, item.number); break;
    case Kind::Negative: write_head(out, 1, item.number); break;
    case Kind::Bytes:
      write_head(out, 2, item.str.size());
      out.insert(out.end(), item.str.begin(), item.str.end());
      break;
    case Kind::Text:
      write_head(out, 3, item.str.size());
      out.insert(out.end(), item.str.begin(), item.str.end());
      break;
    case Kind::Array:
      write_head(out, 4, item.items.size());
      for (const auto& x : item.items) write(out, x);
      break;
    case Kind::Map: {
      std::vector<std::pair<Bytes, const Item*>> encoded;
      encoded.reserve(item.entries.size());
      for (const auto& [k, v] : item.entries) {
        Bytes kb;
        write(kb, k);
        encoded.emplace_back(std::move(kb), &v);
      }
      std::sort(encoded.begin(), encoded.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      for (std::size_t i = 1; i < encoded.size(); ++i) {
        if (encoded[i - 1].first == encoded[i].first) throw std::logic_error("duplicate CBOR map key");
      }
      write_head(out, 5, encoded.size());
      for (const auto& [kb, v] : encoded) {
        out.insert(out.end(), kb.begin(), kb.end());
        write(out, *v);
      }
      break;
    }
    case Kind::Tag:
      write_head(out, 6, item.number);
      write(out, item.items.at(0));
      break;
    case Kind::Bool: out.push_back(item.boolean ? 0xF5 : 0xF4); break;
    case Kind::Null: out.push_back(0xF6); break;
    case Kind::Float: {
      double d = item.real;
      if (!std::isfinite(d)) throw std::logic_error("NaN/infinity has no canonical encoding here");
      if (auto h = exact_half(d)) {
        out.push_back(0xF9);
        out.push_back(static_cast<std::uint8_t>(*h >> 8));
        out.push_back(static_cast<std::uint8_t>(*h));
      } else if (static_cast<double>(static_cast<float>(d)) == d) {
        auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(d));
        out.push_back(0xFA);
        for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
      } else {
        auto bits = std::bit_cast<std::uint64_t>(d);
        out.push_back(0xFB);
        for (int i = 7; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
      }
      break;
    }
  }
}

inline Bytes encode(const Item& item) {
  Bytes out;
  write(out, item);
  return out;
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  static constexpr int kMaxDepth = 256;

  Item read(int depth = 0) {
    if (depth > kMaxDepth) fail(pos_, "CANON.DEPTH", "nesting deeper than " + std::to_string(kMaxDepth));
    std::size_t start = pos_;
    std::uint8_t initial = byte();
    std::uint8_t major = initial >> 5;
    std::uint8_t info = initial & 0x1F;

    if (major == 7) return read_simple(start, info);
    if (info == 31) {
      if (major >= 2 && major <= 5) fail(start, "CANON.INDEFINITE", "indefinite-length item");
      fail(start, "CANON.MALFORMED", "additional information 31 on major type " + std::to_string(major));
    }
    std::uint64_t arg = argument(start, info);

    Item item;
    item.offset = start;
    switch (major) {
      case 0: item.kind = Kind::Unsigned; item.number = arg; break;
      case 1: item.kind = Kind::Negative; item.number = arg; break;
      case 2:
      case 3: {
        if (arg > remaining()) fail(start, "CANON.TRUNCATED", "string length exceeds input");
        item.kind = major == 2 ? Kind::Bytes : Kind::Text;
        item.str.assign(reinterpret_cast<const char*>(in_.data() + pos_), static_cast<std::size_t>(arg));
        pos_ += static_cast<std::size_t>(arg);
        if (major == 3 && !text::is_valid_utf8(item.str)) fail(start, "CANON.UTF8", "text string is not UTF-8");
        break;
      }
      case 4: {
        if (arg > remaining()) fail(start, "CANON.TRUNCATED", "array length exceeds input");
        item.kind = Kind::Array;
        item.items.reserve(static_cast<std::size_t>(arg));
        for (std::uint64_t i = 0; i < arg; ++i) item.items.push_back(read(depth + 1));
        break;
      }
      case 5: {
        if (arg > remaining() / 2) fail(start, "CANON.TRUNCATED", "map size exceeds input");
        item.kind = Kind::Map;
        std::span<const std::uint8_t> prev_key;
        for (std::uint64_t i = 0; i < arg; ++i) {
          std::size_t key_start = pos_;
          Item k = read(depth + 1);
          std::span<const std::uint8_t> key_bytes = in_.subspan(key_start, pos_ - key_start);
          if (i > 0) {
            int cmp = compare(prev_key, key_bytes);
            if (cmp == 0) fail(key_start, "CANON.DUPKEY", "duplicate map key");
            if (cmp > 0) fail(key_start, "CANON.KEYORDER", "map keys not in bytewise order");
          }
          prev_key = key_bytes;
          Item v = read(depth + 1);
          item.entries.emplace_back(std::move(k), std::move(v));
        }
        break;
      }
      case 6: {
        item.kind = Kind::Tag;
        item.number = arg;
        item.items.push_back(read(depth + 1));
        break;
      }
    }
    return item;
  }

  std::size_t pos() const { return pos_; }
  bool at_end() const { return pos_ >= in_.size(); }

  [[noreturn]] static void fail(std::size_t offset, std::string rule, const std::string& detail) {
    throw DecodeError(offset, std::move(rule), detail);
  }

 private:
  std::size_t remaining() const { return in_.size() - pos_; }

  std::uint8_t byte() {
    if (pos_ >= in_.size()) fail(pos_, "CANON.TRUNCATED", "unexpected end of input");
    return in_[pos_++];
  }

  std::uint64_t be(int width) {
    std::uint64_t v = 0;
    for (int i = 0; i < width; ++i) v = (v << 8) | byte();
    return v;
  }

  std::uint64_t argument(std::size_t start, std::uint8_t info) {
    if (info < 24) return info;
    if (info > 27) fail(start, "CANON.MALFORMED", "reserved additional information " + std::to_string(info));
    int width = 1 << (info - 24);
    std::uint64_t v = be(width);
    static constexpr std::uint64_t kMin[] = {24, 0x100, 0x10000, 0x100000000ull};
    if (v < kMin[info - 24]) fail(start, "CANON.INTWIDTH", "argument not in shortest form");
    return v;
  }

  Item read_simple(std::size_t start, std::uint8_t info) {
    Item item;
    item.offset = start;
    switch (info) {
      case 20:
      case 21:
        item.kind = Kind::Bool;
        item.boolean = info == 21;
        return item;
      case 22: item.kind = Kind::Null; return item;
      case 25: {
        double d = half_to_double(static_cast<std::uint16_t>(be(2)));
        check_float(start, d);
        item.kind = Kind::Float;
        item.real = d;
        return item;
      }
      case 26: {
        double d = std::bit_cast<float>(static_cast<std::uint32_t>(be(4)));
        check_float(start, d);
        if (exact_half(d)) fail(start, "CANON.FLOATWIDTH", "single-precision float fits in half precision");
        item.kind = Kind::Float;
        item.real = d;
        return item;
      }
      case 27: {
        double d = std::bit_cast<double>(be(8));
        check_float(start, d);
        if (static_cast<double>(static_cast<float>(d)) == d) {
          fail(start, "CANON.FLOATWIDTH", "double-precision float fits in a shorter width");
        }
        item.kind = Kind::Float;
        item.real = d;
        return item;
      }
      case 31: fail(start, "CANON.INDEFINITE", "break code outside indefinite-length item");
      case 28:
      case 29:
      case 30: fail(start, "CANON.MALFORMED", "reserved additional information");
      default: fail(start, "CANON.TYPE", "simple value " + std::to_string(info) + " is not part of the data model");
    }
  }

  static void check_float(std::size_t start, double d) {
    if (!std::isfinite(d)) fail(start, "CANON.FLOAT", "NaN and infinities are not allowed");
  }

  static int compare(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    std::size_t n = std::min(a.size(), b.size());
    if (n > 0) {
      if (int c = std::memcmp(a.data(), b.data(), n); c != 0) return c;
    }
    if (a.size() == b.size()) return 0;
    return a.size() < b.size() ? -1 : 1;
  }

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

/// Decodes exactly one canonical item spanning all of `in`.
inline Item decode(std::span<const std::uint8_t> in) {
  Reader r(in);
  Item item = r.read();
  if (!r.at_end()) Reader::fail(r.pos(), "CANON.TRAILING", "bytes after the top-level item");
  return item;
}

}  // namespace cbor
}  // namespace aicl
