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

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "aicl/binary.hpp"
#include "aicl/path.hpp"
#include "aicl/text.hpp"
#include "aicl/trace.hpp"

namespace aicl {

/// One differing field. An absent side means the field exists only on the
/// other side.
struct DiffEntry {
  std::string path;
  std::optional<Value> left;
  std::optional<Value> right;

  friend bool operator==(const DiffEntry&, const DiffEntry&) = default;
};

// Slack absorbs binary rounding in |a - b| for values such as 0.93 - 0.88.
inline constexpr double kConfToleranceSlack = 1e-12;

namespace diffing {

class Walker {
 public:
  Walker(const FieldMask& mask, std::vector<DiffEntry>& out) : mask_(mask), out_(out) {}

  void value(const std::string& path, const std::optional<Value>& a, const std::optional<Value>& b) {
    if (mask_.masks(path)) return;
    if (!a || !b) {
      if (a.has_value() != b.has_value()) out_.push_back(DiffEntry{path, a, b});
      return;
    }
    if (a->is_map() && b->is_map()) return map(path, a->as_map(), b->as_map());
    if (a->is_list() && b->is_list()) return list(path, a->as_list(), b->as_list());
    if (a->is_call() && b->is_call() && a->as_call().ns == b->as_call().ns && a->as_call().name == b->as_call().name) {
      return map(path, a->as_call().args, b->as_call().args);
    }
    if (within_tolerance(path, *a, *b)) return;
    if (!(*a == *b)) out_.push_back(DiffEntry{path, a, b});
  }

  void map(const std::string& path, const Map& a, const Map& b) {
    auto i = a.begin();
    auto j = b.begin();
    while (i != a.end() || j != b.end()) {
      if (j == b.end() || (i != a.end() && i->first < j->first)) {
        value(child_path(path, i->first), i->second, std::nullopt);
        ++i;
      } else if (i == a.end() || j->first < i->first) {
        value(child_path(path, j->first), std::nullopt, j->second);
        ++j;
      } else {
        value(child_path(path, i->first), i->second, j->second);
        ++i;
        ++j;
      }
    }
  }

  void list(const std::string& path, const List& a, const List& b) {
    std::size_t n = std::max(a.size(), b.size());
    for (std::size_t k = 0; k < n; ++k) {
      std::optional<Value> x = k < a.size() ? std::optional<Value>(a[k]) : std::nullopt;
      std::optional<Value> y = k < b.size() ? std::optional<Value>(b[k]) : std::nullopt;
      value(index_path(path, k), x, y);
    }
  }

 private:
  bool within_tolerance(std::string_view path, const Value& a, const Value& b) const {
    if (!mask_.conf_tolerance) return false;
    auto steps = split_path(path);
    if (steps.back().index || steps.back().key != "conf") return false;
    auto x = a.as_number();
    auto y = b.as_number();
    return x && y && std::fabs(*x - *y) <= *mask_.conf_tolerance + kConfToleranceSlack;
  }

  const FieldMask& mask_;
  std::vector<DiffEntry>& out_;
};

template <typename T, typename F>
std::optional<Value> lift(const std::optional<T>& x, F f) {
  if (!x) return std::nullopt;
  return f(*x);
}

inline Value ident_list(const std::vector<Identifier>& ids) {
  List xs(ids.begin(), ids.end());
  return Value(std::move(xs));
}

template <typename N>
Value number_map(const std::map<std::string, N>& m) {
  Map out;
  for (const auto& [k, v] : m) out.emplace(k, Value(v));
  return Value(std::move(out));
}

/// Metadata as (field, value) pairs for structural comparison. sig is shown
/// as lowercase hex text.
inline std::vector<std::pair<std::string_view, std::optional<Value>>> meta_values(const Metadata& m) {
  auto text = [](const std::string& s) { return Value(s); };
  auto ident = [](const Identifier& id) { return Value(id); };
  return {
      {"id", Value(m.id)},
      {"ts", Value(m.ts)},
      {"ver", lift(m.ver, text)},
      {"cid", lift(m.cid, ident)},
      {"ctx", lift(m.ctx, ident_list)},
      {"model_version", lift(m.model_version, text)},
      {"conf", lift(m.conf, [](double d) { return Value(d); })},
      {"priors", lift(m.priors, number_map<double>)},
      {"space", lift(m.space, text)},
      {"of", lift(m.of, ident)},
      {"reasoning_trace", lift(m.reasoning_trace, ident)},
      {"cost", lift(m.cost, number_map<std::int64_t>)},
      {"latency", lift(m.latency, [](std::int64_t n) { return Value(n); })},
      {"sig", lift(m.sig, [](const std::vector<std::uint8_t>& b) { return Value(text::to_hex(b)); })},
      {"cap", lift(m.cap, [](const std::vector<std::string>& tags) {
         List xs(tags.begin(), tags.end());
         return Value(std::move(xs));
       })},
  };
}

}  // namespace diffing

/// Masked structural difference between two messages, in field order:
/// type, content, then metadata in canonical key order.
inline std::vector<DiffEntry> diff_messages(const Message& a, const Message& b, const FieldMask& mask = FieldMask::diff_default()) {
  std::vector<DiffEntry> out;
  diffing::Walker w(mask, out);
  if (a.type != b.type && !mask.masks("type")) {
    out.push_back(DiffEntry{"type", Value(std::string(type_name(a.type))), Value(std::string(type_name(b.type)))});
  }
  w.value("content", a.content, b.content);
  auto ma = diffing::meta_values(a.meta);
  auto mb = diffing::meta_values(b.meta);
  for (std::size_t k = 0; k < ma.size(); ++k) w.value("meta." + std::string(ma[k].first), ma[k].second, mb[k].second);
  return out;
}

/// diff_messages plus the envelope fields wall_ts and direction.
inline std::vector<DiffEntry> diff_envelopes(const Envelope& a, const Envelope& b, const FieldMask& mask = FieldMask::diff_default()) {
  auto out = diff_messages(a.msg, b.msg, mask);
  diffing::Walker w(mask, out);
  w.value("wall_ts", Value(a.wall_ts), Value(b.wall_ts));
  w.value("direction", Value(std::string(direction_name(a.direction))), Value(std::string(direction_name(b.direction))));
  return out;
}

/// A pair of aligned envelopes that differ, or an envelope present on one
/// side only (reported as a single entry at path `$` holding its text).
struct TraceDiff {
  std::optional<std::uint64_t> left_seq;
  std::optional<std::uint64_t> right_seq;
  std::vector<DiffEntry> entries;

  friend bool operator==(const TraceDiff&, const TraceDiff&) = default;
};

namespace diffing {

// Alignment keys: requests by cid and masked hash, anything carrying `of` by
// its type and the key of what it answers, the rest by cid and type. Each key
// gets an occurrence counter so repeats pair up in recorded order.
inline std::vector<std::string> alignment_keys(const TraceLog& log, const FieldMask& mask) {
  FieldMask request_mask = FieldMask::replay_default().merged(mask);
  // Under a conf band, requests whose conf drifted still align; the band
  // then judges the drift.
  if (request_mask.conf_tolerance) request_mask.paths.insert("meta.conf");
  request_mask.conf_tolerance.reset();
  std::vector<std::string> keys;
  std::unordered_map<std::string, std::string> key_of_id;
  std::unordered_map<std::string, std::size_t> occurrences;
  for (const auto& e : log.envelopes()) {
    const Message& m = e.msg;
    std::string cid = m.meta.cid ? m.meta.cid->str() : "-";
    std::string base;
    if (m.message_class() == MessageClass::Request) {
      Digest d = canonical_hash(m, request_mask);
      base = "R|" + cid + "|" + text::to_hex(d);
    } else if (m.meta.of) {
      auto it = key_of_id.find(m.meta.of->str());
      std::string upstream = it != key_of_id.end() ? it->second : "?" + m.meta.of->str();
      base = std::string(type_name(m.type)) + "<" + upstream + ">";
    } else {
      base = "O|" + cid + "|" + std::string(type_name(m.type));
    }
    std::string key = base + "#" + std::to_string(occurrences[base]++);
    key_of_id.emplace(m.meta.id.str(), key);
    keys.push_back(std::move(key));
  }
  return keys;
}

}  // namespace diffing

/// Aligns the two traces and reports differences, left trace order first,
/// then envelopes found only in the right trace.
inline std::vector<TraceDiff> diff_traces(const TraceLog& a, const TraceLog& b, const FieldMask& mask = FieldMask::diff_default()) {
  mask.validate();
  auto ka = diffing::alignment_keys(a, mask);
  auto kb = diffing::alignment_keys(b, mask);
  std::unordered_map<std::string, std::size_t> right_index;
  for (std::size_t j = 0; j < kb.size(); ++j) right_index.emplace(kb[j], j);
  std::vector<bool> right_used(kb.size(), false);
  std::vector<TraceDiff> out;
  for (std::size_t i = 0; i < ka.size(); ++i) {
    auto it = right_index.find(ka[i]);
    if (it == right_index.end()) {
      out.push_back(TraceDiff{a[i].seq, std::nullopt, {DiffEntry{"$", Value(print_message(a[i].msg)), std::nullopt}}});
      continue;
    }
    right_used[it->second] = true;
    auto entries = diff_envelopes(a[i], b[it->second], mask);
    if (!entries.empty()) out.push_back(TraceDiff{a[i].seq, b[it->second].seq, std::move(entries)});
  }
  for (std::size_t j = 0; j < kb.size(); ++j) {
    if (!right_used[j]) {
      out.push_back(TraceDiff{std::nullopt, b[j].seq, {DiffEntry{"$", std::nullopt, Value(print_message(b[j].msg))}}});
    }
  }
  return out;
}

inline std::size_t count_entries(const std::vector<TraceDiff>& diffs) {
  std::size_t n = 0;
  for (const auto& d : diffs) n += d.entries.size();
  return n;
}

// ---------------------------------------------------------------------------
// Report lines

inline std::string show_side(const std::optional<Value>& v) { return v ? text::print_value(*v) : std::string("-"); }

inline std::string show_seq(const std::optional<std::uint64_t>& s) { return s ? std::to_string(*s) : std::string("-"); }

/// `diff <left-seq>/<right-seq> <path>: <left> != <right>`; `-` marks an absent side.
inline std::string format_diff_entry(const TraceDiff& d, const DiffEntry& e, bool porcelain = false) {
  std::string seqs = show_seq(d.left_seq) + "/" + show_seq(d.right_seq);
  if (porcelain) return "diff\t" + seqs + "\t" + e.path + "\t" + show_side(e.left) + "\t" + show_side(e.right);
  return "diff " + seqs + " " + e.path + ": " + show_side(e.left) + " != " + show_side(e.right);
}

}  // namespace aicl
