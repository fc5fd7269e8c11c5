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

// Canonical binary form of a message and the `.aiclb` container.
//
// Envelope:   [type-name, content, metadata-map]   (3-element array)
// Identifier: tag 1095320320 ([namespace, local])
// Call:       tag 1095320321 ([namespace, name, args-map])
// Timestamp:  tag 0 (canonical RFC 3339 text)
// sig:        byte string; every other metadata field uses its natural type.
// Absent optional fields are omitted, never null.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aicl/cbor.hpp"
#include "aicl/crypto.hpp"
#include "aicl/diagnostic.hpp"
#include "aicl/message.hpp"
#include "aicl/path.hpp"

namespace aicl {

inline constexpr std::uint64_t kIdentifierTag = 0x41494300;  // "AIC\0"
inline constexpr std::uint64_t kCallTag = 0x41494301;        // "AIC\1"

namespace codec {

inline cbor::Item ident_item(const Identifier& id) {
  return cbor::Item::tag(kIdentifierTag, cbor::Item::array({cbor::Item::text(id.ns), cbor::Item::text(id.local)}));
}

inline cbor::Item value_item(const Value& v);

inline cbor::Item map_item(const Map& m) {
  std::vector<std::pair<cbor::Item, cbor::Item>> es;
  es.reserve(m.size());
  for (const auto& [k, x] : m) es.emplace_back(cbor::Item::text(k), value_item(x));
  return cbor::Item::map(std::move(es));
}

inline cbor::Item value_item(const Value& v) {
  switch (v.kind()) {
    case Value::Kind::Text: return cbor::Item::text(v.as_text());
    case Value::Kind::Int: return cbor::Item::integer(v.as_int());
    case Value::Kind::Float: return cbor::Item::floating(v.as_float());
    case Value::Kind::Bool: return cbor::Item::boolean_of(v.as_bool());
    case Value::Kind::Ident: return ident_item(v.as_ident());
    case Value::Kind::Time: return cbor::Item::tag(0, cbor::Item::text(v.as_time().str()));
    case Value::Kind::List: {
      std::vector<cbor::Item> xs;
      xs.reserve(v.as_list().size());
      for (const auto& x : v.as_list()) xs.push_back(value_item(x));
      return cbor::Item::array(std::move(xs));
    }
    case Value::Kind::Map: return map_item(v.as_map());
    case Value::Kind::Call: {
      const auto& c = v.as_call();
      return cbor::Item::tag(kCallTag,
                             cbor::Item::array({cbor::Item::text(c.ns), cbor::Item::text(c.name), map_item(c.args)}));
    }
  }
  return cbor::Item::null();
}

inline cbor::Item metadata_item(const Metadata& m) {
  std::vector<std::pair<cbor::Item, cbor::Item>> es;
  auto put = [&](std::string_view k, cbor::Item v) { es.emplace_back(cbor::Item::text(std::string(k)), std::move(v)); };
  put("id", ident_item(m.id));
  put("ts", cbor::Item::tag(0, cbor::Item::text(m.ts.str())));
  if (m.ver) put("ver", cbor::Item::text(*m.ver));
  if (m.cid) put("cid", ident_item(*m.cid));
  if (m.ctx) {
    std::vector<cbor::Item> xs;
    for (const auto& id : *m.ctx) xs.push_back(ident_item(id));
    put("ctx", cbor::Item::array(std::move(xs)));
  }
  if (m.model_version) put("model_version", cbor::Item::text(*m.model_version));
  if (m.conf) put("conf", cbor::Item::floating(*m.conf));
  if (m.priors) {
    std::vector<std::pair<cbor::Item, cbor::Item>> ps;
    for (const auto& [k, p] : *m.priors) ps.emplace_back(cbor::Item::text(k), cbor::Item::floating(p));
    put("priors", cbor::Item::map(std::move(ps)));
  }
  if (m.space) put("space", cbor::Item::text(*m.space));
  if (m.of) put("of", ident_item(*m.of));
  if (m.reasoning_trace) put("reasoning_trace", ident_item(*m.reasoning_trace));
  if (m.cost) {
    std::vector<std::pair<cbor::Item, cbor::Item>> cs;
    for (const auto& [k, n] : *m.cost) cs.emplace_back(cbor::Item::text(k), cbor::Item::integer(n));
    put("cost", cbor::Item::map(std::move(cs)));
  }
  if (m.latency) put("latency", cbor::Item::integer(*m.latency));
  if (m.sig) put("sig", cbor::Item::bytes(*m.sig));
  if (m.cap) {
    std::vector<cbor::Item> xs;
    for (const auto& t : *m.cap) xs.push_back(cbor::Item::text(t));
    put("cap", cbor::Item::array(std::move(xs)));
  }
  return cbor::Item::map(std::move(es));
}

inline cbor::Item message_item(const Message& m) {
  return cbor::Item::array(
      {cbor::Item::text(std::string(type_name(m.type))), value_item(m.content), metadata_item(m.meta)});
}

// --- decoding: item tree -> message, with schema checks -------------------

[[noreturn]] inline void schema_error(const cbor::Item& at, const std::string& detail) {
  throw DecodeError(at.offset, "CANON.SCHEMA", detail);
}

inline const std::string& expect_text(const cbor::Item& it, const char* what) {
  if (it.kind != cbor::Kind::Text) schema_error(it, std::string(what) + " must be a text string");
  return it.str;
}

inline std::int64_t expect_int(const cbor::Item& it, const char* what) {
  if (it.kind == cbor::Kind::Unsigned) {
    if (it.number > static_cast<std::uint64_t>(INT64_MAX)) {
      throw DecodeError(it.offset, "CANON.RANGE", std::string(what) + " exceeds signed 64-bit range");
    }
    return static_cast<std::int64_t>(it.number);
  }
  if (it.kind == cbor::Kind::Negative) {
    if (it.number > static_cast<std::uint64_t>(INT64_MAX)) {
      throw DecodeError(it.offset, "CANON.RANGE", std::string(what) + " exceeds signed 64-bit range");
    }
    return -1 - static_cast<std::int64_t>(it.number);
  }
  schema_error(it, std::string(what) + " must be an integer");
}

inline double expect_float(const cbor::Item& it, const char* what) {
  if (it.kind != cbor::Kind::Float) schema_error(it, std::string(what) + " must be a float");
  return it.real;
}

inline Identifier expect_ident(const cbor::Item& it, const char* what) {
  if (it.kind != cbor::Kind::Tag || it.number != kIdentifierTag) schema_error(it, std::string(what) + " must be an identifier");
  const auto& arr = it.items[0];
  if (arr.kind != cbor::Kind::Array || arr.items.size() != 2 || arr.items[0].kind != cbor::Kind::Text ||
      arr.items[1].kind != cbor::Kind::Text) {
    schema_error(arr, "identifier must be [namespace, local]");
  }
  Identifier id{arr.items[0].str, arr.items[1].str};
  if (!id.valid()) schema_error(arr, "invalid identifier '" + id.str() + "'");
  return id;
}

inline Timestamp expect_time(const cbor::Item& it, const char* what) {
  if (it.kind != cbor::Kind::Tag || it.number != 0) schema_error(it, std::string(what) + " must be a tag-0 timestamp");
  const auto& s = it.items[0];
  if (s.kind != cbor::Kind::Text) schema_error(s, "tag 0 content must be text");
  auto ts = Timestamp::parse(s.str);
  if (!ts || ts->str() != s.str) throw DecodeError(s.offset, "CANON.TIME", "timestamp '" + s.str + "' is not canonical RFC 3339");
  return *ts;
}

inline Value item_value(const cbor::Item& it);

inline Map item_map(const cbor::Item& it) {
  Map m;
  for (const auto& [k, v] : it.entries) {
    if (k.kind != cbor::Kind::Text || !is_bare_word(k.str)) schema_error(k, "map keys must be bare-word text");
    m.emplace(k.str, item_value(v));
  }
  return m;
}

inline Value item_value(const cbor::Item& it) {
  switch (it.kind) {
    case cbor::Kind::Unsigned:
    case cbor::Kind::Negative: return Value(expect_int(it, "integer"));
    case cbor::Kind::Text: return Value(it.str);
    case cbor::Kind::Float: return Value(it.real);
    case cbor::Kind::Bool: return Value(it.boolean);
    case cbor::Kind::Array: {
      List xs;
      xs.reserve(it.items.size());
      for (const auto& x : it.items) xs.push_back(item_value(x));
      return Value(std::move(xs));
    }
    case cbor::Kind::Map: return Value(item_map(it));
    case cbor::Kind::Tag:
      if (it.number == 0) return Value(expect_time(it, "timestamp"));
      if (it.number == kIdentifierTag) return Value(expect_ident(it, "identifier"));
      if (it.number == kCallTag) {
        const auto& arr = it.items[0];
        if (arr.kind != cbor::Kind::Array || arr.items.size() != 3 || arr.items[0].kind != cbor::Kind::Text ||
            arr.items[1].kind != cbor::Kind::Text || arr.items[2].kind != cbor::Kind::Map) {
          schema_error(arr, "call must be [namespace, name, args]");
        }
        if (!is_bare_word(arr.items[0].str) || !is_bare_word(arr.items[1].str)) schema_error(arr, "call namespace/name must be bare words");
        return Value(CallExpr{arr.items[0].str, arr.items[1].str, item_map(arr.items[2])});
      }
      throw DecodeError(it.offset, "CANON.TAG", "unsupported tag " + std::to_string(it.number));
    case cbor::Kind::Bytes: schema_error(it, "byte strings are only allowed in sig");
    case cbor::Kind::Null: throw DecodeError(it.offset, "CANON.TYPE", "null is not part of the data model");
  }
  schema_error(it, "unexpected item");
}

inline Metadata item_metadata(const cbor::Item& it) {
  if (it.kind != cbor::Kind::Map) schema_error(it, "metadata must be a map");
  Metadata m;
  bool have_id = false, have_ts = false;
  for (const auto& [k, v] : it.entries) {
    if (k.kind != cbor::Kind::Text || !is_metadata_field(k.str)) schema_error(k, "unknown metadata key");
    const std::string& key = k.str;
    if (key == "id") {
      m.id = expect_ident(v, "id");
      have_id = true;
    } else if (key == "ts") {
      m.ts = expect_time(v, "ts");
      have_ts = true;
    } else if (key == "ver") {
      m.ver = expect_text(v, "ver");
    } else if (key == "cid") {
      m.cid = expect_ident(v, "cid");
    } else if (key == "ctx") {
      if (v.kind != cbor::Kind::Array) schema_error(v, "ctx must be an array");
      std::vector<Identifier> ids;
      for (const auto& x : v.items) ids.push_back(expect_ident(x, "ctx entry"));
      m.ctx = std::move(ids);
    } else if (key == "model_version") {
      m.model_version = expect_text(v, "model_version");
    } else if (key == "conf") {
      m.conf = expect_float(v, "conf");
    } else if (key == "priors") {
      if (v.kind != cbor::Kind::Map) schema_error(v, "priors must be a map");
      std::map<std::string, double> ps;
      for (const auto& [pk, pv] : v.entries) {
        if (pk.kind != cbor::Kind::Text || !is_bare_word(pk.str)) schema_error(pk, "priors keys must be bare words");
        ps.emplace(pk.str, expect_float(pv, "priors value"));
      }
      m.priors = std::move(ps);
    } else if (key == "space") {
      m.space = expect_text(v, "space");
    } else if (key == "of") {
      m.of = expect_ident(v, "of");
    } else if (key == "reasoning_trace") {
      m.reasoning_trace = expect_ident(v, "reasoning_trace");
    } else if (key == "cost") {
      if (v.kind != cbor::Kind::Map) schema_error(v, "cost must be a map");
      std::map<std::string, std::int64_t> cs;
      for (const auto& [ck, cv] : v.entries) {
        if (ck.kind != cbor::Kind::Text || !is_bare_word(ck.str)) schema_error(ck, "cost keys must be bare words");
        cs.emplace(ck.str, expect_int(cv, "cost value"));
      }
      m.cost = std::move(cs);
    } else if (key == "latency") {
      m.latency = expect_int(v, "latency");
    } else if (key == "sig") {
      if (v.kind != cbor::Kind::Bytes) schema_error(v, "sig must be a byte string");
      m.sig = std::vector<std::uint8_t>(v.str.begin(), v.str.end());
    } else if (key == "cap") {
      if (v.kind != cbor::Kind::Array) schema_error(v, "cap must be an array");
      std::vector<std::string> tags;
      for (const auto& x : v.items) tags.push_back(expect_text(x, "cap entry"));
      m.cap = std::move(tags);
    }
  }
  if (!have_id) schema_error(it, "metadata lacks id");
  if (!have_ts) schema_error(it, "metadata lacks ts");
  return m;
}

inline Message item_message(const cbor::Item& it) {
  if (it.kind != cbor::Kind::Array || it.items.size() != 3) schema_error(it, "message must be a 3-element array");
  const auto& name = expect_text(it.items[0], "message type");
  auto type = parse_type_name(name);
  if (!type) schema_error(it.items[0], "unknown message type '" + name + "'");
  Message m;
  m.type = *type;
  m.content = item_value(it.items[1]);
  m.meta = item_metadata(it.items[2]);
  return m;
}

}  // namespace codec

inline Bytes encode_canonical(const Message& m) { return cbor::encode(codec::message_item(m)); }

/// Accepts only canonical encodings; throws DecodeError naming the violated rule.
inline Message decode(std::span<const std::uint8_t> bytes) { return codec::item_message(cbor::decode(bytes)); }

// ---------------------------------------------------------------------------
// Field masks and hashing

/// A set of field paths to ignore when hashing or comparing messages, plus
/// an optional numeric tolerance applied to `conf` fields.
struct FieldMask {
  std::set<std::string> paths;
  std::optional<double> conf_tolerance;

  static FieldMask none() { return {}; }

  // Fields that legitimately differ across honest re-runs of a request.
  static FieldMask replay_default() {
    return FieldMask{{"meta.id", "meta.ts", "meta.latency", "meta.cost", "meta.sig"}, std::nullopt};
  }

  static FieldMask diff_default() {
    FieldMask m = replay_default();
    m.paths.insert("wall_ts");
    return m;
  }

  static FieldMask conf_band(double tolerance = 0.05) {
    FieldMask m = diff_default();
    m.conf_tolerance = tolerance;
    return m;
  }

  FieldMask& add(std::string path) {
    validate_field_path(path);
    paths.insert(std::move(path));
    return *this;
  }

  void validate() const {
    for (const auto& p : paths) validate_field_path(p);
    if (conf_tolerance && !(*conf_tolerance >= 0)) throw std::invalid_argument("conf tolerance must be >= 0");
  }

  bool masks(std::string_view path) const {
    for (const auto& p : paths) {
      if (path_covers(p, path)) return true;
    }
    return false;
  }

  FieldMask merged(const FieldMask& other) const {
    FieldMask m = *this;
    m.paths.insert(other.paths.begin(), other.paths.end());
    if (other.conf_tolerance) m.conf_tolerance = other.conf_tolerance;
    return m;
  }

  // Comma-separated items: a field path, `conf~TOL`, or a preset
  // (`@none`, `@replay`, `@default`, `@conf-band`). Items extend `base`.
  static FieldMask parse(std::string_view spec, FieldMask base = diff_default()) {
    FieldMask m = std::move(base);
    std::size_t pos = 0;
    while (pos <= spec.size()) {
      std::size_t end = spec.find(',', pos);
      if (end == std::string_view::npos) end = spec.size();
      std::string_view item = RuleConfig::trim(spec.substr(pos, end - pos));
      pos = end + 1;
      if (item.empty()) continue;
      if (item == "@none") {
        m = none();
      } else if (item == "@replay") {
        m = m.merged(replay_default());
      } else if (item == "@default") {
        m = m.merged(diff_default());
      } else if (item == "@conf-band") {
        m = m.merged(conf_band());
      } else if (item.substr(0, 5) == "conf~") {
        std::string tol(item.substr(5));
        std::size_t used = 0;
        double t = 0;
        try {
          t = std::stod(tol, &used);
        } catch (const std::exception&) {
          used = 0;
        }
        if (used != tol.size() || !(t >= 0)) throw std::invalid_argument("bad conf tolerance '" + tol + "'");
        m.conf_tolerance = t;
      } else {
        m.add(std::string(item));
      }
    }
    return m;
  }
};

namespace codec {

inline void remove_path(cbor::Item& root, const std::vector<PathStep>& steps, std::size_t at) {
  cbor::Item* node = &root;
  // Descend through call expressions to their argument map.
  if (node->kind == cbor::Kind::Tag && node->number == kCallTag) node = &node->items[0].items[2];
  const PathStep& step = steps[at];
  bool last = at + 1 == steps.size();
  if (step.index) {
    if (node->kind != cbor::Kind::Array || *step.index >= node->items.size()) return;
    if (last) {
      node->items[*step.index] = cbor::Item::null();
    } else {
      remove_path(node->items[*step.index], steps, at + 1);
    }
    return;
  }
  if (node->kind != cbor::Kind::Map) return;
  for (auto it = node->entries.begin(); it != node->entries.end(); ++it) {
    if (it->first.kind == cbor::Kind::Text && it->first.str == step.key) {
      if (last) {
        node->entries.erase(it);
      } else {
        remove_path(it->second, steps, at + 1);
      }
      return;
    }
  }
}

inline cbor::Item masked_item(const Message& m, const FieldMask& mask) {
  cbor::Item item = message_item(m);
  for (const auto& p : mask.paths) {
    auto steps = split_path(p);
    if (steps[0].key == "content") {
      if (steps.size() == 1) {
        item.items[1] = cbor::Item::null();
      } else {
        remove_path(item.items[1], steps, 1);
      }
    } else if (steps[0].key == "meta") {
      remove_path(item.items[2], steps, 1);
    }
  }
  return item;
}

}  // namespace codec

/// SHA-256 of the canonical encoding with masked fields removed. Envelope-level
/// mask paths (wall_ts, direction) do not apply to a bare message.
inline Digest canonical_hash(const Message& m, const FieldMask& mask = FieldMask::none()) {
  mask.validate();
  return sha256(cbor::encode(codec::masked_item(m, mask)));
}

// ---------------------------------------------------------------------------
// .aiclb container: "AICL" + version byte + (u32 big-endian length, bytes)*

inline constexpr std::uint8_t kAiclbVersion = 1;
inline constexpr std::string_view kAiclbMagic = "AICL";

inline bool has_aiclb_magic(std::span<const std::uint8_t> bytes) {
  return bytes.size() >= 4 && std::equal(kAiclbMagic.begin(), kAiclbMagic.end(), bytes.begin());
}

inline Bytes write_aiclb(std::span<const Message> msgs) {
  Bytes out(kAiclbMagic.begin(), kAiclbMagic.end());
  out.push_back(kAiclbVersion);
  for (const auto& m : msgs) {
    Bytes rec = encode_canonical(m);
    auto n = static_cast<std::uint32_t>(rec.size());
    for (int i = 3; i >= 0; --i) out.push_back(static_cast<std::uint8_t>(n >> (8 * i)));
    out.insert(out.end(), rec.begin(), rec.end());
  }
  return out;
}

/// Decodes every record; DecodeError offsets are relative to the file start.
inline std::vector<Message> read_aiclb(std::span<const std::uint8_t> bytes) {
  if (!has_aiclb_magic(bytes)) throw DecodeError(0, "AICLB.MAGIC", "missing AICL magic bytes");
  if (bytes.size() < 5) throw DecodeError(4, "AICLB.TRUNCATED", "missing format version byte");
  if (bytes[4] != kAiclbVersion) {
    throw DecodeError(4, "AICLB.VERSION", "unsupported format version " + std::to_string(bytes[4]));
  }
  std::vector<Message> out;
  std::size_t pos = 5;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 4) throw DecodeError(pos, "AICLB.TRUNCATED", "incomplete record length");
    std::uint32_t n = 0;
    for (int i = 0; i < 4; ++i) n = (n << 8) | bytes[pos + static_cast<std::size_t>(i)];
    pos += 4;
    if (bytes.size() - pos < n) throw DecodeError(pos, "AICLB.TRUNCATED", "record extends past end of file");
    try {
      out.push_back(decode(bytes.subspan(pos, n)));
    } catch (const DecodeError& e) {
      throw DecodeError(pos + e.offset(), e.rule(), std::string(e.what()) + " (record " + std::to_string(out.size()) + ")");
    }
    pos += n;
  }
  return out;
}

}  // namespace aicl
