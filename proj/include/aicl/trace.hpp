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

// Trace logs and their on-disk forms.
//
// Both file formats store messages only. Envelope fields are a function of
// the message and its position:
//   seq       = record index
//   wall_ts   = meta.ts + meta.latency milliseconds (0 when absent)
//   direction = Inbound for requests and delegations, Outbound otherwise
// which is what keeps save/load byte-exact.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aicl/binary.hpp"
#include "aicl/message.hpp"
#include "aicl/text.hpp"

namespace aicl {

enum class Direction { Inbound, Outbound };

inline constexpr std::string_view direction_name(Direction d) { return d == Direction::Inbound ? "in" : "out"; }

struct Envelope {
  std::uint64_t seq = 0;
  Timestamp wall_ts;
  Direction direction = Direction::Outbound;
  Message msg;

  friend bool operator==(const Envelope&, const Envelope&) = default;
};

inline Direction direction_of(const Message& m) {
  auto c = m.message_class();
  return c == MessageClass::Request || c == MessageClass::Coordination ? Direction::Inbound : Direction::Outbound;
}

inline Envelope make_envelope(std::uint64_t seq, Message m) {
  Timestamp wall = m.meta.ts.plus_millis(m.meta.latency.value_or(0));
  Direction dir = direction_of(m);
  return Envelope{seq, wall, dir, std::move(m)};
}

class TraceError : public std::runtime_error {
 public:
  TraceError(std::string rule, const std::string& detail) : std::runtime_error(rule + ": " + detail), rule_(std::move(rule)) {}
  const std::string& rule() const { return rule_; }

 private:
  std::string rule_;
};

struct TraceHeader {
  std::uint8_t format_version = kAiclbVersion;
  std::string creator = "aicl";
  Timestamp created_at;

  friend bool operator==(const TraceHeader&, const TraceHeader&) = default;
};

class TraceLog {
 public:
  TraceLog() = default;

  const TraceHeader& header() const { return header_; }
  const std::vector<Envelope>& envelopes() const { return envelopes_; }
  std::size_t size() const { return envelopes_.size(); }
  bool empty() const { return envelopes_.empty(); }
  const Envelope& operator[](std::size_t i) const { return envelopes_[i]; }

  /// Throws TraceError SEQ.DUP / SEQ.GAP unless e.seq equals the current length.
  void append(Envelope e) {
    if (e.seq < envelopes_.size()) {
      throw TraceError("SEQ.DUP", "seq " + std::to_string(e.seq) + " already present");
    }
    if (e.seq > envelopes_.size()) {
      throw TraceError("SEQ.GAP", "seq " + std::to_string(e.seq) + " appended at length " + std::to_string(envelopes_.size()));
    }
    if (envelopes_.empty()) header_.created_at = e.wall_ts;
    envelopes_.push_back(std::move(e));
  }

  void append_message(Message m) { append(make_envelope(envelopes_.size(), std::move(m))); }

  std::vector<Message> messages() const {
    std::vector<Message> out;
    out.reserve(envelopes_.size());
    for (const auto& e : envelopes_) out.push_back(e.msg);
    return out;
  }

  static TraceLog from_messages(std::vector<Message> msgs) {
    TraceLog log;
    for (auto& m : msgs) log.append_message(std::move(m));
    return log;
  }

  friend bool operator==(const TraceLog&, const TraceLog&) = default;

 private:
  TraceHeader header_;
  std::vector<Envelope> envelopes_;
};

/// Functional form of TraceLog::append.
inline TraceLog append(TraceLog log, Envelope e) {
  log.append(std::move(e));
  return log;
}

inline std::vector<Envelope> slice_by_cid(const TraceLog& log, const Identifier& cid) {
  std::vector<Envelope> out;
  for (const auto& e : log.envelopes()) {
    if (e.msg.meta.cid == cid) out.push_back(e);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

inline Bytes save_binary(const TraceLog& log) {
  auto msgs = log.messages();
  return write_aiclb(msgs);
}

inline std::string save_text(const TraceLog& log, PrintStyle style = PrintStyle::Compact) {
  auto msgs = log.messages();
  return print_stream(msgs, style);
}

/// Throws DecodeError on a malformed binary trace.
inline TraceLog load_binary(std::span<const std::uint8_t> bytes) { return TraceLog::from_messages(read_aiclb(bytes)); }

/// Throws ParseError on malformed text.
inline TraceLog load_text(std::string_view text) { return TraceLog::from_messages(parse_stream(text)); }

enum class TraceFormat { Text, Binary };

inline TraceFormat detect_format(std::span<const std::uint8_t> bytes) {
  return has_aiclb_magic(bytes) ? TraceFormat::Binary : TraceFormat::Text;
}

inline TraceLog load_trace(std::span<const std::uint8_t> bytes) {
  if (detect_format(bytes) == TraceFormat::Binary) return load_binary(bytes);
  std::string_view s(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  if (!text::is_valid_utf8(s)) throw ParseError(1, 1, "UTF-8 text or an .aiclb file", "invalid UTF-8");
  return load_text(s);
}

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Bytes read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("cannot read " + path.string());
  return data;
}

inline void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

inline void write_file(const std::filesystem::path& path, std::string_view data) {
  write_file(path, std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

inline TraceLog load_trace_file(const std::filesystem::path& path) { return load_trace(read_file(path)); }

/// Format chosen by extension: `.aiclb` is binary, anything else text.
inline void save_trace_file(const TraceLog& log, const std::filesystem::path& path) {
  if (path.extension() == ".aiclb") {
    write_file(path, save_binary(log));
  } else {
    write_file(path, save_text(log));
  }
}

}  // namespace aicl
