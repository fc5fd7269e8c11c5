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

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "aicl/value.hpp"

namespace aicl {

enum class MessageType : std::uint8_t {
  Hello,
  Query,
  Plan,
  Fact,
  Facts,
  Result,
  Error,
  MemoryStore,
  MemoryRecall,
  CoordDelegate,
  ReasoningStart,
  ReasoningStep,
  ReasoningComplete,
};

inline constexpr std::array<MessageType, 13> kAllMessageTypes = {
    MessageType::Hello,          MessageType::Query,        MessageType::Plan,
    MessageType::Fact,           MessageType::Facts,        MessageType::Result,
    MessageType::Error,          MessageType::MemoryStore,  MessageType::MemoryRecall,
    MessageType::CoordDelegate,  MessageType::ReasoningStart, MessageType::ReasoningStep,
    MessageType::ReasoningComplete,
};

inline constexpr std::string_view type_name(MessageType t) {
  switch (t) {
    case MessageType::Hello: return "HELLO";
    case MessageType::Query: return "QUERY";
    case MessageType::Plan: return "PLAN";
    case MessageType::Fact: return "FACT";
    case MessageType::Facts: return "FACTS";
    case MessageType::Result: return "RESULT";
    case MessageType::Error: return "ERROR";
    case MessageType::MemoryStore: return "MEMORY.STORE";
    case MessageType::MemoryRecall: return "MEMORY.RECALL";
    case MessageType::CoordDelegate: return "COORD.DELEGATE";
    case MessageType::ReasoningStart: return "REASONING.START";
    case MessageType::ReasoningStep: return "REASONING.STEP";
    case MessageType::ReasoningComplete: return "REASONING.COMPLETE";
  }
  return "?";
}

inline std::optional<MessageType> parse_type_name(std::string_view s) {
  for (auto t : kAllMessageTypes) {
    if (type_name(t) == s) return t;
  }
  return std::nullopt;
}

enum class MessageClass { Lifecycle, Request, Assertion, Response, Memory, Coordination, ReasoningMark };

inline constexpr MessageClass classify(MessageType t) {
  switch (t) {
    case MessageType::Hello: return MessageClass::Lifecycle;
    case MessageType::Query:
    case MessageType::Plan: return MessageClass::Request;
    case MessageType::Fact:
    case MessageType::Facts: return MessageClass::Assertion;
    case MessageType::Result:
    case MessageType::Error: return MessageClass::Response;
    case MessageType::MemoryStore:
    case MessageType::MemoryRecall: return MessageClass::Memory;
    case MessageType::CoordDelegate: return MessageClass::Coordination;
    case MessageType::ReasoningStart:
    case MessageType::ReasoningStep:
    case MessageType::ReasoningComplete: return MessageClass::ReasoningMark;
  }
  return MessageClass::Lifecycle;
}

inline constexpr std::string_view class_name(MessageClass c) {
  switch (c) {
    case MessageClass::Lifecycle: return "Lifecycle";
    case MessageClass::Request: return "Request";
    case MessageClass::Assertion: return "Assertion";
    case MessageClass::Response: return "Response";
    case MessageClass::Memory: return "Memory";
    case MessageClass::Coordination: return "Coordination";
    case MessageClass::ReasoningMark: return "ReasoningMark";
  }
  return "?";
}

// STEP and COMPLETE correlate to their START through `of`.
inline constexpr bool requires_of(MessageType t) {
  return t == MessageType::Result || t == MessageType::Error || t == MessageType::ReasoningStep ||
         t == MessageType::ReasoningComplete;
}

/// Metadata keys in canonical print order.
inline constexpr std::array<std::string_view, 15> kMetadataFields = {
    "id",   "ts", "ver", "cid", "ctx",             "model_version", "conf", "priors",
    "space", "of", "reasoning_trace", "cost", "latency", "sig", "cap",
};

inline bool is_metadata_field(std::string_view name) {
  for (auto f : kMetadataFields) {
    if (f == name) return true;
  }
  return false;
}

/// The metadata record. `id` and `ts` are syntactically mandatory; every
/// other field may be absent in a parsed message and is reported by the
/// validator instead of the parser.
struct Metadata {
  Identifier id;
  Timestamp ts;
  std::optional<std::string> ver;
  std::optional<Identifier> cid;
  std::optional<std::vector<Identifier>> ctx;
  std::optional<std::string> model_version;
  std::optional<double> conf;
  std::optional<std::map<std::string, double>> priors;
  std::optional<std::string> space;
  std::optional<Identifier> of;
  std::optional<Identifier> reasoning_trace;
  std::optional<std::map<std::string, std::int64_t>> cost;
  std::optional<std::int64_t> latency;
  std::optional<std::vector<std::uint8_t>> sig;
  std::optional<std::vector<std::string>> cap;

  friend bool operator==(const Metadata& a, const Metadata& b) {
    auto same_conf = [](const std::optional<double>& x, const std::optional<double>& y) {
      if (x.has_value() != y.has_value()) return false;
      return !x || same_float(*x, *y);
    };
    auto same_priors = [](const auto& x, const auto& y) {
      if (x.has_value() != y.has_value()) return false;
      if (!x) return true;
      if (x->size() != y->size()) return false;
      for (auto i = x->begin(), j = y->begin(); i != x->end(); ++i, ++j) {
        if (i->first != j->first || !same_float(i->second, j->second)) return false;
      }
      return true;
    };
    return a.id == b.id && a.ts == b.ts && a.ver == b.ver && a.cid == b.cid && a.ctx == b.ctx &&
           a.model_version == b.model_version && same_conf(a.conf, b.conf) && same_priors(a.priors, b.priors) &&
           a.space == b.space && a.of == b.of && a.reasoning_trace == b.reasoning_trace && a.cost == b.cost &&
           a.latency == b.latency && a.sig == b.sig && a.cap == b.cap;
  }
};

/// One `[TYPE: CONTENT | METADATA]` envelope.
struct Message {
  MessageType type = MessageType::Hello;
  Value content;
  Metadata meta;

  MessageClass message_class() const { return classify(type); }

  friend bool operator==(const Message&, const Message&) = default;
};

}  // namespace aicl
