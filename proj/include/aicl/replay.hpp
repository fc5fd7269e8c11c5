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

#include <deque>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "aicl/binary.hpp"
#include "aicl/diff.hpp"
#include "aicl/trace.hpp"

namespace aicl {

/// Masked canonical hash identifying a request across honest re-runs.
/// Throws std::invalid_argument for anything but QUERY or PLAN.
inline Digest replay_key(const Message& m) {
  if (m.message_class() != MessageClass::Request) {
    throw std::invalid_argument(std::string(type_name(m.type)) + " is not a request; only requests have replay keys");
  }
  return canonical_hash(m, FieldMask::replay_default());
}

/// The system under test. respond() returns the response to a request, or
/// nullopt when it has none; exceptions are treated like nullopt.
class ResponderAdapter {
 public:
  virtual ~ResponderAdapter() = default;
  virtual std::optional<Message> respond(const Message& request) = 0;
};

/// Index of the recorded response to the request at `i`: the first later
/// RESULT or ERROR whose `of` names it.
inline std::optional<std::size_t> recorded_response(const TraceLog& log, std::size_t i) {
  const Identifier& id = log[i].msg.meta.id;
  for (std::size_t j = i + 1; j < log.size(); ++j) {
    const Message& m = log[j].msg;
    if (m.message_class() == MessageClass::Response && m.meta.of == id) return j;
  }
  return std::nullopt;
}

/// Answers each request with the response recorded for the same replay key,
/// first-in first-out when a key repeats.
class StubFromTrace : public ResponderAdapter {
 public:
  explicit StubFromTrace(const TraceLog& log) {
    for (std::size_t i = 0; i < log.size(); ++i) {
      if (log[i].msg.message_class() != MessageClass::Request) continue;
      if (auto r = recorded_response(log, i)) queues_[replay_key(log[i].msg)].push_back(log[*r].msg);
    }
  }

  std::optional<Message> respond(const Message& request) override {
    auto it = queues_.find(replay_key(request));
    if (it == queues_.end() || it->second.empty()) return std::nullopt;
    Message m = std::move(it->second.front());
    it->second.pop_front();
    return m;
  }

 private:
  std::map<Digest, std::deque<Message>> queues_;
};

/// Never answers.
class NullResponder : public ResponderAdapter {
 public:
  std::optional<Message> respond(const Message&) override { return std::nullopt; }
};

struct ReplayMismatch {
  std::uint64_t seq = 0;  // seq of the recorded response
  std::vector<DiffEntry> entries;

  friend bool operator==(const ReplayMismatch&, const ReplayMismatch&) = default;
};

struct ReplayReport {
  std::size_t total = 0;
  std::size_t matched = 0;
  std::vector<ReplayMismatch> mismatched;
  std::vector<std::uint64_t> missing_stub;  // seq of the recorded response

  bool all_matched() const { return matched == total; }

  friend bool operator==(const ReplayReport&, const ReplayReport&) = default;
};

/// Feeds every request that has a recorded response to `responder`, in seq
/// order, and compares what comes back with the recording under `mask`.
inline ReplayReport replay(const TraceLog& log, ResponderAdapter& responder, const FieldMask& mask = FieldMask::diff_default()) {
  mask.validate();
  ReplayReport report;
  for (std::size_t i = 0; i < log.size(); ++i) {
    if (log[i].msg.message_class() != MessageClass::Request) continue;
    auto r = recorded_response(log, i);
    if (!r) continue;
    ++report.total;
    const Envelope& recorded = log[*r];
    std::optional<Message> got;
    try {
      got = responder.respond(log[i].msg);
    } catch (const std::exception&) {
      got.reset();
    }
    if (!got) {
      report.missing_stub.push_back(recorded.seq);
      continue;
    }
    auto entries = diff_messages(recorded.msg, *got, mask);
    if (entries.empty()) {
      ++report.matched;
    } else {
      report.mismatched.push_back(ReplayMismatch{recorded.seq, std::move(entries)});
    }
  }
  return report;
}

inline std::vector<std::string> format_replay_report(const ReplayReport& r, bool porcelain = false) {
  std::vector<std::string> lines;
  for (const auto& m : r.mismatched) {
    for (const auto& e : m.entries) {
      if (porcelain) {
        lines.push_back("mismatch\t" + std::to_string(m.seq) + "\t" + e.path + "\t" + show_side(e.left) + "\t" + show_side(e.right));
      } else {
        lines.push_back("mismatch " + std::to_string(m.seq) + " " + e.path + ": " + show_side(e.left) + " != " + show_side(e.right));
      }
    }
  }
  for (auto seq : r.missing_stub) {
    lines.push_back(porcelain ? "missing\t" + std::to_string(seq) + "\t$\t-\t-" : "missing " + std::to_string(seq) + ": no response");
  }
  std::string summary = std::to_string(r.matched) + "/" + std::to_string(r.total) + " matched";
  lines.push_back(porcelain ? "summary\t" + std::to_string(r.matched) + "\t" + std::to_string(r.total) : summary);
  return lines;
}

}  // namespace aicl
