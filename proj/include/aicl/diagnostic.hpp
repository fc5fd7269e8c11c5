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

#include <algorithm>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

namespace aicl {

enum class Severity { Info = 0, Warning = 1, Error = 2 };

inline constexpr std::string_view severity_name(Severity s) {
  switch (s) {
    case Severity::Info: return "info";
    case Severity::Warning: return "warning";
    case Severity::Error: return "error";
  }
  return "?";
}

inline std::optional<Severity> parse_severity(std::string_view s) {
  if (s == "info") return Severity::Info;
  if (s == "warning" || s == "warn") return Severity::Warning;
  if (s == "error") return Severity::Error;
  return std::nullopt;
}

/// A validation finding. `index` is the position of the offending message in
/// the checked sequence (its seq inside a trace); `path` names the field when
/// one is to blame, e.g. `meta.conf` or `content.schema`.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string rule;
  std::size_t index = 0;
  std::string path;
  std::string detail;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

struct RuleInfo {
  std::string_view id;
  Severity default_severity;
  std::string_view description;
};

inline constexpr std::string_view kRuleRegistryVersion = "1";

// Keep docs/RULES.md in sync; a unit test diffs the two.
inline constexpr RuleInfo kRules[] = {
    {"META.REQUIRED", Severity::Error, "a required metadata field (ver, cid, ctx, model_version, priors, space) is absent"},
    {"META.CONF.MISSING", Severity::Error,
     "conf is absent; error on RESULT/FACT/FACTS, reported as a warning on every other type"},
    {"META.CONF.RANGE", Severity::Error, "conf lies outside [0, 1]"},
    {"META.PRIORS.RANGE", Severity::Error, "a priors probability lies outside [0, 1]"},
    {"META.VER.FORMAT", Severity::Error, "ver is not MAJOR.MINOR.PATCH numeric semver"},
    {"META.CTX.EMPTY", Severity::Error, "ctx is an empty list"},
    {"META.LATENCY.RANGE", Severity::Error, "latency is negative"},
    {"META.COST.RANGE", Severity::Error, "a cost counter is negative"},
    {"META.OF.REQUIRED", Severity::Error, "a response-type message (RESULT, ERROR, REASONING.STEP/COMPLETE) lacks of"},
    {"META.SIG.FORMAT", Severity::Error, "sig is an empty byte string"},
    {"META.CAP.FORMAT", Severity::Error, "a cap tag is empty or repeated"},
    {"PAYLOAD.HELLO", Severity::Error, "HELLO content must be a map with agent (identifier), capabilities (list of text), version (text)"},
    {"PAYLOAD.QUERY.CALL", Severity::Error, "QUERY content must be a call expression"},
    {"PAYLOAD.PLAN.SHAPE", Severity::Error, "PLAN content must be a list of step maps with step_id, action, depends_on"},
    {"PAYLOAD.PLAN.DUPSTEP", Severity::Error, "two PLAN steps share a step_id"},
    {"PAYLOAD.PLAN.DEP", Severity::Error, "a PLAN step depends on an undeclared step_id"},
    {"PAYLOAD.PLAN.CYCLE", Severity::Error, "PLAN dependencies contain a cycle"},
    {"PAYLOAD.FACT.SHAPE", Severity::Error, "FACT content must be one non-empty assertion map; FACTS a non-empty list of them"},
    {"PAYLOAD.FACT.CONF", Severity::Error, "an assertion's conf annotation is not a number in [0, 1]"},
    {"PAYLOAD.RESULT.SHAPE", Severity::Error, "RESULT content must be a map"},
    {"PAYLOAD.RESULT.DATA", Severity::Error, "RESULT content lacks data"},
    {"PAYLOAD.RESULT.SCHEMA", Severity::Error, "RESULT content lacks a text schema"},
    {"PAYLOAD.ERROR.CODE", Severity::Error, "ERROR content must be a map with a text code"},
    {"PAYLOAD.ERROR.HINT", Severity::Error, "ERROR recovery_hint, when present, must be text"},
    {"PAYLOAD.MEMORY.STORE", Severity::Error, "MEMORY.STORE content must be a map with text key, value, text scope"},
    {"PAYLOAD.MEMORY.RECALL", Severity::Error, "MEMORY.RECALL content must be a map with a text key"},
    {"PAYLOAD.DELEGATE", Severity::Error, "COORD.DELEGATE content must be a map with task (call) and delegate (identifier)"},
    {"HELLO.MISSING", Severity::Warning, "the first message of a conversation is not HELLO"},
    {"OF.DANGLING", Severity::Error, "of names a message id that never appears in the trace"},
    {"OF.FORWARD", Severity::Error, "of names the message itself or a later message"},
    {"OF.CID", Severity::Error, "of names a message from a different conversation"},
    {"OF.TARGET", Severity::Error, "RESULT/ERROR answers something other than a request or a delegation"},
    {"REASONING.TARGET", Severity::Error, "REASONING.STEP/COMPLETE of does not name a REASONING.START"},
    {"REASONING.CLOSED", Severity::Error, "REASONING.STEP/COMPLETE refers to a START that was already completed"},
    {"REASONING.OPEN", Severity::Warning, "a REASONING.START is never completed"},
    {"REASONING.TRACE", Severity::Error, "reasoning_trace does not name an earlier REASONING.START of the same conversation"},
    {"TS.ORDER", Severity::Warning, "ts decreases within a conversation"},
    {"ID.DUP", Severity::Error, "a message id occurs more than once in the trace"},
    {"REQ.PENDING", Severity::Info, "a request has no RESULT or ERROR answering it"},
    {"MEM.MISS", Severity::Warning, "MEMORY.RECALL of a key that was never stored"},
    {"MEM.ISOLATION", Severity::Error, "MEMORY.RECALL reaches a key stored only under disjoint ctx scopes"},
    {"MEM.OVERWRITE", Severity::Info, "MEMORY.STORE overwrites a key in the same ctx scope"},
};

inline const RuleInfo* find_rule(std::string_view id) {
  for (const auto& r : kRules) {
    if (r.id == id) return &r;
  }
  return nullptr;
}

inline Diagnostic make_diagnostic(std::string_view rule, std::size_t index, std::string path, std::string detail) {
  const RuleInfo* info = find_rule(rule);
  if (info == nullptr) throw std::logic_error("unregistered rule id " + std::string(rule));
  return Diagnostic{info->default_severity, std::string(rule), index, std::move(path), std::move(detail)};
}

/// Per-rule severity overrides; a nullopt entry switches the rule off.
struct RuleConfig {
  std::map<std::string, std::optional<Severity>, std::less<>> overrides;

  // "RULE=error,OTHER=off" (also accepts newlines and `#` comments, the
  // rules-config file format).
  static RuleConfig parse(std::string_view text) {
    RuleConfig cfg;
    cfg.merge(text);
    return cfg;
  }

  void merge(std::string_view text) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos <= text.size()) {
      std::size_t end = text.find_first_of(",\n", pos);
      if (end == std::string_view::npos) end = text.size();
      std::string_view item = text.substr(pos, end - pos);
      ++line_no;
      pos = end + 1;
      if (auto hash = item.find('#'); hash != std::string_view::npos) item = item.substr(0, hash);
      item = trim(item);
      if (item.empty()) continue;
      auto eq = item.find('=');
      if (eq == std::string_view::npos) throw std::invalid_argument("rule setting without '=': " + std::string(item));
      auto rule = trim(item.substr(0, eq));
      auto level = trim(item.substr(eq + 1));
      if (find_rule(rule) == nullptr) throw std::invalid_argument("unknown rule id: " + std::string(rule));
      if (level == "off") {
        overrides[std::string(rule)] = std::nullopt;
      } else if (auto sev = parse_severity(level)) {
        overrides[std::string(rule)] = *sev;
      } else {
        throw std::invalid_argument("unknown severity '" + std::string(level) + "' for " + std::string(rule));
      }
    }
  }

  std::vector<Diagnostic> apply(std::vector<Diagnostic> diags) const {
    std::vector<Diagnostic> out;
    out.reserve(diags.size());
    for (auto& d : diags) {
      auto it = overrides.find(d.rule);
      if (it == overrides.end()) {
        out.push_back(std::move(d));
      } else if (it->second) {
        d.severity = *it->second;
        out.push_back(std::move(d));
      }
    }
    return out;
  }

  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
  }
};

// Findings are reported ordered by message index, then rule id.
inline void sort_diagnostics(std::vector<Diagnostic>& diags) {
  std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::tie(a.index, a.rule) < std::tie(b.index, b.rule);
  });
}

inline std::size_t count_at_least(std::span<const Diagnostic> diags, Severity floor) {
  return static_cast<std::size_t>(
      std::count_if(diags.begin(), diags.end(), [&](const Diagnostic& d) { return d.severity >= floor; }));
}

}  // namespace aicl
