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
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <variant>
#include <vector>

#include "aicl/check_metadata.hpp"
#include "aicl/diagnostic.hpp"
#include "aicl/message.hpp"
#include "aicl/path.hpp"
#include "aicl/text.hpp"

namespace aicl {

namespace payload {

using Out = std::vector<Diagnostic>;

inline void add(Out& out, std::string_view rule, std::size_t index, std::string path, std::string detail) {
  out.push_back(make_diagnostic(rule, index, std::move(path), std::move(detail)));
}

inline bool is_text_list(const Value* v) {
  if (v == nullptr || !v->is_list()) return false;
  return std::all_of(v->as_list().begin(), v->as_list().end(), [](const Value& x) { return x.is_text(); });
}

inline void hello(const Value& c, std::size_t i, Out& out) {
  if (!c.is_map()) return add(out, "PAYLOAD.HELLO", i, "content", "HELLO content must be a map");
  const Value* agent = c.find("agent");
  if (agent == nullptr || !agent->is_ident()) add(out, "PAYLOAD.HELLO", i, "content.agent", "agent must be an identifier");
  if (!is_text_list(c.find("capabilities"))) {
    add(out, "PAYLOAD.HELLO", i, "content.capabilities", "capabilities must be a list of text");
  }
  const Value* version = c.find("version");
  if (version == nullptr || !version->is_text()) add(out, "PAYLOAD.HELLO", i, "content.version", "version must be text");
}

inline void plan(const Value& c, std::size_t i, Out& out) {
  if (!c.is_list()) return add(out, "PAYLOAD.PLAN.SHAPE", i, "content", "PLAN content must be a list of steps");
  const List& steps = c.as_list();
  std::map<std::string, std::size_t> declared;
  std::vector<std::vector<std::string>> deps(steps.size());
  bool shape_ok = true;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    std::string at = index_path("content", s);
    const Value& step = steps[s];
    if (!step.is_map()) {
      add(out, "PAYLOAD.PLAN.SHAPE", i, at, "step must be a map");
      shape_ok = false;
      continue;
    }
    const Value* id = step.find("step_id");
    const Value* action = step.find("action");
    const Value* dep = step.find("depends_on");
    if (id == nullptr || !id->is_text()) {
      add(out, "PAYLOAD.PLAN.SHAPE", i, at + ".step_id", "step_id must be text");
      shape_ok = false;
    } else if (!declared.emplace(id->as_text(), s).second) {
      add(out, "PAYLOAD.PLAN.DUPSTEP", i, at + ".step_id", "step_id '" + id->as_text() + "' declared twice");
    }
    if (action == nullptr) {
      add(out, "PAYLOAD.PLAN.SHAPE", i, at + ".action", "step lacks action");
      shape_ok = false;
    }
    if (!is_text_list(dep)) {
      add(out, "PAYLOAD.PLAN.SHAPE", i, at + ".depends_on", "depends_on must be a list of step ids");
      shape_ok = false;
    } else {
      for (const auto& d : dep->as_list()) deps[s].push_back(d.as_text());
    }
  }
  if (!shape_ok) return;
  for (std::size_t s = 0; s < steps.size(); ++s) {
    for (std::size_t k = 0; k < deps[s].size(); ++k) {
      if (!declared.count(deps[s][k])) {
        add(out, "PAYLOAD.PLAN.DEP", i, index_path(index_path("content", s) + ".depends_on", k),
            "step depends on undeclared step '" + deps[s][k] + "'");
      }
    }
  }
  // Cycle detection over declared dependencies (three-colour DFS).
  std::vector<int> colour(steps.size(), 0);
  bool cyclic = false;
  auto visit = [&](auto&& self, std::size_t s) -> void {
    colour[s] = 1;
    for (const auto& d : deps[s]) {
      auto it = declared.find(d);
      if (it == declared.end()) continue;
      if (colour[it->second] == 1) cyclic = true;
      if (colour[it->second] == 0) self(self, it->second);
    }
    colour[s] = 2;
  };
  for (std::size_t s = 0; s < steps.size() && !cyclic; ++s) {
    if (colour[s] == 0) visit(visit, s);
  }
  if (cyclic) add(out, "PAYLOAD.PLAN.CYCLE", i, "content", "step dependencies form a cycle");
}

inline void assertion(const Value& a, const std::string& at, std::size_t i, Out& out) {
  if (!a.is_map() || a.as_map().empty()) return add(out, "PAYLOAD.FACT.SHAPE", i, at, "assertion must be a non-empty map");
  if (const Value* conf = a.find("conf")) {
    auto x = conf->as_number();
    if (!x || !in_unit_interval(*x)) add(out, "PAYLOAD.FACT.CONF", i, at + ".conf", "conf must be a number in [0, 1]");
  }
}

inline void facts(const Value& c, std::size_t i, Out& out) {
  if (!c.is_list() || c.as_list().empty()) return add(out, "PAYLOAD.FACT.SHAPE", i, "content", "FACTS content must be a non-empty list");
  for (std::size_t k = 0; k < c.as_list().size(); ++k) assertion(c.as_list()[k], index_path("content", k), i, out);
}

inline void result(const Value& c, std::size_t i, Out& out) {
  if (!c.is_map()) return add(out, "PAYLOAD.RESULT.SHAPE", i, "content", "RESULT content must be a map");
  if (c.find("data") == nullptr) add(out, "PAYLOAD.RESULT.DATA", i, "content.data", "RESULT lacks data");
  const Value* schema = c.find("schema");
  if (schema == nullptr || !schema->is_text()) add(out, "PAYLOAD.RESULT.SCHEMA", i, "content.schema", "RESULT lacks a text schema");
}

inline void error(const Value& c, std::size_t i, Out& out) {
  if (!c.is_map()) return add(out, "PAYLOAD.ERROR.CODE", i, "content", "ERROR content must be a map");
  const Value* code = c.find("code");
  if (code == nullptr || !code->is_text()) add(out, "PAYLOAD.ERROR.CODE", i, "content.code", "ERROR lacks a text code");
  const Value* hint = c.find("recovery_hint");
  if (hint != nullptr && !hint->is_text()) add(out, "PAYLOAD.ERROR.HINT", i, "content.recovery_hint", "recovery_hint must be text");
}

inline void store(const Value& c, std::size_t i, Out& out) {
  if (!c.is_map()) return add(out, "PAYLOAD.MEMORY.STORE", i, "content", "MEMORY.STORE content must be a map");
  const Value* key = c.find("key");
  if (key == nullptr || !key->is_text()) add(out, "PAYLOAD.MEMORY.STORE", i, "content.key", "key must be text");
  if (c.find("value") == nullptr) add(out, "PAYLOAD.MEMORY.STORE", i, "content.value", "value is absent");
  const Value* scope = c.find("scope");
  if (scope == nullptr || !scope->is_text()) add(out, "PAYLOAD.MEMORY.STORE", i, "content.scope", "scope must be text");
}

inline void recall(const Value& c, std::size_t i, Out& out) {
  const Value* key = c.is_map() ? c.find("key") : nullptr;
  if (key == nullptr || !key->is_text()) add(out, "PAYLOAD.MEMORY.RECALL", i, "content.key", "MEMORY.RECALL needs a text key");
}

inline void delegate(const Value& c, std::size_t i, Out& out) {
  if (!c.is_map()) return add(out, "PAYLOAD.DELEGATE", i, "content", "COORD.DELEGATE content must be a map");
  const Value* task = c.find("task");
  if (task == nullptr || !task->is_call()) add(out, "PAYLOAD.DELEGATE", i, "content.task", "task must be a call expression");
  const Value* to = c.find("delegate");
  if (to == nullptr || !to->is_ident()) add(out, "PAYLOAD.DELEGATE", i, "content.delegate", "delegate must be an identifier");
}

}  // namespace payload

/// Payload-shape rules for one message, without metadata checks.
inline std::vector<Diagnostic> check_payload(const Message& m, std::size_t index = 0) {
  std::vector<Diagnostic> out;
  const Value& c = m.content;
  switch (m.type) {
    case MessageType::Hello: payload::hello(c, index, out); break;
    case MessageType::Query:
      if (!c.is_call()) payload::add(out, "PAYLOAD.QUERY.CALL", index, "content", "QUERY content must be a call expression");
      break;
    case MessageType::Plan: payload::plan(c, index, out); break;
    case MessageType::Fact: payload::assertion(c, "content", index, out); break;
    case MessageType::Facts: payload::facts(c, index, out); break;
    case MessageType::Result: payload::result(c, index, out); break;
    case MessageType::Error: payload::error(c, index, out); break;
    case MessageType::MemoryStore: payload::store(c, index, out); break;
    case MessageType::MemoryRecall: payload::recall(c, index, out); break;
    case MessageType::CoordDelegate: payload::delegate(c, index, out); break;
    case MessageType::ReasoningStart:
    case MessageType::ReasoningStep:
    case MessageType::ReasoningComplete: break;
  }
  return out;
}

inline std::vector<Diagnostic> validate_message(const Message& m, std::size_t index = 0) {
  auto out = check_metadata(m.meta, m.type, index);
  auto more = check_payload(m, index);
  out.insert(out.end(), std::make_move_iterator(more.begin()), std::make_move_iterator(more.end()));
  return out;
}

namespace detail {

struct IdentifierHash {
  std::size_t operator()(const Identifier& id) const {
    return std::hash<std::string>{}(id.ns) * 31 + std::hash<std::string>{}(id.local);
  }
};

// First occurrence of each id.
inline std::unordered_map<Identifier, std::size_t, IdentifierHash> first_index(std::span<const Message> msgs) {
  std::unordered_map<Identifier, std::size_t, IdentifierHash> pos;
  for (std::size_t i = 0; i < msgs.size(); ++i) pos.emplace(msgs[i].meta.id, i);
  return pos;
}

}  // namespace detail

/// Cross-message conversation rules over a trace in order. Conversations are
/// keyed by cid; messages without a cid are treated as one conversation.
inline std::vector<Diagnostic> validate_conversation(std::span<const Message> msgs, const RuleConfig& config = {}) {
  std::vector<Diagnostic> out;
  auto add = [&](std::string_view rule, std::size_t i, std::string path, std::string detail) {
    out.push_back(make_diagnostic(rule, i, std::move(path), std::move(detail)));
  };
  auto pos = detail::first_index(msgs);

  std::set<std::optional<Identifier>> opened;
  std::map<std::optional<Identifier>, Timestamp> latest_ts;
  std::set<std::size_t> open_starts;    // REASONING.START indices not yet completed
  std::set<std::size_t> closed_starts;
  std::set<std::size_t> answered;       // request indices with a RESULT/ERROR
  std::set<Identifier> seen_ids;

  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const Message& m = msgs[i];
    const auto& cid = m.meta.cid;

    if (!seen_ids.insert(m.meta.id).second) {
      add("ID.DUP", i, "meta.id", "id " + m.meta.id.str() + " first used at index " + std::to_string(pos.at(m.meta.id)));
    }

    if (opened.insert(cid).second && m.type != MessageType::Hello) {
      add("HELLO.MISSING", i, "", "conversation " + (cid ? cid->str() : std::string("(no cid)")) + " opens with " +
                                      std::string(type_name(m.type)) + " instead of HELLO");
    }

    if (auto it = latest_ts.find(cid); it == latest_ts.end()) {
      latest_ts.emplace(cid, m.meta.ts);
    } else if (m.meta.ts < it->second) {
      add("TS.ORDER", i, "meta.ts", "ts " + m.meta.ts.str() + " precedes " + it->second.str());
    } else {
      it->second = m.meta.ts;
    }

    if (m.meta.of) {
      const Identifier& of = *m.meta.of;
      auto it = pos.find(of);
      std::optional<std::size_t> target;
      if (it == pos.end()) {
        add("OF.DANGLING", i, "meta.of", "of " + of.str() + " names no message in the trace");
      } else if (it->second >= i) {
        add("OF.FORWARD", i, "meta.of", "of " + of.str() + " does not precede this message");
      } else if (msgs[it->second].meta.cid != cid) {
        add("OF.CID", i, "meta.of", "of " + of.str() + " belongs to another conversation");
      } else {
        target = it->second;
      }
      if (target) {
        const Message& t = msgs[*target];
        MessageClass tc = t.message_class();
        if (m.message_class() == MessageClass::Response) {
          if (tc == MessageClass::Request || tc == MessageClass::Coordination) {
            answered.insert(*target);
          } else {
            add("OF.TARGET", i, "meta.of",
                std::string(type_name(m.type)) + " answers a " + std::string(type_name(t.type)));
          }
        }
        if (m.type == MessageType::ReasoningStep || m.type == MessageType::ReasoningComplete) {
          if (t.type != MessageType::ReasoningStart) {
            add("REASONING.TARGET", i, "meta.of", "of names a " + std::string(type_name(t.type)));
          } else if (closed_starts.count(*target)) {
            add("REASONING.CLOSED", i, "meta.of", "reasoning " + of.str() + " was already completed");
          } else if (m.type == MessageType::ReasoningComplete) {
            open_starts.erase(*target);
            closed_starts.insert(*target);
          }
        }
      }
    }

    if (m.meta.reasoning_trace) {
      auto it = pos.find(*m.meta.reasoning_trace);
      if (it == pos.end() || it->second >= i || msgs[it->second].type != MessageType::ReasoningStart ||
          msgs[it->second].meta.cid != cid) {
        add("REASONING.TRACE", i, "meta.reasoning_trace",
            m.meta.reasoning_trace->str() + " is not an earlier REASONING.START of this conversation");
      }
    }

    if (m.type == MessageType::ReasoningStart && pos.at(m.meta.id) == i) open_starts.insert(i);
  }

  for (std::size_t s : open_starts) {
    add("REASONING.OPEN", s, "", "reasoning " + msgs[s].meta.id.str() + " is never completed");
  }
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    if (msgs[i].message_class() == MessageClass::Request && pos.at(msgs[i].meta.id) == i && !answered.count(i)) {
      add("REQ.PENDING", i, "", "no RESULT or ERROR answers " + msgs[i].meta.id.str());
    }
  }
  out = config.apply(std::move(out));
  sort_diagnostics(out);
  return out;
}

// ---------------------------------------------------------------------------
// Correlation graph

struct CorrelationEdge {
  std::size_t from = 0;  // index of the referring message
  std::size_t to = 0;    // index of the referenced message
  std::string via;       // "of" or "reasoning_trace"

  friend bool operator==(const CorrelationEdge&, const CorrelationEdge&) = default;
};

struct CorrelationGraph {
  std::vector<Identifier> nodes;  // message ids in trace order
  std::vector<CorrelationEdge> edges;

  // Every edge points strictly backward, so this holds for any graph built
  // from a trace; it is checked independently for the invariant tests.
  bool acyclic() const {
    std::vector<std::vector<std::size_t>> adj(nodes.size());
    std::vector<std::size_t> indeg(nodes.size(), 0);
    for (const auto& e : edges) {
      adj[e.from].push_back(e.to);
      ++indeg[e.to];
    }
    std::vector<std::size_t> ready;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
      if (indeg[n] == 0) ready.push_back(n);
    }
    std::size_t seen = 0;
    while (!ready.empty()) {
      std::size_t n = ready.back();
      ready.pop_back();
      ++seen;
      for (std::size_t t : adj[n]) {
        if (--indeg[t] == 0) ready.push_back(t);
      }
    }
    return seen == nodes.size();
  }
};

/// Fails with OF.DANGLING / OF.FORWARD diagnostics when a reference does not
/// resolve to an earlier message.
inline std::variant<CorrelationGraph, std::vector<Diagnostic>> build_correlation_graph(std::span<const Message> msgs) {
  CorrelationGraph g;
  std::vector<Diagnostic> errors;
  auto pos = detail::first_index(msgs);
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    g.nodes.push_back(msgs[i].meta.id);
    auto link = [&](const std::optional<Identifier>& ref, const char* field) {
      if (!ref) return;
      std::string path = std::string("meta.") + field;
      auto it = pos.find(*ref);
      if (it == pos.end()) {
        errors.push_back(make_diagnostic("OF.DANGLING", i, path, ref->str() + " names no message in the trace"));
      } else if (it->second >= i) {
        errors.push_back(make_diagnostic("OF.FORWARD", i, path, ref->str() + " does not precede this message"));
      } else {
        g.edges.push_back(CorrelationEdge{i, it->second, field});
      }
    };
    link(msgs[i].meta.of, "of");
    link(msgs[i].meta.reasoning_trace, "reasoning_trace");
  }
  if (!errors.empty()) return errors;
  return g;
}

// ---------------------------------------------------------------------------
// Context isolation

struct IsolationViolation {
  std::size_t recall_locus = 0;
  std::size_t stored_locus = 0;  // most recent STORE of the key
  std::string key;
  std::vector<Identifier> recaller_ctx;
  std::vector<Identifier> store_ctx;

  friend bool operator==(const IsolationViolation&, const IsolationViolation&) = default;
};

namespace detail {

inline const std::string* memory_key(const Message& m) {
  if (!m.content.is_map()) return nullptr;
  const Value* k = m.content.find("key");
  return k != nullptr && k->is_text() ? &k->as_text() : nullptr;
}

inline bool overlaps(const std::vector<Identifier>& a, const std::vector<Identifier>& b) {
  return std::any_of(a.begin(), a.end(), [&](const Identifier& x) { return std::find(b.begin(), b.end(), x) != b.end(); });
}

struct MemoryScan {
  std::vector<IsolationViolation> violations;
  std::vector<Diagnostic> diagnostics;
};

inline MemoryScan scan_memory(std::span<const Message> msgs) {
  MemoryScan scan;
  std::map<std::string, std::vector<std::size_t>> stores;  // key -> STORE indices
  static const std::vector<Identifier> kNoCtx;
  auto ctx_of = [&](std::size_t i) -> const std::vector<Identifier>& { return msgs[i].meta.ctx ? *msgs[i].meta.ctx : kNoCtx; };
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    const Message& m = msgs[i];
    if (m.type != MessageType::MemoryStore && m.type != MessageType::MemoryRecall) continue;
    const std::string* key = memory_key(m);
    if (key == nullptr) continue;  // reported by the payload rules
    auto& prior = stores[*key];
    if (m.type == MessageType::MemoryStore) {
      for (auto it = prior.rbegin(); it != prior.rend(); ++it) {
        if (overlaps(ctx_of(*it), ctx_of(i))) {
          scan.diagnostics.push_back(make_diagnostic("MEM.OVERWRITE", i, "content.key",
                                                     "key '" + *key + "' overwrites the value stored at index " +
                                                         std::to_string(*it)));
          break;
        }
      }
      prior.push_back(i);
      continue;
    }
    if (prior.empty()) {
      scan.diagnostics.push_back(make_diagnostic("MEM.MISS", i, "content.key", "key '" + *key + "' was never stored"));
      continue;
    }
    bool visible = std::any_of(prior.begin(), prior.end(), [&](std::size_t s) { return overlaps(ctx_of(s), ctx_of(i)); });
    if (!visible) {
      std::size_t s = prior.back();
      scan.violations.push_back(IsolationViolation{i, s, *key, ctx_of(i), ctx_of(s)});
      scan.diagnostics.push_back(make_diagnostic("MEM.ISOLATION", i, "meta.ctx",
                                                 "key '" + *key + "' is stored only under scopes disjoint from this ctx"));
    }
  }
  return scan;
}

}  // namespace detail

/// A RECALL violates isolation iff every earlier STORE of its key has a ctx
/// disjoint from the recaller's (ctx overlap grants access).
inline std::vector<IsolationViolation> check_context_isolation(std::span<const Message> msgs) {
  return detail::scan_memory(msgs).violations;
}

/// MEM.* findings: isolation violations plus misses and overwrites.
inline std::vector<Diagnostic> check_memory(std::span<const Message> msgs) { return detail::scan_memory(msgs).diagnostics; }

// ---------------------------------------------------------------------------

/// Every rule over a trace: per-message, conversation and memory checks,
/// with the configuration applied and findings sorted by index then rule.
inline std::vector<Diagnostic> check_all(std::span<const Message> msgs, const RuleConfig& config = {}) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    auto d = validate_message(msgs[i], i);
    out.insert(out.end(), d.begin(), d.end());
  }
  auto conv = validate_conversation(msgs);
  out.insert(out.end(), conv.begin(), conv.end());
  auto mem = check_memory(msgs);
  out.insert(out.end(), mem.begin(), mem.end());
  out = config.apply(std::move(out));
  sort_diagnostics(out);
  return out;
}

inline std::vector<Diagnostic> filter_floor(std::vector<Diagnostic> diags, Severity floor) {
  std::erase_if(diags, [&](const Diagnostic& d) { return d.severity < floor; });
  return diags;
}

/// One finding per line: `severity rule @index path: detail`.
inline std::string format_diagnostic(const Diagnostic& d) {
  std::string out(severity_name(d.severity));
  out += ' ';
  out += d.rule;
  out += " @";
  out += std::to_string(d.index);
  if (!d.path.empty()) {
    out += ' ';
    out += d.path;
  }
  out += ": ";
  out += d.detail;
  return out;
}

/// Tab-separated: severity, index, rule, path, detail.
inline std::string format_diagnostic_porcelain(const Diagnostic& d) {
  auto clean = [](std::string s) {
    std::replace(s.begin(), s.end(), '\t', ' ');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
  };
  return std::string(severity_name(d.severity)) + '\t' + std::to_string(d.index) + '\t' + d.rule + '\t' + d.path +
         '\t' + clean(d.detail);
}

/// The trace re-printed as `.aicl` text, each message preceded by `#` comment
/// lines carrying its findings. The result parses back to the same messages.
inline std::string annotated_report(std::span<const Message> msgs, std::span<const Diagnostic> diags) {
  std::string out;
  std::size_t d = 0;
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    while (d < diags.size() && diags[d].index < i) ++d;
    for (; d < diags.size() && diags[d].index == i; ++d) {
      out += "# ";
      std::string line = format_diagnostic(diags[d]);
      std::replace(line.begin(), line.end(), '\n', ' ');
      out += line;
      out += '\n';
    }
    out += print_message(msgs[i]);
    out += '\n';
  }
  return out;
}

}  // namespace aicl
