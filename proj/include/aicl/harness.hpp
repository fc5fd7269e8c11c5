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

// Deterministic scenario runner and fault injector.
//
// A run is a pure function of the scenario: ids come from a counter
// (u!m0, u!m1, ...), timestamps from a simulated clock that starts at the
// scenario epoch and advances one second per emitted message, and latency and
// cost annotations from a std::mt19937_64 seeded with the scenario seed.
// The scenario file grammar is described in docs/SCENARIOS.md.

#include <array>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aicl/integrity.hpp"
#include "aicl/message.hpp"
#include "aicl/text.hpp"
#include "aicl/trace.hpp"
#include "aicl/validate.hpp"

namespace aicl {

class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& what, std::optional<Diagnostic> diag = std::nullopt)
      : std::runtime_error(what), diagnostic_(std::move(diag)) {}

  const std::optional<Diagnostic>& diagnostic() const { return diagnostic_; }

 private:
  std::optional<Diagnostic> diagnostic_;
};

enum class FaultKind { Drop, Duplicate, Mutate, CrossCtxRecall, DanglingOf };

inline constexpr std::array<FaultKind, 5> kAllFaultKinds = {FaultKind::Drop, FaultKind::Duplicate, FaultKind::Mutate,
                                                            FaultKind::CrossCtxRecall, FaultKind::DanglingOf};

inline constexpr std::string_view fault_kind_name(FaultKind k) {
  switch (k) {
    case FaultKind::Drop: return "drop";
    case FaultKind::Duplicate: return "duplicate";
    case FaultKind::Mutate: return "mutate";
    case FaultKind::CrossCtxRecall: return "cross-ctx-recall";
    case FaultKind::DanglingOf: return "dangling-of";
  }
  return "?";
}

inline std::optional<FaultKind> parse_fault_kind(std::string_view s) {
  for (auto k : kAllFaultKinds) {
    if (fault_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

/// `target` is a step label, `@N` (position in the clean trace), a message id
/// such as `u!q1`, or empty for the kind's default target.
struct Fault {
  FaultKind kind = FaultKind::Drop;
  std::string target;
  std::string path;                 // Mutate
  std::optional<Value> value;       // Mutate
  std::optional<std::string> key;   // CrossCtxRecall; defaults to the target STORE's key
  std::optional<std::vector<Identifier>> ctx;  // CrossCtxRecall; defaults to a fresh scope

  friend bool operator==(const Fault&, const Fault&) = default;
};

/// Per-message settings. References (`of`, `trace`) are labels or ids.
struct StepOptions {
  std::optional<Identifier> to;
  std::optional<Identifier> id;
  std::optional<std::string> label;
  std::optional<std::string> of;
  std::optional<std::string> trace;
  std::optional<double> conf;
  std::optional<std::map<std::string, double>> priors;
  std::optional<Identifier> cid;
  std::optional<std::vector<Identifier>> ctx;
  std::optional<std::string> space;

  friend bool operator==(const StepOptions&, const StepOptions&) = default;
};

struct Step {
  Identifier agent;
  MessageType type = MessageType::Hello;
  Value content;
  StepOptions opts;

  friend bool operator==(const Step&, const Step&) = default;
};

/// Agent behaviour: on receiving `on` (optionally only calls to `call`, as
/// `ns:name`), reply with `reply` correlated to the received message. The
/// reply inherits cid, ctx and space from what it answers.
struct ReplyRule {
  MessageType on = MessageType::Query;
  std::optional<std::string> call;
  MessageType reply = MessageType::Result;
  Value content;
  StepOptions opts;

  friend bool operator==(const ReplyRule&, const ReplyRule&) = default;
};

struct AgentScript {
  Identifier agent_id;
  std::string model_version = "sim-1";
  std::vector<std::string> capabilities;
  double conf = 1.0;
  std::map<std::string, double> priors;
  std::optional<std::string> key;  // HMAC key; messages are signed when set
  std::vector<ReplyRule> rules;

  friend bool operator==(const AgentScript&, const AgentScript&) = default;
};

struct Scenario {
  std::string name;
  std::string ver = "1.0.0";
  std::uint64_t seed = 0;
  Timestamp epoch = Timestamp::from_unix(1735689600);  // 2025-01-01T00:00:00Z
  std::vector<AgentScript> agents;
  std::vector<Step> schedule;
  std::vector<Fault> faults;

  const AgentScript* find_agent(const Identifier& id) const {
    for (const auto& a : agents) {
      if (a.agent_id == id) return &a;
    }
    return nullptr;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// What the injector did, for use as a test oracle. `locus` is the target's
/// position in the clean trace; `expected_rule` is the finding the fault
/// should raise (`DIFF` for mutations, which only a diff can see) and
/// `expected_count` how many times.
struct InjectedFault {
  FaultKind kind = FaultKind::Drop;
  Identifier target;
  std::size_t locus = 0;
  std::optional<Identifier> inserted;
  std::string expected_rule;
  std::size_t expected_count = 0;

  friend bool operator==(const InjectedFault&, const InjectedFault&) = default;
};

struct RunResult {
  TraceLog trace;
  std::vector<InjectedFault> injected;
};

// ---------------------------------------------------------------------------
// Field mutation

namespace harness_detail {

inline Value set_in(const Value& v, const std::vector<PathStep>& steps, std::size_t at, const Value& nv) {
  if (at == steps.size()) return nv;
  const PathStep& s = steps[at];
  if (s.index) {
    if (!v.is_list() || *s.index >= v.as_list().size()) throw ScenarioError("mutate path: no list element " + std::to_string(*s.index));
    List xs = v.as_list();
    xs[*s.index] = set_in(xs[*s.index], steps, at + 1, nv);
    return Value(std::move(xs));
  }
  if (v.is_call()) {
    CallExpr c = v.as_call();
    auto it = c.args.find(s.key);
    c.args[s.key] = set_in(it == c.args.end() ? Value() : it->second, steps, at + 1, nv);
    return Value(std::move(c));
  }
  if (!v.is_map()) throw ScenarioError("mutate path: '" + s.key + "' is not inside a map");
  Map m = v.as_map();
  auto it = m.find(s.key);
  if (it == m.end() && at + 1 < steps.size()) throw ScenarioError("mutate path: no field '" + s.key + "'");
  m[s.key] = set_in(it == m.end() ? Value() : it->second, steps, at + 1, nv);
  return Value(std::move(m));
}

inline double need_number(const Value& v, const std::string& path) {
  auto x = v.as_number();
  if (!x) throw ScenarioError("mutate " + path + ": expected a number");
  return *x;
}

inline const std::string& need_text(const Value& v, const std::string& path) {
  if (!v.is_text()) throw ScenarioError("mutate " + path + ": expected text");
  return v.as_text();
}

inline const Identifier& need_ident(const Value& v, const std::string& path) {
  if (!v.is_ident()) throw ScenarioError("mutate " + path + ": expected an identifier");
  return v.as_ident();
}

inline std::int64_t need_int(const Value& v, const std::string& path) {
  if (!v.is_int()) throw ScenarioError("mutate " + path + ": expected an integer");
  return v.as_int();
}

}  // namespace harness_detail

/// Replaces the field at `path` (content.* or meta.<field>[.<key>]) with `v`.
inline void set_field(Message& m, const std::string& path, const Value& v) {
  using namespace harness_detail;
  std::vector<PathStep> steps;
  try {
    validate_field_path(path);
    steps = split_path(path);
  } catch (const std::invalid_argument& e) {
    throw ScenarioError(e.what());
  }
  if (steps[0].key == "content") {
    m.content = set_in(m.content, steps, 1, v);
    return;
  }
  if (steps[0].key != "meta") throw ScenarioError("mutate " + path + ": only content and meta fields can be mutated");
  const std::string& f = steps[1].key;
  bool leaf = steps.size() == 2;
  auto sub_key = [&]() -> const std::string& {
    if (steps.size() != 3 || steps[2].index) throw ScenarioError("mutate " + path + ": expected meta." + f + ".<key>");
    return steps[2].key;
  };
  auto Meta = [&]() -> Metadata& { return m.meta; };
  if (f == "id" && leaf) {
    Meta().id = need_ident(v, path);
  } else if (f == "ts" && leaf) {
    if (!v.is_time()) throw ScenarioError("mutate " + path + ": expected a timestamp");
    Meta().ts = v.as_time();
  } else if (f == "ver" && leaf) {
    Meta().ver = need_text(v, path);
  } else if (f == "cid" && leaf) {
    Meta().cid = need_ident(v, path);
  } else if (f == "model_version" && leaf) {
    Meta().model_version = need_text(v, path);
  } else if (f == "space" && leaf) {
    Meta().space = need_text(v, path);
  } else if (f == "conf" && leaf) {
    Meta().conf = need_number(v, path);
  } else if (f == "latency" && leaf) {
    Meta().latency = need_int(v, path);
  } else if (f == "of" && leaf) {
    Meta().of = need_ident(v, path);
  } else if (f == "reasoning_trace" && leaf) {
    Meta().reasoning_trace = need_ident(v, path);
  } else if (f == "ctx" && leaf) {
    if (!v.is_list()) throw ScenarioError("mutate " + path + ": expected a list of identifiers");
    std::vector<Identifier> ids;
    for (const auto& x : v.as_list()) ids.push_back(need_ident(x, path));
    Meta().ctx = std::move(ids);
  } else if (f == "priors" && !leaf) {
    if (!Meta().priors) Meta().priors.emplace();
    (*Meta().priors)[sub_key()] = need_number(v, path);
  } else if (f == "cost" && !leaf) {
    if (!Meta().cost) Meta().cost.emplace();
    (*Meta().cost)[sub_key()] = need_int(v, path);
  } else {
    throw ScenarioError("mutate " + path + ": unsupported metadata path");
  }
}

// ---------------------------------------------------------------------------
// Runner

namespace harness_detail {

inline constexpr int kMaxReplyDepth = 16;

class Runner {
 public:
  explicit Runner(const Scenario& s) : s_(s), rng_(s.seed) {}

  std::vector<Message> run() {
    for (const auto& step : s_.schedule) {
      const AgentScript& from = agent(step.agent);
      std::optional<Identifier> of;
      if (step.opts.of) of = resolve(*step.opts.of);
      Message m = emit(from, step.type, step.content, step.opts, of, nullptr);
      if (step.opts.to) deliver(m, from, *step.opts.to, 0);
    }
    return std::move(out_);
  }

  const std::map<std::string, Identifier>& labels() const { return labels_; }

 private:
  const AgentScript& agent(const Identifier& id) const {
    const AgentScript* a = s_.find_agent(id);
    if (a == nullptr) throw ScenarioError("undeclared agent " + id.str());
    return *a;
  }

  Identifier resolve(const std::string& ref) const {
    if (ref.find('!') != std::string::npos) {
      auto id = Identifier::parse(ref);
      if (!id) throw ScenarioError("bad identifier reference '" + ref + "'");
      return *id;
    }
    auto it = labels_.find(ref);
    if (it == labels_.end()) throw ScenarioError("unknown step label '" + ref + "'");
    return it->second;
  }

  Message emit(const AgentScript& a, MessageType type, const Value& content, const StepOptions& o,
               std::optional<Identifier> of, const Message* trigger) {
    Message m;
    m.type = type;
    m.content = content;
    Metadata& meta = m.meta;
    meta.id = o.id ? *o.id : Identifier{"u", "m" + std::to_string(minted_++)};
    meta.ts = s_.epoch.plus_seconds(static_cast<std::int64_t>(out_.size()));
    meta.ver = s_.ver;
    meta.cid = o.cid ? o.cid : (trigger ? trigger->meta.cid : std::nullopt);
    meta.ctx = o.ctx ? o.ctx : (trigger ? trigger->meta.ctx : std::nullopt);
    meta.model_version = a.model_version;
    meta.conf = o.conf.value_or(a.conf);
    meta.priors = o.priors ? *o.priors : a.priors;
    meta.space = o.space ? o.space : (trigger ? trigger->meta.space : std::nullopt);
    meta.of = of;
    if (o.trace) meta.reasoning_trace = resolve(*o.trace);
    meta.latency = static_cast<std::int64_t>(5 + rng_() % 496);
    if (m.message_class() == MessageClass::Response) {
      meta.cost = std::map<std::string, std::int64_t>{{"tokens", static_cast<std::int64_t>(10 + rng_() % 1991)}};
    }
    if (type == MessageType::Hello && !a.capabilities.empty()) meta.cap = a.capabilities;
    if (a.key) m = sign_message(std::move(m), key_bytes(*a.key));

    for (const auto& d : validate_message(m, out_.size())) {
      if (d.severity == Severity::Error) {
        throw ScenarioError("agent " + a.agent_id.str() + " emitted an invalid " + std::string(type_name(type)) + ": " +
                                d.rule + " " + d.detail,
                            d);
      }
    }
    if (o.label) labels_[*o.label] = m.meta.id;
    out_.push_back(m);
    return m;
  }

  void deliver(const Message& m, const AgentScript& from, const Identifier& to, int depth) {
    const AgentScript& receiver = agent(to);
    if (depth > kMaxReplyDepth) throw ScenarioError("reply chain deeper than " + std::to_string(kMaxReplyDepth));
    for (const auto& rule : receiver.rules) {
      if (rule.on != m.type) continue;
      if (rule.call) {
        if (!m.content.is_call()) continue;
        const auto& c = m.content.as_call();
        if (c.ns + ":" + c.name != *rule.call) continue;
      }
      Message reply = emit(receiver, rule.reply, rule.content, rule.opts, m.meta.id, &m);
      deliver(reply, receiver, from.agent_id, depth + 1);
      return;
    }
  }

  const Scenario& s_;
  std::mt19937_64 rng_;
  std::uint64_t minted_ = 0;
  std::vector<Message> out_;
  std::map<std::string, Identifier> labels_;
};

inline std::optional<std::size_t> index_of(const std::vector<Message>& msgs, const Identifier& id) {
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    if (msgs[i].meta.id == id) return i;
  }
  return std::nullopt;
}

template <typename Pred>
std::optional<std::size_t> first_where(const std::vector<Message>& msgs, Pred p) {
  for (std::size_t i = 0; i < msgs.size(); ++i) {
    if (p(msgs[i])) return i;
  }
  return std::nullopt;
}

template <typename Pred>
std::optional<std::size_t> last_where(const std::vector<Message>& msgs, Pred p) {
  for (std::size_t i = msgs.size(); i-- > 0;) {
    if (p(msgs[i])) return i;
  }
  return std::nullopt;
}

inline std::size_t resolve_target(const Fault& f, const std::vector<Message>& clean,
                                  const std::map<std::string, Identifier>& labels) {
  std::optional<std::size_t> idx;
  auto is_response = [](const Message& m) { return m.message_class() == MessageClass::Response; };
  if (f.target.empty()) {
    switch (f.kind) {
      case FaultKind::Drop:
      case FaultKind::Mutate:
      case FaultKind::DanglingOf: idx = last_where(clean, is_response); break;
      case FaultKind::Duplicate:
        idx = first_where(clean, [](const Message& m) { return m.message_class() == MessageClass::Request; });
        break;
      case FaultKind::CrossCtxRecall:
        idx = first_where(clean, [](const Message& m) { return m.type == MessageType::MemoryStore; });
        break;
    }
  } else if (f.target[0] == '@') {
    std::size_t n = 0;
    auto digits = std::string_view(f.target).substr(1);
    auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc{} && p == digits.data() + digits.size() && !digits.empty() && n < clean.size()) idx = n;
  } else if (f.target.find('!') != std::string::npos) {
    if (auto id = Identifier::parse(f.target)) idx = index_of(clean, *id);
  } else if (auto it = labels.find(f.target); it != labels.end()) {
    idx = index_of(clean, it->second);
  }
  if (!idx) {
    throw ScenarioError(std::string(fault_kind_name(f.kind)) + " fault target '" +
                        (f.target.empty() ? std::string("(default)") : f.target) + "' does not resolve");
  }
  if (f.kind == FaultKind::CrossCtxRecall && clean[*idx].type != MessageType::MemoryStore) {
    throw ScenarioError("cross-ctx-recall must target a MEMORY.STORE");
  }
  if (f.kind == FaultKind::Mutate && (f.path.empty() || !f.value)) {
    throw ScenarioError("mutate fault needs a path and a value");
  }
  return *idx;
}

inline std::vector<InjectedFault> apply_faults(std::vector<Message>& msgs, const std::vector<Fault>& faults,
                                               const std::map<std::string, Identifier>& labels) {
  const std::vector<Message> clean = msgs;
  std::vector<InjectedFault> record;
  std::size_t recalls = 0;
  std::size_t danglings = 0;
  for (const auto& f : faults) {
    std::size_t locus = resolve_target(f, clean, labels);
    const Message& target = clean[locus];
    InjectedFault rec{f.kind, target.meta.id, locus, std::nullopt, "", 0};
    auto at = index_of(msgs, target.meta.id);
    if (!at) throw ScenarioError(std::string(fault_kind_name(f.kind)) + " target " + target.meta.id.str() + " was already dropped");
    auto pos = static_cast<std::ptrdiff_t>(*at);
    switch (f.kind) {
      case FaultKind::Drop: {
        msgs.erase(msgs.begin() + pos);
        if (target.message_class() == MessageClass::Response) {
          rec.expected_rule = "REQ.PENDING";
          rec.expected_count = 1;
        } else {
          std::size_t refs = 0;
          for (const auto& m : msgs) refs += m.meta.of == target.meta.id ? 1 : 0;
          rec.expected_rule = refs > 0 ? "OF.DANGLING" : "";
          rec.expected_count = refs;
        }
        break;
      }
      case FaultKind::Duplicate:
        msgs.insert(msgs.begin() + pos + 1, msgs[*at]);
        rec.expected_rule = "ID.DUP";
        rec.expected_count = 1;
        break;
      case FaultKind::Mutate:
        set_field(msgs[*at], f.path, *f.value);
        rec.expected_rule = "DIFF";
        rec.expected_count = 1;
        break;
      case FaultKind::CrossCtxRecall: {
        Message recall = msgs[*at];
        recall.type = MessageType::MemoryRecall;
        std::string key = f.key ? *f.key : [&] {
          const Value* k = target.content.find("key");
          if (k == nullptr || !k->is_text()) throw ScenarioError("cross-ctx-recall target has no text key");
          return k->as_text();
        }();
        recall.content = Value(Map{{"key", Value(key)}});
        recall.meta.id = Identifier{"u", "f" + std::to_string(recalls)};
        recall.meta.ctx = f.ctx ? *f.ctx : std::vector<Identifier>{Identifier{"u", "isolated" + std::to_string(recalls)}};
        recall.meta.of.reset();
        recall.meta.reasoning_trace.reset();
        recall.meta.cost.reset();
        recall.meta.sig.reset();
        ++recalls;
        rec.inserted = recall.meta.id;
        msgs.insert(msgs.begin() + pos + 1, std::move(recall));
        rec.expected_rule = "MEM.ISOLATION";
        rec.expected_count = 1;
        break;
      }
      case FaultKind::DanglingOf:
        msgs[*at].meta.of = Identifier{"u", "dangling" + std::to_string(danglings++)};
        rec.expected_rule = "OF.DANGLING";
        rec.expected_count = 1;
        break;
    }
    record.push_back(std::move(rec));
  }
  return record;
}

}  // namespace harness_detail

/// Runs the script, applies the scenario's faults, and reports what was injected.
inline RunResult run_scenario_recorded(const Scenario& s) {
  harness_detail::Runner runner(s);
  std::vector<Message> msgs = runner.run();
  auto injected = harness_detail::apply_faults(msgs, s.faults, runner.labels());
  return RunResult{TraceLog::from_messages(std::move(msgs)), std::move(injected)};
}

inline TraceLog run_scenario(const Scenario& s) { return run_scenario_recorded(s).trace; }

/// Adds faults to a scenario. Targets are resolved against a dry run, so an
/// unresolvable target throws ScenarioError here rather than at run time.
inline Scenario inject_faults(Scenario s, const std::vector<Fault>& faults) {
  s.faults.insert(s.faults.end(), faults.begin(), faults.end());
  (void)run_scenario_recorded(s);
  return s;
}

// ---------------------------------------------------------------------------
// Scenario files

namespace harness_detail {

class ScenarioParser {
 public:
  explicit ScenarioParser(std::string_view text) : r_(text) {}

  Scenario parse() {
    Scenario s;
    bool named = false;
    while (true) {
      r_.skip_ws_and_comments();
      if (r_.at_end()) break;
      std::string word = r_.read_word("directive");
      r_.skip_ws();
      if (word == "scenario") {
        s.name = r_.read_word("scenario name");
        named = true;
      } else if (word == "ver") {
        s.ver = r_.read_string();
      } else if (word == "seed") {
        Value v = r_.read_number();
        if (!v.is_int() || v.as_int() < 0) r_.fail("non-negative integer seed");
        s.seed = static_cast<std::uint64_t>(v.as_int());
      } else if (word == "epoch") {
        s.epoch = r_.read_timestamp();
      } else if (word == "conversation") {
        cid_ = r_.read_identifier();
        ctx_ = std::vector<Identifier>{*cid_};
        space_.reset();
        while (true) {
          r_.skip_ws();
          if (keyword("ctx")) {
            ctx_ = ident_list();
          } else if (keyword("space")) {
            space_ = r_.read_string();
          } else {
            break;
          }
        }
      } else if (word == "agent") {
        s.agents.push_back(agent());
      } else if (word == "on") {
        Identifier who = r_.read_identifier();
        AgentScript* a = nullptr;
        for (auto& x : s.agents) {
          if (x.agent_id == who) a = &x;
        }
        if (a == nullptr) r_.fail("agent declared before its 'on' rules");
        a->rules.push_back(rule());
      } else if (word == "step") {
        s.schedule.push_back(step(s));
      } else if (word == "fault") {
        s.faults.push_back(parse_fault_body(r_));
      } else {
        r_.fail("directive (scenario, ver, seed, epoch, conversation, agent, on, step, fault)");
      }
    }
    if (!named) throw ParseError(1, 1, "'scenario <name>' directive", "none");
    return s;
  }

  static Fault parse_fault_body(text::Reader& r) {
    Fault f;
    r.skip_ws();
    std::string kind;
    while (!r.at_end() && (std::isalpha(static_cast<unsigned char>(r.peek())) || r.peek() == '-')) {
      kind += r.peek();
      r.consume(r.peek());
    }
    auto k = parse_fault_kind(kind);
    if (!k) r.fail("fault kind (drop, duplicate, mutate, cross-ctx-recall, dangling-of)");
    f.kind = *k;
    while (true) {
      r.skip_ws();
      if (clause(r, "at")) {
        if (r.consume('@')) {
          Value n = r.read_number();
          if (!n.is_int() || n.as_int() < 0) r.fail("message position after '@'");
          f.target = "@" + std::to_string(n.as_int());
        } else {
          f.target = reference(r);
        }
      } else if (clause(r, "path")) {
        f.path = r.read_path();
        try {
          validate_field_path(f.path);
        } catch (const std::invalid_argument&) {
          r.fail("field path naming content or a metadata field");
        }
      } else if (clause(r, "value")) {
        f.value = r.read_value();
      } else if (clause(r, "key")) {
        f.key = r.read_string();
      } else if (clause(r, "ctx")) {
        f.ctx = ident_list(r);
      } else {
        break;
      }
    }
    return f;
  }

 private:
  static bool clause(text::Reader& r, std::string_view word) {
    if (!r.peek_keyword(word)) return false;
    r.read_word();
    r.skip_ws();
    return true;
  }

  bool keyword(std::string_view word) { return clause(r_, word); }

  static std::vector<Identifier> ident_list(text::Reader& r) {
    Value v = r.read_value();
    std::vector<Identifier> out;
    if (!v.is_list()) r.fail("list of identifiers");
    for (const auto& x : v.as_list()) {
      if (!x.is_ident()) r.fail("list of identifiers");
      out.push_back(x.as_ident());
    }
    return out;
  }
  std::vector<Identifier> ident_list() { return ident_list(r_); }

  // A label (bare word) or an identifier.
  static std::string reference(text::Reader& r) {
    std::string word = r.read_word("label or identifier");
    if (r.peek() == '!') {
      r.consume('!');
      std::string local;
      while (!r.at_end() && (std::isalnum(static_cast<unsigned char>(r.peek())) || r.peek() == '_' || r.peek() == '-')) {
        local += r.peek();
        r.consume(r.peek());
      }
      if (local.empty()) r.fail("identifier local part");
      return word + "!" + local;
    }
    return word;
  }

  double number() {
    Value v = r_.read_number();
    return *v.as_number();
  }

  std::map<std::string, double> priors() {
    Map m = r_.read_map_body(0);
    std::map<std::string, double> out;
    for (const auto& [k, v] : m) {
      auto x = v.as_number();
      if (!x) r_.fail("numeric priors");
      out.emplace(k, *x);
    }
    return out;
  }

  AgentScript agent() {
    AgentScript a;
    a.agent_id = r_.read_identifier();
    while (true) {
      r_.skip_ws();
      if (keyword("model")) {
        a.model_version = r_.read_string();
      } else if (keyword("caps")) {
        Value v = r_.read_value();
        if (!v.is_list()) r_.fail("list of capability strings");
        for (const auto& x : v.as_list()) {
          if (!x.is_text()) r_.fail("list of capability strings");
          a.capabilities.push_back(x.as_text());
        }
      } else if (keyword("conf")) {
        a.conf = number();
      } else if (keyword("priors")) {
        a.priors = priors();
      } else if (keyword("key")) {
        a.key = r_.read_string();
      } else {
        break;
      }
    }
    return a;
  }

  void options(StepOptions& o) {
    while (true) {
      r_.skip_ws();
      if (keyword("to")) {
        o.to = r_.read_identifier();
      } else if (keyword("id")) {
        o.id = r_.read_identifier();
      } else if (keyword("as")) {
        o.label = r_.read_word("label");
      } else if (keyword("of")) {
        o.of = reference(r_);
      } else if (keyword("trace")) {
        o.trace = reference(r_);
      } else if (keyword("conf")) {
        o.conf = number();
      } else if (keyword("priors")) {
        o.priors = priors();
      } else if (keyword("cid")) {
        o.cid = r_.read_identifier();
      } else if (keyword("ctx")) {
        o.ctx = ident_list();
      } else if (keyword("space")) {
        o.space = r_.read_string();
      } else {
        break;
      }
    }
  }

  ReplyRule rule() {
    ReplyRule rule;
    r_.skip_ws();
    rule.on = r_.read_type();
    r_.skip_ws();
    if (keyword("call")) {
      std::string ns = r_.read_word("call namespace");
      r_.expect(':', "':' in call name");
      rule.call = ns + ":" + r_.read_word("call name");
      r_.skip_ws();
    }
    if (!keyword("reply")) r_.fail("'reply'");
    rule.reply = r_.read_type();
    r_.skip_ws();
    rule.content = r_.read_value();
    options(rule.opts);
    return rule;
  }

  Step step(const Scenario& s) {
    Step st;
    st.agent = r_.read_identifier();
    if (s.find_agent(st.agent) == nullptr) r_.fail("declared agent");
    r_.skip_ws();
    st.type = r_.read_type();
    r_.skip_ws();
    st.content = r_.read_value();
    options(st.opts);
    if (!st.opts.cid) st.opts.cid = cid_;
    if (!st.opts.ctx) st.opts.ctx = ctx_;
    if (!st.opts.space) st.opts.space = space_;
    return st;
  }

  text::Reader r_;
  std::optional<Identifier> cid_;
  std::optional<std::vector<Identifier>> ctx_;
  std::optional<std::string> space_;
};

}  // namespace harness_detail

/// Throws ParseError on malformed scenario text.
inline Scenario parse_scenario(std::string_view text) { return harness_detail::ScenarioParser(text).parse(); }

/// One fault in the scenario `fault` syntax without the keyword, e.g.
/// `mutate at r path content.data.temp_c value 30`. Throws ParseError.
inline Fault parse_fault(std::string_view spec) {
  text::Reader r(spec);
  Fault f = harness_detail::ScenarioParser::parse_fault_body(r);
  r.skip_ws();
  if (!r.at_end()) r.fail("end of fault specification");
  return f;
}

// ---------------------------------------------------------------------------
// Builtin scenarios

namespace builtin_text {

inline constexpr std::string_view kWeather = R"(# Query/Result exchange, completed with the required metadata.
scenario weather
ver "1.2.0"
seed 42
epoch t(2025-08-15T01:59:58Z)
conversation u!conv123 ctx [u!conv123] space "weather"
agent u!client model "gpt-5-20250801" caps ["tool:weather_now"]
agent u!weather model "gpt-5-20250801" caps ["tool:weather_now"] conf 0.93
on u!weather QUERY call tool:weather_now reply RESULT {data:{temp_c:29, cond:"rain"}, schema:"tool:weather_now/1"} id u!r1 as r
step u!client HELLO {agent:u!client, capabilities:["tool:weather_now"], version:"1.2.0"}
step u!weather HELLO {agent:u!weather, capabilities:["tool:weather_now"], version:"1.2.0"}
step u!client QUERY tool:weather_now{location:"Shanghai"} to u!weather id u!q1 as q
)";

inline constexpr std::string_view kDelegation = R"(# A request handed to a specialist through COORD.DELEGATE.
scenario delegation
ver "1.2.0"
seed 7
epoch t(2025-08-15T03:00:00Z)
conversation u!trip1 ctx [u!trip1] space "travel"
agent u!planner model "planner-2025-07"
agent u!coordinator model "coord-2025-07" caps ["delegate"]
agent u!flights model "flights-2025-06" caps ["tool:flight_search"]
step u!planner QUERY tool:book_trip{city:"Shanghai", nights:3} as q
step u!coordinator COORD.DELEGATE {task:tool:flight_search{to:"PVG"}, delegate:u!flights} of q as d
step u!coordinator QUERY tool:flight_search{to:"PVG"} of d as inner
step u!flights RESULT {data:{flight:"MU588", price_usd:412}, schema:"tool:flight_search/1"} of inner conf 0.88
step u!coordinator RESULT {data:{booked:true, flight:"MU588"}, schema:"tool:book_trip/1"} of q conf 0.9
)";

inline constexpr std::string_view kReasoning = R"(# A reasoning trace that backs a result.
scenario reasoning
ver "1.2.0"
seed 11
epoch t(2025-08-15T04:00:00Z)
conversation u!math1 ctx [u!math1] space "arithmetic"
agent u!student model "gpt-5-20250801"
agent u!solver model "reasoner-2025-06" caps ["reasoning"] conf 0.97
step u!student HELLO {agent:u!student, capabilities:[], version:"1.2.0"}
step u!solver HELLO {agent:u!solver, capabilities:["reasoning"], version:"1.2.0"}
step u!student QUERY math:solve{problem:"17 * 23"} as q
step u!solver REASONING.START {goal:"multiply 17 by 23"} of q as s
step u!solver REASONING.STEP {note:"17 * 20 = 340"} of s
step u!solver REASONING.STEP {note:"17 * 3 = 51"} of s
step u!solver REASONING.STEP {note:"340 + 51 = 391"} of s
step u!solver REASONING.COMPLETE {answer:391} of s
step u!solver RESULT {data:{value:391}, schema:"math:solve/1"} of q trace s
)";

inline constexpr std::string_view kMemory = R"(# The same key stored and recalled in two isolated scopes.
scenario memory
ver "1.2.0"
seed 5
epoch t(2025-08-15T05:00:00Z)
agent u!assistant model "gpt-5-20250801" caps ["memory"]
conversation u!convA ctx [u!convA] space "profile"
step u!assistant HELLO {agent:u!assistant, capabilities:["memory"], version:"1.2.0"}
step u!assistant MEMORY.STORE {key:"favorite_city", value:"Shanghai", scope:"session"} as storeA
step u!assistant MEMORY.RECALL {key:"favorite_city"}
conversation u!convB ctx [u!convB] space "profile"
step u!assistant HELLO {agent:u!assistant, capabilities:["memory"], version:"1.2.0"}
step u!assistant MEMORY.STORE {key:"favorite_city", value:"Lisbon", scope:"session"} as storeB
step u!assistant MEMORY.RECALL {key:"favorite_city"}
)";

inline constexpr std::string_view kFacts = R"(# Signed assertions with confidence annotations and declared priors.
scenario facts
ver "1.2.0"
seed 3
epoch t(2025-08-15T06:00:00Z)
conversation u!obs1 ctx [u!obs1, u!city_shanghai] space "environment"
agent u!observer model "sensor-fusion-3" caps ["sensor:humidity", "sensor:calendar"] priors {rain:0.6} key "observer-demo-key"
step u!observer HELLO {agent:u!observer, capabilities:["sensor:humidity", "sensor:calendar"], version:"1.2.0"}
step u!observer FACT {subject:"Shanghai", predicate:"humidity_pct", object:84, conf:0.9} conf 0.9
step u!observer FACTS [{subject:"Shanghai", predicate:"season", object:"summer", conf:0.99}, {subject:"Shanghai", predicate:"typhoon_warning", object:false, conf:0.7}] priors {rain:0.6, typhoon:0.2} conf 0.8
)";

inline constexpr std::string_view kErrors = R"(# A failed tool call and the plan that recovers from it.
scenario errors
ver "1.2.0"
seed 9
epoch t(2025-08-15T07:00:00Z)
conversation u!quote1 ctx [u!quote1] space "finance"
agent u!client model "gpt-5-20250801"
agent u!quotes model "quotes-gw-4" caps ["tool:stock_price"] conf 0.8
on u!quotes QUERY call tool:stock_price reply ERROR {code:"E_UPSTREAM_TIMEOUT", context:{upstream:"quotes-api", timeout_ms:3000}, recovery_hint:"retry with backoff"}
step u!client HELLO {agent:u!client, capabilities:[], version:"1.2.0"}
step u!quotes HELLO {agent:u!quotes, capabilities:["tool:stock_price"], version:"1.2.0"}
step u!client QUERY tool:stock_price{symbol:"ACME"} to u!quotes
step u!client PLAN [{step_id:"fetch", action:tool:stock_price{symbol:"ACME"}, depends_on:[]}, {step_id:"report", action:"summarize", depends_on:["fetch"]}] as p
step u!quotes RESULT {data:{status:"scheduled", steps:2}, schema:"plan/1"} of p
)";

}  // namespace builtin_text

struct BuiltinScenario {
  std::string_view name;
  std::string_view text;
};

inline constexpr std::array<BuiltinScenario, 6> kBuiltinScenarios = {{
    {"weather", builtin_text::kWeather},
    {"delegation", builtin_text::kDelegation},
    {"reasoning", builtin_text::kReasoning},
    {"memory", builtin_text::kMemory},
    {"facts", builtin_text::kFacts},
    {"errors", builtin_text::kErrors},
}};

inline std::vector<Scenario> builtin_scenarios() {
  std::vector<Scenario> out;
  for (const auto& b : kBuiltinScenarios) out.push_back(parse_scenario(b.text));
  return out;
}

inline std::optional<Scenario> find_builtin(std::string_view name) {
  for (const auto& b : kBuiltinScenarios) {
    if (b.name == name) return parse_scenario(b.text);
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Random scenarios

/// A clean scenario of at least `min_messages` messages built from
/// well-formed interaction blocks spread over one to three conversations.
/// Its trace has no findings at Warning or above.
inline Scenario random_scenario(std::uint64_t seed, std::size_t min_messages = 12) {
  std::mt19937_64 rng(seed ^ 0x5c3a9e1d2b4f6a87ull);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  auto chance = [&](int percent) { return static_cast<int>(rng() % 100) < percent; };
  static constexpr std::string_view kCities[] = {"Shanghai", "Lisbon", "Nairobi", "Quito", "Oslo", "Hanoi"};
  static constexpr std::string_view kConds[] = {"rain", "sun", "fog", "snow", "storm"};

  Scenario s;
  s.name = "random" + std::to_string(seed);
  s.ver = "1." + std::to_string(pick(4)) + "." + std::to_string(pick(10));
  s.seed = seed;
  s.epoch = Timestamp::from_unix(1735689600 + static_cast<std::int64_t>(pick(86400 * 365)));

  std::size_t n_agents = 2 + pick(3);
  for (std::size_t a = 0; a < n_agents; ++a) {
    AgentScript ag;
    ag.agent_id = Identifier{"u", "agent" + std::to_string(a)};
    ag.model_version = "model-" + std::to_string(pick(5));
    if (chance(60)) ag.capabilities = {"tool:weather_now", "memory"};
    ag.conf = static_cast<double>(50 + pick(51)) / 100.0;
    if (chance(50)) ag.priors = {{"p" + std::to_string(pick(3)), static_cast<double>(pick(101)) / 100.0}};
    if (chance(30)) ag.key = "key-" + std::to_string(a);
    s.agents.push_back(std::move(ag));
  }

  struct Conv {
    Identifier cid;
    std::vector<Identifier> ctx;
    std::string space;
  };
  std::vector<Conv> convs;
  std::size_t n_convs = 1 + pick(3);
  for (std::size_t c = 0; c < n_convs; ++c) {
    Identifier cid{"u", "c" + std::to_string(seed % 1000) + "_" + std::to_string(c)};
    std::vector<Identifier> ctx{cid};
    if (chance(30)) ctx.push_back(Identifier{"u", "shared" + std::to_string(c)});
    convs.push_back(Conv{cid, ctx, c % 2 == 0 ? "weather" : "ops"});
  }

  std::size_t label_n = 0;
  auto label = [&]() { return "l" + std::to_string(label_n++); };
  auto agent_id = [&]() { return s.agents[pick(s.agents.size())].agent_id; };
  auto add = [&](const Conv& c, Identifier who, MessageType t, Value content, StepOptions o = {}) {
    o.cid = c.cid;
    o.ctx = c.ctx;
    o.space = c.space;
    s.schedule.push_back(Step{std::move(who), t, std::move(content), std::move(o)});
  };
  auto with = [](std::optional<std::string> lbl, std::optional<std::string> of = std::nullopt) {
    StepOptions o;
    o.label = std::move(lbl);
    o.of = std::move(of);
    return o;
  };
  auto weather_call = [&]() {
    return Value(CallExpr{"tool", "weather_now", Map{{"location", Value(std::string(kCities[pick(6)]))}}});
  };
  auto result_body = [&]() {
    return Value(Map{{"data", Value(Map{{"temp_c", Value(static_cast<std::int64_t>(pick(45)) - 5)},
                                        {"cond", Value(std::string(kConds[pick(5)]))}})},
                     {"schema", Value("tool:weather_now/1")}});
  };

  for (const auto& c : convs) {
    Identifier who = agent_id();
    add(c, who, MessageType::Hello, Value(Map{{"agent", Value(who)}, {"capabilities", Value(List{})}, {"version", Value(s.ver)}}));
  }

  std::size_t key_n = 0;
  while (s.schedule.size() < min_messages) {
    const Conv& c = convs[pick(convs.size())];
    switch (pick(7)) {
      case 0: {  // query -> result
        std::string q = label();
        add(c, agent_id(), MessageType::Query, weather_call(), with(q));
        add(c, agent_id(), MessageType::Result, result_body(), with(std::nullopt, q));
        break;
      }
      case 1: {  // query -> error
        std::string q = label();
        add(c, agent_id(), MessageType::Query, weather_call(), with(q));
        add(c, agent_id(), MessageType::Error,
            Value(Map{{"code", Value("E_TIMEOUT")}, {"recovery_hint", Value("retry")}}), with(std::nullopt, q));
        break;
      }
      case 2: {  // plan -> result
        std::string p = label();
        List steps;
        std::size_t n = 1 + pick(3);
        for (std::size_t k = 0; k < n; ++k) {
          List deps;
          if (k > 0 && chance(70)) deps.push_back(Value("s" + std::to_string(pick(k))));
          steps.push_back(Value(Map{{"step_id", Value("s" + std::to_string(k))}, {"action", weather_call()}, {"depends_on", Value(deps)}}));
        }
        add(c, agent_id(), MessageType::Plan, Value(std::move(steps)), with(p));
        add(c, agent_id(), MessageType::Result, result_body(), with(std::nullopt, p));
        break;
      }
      case 3: {  // store -> recall
        std::string key = "k" + std::to_string(key_n++);
        Identifier who = agent_id();
        add(c, who, MessageType::MemoryStore,
            Value(Map{{"key", Value(key)}, {"value", Value(static_cast<std::int64_t>(pick(1000)))}, {"scope", Value("session")}}),
            with(label()));
        if (chance(80)) add(c, who, MessageType::MemoryRecall, Value(Map{{"key", Value(key)}}));
        break;
      }
      case 4: {  // facts
        if (chance(50)) {
          add(c, agent_id(), MessageType::Fact,
              Value(Map{{"subject", Value(std::string(kCities[pick(6)]))}, {"conf", Value(static_cast<double>(pick(101)) / 100.0)}}));
        } else {
          List xs;
          for (std::size_t k = 0, n = 1 + pick(3); k < n; ++k) {
            xs.push_back(Value(Map{{"subject", Value(std::string(kCities[pick(6)]))}, {"rank", Value(static_cast<std::int64_t>(k))}}));
          }
          add(c, agent_id(), MessageType::Facts, Value(std::move(xs)));
        }
        break;
      }
      case 5: {  // reasoning
        std::string q = label();
        std::string st = label();
        Identifier solver = agent_id();
        add(c, agent_id(), MessageType::Query, weather_call(), with(q));
        add(c, solver, MessageType::ReasoningStart, Value(Map{{"goal", Value("forecast")}}), with(st, q));
        for (std::size_t k = 0, n = pick(4); k < n; ++k) {
          add(c, solver, MessageType::ReasoningStep, Value(Map{{"note", Value("step " + std::to_string(k))}}), with(std::nullopt, st));
        }
        add(c, solver, MessageType::ReasoningComplete, Value(Map{{"ok", Value(true)}}), with(std::nullopt, st));
        StepOptions o = with(std::nullopt, q);
        o.trace = st;
        add(c, solver, MessageType::Result, result_body(), o);
        break;
      }
      default: {  // delegation
        std::string q = label();
        std::string d = label();
        std::string inner = label();
        Identifier delegate = agent_id();
        add(c, agent_id(), MessageType::Query, weather_call(), with(q));
        add(c, agent_id(), MessageType::CoordDelegate, Value(Map{{"task", weather_call()}, {"delegate", Value(delegate)}}), with(d, q));
        add(c, agent_id(), MessageType::Query, weather_call(), with(inner, d));
        add(c, delegate, MessageType::Result, result_body(), with(std::nullopt, inner));
        add(c, agent_id(), MessageType::Result, result_body(), with(std::nullopt, q));
        break;
      }
    }
  }
  return s;
}

}  // namespace aicl
