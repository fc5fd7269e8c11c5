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


// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Budgets and corpus sizes are fixed here on purpose.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "aicl/aicl.hpp"
#include "aicl/cli.hpp"
#include "support/fault_observation.hpp"
#include "support/frozen_vectors.hpp"
#include "support/generators.hpp"
#include "support/mutations.hpp"

namespace {

using namespace aicl;
using Clock = std::chrono::steady_clock;

constexpr double kAc1BudgetSeconds = 1.0;
constexpr double kAc2BudgetSeconds = 60.0;
constexpr int kAc2Messages = 10000;
constexpr int kAc3Mutations = 1000;
constexpr int kAc5CleanScenarios = 1000;

struct Verdict {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (notes.size() < 5) notes.push_back(what);
    }
  }
};

Bytes hex(std::string_view s) { return text::from_hex(s).value(); }

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt_seconds(double s) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3fs", s);
  return buf;
}

// ---------------------------------------------------------------------------

Verdict ac1(std::string& summary) {
  Verdict v;
  auto t0 = Clock::now();
  const std::string file = std::string(AICL_TEST_DATA) + "/weather_pair.aicl";
  TraceLog log = load_trace_file(file);
  v.require(log.size() == 2, "expected two messages");
  if (log.size() != 2) return v;
  const Message& q = log[0].msg;
  const Message& r = log[1].msg;
  const Value* loc = q.content.is_call() ? &q.content.as_call().args.at("location") : nullptr;
  v.require(loc && *loc == Value("Shanghai"), "location");
  const Value* data = r.content.find("data");
  v.require(data && data->find("temp_c") && *data->find("temp_c") == Value(29), "temp_c");
  v.require(data && data->find("cond") && *data->find("cond") == Value("rain"), "cond");
  v.require(r.content.find("schema") && *r.content.find("schema") == Value("tool:weather_now/1"), "schema");
  v.require(r.meta.conf == 0.93, "conf");
  v.require(r.meta.of == Identifier::make("u", "q1"), "of");
  v.require(r.meta.ver == "1.2.0" && q.meta.ver == "1.2.0", "ver");
  v.require(r.meta.model_version == "gpt-5-20250801", "model_version");

  auto msgs = log.messages();
  auto g = build_correlation_graph(msgs);
  bool graph_ok = std::holds_alternative<CorrelationGraph>(g) && std::get<CorrelationGraph>(g).nodes.size() == 2 &&
                  std::get<CorrelationGraph>(g).edges.size() == 1;
  v.require(graph_ok, "correlation graph is not 2 nodes / 1 edge");

  std::ostringstream out, err;
  int code = cli::run({"check", file}, out, err);
  std::size_t warnings = 0, other = 0;
  std::istringstream lines(out.str());
  for (std::string line; std::getline(lines, line);) (line.starts_with("warning ") ? warnings : other)++;
  v.require(code == 0, "check exit code " + std::to_string(code));
  v.require(warnings == 1 && other == 0, "check printed " + std::to_string(warnings) + " warnings, " +
                                             std::to_string(other) + " other lines");
  double dt = seconds_since(t0);
  v.require(dt < kAc1BudgetSeconds, "took " + fmt_seconds(dt));
  summary = "fields ok, graph 2/1, check exit " + std::to_string(code) + " with " + std::to_string(warnings) +
            " warning, " + fmt_seconds(dt);
  return v;
}

// ---------------------------------------------------------------------------

Verdict ac2(std::string& summary) {
  Verdict v;
  auto t0 = Clock::now();
  testing::Gen gen(20260101);
  std::set<MessageType> seen;
  int ok = 0;
  for (int i = 0; i < kAc2Messages; ++i) {
    // Cycle the types first so every one is guaranteed, then draw freely.
    Message m = i < static_cast<int>(kAllMessageTypes.size()) * 50
                    ? gen.message(kAllMessageTypes[static_cast<std::size_t>(i) % kAllMessageTypes.size()])
                    : gen.message();
    seen.insert(m.type);
    bool good = true;
    try {
      good &= parse_message(print_message(m, PrintStyle::Compact)) == m;
      good &= parse_message(print_message(m, PrintStyle::Pretty)) == m;
      good &= decode(encode_canonical(m)) == m;
    } catch (const std::exception&) {
      good = false;
    }
    v.require(good, "round trip failed on case " + std::to_string(i));
    ok += good ? 1 : 0;
  }
  v.require(seen.size() == kAllMessageTypes.size(), "only " + std::to_string(seen.size()) + " types generated");
  double dt = seconds_since(t0);
  v.require(dt < kAc2BudgetSeconds, "took " + fmt_seconds(dt));
  summary = std::to_string(ok) + "/" + std::to_string(kAc2Messages) + " messages, " + std::to_string(seen.size()) +
            " types, " + fmt_seconds(dt);
  return v;
}

// ---------------------------------------------------------------------------

std::string print_shuffled(const Message& m, std::mt19937_64& rng) {
  auto pairs = text::metadata_pairs(m.meta);
  std::shuffle(pairs.begin(), pairs.end(), rng);
  std::string out = "[" + std::string(type_name(m.type)) + ": " + text::print_value(m.content) + " | ";
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (i) out += ", ";
    out += std::string(pairs[i].first) + ":" + pairs[i].second;
  }
  return out + "]";
}

Verdict ac3(std::string& summary) {
  Verdict v;
  testing::Gen gen(33);
  std::mt19937_64 rng(34);
  int stable = 0;
  for (int i = 0; i < 1000; ++i) {
    Message m = gen.message();
    Bytes a = encode_canonical(m);
    bool ok = encode_canonical(m) == a && encode_canonical(decode(a)) == a &&
              encode_canonical(parse_message(print_shuffled(m, rng))) == a;
    v.require(ok, "canonical bytes differ on case " + std::to_string(i));
    stable += ok ? 1 : 0;
  }
  // The weather pair with its metadata keys reversed in the text.
  TraceLog pair = load_trace_file(std::string(AICL_TEST_DATA) + "/weather_pair.aicl");
  for (const auto& e : pair.envelopes()) {
    auto pairs = text::metadata_pairs(e.msg.meta);
    std::reverse(pairs.begin(), pairs.end());
    std::string t = "[" + std::string(type_name(e.msg.type)) + ": " + text::print_value(e.msg.content) + " | ";
    for (std::size_t i = 0; i < pairs.size(); ++i) t += (i ? ", " : "") + std::string(pairs[i].first) + ":" + pairs[i].second;
    v.require(encode_canonical(parse_message(t + "]")) == encode_canonical(e.msg), "weather pair key order");
  }

  std::map<testing::Mutation, int> rejected;
  int applied = 0;
  for (int i = 0; applied < kAc3Mutations; ++i) {
    auto kind = static_cast<testing::Mutation>(i % 3);
    Bytes b = encode_canonical(gen.message());
    if (!testing::mutate(b, kind, rng)) continue;
    ++applied;
    try {
      decode(b);
      v.require(false, "mutation accepted on case " + std::to_string(i));
    } catch (const DecodeError& e) {
      bool right = e.rule() == testing::expected_rule(kind);
      v.require(right, "mutation rejected as " + e.rule() + " not " + testing::expected_rule(kind));
      rejected[kind] += right ? 1 : 0;
    }
  }
  int total = rejected[testing::Mutation::Indefinite] + rejected[testing::Mutation::Unsorted] + rejected[testing::Mutation::WideInt];
  v.require(total == kAc3Mutations, "rejected " + std::to_string(total));
  summary = std::to_string(stable) + "/1000 stable encodings, mutations rejected " + std::to_string(total) + "/" +
            std::to_string(kAc3Mutations) + " (indefinite " + std::to_string(rejected[testing::Mutation::Indefinite]) +
            ", unsorted " + std::to_string(rejected[testing::Mutation::Unsorted]) + ", wide int " +
            std::to_string(rejected[testing::Mutation::WideInt]) + ")";
  return v;
}

// ---------------------------------------------------------------------------

Verdict ac4(std::string& summary) {
  Verdict v;
  auto dir = std::filesystem::temp_directory_path() / "aicl_acceptance_ac4";
  std::filesystem::create_directories(dir);
  std::size_t matched = 0, total = 0;
  for (const auto& s : builtin_scenarios()) {
    auto a = dir / (s.name + ".1.aiclb");
    auto b = dir / (s.name + ".2.aiclb");
    save_trace_file(run_scenario(s), a);
    save_trace_file(run_scenario(s), b);
    v.require(read_file(a) == read_file(b), s.name + " runs differ");
    TraceLog log = load_trace_file(a);
    StubFromTrace stub(log);
    ReplayReport r = replay(log, stub);
    v.require(r.all_matched(), s.name + " self-replay " + std::to_string(r.matched) + "/" + std::to_string(r.total));
    matched += r.matched;
    total += r.total;
  }
  std::filesystem::remove_all(dir);
  summary = std::to_string(builtin_scenarios().size()) + " builtins byte-identical, self-replay " +
            std::to_string(matched) + "/" + std::to_string(total) + " matched";
  return v;
}

// ---------------------------------------------------------------------------

std::vector<std::size_t> indices_where(const TraceLog& t, const std::function<bool(const Message&)>& p) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (p(t[i].msg)) out.push_back(i);
  }
  return out;
}

// Injects `specs` into `s` and checks the observed findings against the
// injector's own record.
bool fault_observed(Scenario s, const std::vector<std::string>& specs, std::string& why) {
  TraceLog clean = run_scenario(s);
  for (const auto& f : specs) s.faults.push_back(parse_fault(f));
  RunResult r = run_scenario_recorded(s);
  std::map<std::string, std::size_t> expected;
  for (const auto& inj : r.injected) expected[inj.expected_rule] += inj.expected_count;
  if (expected.size() != 1 || r.injected.size() != specs.size()) {
    why = "injector record is ambiguous";
    return false;
  }
  auto o = testing::observe(clean, r.trace);
  if (!testing::observed_exactly(o, expected.begin()->first, expected.begin()->second)) {
    why = s.name + ": expected " + expected.begin()->first + " x" + std::to_string(expected.begin()->second);
    return false;
  }
  return true;
}

Verdict ac5(std::string& summary) {
  Verdict v;
  std::string why;
  // Default targets on builtins.
  const std::vector<std::pair<std::string, std::string>> singles = {
      {"weather", "drop"}, {"weather", "duplicate"}, {"weather", "mutate path content.data.temp_c value 30"},
      {"memory", "cross-ctx-recall"}, {"weather", "dangling-of"}};
  for (const auto& [name, spec] : singles) v.require(fault_observed(*find_builtin(name), {spec}, why), why);

  // One to three injections per kind at explicit positions in random scenarios.
  auto is = [](MessageClass c) { return [c](const Message& m) { return m.message_class() == c; }; };
  auto is_type = [](MessageType t) { return [t](const Message& m) { return m.type == t; }; };
  std::size_t multi = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    Scenario s = random_scenario(seed, 30);
    TraceLog t = run_scenario(s);
    auto responses = indices_where(t, is(MessageClass::Response));
    auto requests = indices_where(t, is(MessageClass::Request));
    auto results = indices_where(t, is_type(MessageType::Result));
    auto stores = indices_where(t, is_type(MessageType::MemoryStore));
    std::size_t k = 1 + seed % 3;
    auto specs = [&](const std::vector<std::size_t>& at, const std::string& head, const std::string& tail) {
      std::vector<std::string> out;
      for (std::size_t i = 0; i < std::min(k, at.size()); ++i) out.push_back(head + " at @" + std::to_string(at[i]) + tail);
      return out;
    };
    for (auto spec : {specs(responses, "drop", ""), specs(requests, "duplicate", ""),
                      specs(results, "mutate", " path content.data.temp_c value 999"),
                      specs(stores, "cross-ctx-recall", ""), specs(responses, "dangling-of", "")}) {
      if (spec.empty()) continue;
      v.require(fault_observed(s, spec, why), why + " seed " + std::to_string(seed));
      ++multi;
    }
  }

  // Three cross-context recalls among fifty clean messages.
  std::uint64_t seed = 0;
  Scenario fifty;
  TraceLog base;
  std::vector<std::size_t> stores;
  do {
    fifty = random_scenario(seed++, 50);
    base = run_scenario(fifty);
    stores = indices_where(base, is_type(MessageType::MemoryStore));
  } while (stores.size() < 3);
  for (std::size_t i = 0; i < 3; ++i) fifty.faults.push_back(parse_fault("cross-ctx-recall at @" + std::to_string(stores[i])));
  RunResult three = run_scenario_recorded(fifty);
  std::set<std::size_t> injected_at;
  for (const auto& inj : three.injected) {
    for (std::size_t i = 0; i < three.trace.size(); ++i) {
      if (inj.inserted && three.trace[i].msg.meta.id == *inj.inserted) injected_at.insert(i);
    }
  }
  std::set<std::size_t> flagged;
  for (const auto& viol : check_context_isolation(three.trace.messages())) flagged.insert(viol.recall_locus);
  v.require(base.size() >= 50 && injected_at.size() == 3 && flagged == injected_at, "3 recalls among 50 not matched");

  std::size_t errors = 0, violations = 0;
  for (int i = 0; i < kAc5CleanScenarios; ++i) {
    TraceLog t = run_scenario(random_scenario(static_cast<std::uint64_t>(i) + 100000));
    auto msgs = t.messages();
    for (const auto& d : check_all(msgs)) errors += d.severity == Severity::Error ? 1 : 0;
    violations += check_context_isolation(msgs).size();
  }
  v.require(errors == 0, std::to_string(errors) + " errors on clean scenarios");
  v.require(violations == 0, std::to_string(violations) + " isolation violations on clean scenarios");
  summary = "5 kinds on builtins, " + std::to_string(multi) + " multi-injection runs, 3/3 recalls located, " +
            std::to_string(kAc5CleanScenarios) + " clean scenarios: " + std::to_string(errors) + " errors, " +
            std::to_string(violations) + " violations";
  return v;
}

// ---------------------------------------------------------------------------

bool volatile_path(const std::string& p) {
  for (std::string_view f : {"meta.id", "meta.ts", "wall_ts", "meta.latency", "meta.cost", "meta.sig"}) {
    if (p == f || p.starts_with(std::string(f) + ".")) return true;
  }
  return false;
}

Verdict ac6(std::string& summary) {
  Verdict v;
  std::size_t cases = 0, exact = 0, volatile_seen = 0;
  auto check_volatile = [&](const std::vector<TraceDiff>& ds) {
    for (const auto& d : ds) {
      for (const auto& e : d.entries) volatile_seen += volatile_path(e.path) ? 1 : 0;
    }
  };

  std::vector<Scenario> scenarios = builtin_scenarios();
  for (std::uint64_t seed = 0; seed < 30; ++seed) scenarios.push_back(random_scenario(seed));
  for (const auto& s : scenarios) {
    TraceLog clean = run_scenario(s);
    for (std::size_t i = 0; i < clean.size(); ++i) {
      const Message& m = clean[i].msg;
      if (m.message_class() != MessageClass::Response) continue;
      std::vector<std::pair<std::string, std::string>> edits = {
          {"meta.conf", "0.123"}, {"meta.model_version", "\"mutated\""}, {"meta.space", "\"mutated\""},
          {"meta.ver", "\"9.9.9\""}, {"meta.priors.drift", "0.5"}};
      edits.emplace_back(m.type == MessageType::Result ? "content.schema" : "content.code", "\"mutated\"");
      for (const auto& [path, value] : edits) {
        Scenario f = s;
        f.faults = {parse_fault("mutate at @" + std::to_string(i) + " path " + path + " value " + value)};
        auto d = diff_traces(clean, run_scenario(f));
        check_volatile(d);
        bool ok = d.size() == 1 && d[0].entries.size() == 1 && d[0].entries[0].path == path;
        v.require(ok, s.name + " @" + std::to_string(i) + " " + path);
        ++cases;
        exact += ok ? 1 : 0;
      }
      // Volatile edits must not show up at all.
      for (const auto& [path, value] :
           std::vector<std::pair<std::string, std::string>>{{"meta.latency", "1"}, {"meta.ts", "t(2030-01-01T00:00:00Z)"},
                                                            {"meta.id", "u!renamed"}, {"meta.cost.tokens", "1"}}) {
        Scenario f = s;
        f.faults = {parse_fault("mutate at @" + std::to_string(i) + " path " + path + " value " + value)};
        auto d = diff_traces(clean, run_scenario(f));
        check_volatile(d);
        v.require(d.empty(), s.name + " volatile " + path + " produced a diff");
      }
    }
    // A reseeded run changes latency, cost, wall_ts and signatures.
    Scenario reseeded = s;
    reseeded.seed = s.seed * 31 + 7;
    auto d = diff_traces(clean, run_scenario(reseeded));
    check_volatile(d);
    v.require(d.empty(), s.name + " reseeded run produced a diff");
  }
  v.require(volatile_seen == 0, std::to_string(volatile_seen) + " volatile diff entries");
  summary = std::to_string(exact) + "/" + std::to_string(cases) + " single-field mutations gave one entry at the path, " +
            std::to_string(volatile_seen) + " volatile entries";
  return v;
}

// ---------------------------------------------------------------------------

Verdict ac7(std::string& summary) {
  Verdict v;
  testing::Gen gen(77);
  auto key = key_bytes("acceptance-key");
  std::size_t round_trips = 0, flips = 0, caught = 0;
  for (int i = 0; i < 50; ++i) {
    Message m = sign_message(gen.message(), key);
    bool ok = verify_integrity(m, key) && verify_integrity(decode(encode_canonical(m)), key) &&
              !verify_integrity(m, key_bytes("other-key"));
    v.require(ok, "round trip " + std::to_string(i));
    round_trips += ok ? 1 : 0;
    Bytes b = encode_canonical(m);
    for (std::size_t at = 0; at < b.size(); ++at) {
      for (std::uint8_t mask : {std::uint8_t{0x01}, std::uint8_t{0x80}, static_cast<std::uint8_t>(1 + gen.below(255))}) {
        Bytes c = b;
        c[at] ^= mask;
        ++flips;
        bool rejected = check_integrity_bytes(c, key) != IntegrityStatus::Valid;
        caught += rejected ? 1 : 0;
        v.require(rejected, "byte " + std::to_string(at) + " flip accepted");
      }
    }
  }
  // Vectors computed by an independent implementation.
  std::size_t vectors_ok = 0;
  for (const auto& c : vectors::kRfc4231) {
    bool ok = text::to_hex(hmac_sha256(hex(c.key_hex), hex(c.data_hex))) == c.tag_hex;
    v.require(ok, "RFC 4231 vector");
    vectors_ok += ok ? 1 : 0;
  }
  Message result = decode(hex(vectors::kWeatherResult));
  Bytes hk = key_bytes(vectors::kHmacKey);
  bool tag_ok = text::to_hex(compute_sig(result, hk)) == vectors::kWeatherResultTag &&
                verify_integrity(decode(hex(vectors::kWeatherResultSigned)), hk);
  v.require(tag_ok, "weather result tag");
  vectors_ok += tag_ok ? 1 : 0;
  summary = std::to_string(round_trips) + "/50 round trips, " + std::to_string(caught) + "/" + std::to_string(flips) +
            " byte mutations rejected, " + std::to_string(vectors_ok) + "/" + std::to_string(std::size(vectors::kRfc4231) + 1) +
            " independent vectors";
  return v;
}

// ---------------------------------------------------------------------------

Verdict ac8(std::string& summary) {
  Verdict v;
  const std::map<std::string_view, std::function<bool(const Metadata&)>> present = {
      {"id", [](const Metadata&) { return true; }},
      {"ts", [](const Metadata&) { return true; }},
      {"ver", [](const Metadata& m) { return m.ver.has_value(); }},
      {"cid", [](const Metadata& m) { return m.cid.has_value(); }},
      {"ctx", [](const Metadata& m) { return m.ctx.has_value(); }},
      {"model_version", [](const Metadata& m) { return m.model_version.has_value(); }},
      {"conf", [](const Metadata& m) { return m.conf.has_value(); }},
      {"priors", [](const Metadata& m) { return m.priors.has_value() && !m.priors->empty(); }},
      {"space", [](const Metadata& m) { return m.space.has_value(); }},
      {"of", [](const Metadata& m) { return m.of.has_value(); }},
      {"reasoning_trace", [](const Metadata& m) { return m.reasoning_trace.has_value(); }},
      {"cost", [](const Metadata& m) { return m.cost.has_value(); }},
      {"latency", [](const Metadata& m) { return m.latency.has_value(); }},
      {"sig", [](const Metadata& m) { return m.sig.has_value(); }},
      {"cap", [](const Metadata& m) { return m.cap.has_value(); }},
  };
  for (auto f : kMetadataFields) v.require(present.count(f) == 1, "no counter for " + std::string(f));
  std::set<MessageType> types;
  std::map<std::string_view, std::size_t> fields;
  for (const auto& s : builtin_scenarios()) {
    TraceLog t = run_scenario(s);
    for (const auto& e : t.envelopes()) {
      types.insert(e.msg.type);
      for (const auto& [name, has] : present) fields[name] += has(e.msg.meta) ? 1 : 0;
    }
  }
  std::size_t covered = 0;
  for (const auto& [name, n] : fields) {
    v.require(n > 0, "field " + std::string(name) + " never set");
    covered += n > 0 ? 1 : 0;
  }
  for (auto t : kAllMessageTypes) v.require(types.count(t) == 1, "type " + std::string(type_name(t)) + " never sent");
  summary = std::to_string(types.size()) + "/" + std::to_string(kAllMessageTypes.size()) + " types, " +
            std::to_string(covered) + "/" + std::to_string(kMetadataFields.size()) + " metadata fields";
  return v;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict(std::string&)>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}, {"AC8", ac8}};
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    std::string summary;
    Verdict v;
    try {
      v = fn(summary);
    } catch (const std::exception& e) {
      v.pass = false;
      v.notes.push_back(std::string("exception: ") + e.what());
    }
    std::cout << name << ' ' << (v.pass ? "PASS" : "FAIL") << ' ' << summary;
    for (const auto& n : v.notes) std::cout << " [" << n << ']';
    std::cout << std::endl;
    failed += v.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
