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

// The `aicl` command line, callable in-process. Exit codes:
//   0 success, 1 findings, 2 malformed input, 3 I/O or usage error.

#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include <CLI11.hpp>

#include "aicl/diff.hpp"
#include "aicl/harness.hpp"
#include "aicl/replay.hpp"
#include "aicl/trace.hpp"
#include "aicl/validate.hpp"

namespace aicl::cli {

enum ExitCode : int { kOk = 0, kFindings = 1, kMalformed = 2, kUsage = 3 };

/// Where settings come from besides flags. Tests substitute their own.
struct Environment {
  std::function<std::optional<std::string>(const std::string&)> getenv = [](const std::string& name) -> std::optional<std::string> {
    const char* v = std::getenv(name.c_str());
    if (v == nullptr) return std::nullopt;
    return std::string(v);
  };
  std::filesystem::path cwd = std::filesystem::current_path();
};

inline constexpr std::string_view kConfigFile = "aicl.conf";

namespace detail {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// `key = value` lines with `#` comments.
inline std::map<std::string, std::string> read_config(const std::filesystem::path& path) {
  std::map<std::string, std::string> out;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return out;
  Bytes data = read_file(path);
  std::string_view text(reinterpret_cast<const char*>(data.data()), data.size());
  std::size_t line_no = 0;
  while (!text.empty()) {
    auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = RuleConfig::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    }
    std::string key(RuleConfig::trim(line.substr(0, eq)));
    if (key != "rules" && key != "mask" && key != "severity_floor") {
      throw UsageError(path.string() + ":" + std::to_string(line_no) + ": unknown setting '" + key + "'");
    }
    out[key] = std::string(RuleConfig::trim(line.substr(eq + 1)));
  }
  return out;
}

struct Settings {
  std::map<std::string, std::string> file;
  const Environment* env = nullptr;

  // The highest-precedence non-flag source for `key`.
  std::optional<std::string> lookup(const std::string& key, const std::string& env_name) const {
    if (auto v = env->getenv(env_name)) return v;
    if (auto it = file.find(key); it != file.end()) return it->second;
    return std::nullopt;
  }
};

inline Severity floor_from(const std::string& s) {
  auto sev = parse_severity(s);
  if (!sev) throw UsageError("unknown severity '" + s + "' (expected info, warning or error)");
  return *sev;
}

inline FieldMask mask_from(const std::vector<std::string>& flags, const Settings& st) {
  try {
    if (!flags.empty()) {
      FieldMask m = FieldMask::diff_default();
      for (const auto& f : flags) m = FieldMask::parse(f, m);
      return m;
    }
    if (auto spec = st.lookup("mask", "AICL_MASK")) return FieldMask::parse(*spec);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("bad mask: ") + e.what());
  }
  return FieldMask::diff_default();
}

inline std::string describe(const ParseError& e) { return "parse error at " + std::string(e.what()); }

inline std::string describe(const DecodeError& e) { return "decode error: " + std::string(e.what()); }

}  // namespace detail

/// Runs one command. `args` excludes the program name.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, const Environment& env = {}) {
  CLI::App app{"AICL protocol toolkit: validate, convert, run, replay and diff AICL traces", "aicl"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "aicl 0.1.0 (rule registry " + std::string(kRuleRegistryVersion) + ")");

  // check
  std::string check_input;
  std::string floor_flag;
  std::string rules_config;
  std::vector<std::string> rules_flags;
  bool porcelain = false;
  bool annotate = false;
  auto* check = app.add_subcommand("check", "Validate a trace and print one finding per line");
  check->add_option("input", check_input, "trace file (.aicl or .aiclb)")->required();
  check->add_option("--severity-floor", floor_flag, "exit 1 when a finding reaches this severity (default error)");
  check->add_option("--rules-config", rules_config, "file of RULE=severity|off lines");
  check->add_option("--rules", rules_flags, "inline RULE=severity|off overrides");
  check->add_flag("--porcelain", porcelain, "tab-separated output");
  check->add_flag("--annotate", annotate, "print the trace with findings as # comments");

  // convert
  std::string convert_input;
  std::string convert_to;
  std::string convert_output;
  auto* convert = app.add_subcommand("convert", "Convert between text and binary forms");
  convert->add_option("input", convert_input, "trace file")->required();
  convert->add_option("--to", convert_to, "text | canonical-text | binary")->required()->check(
      CLI::IsMember({"text", "canonical-text", "binary"}));
  convert->add_option("-o,--output", convert_output, "output file (default: standard output)");

  // run
  std::string run_source;
  std::optional<std::uint64_t> run_seed;
  std::vector<std::string> run_faults;
  std::string run_output;
  auto* runcmd = app.add_subcommand("run", "Run a builtin or file scenario and write its trace");
  runcmd->add_option("scenario", run_source, "builtin scenario name or scenario file")->required();
  runcmd->add_option("--seed", run_seed, "override the scenario seed");
  runcmd->add_option("--fault", run_faults, "fault to inject, e.g. 'drop at q' or 'cross-ctx-recall'");
  runcmd->add_option("-o,--output", run_output, "output file (.aiclb binary, otherwise text; default <name>.aiclb)");

  // replay
  std::string replay_input;
  bool replay_stub = false;
  std::string replay_stub_trace;
  std::string replay_adapter;
  std::vector<std::string> replay_masks;
  auto* replaycmd = app.add_subcommand("replay", "Replay a trace's requests against a responder");
  replaycmd->add_option("input", replay_input, "trace file")->required();
  auto* stub_flag = replaycmd->add_flag("--stub", replay_stub, "answer from the trace itself (default)");
  auto* stub_trace_opt = replaycmd->add_option("--stub-trace", replay_stub_trace, "answer from another recorded trace");
  auto* adapter_opt = replaycmd->add_option("--adapter", replay_adapter, "stub | null | file:<trace>");
  stub_flag->excludes(stub_trace_opt)->excludes(adapter_opt);
  stub_trace_opt->excludes(adapter_opt);
  replaycmd->add_option("--mask", replay_masks, "extra masked paths, conf~TOL, or a preset");
  replaycmd->add_flag("--porcelain", porcelain, "tab-separated output");

  // diff
  std::string diff_a;
  std::string diff_b;
  std::vector<std::string> diff_masks;
  auto* diffcmd = app.add_subcommand("diff", "Structural diff of two traces");
  diffcmd->add_option("left", diff_a, "trace file")->required();
  diffcmd->add_option("right", diff_b, "trace file")->required();
  diffcmd->add_option("--mask", diff_masks, "extra masked paths, conf~TOL, or a preset");
  diffcmd->add_flag("--porcelain", porcelain, "tab-separated output");

  // rules, scenarios
  auto* rulescmd = app.add_subcommand("rules", "List the rule registry");
  std::string scenario_name;
  auto* scenarioscmd = app.add_subcommand("scenarios", "List builtin scenarios, or print one");
  scenarioscmd->add_option("name", scenario_name, "scenario to print");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  auto load = [&](const std::string& path) { return load_trace_file(path); };

  try {
    detail::Settings settings{detail::read_config(env.cwd / kConfigFile), &env};

    if (check->parsed()) {
      Severity floor = detail::floor_from(!floor_flag.empty() ? floor_flag
                                                              : settings.lookup("severity_floor", "AICL_SEVERITY_FLOOR").value_or("error"));
      RuleConfig cfg;
      try {
        if (auto it = settings.file.find("rules"); it != settings.file.end()) cfg.merge(it->second);
        if (auto v = env.getenv("AICL_RULES")) cfg.merge(*v);
        if (!rules_config.empty()) {
          Bytes text = read_file(rules_config);
          cfg.merge(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
        }
        for (const auto& r : rules_flags) cfg.merge(r);
      } catch (const std::invalid_argument& e) {
        throw detail::UsageError(std::string("bad rules configuration: ") + e.what());
      }
      TraceLog log = load(check_input);
      auto msgs = log.messages();
      auto diags = check_all(msgs, cfg);
      if (annotate) {
        out << annotated_report(msgs, diags);
      } else {
        for (const auto& d : diags) out << (porcelain ? format_diagnostic_porcelain(d) : format_diagnostic(d)) << '\n';
      }
      err << msgs.size() << " messages: " << count_at_least(diags, Severity::Error) << " errors, "
          << count_at_least(diags, Severity::Warning) - count_at_least(diags, Severity::Error) << " warnings, "
          << diags.size() - count_at_least(diags, Severity::Warning) << " info\n";
      return count_at_least(diags, floor) > 0 ? kFindings : kOk;
    }

    if (convert->parsed()) {
      TraceLog log = load(convert_input);
      Bytes bytes;
      if (convert_to == "binary") {
        bytes = save_binary(log);
      } else {
        std::string s = save_text(log, convert_to == "text" ? PrintStyle::Pretty : PrintStyle::Compact);
        bytes.assign(s.begin(), s.end());
      }
      if (convert_output.empty()) {
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
      } else {
        write_file(convert_output, bytes);
      }
      return kOk;
    }

    if (runcmd->parsed()) {
      Scenario s;
      if (auto b = find_builtin(run_source)) {
        s = *b;
      } else {
        std::error_code ec;
        if (!std::filesystem::is_regular_file(run_source, ec)) {
          throw detail::UsageError("no builtin scenario or file named '" + run_source + "'");
        }
        Bytes text = read_file(run_source);
        s = parse_scenario(std::string_view(reinterpret_cast<const char*>(text.data()), text.size()));
      }
      if (run_seed) s.seed = *run_seed;
      std::vector<Fault> faults;
      for (const auto& f : run_faults) faults.push_back(parse_fault(f));
      s.faults.insert(s.faults.end(), faults.begin(), faults.end());
      RunResult r = run_scenario_recorded(s);
      std::string path = run_output.empty() ? s.name + ".aiclb" : run_output;
      save_trace_file(r.trace, path);
      out << "wrote " << r.trace.size() << " messages to " << path << '\n';
      for (const auto& f : r.injected) {
        out << "fault " << fault_kind_name(f.kind) << " " << f.target.str() << " @" << f.locus;
        if (f.inserted) out << " inserted " << f.inserted->str();
        if (!f.expected_rule.empty()) out << " expects " << f.expected_rule << " x" << f.expected_count;
        out << '\n';
      }
      return kOk;
    }

    if (replaycmd->parsed()) {
      FieldMask mask = detail::mask_from(replay_masks, settings);
      std::string adapter = replay_adapter;
      if (!replay_stub_trace.empty()) adapter = "file:" + replay_stub_trace;
      if (adapter.empty()) adapter = "stub";
      if (adapter != "stub" && adapter != "null" && adapter.rfind("file:", 0) != 0) {
        throw detail::UsageError("unknown adapter '" + adapter + "' (expected stub, null or file:<trace>)");
      }
      TraceLog log = load(replay_input);
      std::unique_ptr<ResponderAdapter> responder;
      if (adapter == "stub") {
        responder = std::make_unique<StubFromTrace>(log);
      } else if (adapter == "null") {
        responder = std::make_unique<NullResponder>();
      } else {
        responder = std::make_unique<StubFromTrace>(load(adapter.substr(5)));
      }
      ReplayReport report = replay(log, *responder, mask);
      for (const auto& line : format_replay_report(report, porcelain)) out << line << '\n';
      return report.all_matched() ? kOk : kFindings;
    }

    if (diffcmd->parsed()) {
      FieldMask mask = detail::mask_from(diff_masks, settings);
      TraceLog a = load(diff_a);
      TraceLog b = load(diff_b);
      auto diffs = diff_traces(a, b, mask);
      for (const auto& d : diffs) {
        for (const auto& e : d.entries) out << format_diff_entry(d, e, porcelain) << '\n';
      }
      return diffs.empty() ? kOk : kFindings;
    }

    if (rulescmd->parsed()) {
      out << "# rule registry version " << kRuleRegistryVersion << '\n';
      for (const auto& r : kRules) out << r.id << '\t' << severity_name(r.default_severity) << '\t' << r.description << '\n';
      return kOk;
    }

    if (scenarioscmd->parsed()) {
      if (scenario_name.empty()) {
        for (const auto& b : kBuiltinScenarios) out << b.name << '\n';
        return kOk;
      }
      for (const auto& b : kBuiltinScenarios) {
        if (b.name == scenario_name) {
          out << b.text;
          return kOk;
        }
      }
      throw detail::UsageError("no builtin scenario named '" + scenario_name + "'");
    }
  } catch (const ParseError& e) {
    err << "aicl: " << detail::describe(e) << '\n';
    return kMalformed;
  } catch (const DecodeError& e) {
    err << "aicl: " << detail::describe(e) << '\n';
    return kMalformed;
  } catch (const ScenarioError& e) {
    err << "aicl: bad scenario: " << e.what() << '\n';
    return kMalformed;
  } catch (const IoError& e) {
    err << "aicl: " << e.what() << '\n';
    return kUsage;
  } catch (const detail::UsageError& e) {
    err << "aicl: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace aicl::cli
