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

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aicl/diagnostic.hpp"
#include "aicl/message.hpp"

namespace aicl {

// MAJOR.MINOR.PATCH, no leading zeros, no pre-release suffix.
inline bool is_semver(std::string_view v) {
  int parts = 0;
  std::size_t pos = 0;
  while (true) {
    std::size_t start = pos;
    while (pos < v.size() && v[pos] >= '0' && v[pos] <= '9') ++pos;
    std::size_t len = pos - start;
    if (len == 0 || (len > 1 && v[start] == '0')) return false;
    ++parts;
    if (pos == v.size()) break;
    if (v[pos] != '.' || parts == 3) return false;
    ++pos;
  }
  return parts == 3;
}

inline bool in_unit_interval(double x) { return x >= 0.0 && x <= 1.0; }

/// Field-level metadata conformance for one message of type `type`. Findings
/// are returned in metadata field order.
inline std::vector<Diagnostic> check_metadata(const Metadata& meta, MessageType type, std::size_t index = 0) {
  std::vector<Diagnostic> out;
  auto missing = [&](std::string_view field) {
    out.push_back(make_diagnostic("META.REQUIRED", index, "meta." + std::string(field),
                                  "required field " + std::string(field) + " is absent"));
  };

  if (!meta.ver) {
    missing("ver");
  } else if (!is_semver(*meta.ver)) {
    out.push_back(make_diagnostic("META.VER.FORMAT", index, "meta.ver", "'" + *meta.ver + "' is not MAJOR.MINOR.PATCH"));
  }
  if (!meta.cid) missing("cid");
  if (!meta.ctx) {
    missing("ctx");
  } else if (meta.ctx->empty()) {
    out.push_back(make_diagnostic("META.CTX.EMPTY", index, "meta.ctx", "ctx must name at least one scope"));
  }
  if (!meta.model_version) missing("model_version");
  if (!meta.conf) {
    auto d = make_diagnostic("META.CONF.MISSING", index, "meta.conf", "conf is absent");
    bool strict = type == MessageType::Result || type == MessageType::Fact || type == MessageType::Facts;
    d.severity = strict ? Severity::Error : Severity::Warning;
    out.push_back(std::move(d));
  } else if (!in_unit_interval(*meta.conf)) {
    out.push_back(make_diagnostic("META.CONF.RANGE", index, "meta.conf",
                                  "conf " + std::to_string(*meta.conf) + " is outside [0, 1]"));
  }
  if (!meta.priors) {
    missing("priors");
  } else {
    for (const auto& [name, p] : *meta.priors) {
      if (!in_unit_interval(p)) {
        out.push_back(make_diagnostic("META.PRIORS.RANGE", index, "meta.priors." + name,
                                      "prior " + name + " = " + std::to_string(p) + " is outside [0, 1]"));
      }
    }
  }
  if (!meta.space) missing("space");
  if (requires_of(type) && !meta.of) {
    out.push_back(make_diagnostic("META.OF.REQUIRED", index, "meta.of",
                                  std::string(type_name(type)) + " must name the message it responds to"));
  }
  if (meta.cost) {
    for (const auto& [name, n] : *meta.cost) {
      if (n < 0) {
        out.push_back(make_diagnostic("META.COST.RANGE", index, "meta.cost." + name,
                                      "cost counter " + name + " = " + std::to_string(n) + " is negative"));
      }
    }
  }
  if (meta.latency && *meta.latency < 0) {
    out.push_back(make_diagnostic("META.LATENCY.RANGE", index, "meta.latency",
                                  "latency " + std::to_string(*meta.latency) + " is negative"));
  }
  if (meta.sig && meta.sig->empty()) {
    out.push_back(make_diagnostic("META.SIG.FORMAT", index, "meta.sig", "sig is empty"));
  }
  if (meta.cap) {
    std::set<std::string_view> seen;
    for (const auto& tag : *meta.cap) {
      if (tag.empty()) {
        out.push_back(make_diagnostic("META.CAP.FORMAT", index, "meta.cap", "empty capability tag"));
      } else if (!seen.insert(tag).second) {
        out.push_back(make_diagnostic("META.CAP.FORMAT", index, "meta.cap", "capability '" + tag + "' repeated"));
      }
    }
  }
  return out;
}

}  // namespace aicl
