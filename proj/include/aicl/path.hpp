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

// Field paths address parts of an envelope: `meta.conf`, `content.data.temp_c`,
// `meta.ctx[0]`, `wall_ts`, `type`. Call-expression arguments are addressed like map
// entries (`content.location` for `tool:weather_now{location:...}`).

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "aicl/message.hpp"

namespace aicl {

struct PathStep {
  std::string key;                   // map key, when index is empty
  std::optional<std::size_t> index;  // list position

  friend bool operator==(const PathStep&, const PathStep&) = default;
};

inline std::vector<PathStep> split_path(std::string_view path) {
  std::vector<PathStep> steps;
  std::size_t pos = 0;
  auto bad = [&](const char* why) { throw std::invalid_argument("malformed field path '" + std::string(path) + "': " + why); };
  auto word = [&]() {
    std::size_t start = pos;
    while (pos < path.size() && path[pos] != '.' && path[pos] != '[') ++pos;
    auto w = path.substr(start, pos - start);
    if (!is_bare_word(w)) bad("expected a bare-word component");
    steps.push_back(PathStep{std::string(w), std::nullopt});
  };
  word();
  while (pos < path.size()) {
    if (path[pos] == '.') {
      ++pos;
      word();
    } else {
      ++pos;
      std::size_t start = pos;
      std::size_t n = 0;
      while (pos < path.size() && path[pos] >= '0' && path[pos] <= '9') n = n * 10 + static_cast<std::size_t>(path[pos++] - '0');
      if (pos == start || pos >= path.size() || path[pos] != ']') bad("expected [index]");
      ++pos;
      steps.push_back(PathStep{{}, n});
    }
  }
  return steps;
}

inline std::string child_path(std::string_view parent, std::string_view key) {
  std::string out(parent);
  out += '.';
  out += key;
  return out;
}

inline std::string index_path(std::string_view parent, std::size_t i) {
  return std::string(parent) + "[" + std::to_string(i) + "]";
}

// True when `mask` names `path` itself or one of its ancestors.
inline bool path_covers(std::string_view mask, std::string_view path) {
  if (path.size() < mask.size() || path.substr(0, mask.size()) != mask) return false;
  if (path.size() == mask.size()) return true;
  char next = path[mask.size()];
  return next == '.' || next == '[';
}

// Throws std::invalid_argument unless `path` refers to a defined envelope field.
inline void validate_field_path(std::string_view path) {
  auto steps = split_path(path);
  const std::string& root = steps[0].key;
  if (root == "content") return;
  if (root == "meta") {
    if (steps.size() < 2 || steps[1].index || !is_metadata_field(steps[1].key)) {
      throw std::invalid_argument("unknown metadata field in path '" + std::string(path) + "'");
    }
    return;
  }
  if ((root == "type" || root == "wall_ts" || root == "direction") && steps.size() == 1) return;
  throw std::invalid_argument("unknown field path '" + std::string(path) + "'");
}

}  // namespace aicl
