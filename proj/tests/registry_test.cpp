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


#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <string>

#include "aicl/diagnostic.hpp"

namespace aicl {
namespace {

std::string rules_doc() {
  std::ifstream in(std::string(AICL_SOURCE_DIR) + "/docs/RULES.md");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(Registry, DocumentMatchesTable) {
  std::string doc = rules_doc();
  ASSERT_FALSE(doc.empty());
  std::smatch ver;
  ASSERT_TRUE(std::regex_search(doc, ver, std::regex("Registry version: (\\S+)")));
  EXPECT_EQ(ver[1].str(), kRuleRegistryVersion);

  std::regex row("^\\| `([A-Z.]+)` \\| (info|warning|error) \\| (.*) \\|$");
  std::istringstream lines(doc);
  std::vector<std::tuple<std::string, std::string, std::string>> rows;
  for (std::string line; std::getline(lines, line);) {
    std::smatch m;
    if (std::regex_match(line, m, row)) rows.emplace_back(m[1], m[2], m[3]);
  }
  ASSERT_EQ(rows.size(), std::size(kRules));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_EQ(std::get<0>(rows[i]), kRules[i].id);
    EXPECT_EQ(std::get<1>(rows[i]), severity_name(kRules[i].default_severity)) << kRules[i].id;
    EXPECT_EQ(std::get<2>(rows[i]), kRules[i].description) << kRules[i].id;
  }
}

TEST(Registry, IdsAreUniqueAndFindable) {
  std::set<std::string_view> ids;
  for (const auto& r : kRules) {
    EXPECT_TRUE(ids.insert(r.id).second) << r.id;
    ASSERT_NE(find_rule(r.id), nullptr);
    EXPECT_EQ(find_rule(r.id)->id, r.id);
  }
  EXPECT_EQ(find_rule("NOPE"), nullptr);
}

}  // namespace
}  // namespace aicl
