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
#include <sstream>
#include <string>

#include "aicl/text.hpp"

namespace aicl {
namespace {

std::string fixture(const std::string& name) {
  std::ifstream in(std::string(AICL_TEST_DATA) + "/" + name, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ParseError parse_failure(std::string_view input) {
  try {
    parse_message(input);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "accepted: " << input;
  return ParseError(0, 0, "", "");
}

TEST(TextParse, WeatherPair) {
  auto msgs = parse_stream(fixture("weather_pair.aicl"));
  ASSERT_EQ(msgs.size(), 2u);
  const Message& q = msgs[0];
  EXPECT_EQ(q.type, MessageType::Query);
  ASSERT_TRUE(q.content.is_call());
  EXPECT_EQ(q.content.as_call().ns, "tool");
  EXPECT_EQ(q.content.as_call().name, "weather_now");
  EXPECT_EQ(q.content.as_call().args.at("location"), Value("Shanghai"));
  EXPECT_EQ(q.meta.id.str(), "u!q1");
  EXPECT_EQ(q.meta.ver, "1.2.0");

  const Message& r = msgs[1];
  EXPECT_EQ(r.type, MessageType::Result);
  EXPECT_EQ(*r.content.find("data")->find("temp_c"), Value(29));
  EXPECT_EQ(*r.content.find("data")->find("cond"), Value("rain"));
  EXPECT_EQ(*r.content.find("schema"), Value("tool:weather_now/1"));
  EXPECT_EQ(r.meta.conf, 0.93);
  EXPECT_EQ(r.meta.of->str(), "u!q1");
  EXPECT_EQ(r.meta.model_version, "gpt-5-20250801");
}

TEST(TextParse, MinimalMessage) {
  auto m = parse_message("[HELLO: {} | id:a!b, ts:t(2025-01-01T00:00:00Z)]");
  EXPECT_EQ(m.type, MessageType::Hello);
  EXPECT_FALSE(m.meta.ver);
  EXPECT_FALSE(m.meta.conf);
}

TEST(TextParse, DottedTypeNames) {
  for (const char* t : {"MEMORY.STORE", "MEMORY.RECALL", "COORD.DELEGATE", "REASONING.START", "REASONING.STEP",
                        "REASONING.COMPLETE"}) {
    auto m = parse_message(std::string("[") + t + ": 1 | id:a!b, ts:t(2025-01-01T00:00:00Z)]");
    EXPECT_EQ(type_name(m.type), t);
  }
}

TEST(TextParse, MetadataOrderDoesNotMatter) {
  auto a = parse_message("[FACT: {x:1} | id:a!b, ts:t(2025-01-01T00:00:00Z), conf:0.5, ver:\"1.0.0\"]");
  auto b = parse_message("[FACT: {x:1} | ver:\"1.0.0\", conf:0.5, ts:t(2025-01-01T00:00:00Z), id:a!b]");
  EXPECT_EQ(a.meta, b.meta);
  EXPECT_EQ(print_message(a), print_message(b));
}

TEST(TextParse, StringEscapes) {
  EXPECT_EQ(parse_value(R"("a\"b\\c\n\t\u{e9}\u{1F327}")"), Value("a\"b\\c\n\t\xc3\xa9\xf0\x9f\x8c\xa7"));
  EXPECT_THROW(parse_value(R"("\q")"), ParseError);
  EXPECT_THROW(parse_value(R"("\u{D800}")"), ParseError);
  EXPECT_THROW(parse_value("\"a\x01\""), ParseError);
}

TEST(TextParse, Numbers) {
  EXPECT_EQ(parse_value("-12"), Value(-12));
  EXPECT_EQ(parse_value("1.5e3"), Value(1500.0));
  EXPECT_EQ(parse_value("-0.0"), Value(-0.0));
  EXPECT_EQ(parse_value("9223372036854775807"), Value(INT64_MAX));
  EXPECT_THROW(parse_value("9223372036854775808"), ParseError);
  EXPECT_THROW(parse_value("1e400"), ParseError);
  EXPECT_THROW(parse_value("1."), ParseError);
}

TEST(TextParse, CommentsBetweenMessages) {
  auto msgs = parse_stream("# one\n[HELLO: {} | id:a!b, ts:t(2025-01-01T00:00:00Z)]  # two\n# three\n");
  EXPECT_EQ(msgs.size(), 1u);
}

TEST(TextParse, ErrorsCarryLocation) {
  auto e = parse_failure("[QUERY: tool:f{} | id:u!q1,\n  ts:t(2025-13-01T00:00:00Z)]");
  EXPECT_EQ(e.line(), 2u);
  EXPECT_EQ(e.column(), 8u);
  EXPECT_NE(e.expected().find("timestamp"), std::string::npos);
}

TEST(TextParse, RejectsBrokenInputs) {
  const char* cases[] = {
      "",
      "[",
      "[QUERY tool:f{} | id:u!q1, ts:t(2025-01-01T00:00:00Z)]",
      "[WHATEVER: 1 | id:u!q1, ts:t(2025-01-01T00:00:00Z)]",
      "[QUERY: tool:f{} | ts:t(2025-01-01T00:00:00Z)]",
      "[QUERY: tool:f{} | id:u!q1]",
      "[QUERY: tool:f{} | id:u!q1, id:u!q2, ts:t(2025-01-01T00:00:00Z)]",
      "[QUERY: tool:f{} | id:u!q1, ts:t(2025-01-01T00:00:00Z), bogus:1]",
      "[QUERY: tool:f{} | id:u!q1, ts:t(2025-01-01T00:00:00Z), conf:\"high\"]",
      "[QUERY: tool:f{} | id:u!q1, ts:t(2025-01-01T00:00:00Z), latency:1.5]",
      "[QUERY: tool:f{} | id:u!q1, ts:t(2025-01-01T00:00:00Z), sig:\"abc\"]",
      "[QUERY: tool:f{} | id:u!q1, ts:t(2025-01-01T00:00:00Z), ctx:[\"x\"]]",
      "[QUERY: {a:1, a:2} | id:u!q1, ts:t(2025-01-01T00:00:00Z)]",
      "[QUERY: tool:f{} | id:u!q1, ts:t(2025-01-01T00:00:00Z)] trailing",
      "[QUERY: tool:f{} | id:u!q1, ts:t(2025-01-01T00:00:00Z)",
      "[QUERY: bare | id:u!q1, ts:t(2025-01-01T00:00:00Z)]",
  };
  for (const char* c : cases) parse_failure(c);
}

TEST(TextParse, DeepNestingIsAnErrorNotACrash) {
  std::string deep(100000, '[');
  auto e = parse_failure("[FACT: " + deep + " | id:a!b, ts:t(2025-01-01T00:00:00Z)]");
  EXPECT_NE(e.expected().find("nesting"), std::string::npos);
}

TEST(TextPrint, CompactAndPretty) {
  auto m = parse_message(
      "[RESULT: {schema:\"s\", data:1} | of:u!q1, id:u!r1, ts:t(2025-08-15T02:00:01Z), conf:0.93, "
      "sig:\"00ff\"]");
  EXPECT_EQ(print_message(m),
            "[RESULT: {data:1, schema:\"s\"} | id:u!r1, ts:t(2025-08-15T02:00:01Z), conf:0.93, of:u!q1, "
            "sig:\"00ff\"]");
  EXPECT_EQ(print_message(m, PrintStyle::Pretty),
            "[RESULT: {data:1, schema:\"s\"}\n"
            "  | id:u!r1,\n"
            "    ts:t(2025-08-15T02:00:01Z),\n"
            "    conf:0.93,\n"
            "    of:u!q1,\n"
            "    sig:\"00ff\"]");
  EXPECT_EQ(parse_message(print_message(m, PrintStyle::Pretty)).meta, m.meta);
}

TEST(TextPrint, FloatsKeepAPoint) {
  EXPECT_EQ(text::format_float(1.0), "1.0");
  EXPECT_EQ(text::format_float(-0.0), "-0.0");
  EXPECT_EQ(text::format_float(0.93), "0.93");
  EXPECT_EQ(text::format_float(1e300), "1e+300");
}

TEST(TextPrint, ControlCharactersAreEscaped) {
  EXPECT_EQ(text::print_value(Value("a\x01\x7f\"")), "\"a\\u{1}\\u{7f}\\\"\"");
}

TEST(Hex, RoundTrip) {
  std::vector<std::uint8_t> b{0x00, 0xab, 0xff};
  EXPECT_EQ(text::to_hex(b), "00abff");
  EXPECT_EQ(text::from_hex("00ABff"), b);
  EXPECT_FALSE(text::from_hex("abc"));
  EXPECT_FALSE(text::from_hex("zz"));
}

TEST(Utf8, Validation) {
  EXPECT_TRUE(text::is_valid_utf8("plain \xe4\xb8\x8a"));
  EXPECT_FALSE(text::is_valid_utf8("\xc0\xaf"));
  EXPECT_FALSE(text::is_valid_utf8("\xed\xa0\x80"));
  EXPECT_FALSE(text::is_valid_utf8("\xe4\xb8"));
}

}  // namespace
}  // namespace aicl
