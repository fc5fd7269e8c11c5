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

#include "aicl/binary.hpp"
#include "aicl/text.hpp"
#include "support/frozen_vectors.hpp"
#include "support/generators.hpp"
#include "support/reference_cbor.hpp"

namespace aicl {
namespace {

std::vector<Message> weather() {
  std::ifstream in(std::string(AICL_TEST_DATA) + "/weather_pair.aicl");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_stream(ss.str());
}

Bytes unhex(std::string_view s) { return *text::from_hex(s); }

std::string decode_rule(const Bytes& b) {
  try {
    decode(b);
  } catch (const DecodeError& e) {
    return e.rule();
  }
  return "accepted";
}

std::string decode_rule(std::string_view h) { return decode_rule(unhex(h)); }

TEST(BinaryVectors, WeatherPairMatchesIndependentEncoder) {
  auto msgs = weather();
  EXPECT_EQ(text::to_hex(encode_canonical(msgs[0])), vectors::kWeatherQuery);
  EXPECT_EQ(text::to_hex(encode_canonical(msgs[1])), vectors::kWeatherResult);
  EXPECT_EQ(decode(unhex(vectors::kWeatherQuery)), msgs[0]);
  EXPECT_EQ(decode(unhex(vectors::kWeatherResult)), msgs[1]);
}

TEST(BinaryVectors, ReferenceEncoderAgreesOnGeneratedMessages) {
  testing::Gen g(7);
  for (int i = 0; i < 500; ++i) {
    Message m = g.message();
    ASSERT_EQ(encode_canonical(m), testing::ReferenceEncoder::message(m)) << print_message(m);
  }
}

TEST(BinaryDecode, ContentKinds) {
  Message m{MessageType::Fact,
            Map{{"i", -5},
                {"f", 0.25},
                {"b", false},
                {"t", Timestamp::from_unix(0, 5)},
                {"id", Identifier::make("x", "y")},
                {"l", List{1, "two", 3.5}},
                {"c", CallExpr{"tool", "g", {{"k", 1}}}}},
            Metadata{}};
  m.meta.id = Identifier::make("u", "a");
  m.meta.ts = Timestamp::from_unix(1);
  EXPECT_EQ(decode(encode_canonical(m)), m);
}

// Builds [type, content, meta] from hex fragments for schema-level cases.
std::string message_hex(std::string_view type, std::string_view content, std::string_view meta_extra = "",
                        int extra_entries = 0) {
  // {"id": u!a, "ts": 0("1970-01-01T00:00:00Z")}
  std::string base =
      "626964da41494300826175616162747" "3c074313937302d30312d30315430303a30303a30305a";
  std::string meta = text::to_hex(std::vector<std::uint8_t>{static_cast<std::uint8_t>(0xa0 + 2 + extra_entries)}) + base +
                     std::string(meta_extra);
  return "83" + std::string(type) + std::string(content) + meta;
}

constexpr std::string_view kFact = "6446414354";  // "FACT"

TEST(BinaryDecode, MinimalMessageHex) {
  Message m = decode(unhex(message_hex(kFact, "01")));
  EXPECT_EQ(m.type, MessageType::Fact);
  EXPECT_EQ(m.content, Value(1));
  EXPECT_EQ(m.meta.id.str(), "u!a");
}

TEST(BinaryDecode, SchemaViolations) {
  EXPECT_EQ(decode_rule(message_hex("6442414e47", "01")), "CANON.SCHEMA");  // unknown type "BANG"
  EXPECT_EQ(decode_rule("8201" "02"), "CANON.SCHEMA");
  EXPECT_EQ(decode_rule(message_hex(kFact, "f6")), "CANON.TYPE");
  EXPECT_EQ(decode_rule(message_hex(kFact, "c201")), "CANON.TAG");
  EXPECT_EQ(decode_rule(message_hex(kFact, "1bffffffffffffffff")), "CANON.RANGE");
  EXPECT_EQ(decode_rule(message_hex(kFact, "4101")), "CANON.SCHEMA");
  EXPECT_EQ(decode_rule(message_hex(kFact, "a1616101")), "accepted");
  EXPECT_EQ(decode_rule(message_hex(kFact, "a1612d01")), "CANON.SCHEMA");  // key "-" is not a bare word
  // latency 1.5
  EXPECT_EQ(decode_rule(message_hex(kFact, "01", "676c6174656e6379f93e00", 1)), "CANON.SCHEMA");
  // conf 1 as an integer
  EXPECT_EQ(decode_rule(message_hex(kFact, "01", "64636f6e6601", 1)), "CANON.SCHEMA");
  // unknown metadata key "zz"
  EXPECT_EQ(decode_rule(message_hex(kFact, "01", "627a7a01", 1)), "CANON.SCHEMA");
}

TEST(BinaryDecode, NonCanonicalTimestampText) {
  // {"id": u!a, "ts": 0("1970-01-01T00:00:00.0Z")}
  std::string h =
      "8364464143540" "1a2626964da414943008261756161627473c076313937302d30312d30315430303a30303a30302e305a";
  EXPECT_EQ(decode_rule(h), "CANON.TIME");
}

TEST(BinaryDecode, DecodeReencodeIsIdentity) {
  testing::Gen g(11);
  for (int i = 0; i < 300; ++i) {
    Bytes b = encode_canonical(g.message());
    EXPECT_EQ(encode_canonical(decode(b)), b);
  }
}

TEST(FieldMask, Presets) {
  auto r = FieldMask::replay_default();
  EXPECT_TRUE(r.masks("meta.id"));
  EXPECT_TRUE(r.masks("meta.cost.tokens"));
  EXPECT_FALSE(r.masks("meta.conf"));
  EXPECT_FALSE(r.masks("wall_ts"));
  EXPECT_TRUE(FieldMask::diff_default().masks("wall_ts"));
  EXPECT_EQ(FieldMask::conf_band().conf_tolerance, 0.05);
  EXPECT_FALSE(FieldMask::none().masks("meta.id"));
}

TEST(FieldMask, Parse) {
  auto m = FieldMask::parse("content.data.temp_c, conf~0.1");
  EXPECT_TRUE(m.masks("content.data.temp_c"));
  EXPECT_TRUE(m.masks("meta.id"));
  EXPECT_EQ(m.conf_tolerance, 0.1);
  auto n = FieldMask::parse("@none,meta.ts");
  EXPECT_FALSE(n.masks("meta.id"));
  EXPECT_TRUE(n.masks("meta.ts"));
  EXPECT_TRUE(FieldMask::parse("@conf-band").conf_tolerance);
  EXPECT_THROW(FieldMask::parse("meta.bogus"), std::invalid_argument);
  EXPECT_THROW(FieldMask::parse("conf~x"), std::invalid_argument);
  EXPECT_THROW(FieldMask::parse("conf~-1"), std::invalid_argument);
  EXPECT_THROW(FieldMask::parse("elsewhere.x"), std::invalid_argument);
}

TEST(CanonicalHash, IgnoresMaskedFieldsOnly) {
  auto msgs = weather();
  Message a = msgs[0];
  Message b = a;
  b.meta.id = Identifier::make("u", "other");
  b.meta.ts = b.meta.ts.plus_seconds(60);
  b.meta.latency = 40;
  b.meta.cost = std::map<std::string, std::int64_t>{{"tokens", 9}};
  b.meta.sig = std::vector<std::uint8_t>{1, 2};
  auto mask = FieldMask::replay_default();
  EXPECT_EQ(canonical_hash(a, mask), canonical_hash(b, mask));
  EXPECT_NE(canonical_hash(a), canonical_hash(b));
  b.meta.conf = 0.5;
  EXPECT_NE(canonical_hash(a, mask), canonical_hash(b, mask));
}

TEST(CanonicalHash, MatchesIndependentDigest) {
  EXPECT_EQ(text::to_hex(canonical_hash(weather()[0], FieldMask::replay_default())), vectors::kWeatherQueryReplayKey);
}

TEST(CanonicalHash, ContentPathsInsideCallsAndLists) {
  Message a = weather()[0];
  Message b = a;
  CallExpr c = b.content.as_call();
  c.args["location"] = "Lisbon";
  b.content = c;
  FieldMask m = FieldMask::none();
  m.add("content.location");
  EXPECT_EQ(canonical_hash(a, m), canonical_hash(b, m));
  EXPECT_NE(canonical_hash(a), canonical_hash(b));

  Message l = a;
  l.content = List{1, 2};
  Message r = l;
  r.content = List{1, 3};
  FieldMask idx = FieldMask::none();
  idx.add("content[1]");
  EXPECT_EQ(canonical_hash(l, idx), canonical_hash(r, idx));
  FieldMask whole = FieldMask::none();
  whole.add("content");
  EXPECT_EQ(canonical_hash(a, whole), canonical_hash(l, whole));
}

TEST(Aiclb, RoundTrip) {
  auto msgs = weather();
  Bytes file = write_aiclb(msgs);
  EXPECT_TRUE(has_aiclb_magic(file));
  EXPECT_EQ(file[4], 1);
  EXPECT_EQ(read_aiclb(file), msgs);
  EXPECT_TRUE(read_aiclb(write_aiclb(std::vector<Message>{})).empty());
}

TEST(Aiclb, ContainerErrors) {
  auto rule = [](const Bytes& b) {
    try {
      read_aiclb(b);
    } catch (const DecodeError& e) {
      return e.rule();
    }
    return std::string("accepted");
  };
  Bytes good = write_aiclb(weather());
  EXPECT_EQ(rule(Bytes{'A', 'I', 'C', 'X', 1}), "AICLB.MAGIC");
  EXPECT_EQ(rule(Bytes{'A', 'I', 'C', 'L'}), "AICLB.TRUNCATED");
  EXPECT_EQ(rule(Bytes{'A', 'I', 'C', 'L', 2}), "AICLB.VERSION");
  Bytes cut(good.begin(), good.end() - 3);
  EXPECT_EQ(rule(cut), "AICLB.TRUNCATED");
  Bytes partial_len(good.begin(), good.begin() + 7);
  EXPECT_EQ(rule(partial_len), "AICLB.TRUNCATED");
}

TEST(Aiclb, RecordErrorsReportFileOffset) {
  auto msgs = weather();
  Bytes file = write_aiclb(msgs);
  std::size_t second = 5 + 4 + encode_canonical(msgs[0]).size() + 4;
  file[second] = 0x9f;  // the outer array becomes indefinite
  try {
    read_aiclb(file);
    FAIL() << "accepted";
  } catch (const DecodeError& e) {
    EXPECT_EQ(e.rule(), "CANON.INDEFINITE");
    EXPECT_EQ(e.offset(), second);
    EXPECT_NE(std::string(e.what()).find("record 1"), std::string::npos);
  }
}

}  // namespace
}  // namespace aicl
