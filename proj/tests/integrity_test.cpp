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

#include "aicl/integrity.hpp"
#include "aicl/text.hpp"
#include "support/frozen_vectors.hpp"

namespace aicl {
namespace {

Bytes unhex(std::string_view s) { return *text::from_hex(s); }

Message weather_result() {
  std::ifstream in(std::string(AICL_TEST_DATA) + "/weather_pair.aicl");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_stream(ss.str()).at(1);
}

TEST(Sha256, KnownDigests) {
  EXPECT_EQ(text::to_hex(sha256(Bytes{})), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  std::string abc = "abc";
  EXPECT_EQ(text::to_hex(sha256(Bytes(abc.begin(), abc.end()))),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Hmac, Rfc4231Vectors) {
  for (const auto& c : vectors::kRfc4231) {
    EXPECT_EQ(text::to_hex(hmac_sha256(unhex(c.key_hex), unhex(c.data_hex))), c.tag_hex);
  }
}

TEST(Hmac, EmptyKeyAndData) {
  // Python: hmac.new(b"", b"", hashlib.sha256).hexdigest()
  EXPECT_EQ(text::to_hex(hmac_sha256(Bytes{}, Bytes{})),
            "b613679a0814d9ec772f95d778c35fc5ff1697c493715653c6c712144292c5ad");
}

TEST(ConstantTimeEqual, ComparesContentAndLength) {
  Bytes a{1, 2, 3};
  EXPECT_TRUE(constant_time_equal(a, Bytes{1, 2, 3}));
  EXPECT_FALSE(constant_time_equal(a, Bytes{1, 2, 4}));
  EXPECT_FALSE(constant_time_equal(a, Bytes{1, 2}));
}

TEST(Integrity, SignatureMatchesIndependentHmac) {
  auto key = key_bytes(vectors::kHmacKey);
  Message signed_msg = sign_message(weather_result(), key);
  EXPECT_EQ(text::to_hex(*signed_msg.meta.sig), vectors::kWeatherResultTag);
  EXPECT_EQ(text::to_hex(encode_canonical(signed_msg)), vectors::kWeatherResultSigned);
  EXPECT_EQ(check_integrity_bytes(unhex(vectors::kWeatherResultSigned), key), IntegrityStatus::Valid);
}

TEST(Integrity, SignVerifyRoundTrip) {
  auto key = key_bytes("k");
  Message m = sign_message(weather_result(), key);
  EXPECT_TRUE(verify_integrity(m, key));
  EXPECT_EQ(check_integrity(m, key), IntegrityStatus::Valid);
  EXPECT_FALSE(verify_integrity(m, key_bytes("other")));
  // Re-signing replaces the old tag rather than covering it.
  EXPECT_EQ(sign_message(m, key), m);
}

TEST(Integrity, UnsignedIsDistinctFromInvalid) {
  auto key = key_bytes("k");
  Message m = weather_result();
  EXPECT_EQ(check_integrity(m, key), IntegrityStatus::Unsigned);
  EXPECT_FALSE(verify_integrity(m, key));
  m.meta.sig = std::vector<std::uint8_t>(32, 0);
  EXPECT_EQ(check_integrity(m, key), IntegrityStatus::Invalid);
}

TEST(Integrity, FieldTamperingIsDetected) {
  auto key = key_bytes("k");
  Message m = sign_message(weather_result(), key);
  Message t = m;
  t.meta.conf = 0.94;
  EXPECT_EQ(check_integrity(t, key), IntegrityStatus::Invalid);
  t = m;
  t.meta.latency = 1;
  EXPECT_EQ(check_integrity(t, key), IntegrityStatus::Invalid);
}

TEST(Integrity, EverySingleByteMutationFails) {
  auto key = key_bytes(vectors::kHmacKey);
  Bytes b = unhex(vectors::kWeatherResultSigned);
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::uint8_t x : {std::uint8_t{0x01}, std::uint8_t{0x80}, std::uint8_t{0xff}}) {
      Bytes t = b;
      t[i] ^= x;
      ASSERT_NE(check_integrity_bytes(t, key), IntegrityStatus::Valid) << "byte " << i << " xor " << int(x);
    }
  }
}

}  // namespace
}  // namespace aicl
