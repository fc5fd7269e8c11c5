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

// Message integrity: HMAC-SHA-256 over the canonical encoding of the message
// with `sig` removed.

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "aicl/binary.hpp"
#include "aicl/crypto.hpp"

namespace aicl {

enum class IntegrityStatus { Valid, Invalid, Unsigned };

inline constexpr std::string_view integrity_name(IntegrityStatus s) {
  switch (s) {
    case IntegrityStatus::Valid: return "valid";
    case IntegrityStatus::Invalid: return "invalid";
    case IntegrityStatus::Unsigned: return "unsigned";
  }
  return "?";
}

/// The bytes a signature covers.
inline Bytes signing_input(const Message& m) {
  Message unsigned_copy = m;
  unsigned_copy.meta.sig.reset();
  return encode_canonical(unsigned_copy);
}

inline std::vector<std::uint8_t> compute_sig(const Message& m, std::span<const std::uint8_t> key) {
  Digest tag = hmac_sha256(key, signing_input(m));
  return {tag.begin(), tag.end()};
}

/// Returns a copy of `m` carrying the signature for `key`.
inline Message sign_message(Message m, std::span<const std::uint8_t> key) {
  m.meta.sig = compute_sig(m, key);
  return m;
}

inline IntegrityStatus check_integrity(const Message& m, std::span<const std::uint8_t> key) {
  if (!m.meta.sig) return IntegrityStatus::Unsigned;
  auto expected = compute_sig(m, key);
  return constant_time_equal(expected, *m.meta.sig) ? IntegrityStatus::Valid : IntegrityStatus::Invalid;
}

/// True iff the message is signed and the signature verifies. Use
/// check_integrity() to tell an unsigned message from a forged one.
inline bool verify_integrity(const Message& m, std::span<const std::uint8_t> key) {
  return check_integrity(m, key) == IntegrityStatus::Valid;
}

/// Verifies canonical bytes directly; a byte string that no longer decodes
/// counts as Invalid.
inline IntegrityStatus check_integrity_bytes(std::span<const std::uint8_t> bytes, std::span<const std::uint8_t> key) {
  Message m;
  try {
    m = decode(bytes);
  } catch (const DecodeError&) {
    return IntegrityStatus::Invalid;
  }
  return check_integrity(m, key);
}

inline std::vector<std::uint8_t> key_bytes(std::string_view s) { return {s.begin(), s.end()}; }

}  // namespace aicl
