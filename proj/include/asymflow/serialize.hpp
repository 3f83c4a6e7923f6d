// Copyright 2026 The asymflow authors
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

#include <bit>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "asymflow/asymfun.hpp"
#include "asymflow/dynamics.hpp"
#include "asymflow/tail.hpp"
#include "json.hpp"

namespace asymflow {

/// IEEE-754 bit pattern of a double; the unit all binary encodings go
/// through, so NaN payloads and signed zeros survive serialization exactly.
inline std::uint64_t bit_pattern(double x) { return std::bit_cast<std::uint64_t>(x); }

/// RFC 4648 base64 (standard alphabet, padded). The double overload encodes
/// each value as its bit pattern in little-endian byte order, making sample
/// payloads byte-identical across platforms.
std::string base64_encode(const std::uint8_t* data, std::size_t n);
std::string base64_encode(const std::vector<double>& values);
/// Strict decoder: rejects non-canonical length, alphabet violations, and
/// misplaced padding with Error.
std::vector<std::uint8_t> base64_decode(const std::string& text);

/// FNV-1a 64-bit content hash; `seed` continues a running hash so multi-file
/// digests need no concatenated buffer. Not cryptographic — it fingerprints
/// outputs for the determinism contract (identical config + single thread
/// must reproduce identical digests).
constexpr std::uint64_t kFnv1a64Offset = UINT64_C(0xcbf29ce484222325);
std::uint64_t fnv1a64(const void* data, std::size_t n,
                      std::uint64_t seed = kFnv1a64Offset);
std::uint64_t fnv1a64(const std::string& s,
                      std::uint64_t seed = kFnv1a64Offset);
std::string fnv1a64_hex(const std::string& s);
std::string to_hex(std::uint64_t value);

/// Symbolic tail as a JSON array of {kind: "A"|"B", k, num, den} with the
/// exact integer coefficients as decimal strings ("A" = even family,
/// "B" = odd family).
nlohmann::json tail_to_json(const TailExpansion& t);
TailExpansion tail_from_json(const nlohmann::json& j);

/// Asymptotic function as {meta, tail, grid: {L, h}, samples, checksum}:
/// samples are the base64 remainder node values, checksum is "fnv1a64:<hex>"
/// over the raw sample bytes. af_from_json re-verifies the checksum and the
/// sample count against the grid and throws Error on any mismatch.
nlohmann::json af_to_json(const AsymFunction& u);
AsymFunction af_from_json(const nlohmann::json& j);

/// Trajectory snapshot: {t, phi_prime_min, u: <af json>}.
nlohmann::json snapshot_to_json(const Snapshot& sn);

/// Plot-ready CSV of node values: header "x,u", one row per grid node.
void write_u_csv(std::ostream& os, const AsymFunction& u);

}  // namespace asymflow
