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

#include "asymflow/serialize.hpp"

#include <array>
#include <cstdio>
#include <ostream>

#include "asymflow/errors.hpp"
#include "asymflow/grid.hpp"
#include "asymflow/rational.hpp"

namespace asymflow {

namespace {

constexpr char kAlphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::array<int, 256> decode_table() {
  std::array<int, 256> t{};
  t.fill(-1);
  for (int i = 0; i < 64; ++i) {
    t[static_cast<unsigned char>(kAlphabet[i])] = i;
  }
  return t;
}

}  // namespace

std::string base64_encode(const std::uint8_t* data, std::size_t n) {
  std::string out;
  out.reserve((n + 2) / 3 * 4);
  for (std::size_t i = 0; i < n; i += 3) {
    const std::uint32_t b0 = data[i];
    const std::uint32_t b1 = i + 1 < n ? data[i + 1] : 0;
    const std::uint32_t b2 = i + 2 < n ? data[i + 2] : 0;
    const std::uint32_t triple = (b0 << 16) | (b1 << 8) | b2;
    out.push_back(kAlphabet[(triple >> 18) & 63]);
    out.push_back(kAlphabet[(triple >> 12) & 63]);
    out.push_back(i + 1 < n ? kAlphabet[(triple >> 6) & 63] : '=');
    out.push_back(i + 2 < n ? kAlphabet[triple & 63] : '=');
  }
  return out;
}

std::string base64_encode(const std::vector<double>& values) {
  std::vector<std::uint8_t> bytes;
  bytes.reserve(values.size() * 8);
  for (double v : values) {
    const std::uint64_t bits = bit_pattern(v);
    for (int s = 0; s < 64; s += 8) {
      bytes.push_back(static_cast<std::uint8_t>((bits >> s) & 0xff));
    }
  }
  return base64_encode(bytes.data(), bytes.size());
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  static const std::array<int, 256> table = decode_table();
  if (text.size() % 4 != 0) {
    throw Error("base64: length must be a multiple of 4");
  }
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int j = 0; j < 4; ++j) {
      const char c = text[i + j];
      if (c == '=') {
        // Padding is only legal in the last 1-2 positions of the last group.
        if (i + 4 != text.size() || j < 2) {
          throw Error("base64: misplaced padding");
        }
        vals[j] = 0;
        ++pad;
      } else {
        if (pad > 0) throw Error("base64: data after padding");
        vals[j] = table[static_cast<unsigned char>(c)];
        if (vals[j] < 0) {
          throw Error(std::string("base64: invalid character '") + c + "'");
        }
      }
    }
    const std::uint32_t triple = (static_cast<std::uint32_t>(vals[0]) << 18) |
                                 (static_cast<std::uint32_t>(vals[1]) << 12) |
                                 (static_cast<std::uint32_t>(vals[2]) << 6) |
                                 static_cast<std::uint32_t>(vals[3]);
    out.push_back(static_cast<std::uint8_t>((triple >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((triple >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(triple & 0xff));
  }
  return out;
}

std::uint64_t fnv1a64(const void* data, std::size_t n, std::uint64_t seed) {
  constexpr std::uint64_t kPrime = UINT64_C(0x100000001b3);
  const auto* bytes = static_cast<const std::uint8_t*>(data);
  std::uint64_t h = seed;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= kPrime;
  }
  return h;
}

std::uint64_t fnv1a64(const std::string& s, std::uint64_t seed) {
  return fnv1a64(s.data(), s.size(), seed);
}

std::string to_hex(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(value));
  return std::string(buf);
}

std::string fnv1a64_hex(const std::string& s) { return to_hex(fnv1a64(s)); }

nlohmann::json tail_to_json(const TailExpansion& t) {
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& [key, coeff] : t.terms()) {
    arr.push_back({{"kind", key.kind == TermKind::Even ? "A" : "B"},
                   {"k", key.order},
                   {"num", numerator(coeff).str()},
                   {"den", denominator(coeff).str()}});
  }
  return arr;
}

TailExpansion tail_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("tail json: expected an array of terms");
  TailExpansion t;
  for (const auto& term : j) {
    const std::string kind = term.at("kind").get<std::string>();
    if (kind != "A" && kind != "B") {
      throw Error("tail json: term kind must be \"A\" or \"B\", got \"" + kind +
                  "\"");
    }
    const int k = term.at("k").get<int>();
    BigInt num, den;
    try {
      num = BigInt(term.at("num").get<std::string>());
      den = BigInt(term.at("den").get<std::string>());
    } catch (const std::exception& e) {
      throw Error(std::string("tail json: bad integer coefficient: ") + e.what());
    }
    if (den == 0) throw Error("tail json: zero denominator");
    t.add_term(kind == "A" ? TermKind::Even : TermKind::Odd, k,
               Rational(num, den));
  }
  return t;
}

namespace {

nlohmann::json meta_to_json(const SpaceMeta& meta) {
  return {{"flavor", meta.flavor == Flavor::W ? "W" : "H"},
          {"n", meta.n},
          {"N", meta.N},
          {"m", meta.m}};
}

SpaceMeta meta_from_json(const nlohmann::json& j) {
  const std::string flavor = j.at("flavor").get<std::string>();
  if (flavor != "W" && flavor != "H") {
    throw Error("meta json: flavor must be \"W\" or \"H\"");
  }
  return SpaceMeta{flavor == "W" ? Flavor::W : Flavor::H,
                   j.at("n").get<int>(), j.at("N").get<int>(),
                   j.at("m").get<int>()};
}

std::string samples_checksum(const std::vector<double>& samples) {
  std::uint64_t h = kFnv1a64Offset;
  for (double v : samples) {
    const std::uint64_t bits = bit_pattern(v);
    std::uint8_t bytes[8];
    for (int s = 0; s < 8; ++s) {
      bytes[s] = static_cast<std::uint8_t>((bits >> (8 * s)) & 0xff);
    }
    h = fnv1a64(bytes, 8, h);
  }
  return "fnv1a64:" + to_hex(h);
}

}  // namespace

nlohmann::json af_to_json(const AsymFunction& u) {
  return {{"meta", meta_to_json(u.meta)},
          {"tail", tail_to_json(u.tail)},
          {"grid", {{"L", u.rem.grid.half_width}, {"h", u.rem.grid.spacing}}},
          {"samples", base64_encode(u.rem.samples)},
          {"checksum", samples_checksum(u.rem.samples)}};
}

AsymFunction af_from_json(const nlohmann::json& j) {
  const SpaceMeta meta = meta_from_json(j.at("meta"));
  const Grid grid = Grid::make(j.at("grid").at("L").get<double>(),
                               j.at("grid").at("h").get<double>());
  const std::vector<std::uint8_t> bytes =
      base64_decode(j.at("samples").get<std::string>());
  if (bytes.size() != static_cast<std::size_t>(grid.size) * 8) {
    throw Error("af json: sample payload does not match the grid size");
  }
  std::vector<double> samples(grid.size);
  for (int i = 0; i < grid.size; ++i) {
    std::uint64_t bits = 0;
    for (int s = 0; s < 8; ++s) {
      bits |= static_cast<std::uint64_t>(bytes[8 * i + s]) << (8 * s);
    }
    samples[i] = std::bit_cast<double>(bits);
  }
  if (samples_checksum(samples) != j.at("checksum").get<std::string>()) {
    throw Error("af json: sample checksum mismatch (corrupted payload)");
  }
  return af_from_parts(tail_from_json(j.at("tail")), std::move(samples), grid,
                       meta);
}

nlohmann::json snapshot_to_json(const Snapshot& sn) {
  return {{"t", sn.t},
          {"phi_prime_min", sn.state.phi.phi_prime_min},
          {"u", af_to_json(sn.u)}};
}

void write_u_csv(std::ostream& os, const AsymFunction& u) {
  os << "x,u\n";
  os.precision(17);
  const std::vector<double> total = af_total_samples(u);
  for (int i = 0; i < u.rem.grid.size; ++i) {
    os << u.rem.grid.x(i) << "," << total[i] << "\n";
  }
}

}  // namespace asymflow
