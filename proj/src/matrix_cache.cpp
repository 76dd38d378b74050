/*
 * Copyright 2026 The foodloc Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fmt/format.h>
#include <fstream>
#include <iterator>

#include <json.hpp>
#include <zlib.h>

#include "foodloc/distance.hpp"
#include "foodloc/error.hpp"

// DMAT1 layout, all integers little-endian:
//   "DMAT1" | u32 rows | u32 cols | rows*cols f64 row-major |
//   u32 trailer length | UTF-8 JSON trailer
// The trailer holds sources, destinations, provider_tag, created_at and the
// CRC32 of the float block.

namespace foodloc::distance {

using nlohmann::json;

namespace {

constexpr std::array<char, 5> kMagic = {'D', 'M', 'A', 'T', '1'};

[[noreturn]] void format_error(const std::filesystem::path& path,
                               const std::string& what) {
  throw Error(ErrorKind::Format, fmt::format("{}: {}", path.string(), what));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

std::uint32_t get_u32(const unsigned char* p) {
  return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
         std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

void put_f64(std::string& out, double v) {
  const auto bits = std::bit_cast<std::uint64_t>(v);
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double get_f64(const unsigned char* p) {
  std::uint64_t bits = 0;
  for (int i = 7; i >= 0; --i) bits = (bits << 8) | p[i];
  return std::bit_cast<double>(bits);
}

json points_json(const std::vector<GeoPoint>& points) {
  json arr = json::array();
  for (const auto& p : points) arr.push_back({p.lat, p.lon});
  return arr;
}

std::vector<GeoPoint> points_from(const json& arr) {
  std::vector<GeoPoint> out;
  for (const auto& p : arr) {
    out.push_back(GeoPoint{p.at(0).get<double>(), p.at(1).get<double>()});
  }
  return out;
}

}  // namespace

void save_matrix(const DistanceMatrix& matrix,
                 const std::filesystem::path& path) {
  std::string buf(kMagic.begin(), kMagic.end());
  put_u32(buf, static_cast<std::uint32_t>(matrix.rows()));
  put_u32(buf, static_cast<std::uint32_t>(matrix.cols()));
  const std::size_t block_begin = buf.size();
  for (double v : matrix.values()) put_f64(buf, v);
  const auto crc = crc32(
      0L, reinterpret_cast<const Bytef*>(buf.data() + block_begin),
      static_cast<uInt>(buf.size() - block_begin));

  json trailer = {
      {"sources", points_json(matrix.sources())},
      {"destinations", points_json(matrix.destinations())},
      {"provider_tag", matrix.provider_tag()},
      {"created_at", matrix.created_at()},
      {"crc32", crc},
  };
  const std::string text = trailer.dump();
  put_u32(buf, static_cast<std::uint32_t>(text.size()));
  buf += text;

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::Io, fmt::format("{}: cannot write", path.string()));
  }
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) {
    throw Error(ErrorKind::Io, fmt::format("{}: write failed", path.string()));
  }
}

DistanceMatrix load_matrix(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::Io, fmt::format("{}: cannot open", path.string()));
  }
  const std::string raw((std::istreambuf_iterator<char>(in)),
                        std::istreambuf_iterator<char>());
  const auto* bytes = reinterpret_cast<const unsigned char*>(raw.data());

  if (raw.size() < kMagic.size() ||
      std::memcmp(raw.data(), kMagic.data(), kMagic.size()) != 0) {
    format_error(path, "bad magic, not a DMAT1 file");
  }
  if (raw.size() < 13) format_error(path, "truncated header");
  const std::uint64_t rows = get_u32(bytes + 5);
  const std::uint64_t cols = get_u32(bytes + 9);
  const std::uint64_t block_end = 13 + rows * cols * 8;
  if (raw.size() < block_end + 4) format_error(path, "truncated value block");
  const std::uint64_t trailer_len = get_u32(bytes + block_end);
  if (raw.size() < block_end + 4 + trailer_len) {
    format_error(path, "truncated trailer");
  }
  if (raw.size() > block_end + 4 + trailer_len) {
    format_error(path, "trailing bytes after trailer");
  }

  json trailer;
  try {
    trailer = json::parse(raw.begin() + static_cast<std::ptrdiff_t>(block_end + 4),
                          raw.end());
  } catch (const json::exception& e) {
    format_error(path, fmt::format("malformed trailer: {}", e.what()));
  }

  const auto crc = crc32(0L, reinterpret_cast<const Bytef*>(bytes + 13),
                         static_cast<uInt>(rows * cols * 8));
  try {
    if (trailer.at("crc32").get<std::uint64_t>() != crc) {
      format_error(path, "checksum mismatch");
    }
    auto sources = points_from(trailer.at("sources"));
    auto destinations = points_from(trailer.at("destinations"));
    if (sources.size() != rows || destinations.size() != cols) {
      format_error(path, "trailer point counts disagree with header");
    }
    std::vector<double> values(rows * cols);
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = get_f64(bytes + 13 + 8 * i);
    }
    return DistanceMatrix(std::move(sources), std::move(destinations),
                          std::move(values),
                          trailer.at("provider_tag").get<std::string>(),
                          trailer.at("created_at").get<std::string>());
  } catch (const json::exception& e) {
    format_error(path, fmt::format("malformed trailer: {}", e.what()));
  }
}

}  // namespace foodloc::distance
