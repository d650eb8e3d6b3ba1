// Copyright 2026 The meandim Authors
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

#include "mdim/nn/idx.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>

#include "mdim/error.hpp"

namespace mdim::nn {

namespace {

constexpr std::uint32_t kImageMagic = 0x00000803;
constexpr std::uint32_t kLabelMagic = 0x00000801;

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& b, std::size_t at, const std::filesystem::path& path) {
  if (b.size() < at + 4) throw TruncatedFileError("IDX header truncated in " + path.string());
  return (std::uint32_t{b[at]} << 24) | (std::uint32_t{b[at + 1]} << 16) | (std::uint32_t{b[at + 2]} << 8) |
         std::uint32_t{b[at + 3]};
}

void put_be32(std::ofstream& out, std::uint32_t v) {
  const char b[4] = {static_cast<char>(v >> 24), static_cast<char>(v >> 16), static_cast<char>(v >> 8),
                     static_cast<char>(v)};
  out.write(b, 4);
}

}  // namespace

ImageArchive read_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto ib = slurp(images);
  const auto lb = slurp(labels);
  if (be32(ib, 0, images) != kImageMagic) throw FormatError(images.string() + " is not an IDX image file");
  if (be32(lb, 0, labels) != kLabelMagic) throw FormatError(labels.string() + " is not an IDX label file");
  const std::size_t count = be32(ib, 4, images);
  ImageArchive a;
  a.rows = be32(ib, 8, images);
  a.cols = be32(ib, 12, images);
  a.source = images.string();
  const std::size_t label_count = be32(lb, 4, labels);
  if (label_count != count) {
    throw FormatError("IDX label count " + std::to_string(label_count) + " differs from image count " +
                      std::to_string(count));
  }
  const std::size_t pixels = count * a.rows * a.cols;
  if (ib.size() - 16 < pixels) throw TruncatedFileError("IDX image data truncated in " + images.string());
  if (lb.size() - 8 < count) throw TruncatedFileError("IDX label data truncated in " + labels.string());
  a.pixels.resize(pixels);
  for (std::size_t i = 0; i < pixels; ++i) a.pixels[i] = ib[16 + i] / 255.0;
  a.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) a.labels[i] = lb[8 + i];
  return a;
}

ImageArchive read_image_csv(const std::filesystem::path& path, std::size_t rows, std::size_t cols) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  ImageArchive a;
  a.rows = rows;
  a.cols = cols;
  a.source = path.string();
  const std::size_t n = rows * cols;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> fields;
    const char* p = line.data();
    const char* end = p + line.size();
    bool numeric = true;
    while (p <= end) {
      const char* comma = std::find(p, end, ',');
      double v = 0.0;
      const auto res = std::from_chars(p, comma, v);
      if (res.ec != std::errc() || res.ptr != comma) {
        numeric = false;
        break;
      }
      fields.push_back(v);
      p = comma + 1;
    }
    if (!numeric) {
      if (line_no == 1) continue;  // header
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": non-numeric field");
    }
    if (fields.size() != n + 1) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(n + 1) +
                        " fields, got " + std::to_string(fields.size()));
    }
    a.labels.push_back(static_cast<int>(fields[0]));
    for (std::size_t i = 1; i <= n; ++i) {
      if (fields[i] < 0.0 || fields[i] > 255.0) {
        throw FormatError(path.string() + ":" + std::to_string(line_no) + ": pixel outside 0..255");
      }
      a.pixels.push_back(fields[i] / 255.0);
    }
  }
  return a;
}

void write_idx(const ImageArchive& archive, const std::filesystem::path& images,
               const std::filesystem::path& labels) {
  if (archive.pixels.size() != archive.count() * archive.pixels_per_image()) {
    throw ContractError("archive pixel count does not match labels");
  }
  std::ofstream im(images, std::ios::binary);
  std::ofstream lb(labels, std::ios::binary);
  if (!im || !lb) throw FormatError("cannot write IDX files");
  put_be32(im, kImageMagic);
  put_be32(im, static_cast<std::uint32_t>(archive.count()));
  put_be32(im, static_cast<std::uint32_t>(archive.rows));
  put_be32(im, static_cast<std::uint32_t>(archive.cols));
  for (double v : archive.pixels) {
    const double q = std::round(std::clamp(v, 0.0, 1.0) * 255.0);
    im.put(static_cast<char>(static_cast<std::uint8_t>(q)));
  }
  put_be32(lb, kLabelMagic);
  put_be32(lb, static_cast<std::uint32_t>(archive.count()));
  for (int l : archive.labels) lb.put(static_cast<char>(static_cast<std::uint8_t>(l)));
  if (!im || !lb) throw FormatError("IDX write failed");
}

}  // namespace mdim::nn
