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

#include "mdim/nn/histograms.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>

#include "mdim/error.hpp"

namespace mdim::nn {

namespace {

static_assert(std::endian::native == std::endian::little, "MDHS I/O assumes a little-endian host");

template <class T>
void put(std::ofstream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

class Reader {
 public:
  Reader(std::vector<std::uint8_t> bytes, std::string name) : bytes_(std::move(bytes)), name_(std::move(name)) {}

  template <class T>
  T get(const char* what) {
    if (bytes_.size() - pos_ < sizeof(T)) {
      throw TruncatedFileError(name_ + ": MDHS file truncated while reading " + what);
    }
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof v);
    pos_ += sizeof v;
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<double> level_edges(std::size_t bins) {
  if (bins < 2) throw ContractError("histograms need at least 2 bins");
  std::vector<double> e(bins + 1);
  e[0] = 0.0;
  for (std::size_t k = 1; k < bins; ++k) e[k] = (static_cast<double>(k) - 0.5) / static_cast<double>(bins - 1);
  e[bins] = 1.0;
  return e;
}

std::size_t level_bin(double value, std::size_t bins) {
  if (bins < 2) throw ContractError("histograms need at least 2 bins");
  const double top = static_cast<double>(bins - 1);
  const double k = std::round(std::clamp(value, 0.0, 1.0) * top);
  return static_cast<std::size_t>(k);
}

PixelHistogramSet build_histograms(const ImageArchive& archive, std::size_t bins) {
  const std::size_t n = archive.pixels_per_image();
  if (n == 0) throw ContractError("archive has empty images");
  if (archive.pixels.size() != archive.count() * n) {
    throw FormatError("archive has " + std::to_string(archive.pixels.size()) + " pixels for " +
                      std::to_string(archive.count()) + " labels");
  }
  const std::vector<double> edges = level_edges(bins);
  PixelHistogramSet out;
  out.rows = archive.rows;
  out.cols = archive.cols;
  out.bins = bins;
  out.dataset = archive.source;

  // counts[c][pixel * bins + b], c = 10 for the pooled set
  std::vector<std::vector<std::uint64_t>> counts(kCombinedClass + 1, std::vector<std::uint64_t>(n * bins, 0));
  std::vector<std::size_t> images(kCombinedClass + 1, 0);
  for (std::size_t i = 0; i < archive.count(); ++i) {
    const int y = archive.labels[i];
    if (y < 0 || y >= kCombinedClass) {
      throw FormatError("label " + std::to_string(y) + " of image " + std::to_string(i) + " outside 0..9");
    }
    const double* img = &archive.pixels[i * n];
    for (int c : {y, kCombinedClass}) {
      ++images[static_cast<std::size_t>(c)];
      auto& cnt = counts[static_cast<std::size_t>(c)];
      for (std::size_t p = 0; p < n; ++p) ++cnt[p * bins + level_bin(img[p], bins)];
    }
  }
  for (int c = 0; c <= kCombinedClass; ++c) {
    const auto uc = static_cast<std::size_t>(c);
    if (images[uc] == 0) {
      out.errors[c] = c == kCombinedClass ? "archive has no images" : "no images with label " + std::to_string(c);
      continue;
    }
    PixelHistograms set;
    set.class_id = c;
    set.images = images[uc];
    set.pixels.reserve(n);
    const double total = static_cast<double>(images[uc]);
    for (std::size_t p = 0; p < n; ++p) {
      Histogram h;
      h.edges = edges;
      h.probs.resize(bins);
      for (std::size_t b = 0; b < bins; ++b) h.probs[b] = static_cast<double>(counts[uc][p * bins + b]) / total;
      set.pixels.push_back(std::move(h));
    }
    out.sets.emplace(c, std::move(set));
  }
  return out;
}

InputModel histogram_model(const PixelHistograms& set, HistogramMode mode) {
  if (set.pixels.empty()) throw ContractError("histogram set has no pixels");
  std::vector<CoordinateDistribution> coords;
  coords.reserve(set.pixels.size());
  for (const auto& h : set.pixels) coords.push_back(CoordinateDistribution::histogram(h.edges, h.probs, mode));
  return InputModel(std::move(coords));
}

void write_mdhs(const PixelHistograms& set, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write("MDHS", 4);
  put<std::int32_t>(out, set.class_id);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(set.images));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(set.pixels.size()));
  for (const auto& h : set.pixels) {
    if (h.edges.size() != h.probs.size() + 1) throw ContractError("histogram edges/probs mismatch");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(h.bins()));
    for (double e : h.edges) put(out, e);
    for (double p : h.probs) put(out, p);
  }
  if (!out) throw FormatError("write failed for " + path.string());
}

PixelHistograms read_mdhs(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (bytes.size() < 4) throw TruncatedFileError(path.string() + ": MDHS file truncated while reading magic");
  if (std::memcmp(bytes.data(), "MDHS", 4) != 0) throw FormatError(path.string() + " is not an MDHS file");
  Reader r(std::vector<std::uint8_t>(bytes.begin() + 4, bytes.end()), path.string());
  PixelHistograms set;
  set.class_id = r.get<std::int32_t>("class id");
  set.images = r.get<std::uint32_t>("image count");
  const std::uint32_t pixels = r.get<std::uint32_t>("pixel count");
  if (pixels > r.remaining() / 4) throw TruncatedFileError(path.string() + ": pixel count exceeds file size");
  set.pixels.reserve(pixels);
  for (std::uint32_t p = 0; p < pixels; ++p) {
    const std::uint32_t bins = r.get<std::uint32_t>("bin count");
    if (bins == 0) throw FormatError(path.string() + ": pixel " + std::to_string(p) + " has no bins");
    if (bins > r.remaining() / 16) throw TruncatedFileError(path.string() + ": bin count exceeds file size");
    Histogram h;
    h.edges.resize(bins + 1);
    h.probs.resize(bins);
    for (auto& e : h.edges) e = r.get<double>("edges");
    for (auto& q : h.probs) q = r.get<double>("probabilities");
    double total = 0.0;
    for (double q : h.probs) total += q;
    if (std::abs(total - 1.0) > 1e-9) {
      throw FormatError(path.string() + ": pixel " + std::to_string(p) + " probabilities sum to " +
                        std::to_string(total));
    }
    set.pixels.push_back(std::move(h));
  }
  if (r.remaining() != 0) throw FormatError(path.string() + ": trailing bytes after MDHS data");
  return set;
}

std::string mdhs_file_name(int class_id) {
  if (class_id == kCombinedClass) return "combined.mdhs";
  if (class_id < 0 || class_id > 9) throw ContractError("class id outside 0..10");
  return "h" + std::to_string(class_id) + ".mdhs";
}

}  // namespace mdim::nn
