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

#include "mdim/nn/network.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include "json.hpp"
#include <sstream>

#include "mdim/error.hpp"

namespace mdim::nn {

namespace {

static_assert(std::endian::native == std::endian::little, "MDNN I/O assumes a little-endian host");

enum Tag : std::uint32_t { kConv = 1, kMaxPool = 2, kFlatten = 3, kDense = 4, kDropout = 5 };

std::string shape_str(const Shape& s) {
  if (s.height == 1 && s.width == 1) return std::to_string(s.channels);
  return std::to_string(s.height) + "x" + std::to_string(s.width) + "x" + std::to_string(s.channels);
}

std::string_view activation_name(Activation a) { return a == Activation::Relu ? "relu" : "identity"; }

Activation checked_activation(std::uint32_t tag) {
  if (tag > 1) throw FormatError("unknown activation tag " + std::to_string(tag));
  return static_cast<Activation>(tag);
}

Shape conv_shape(const Shape& in, const Conv2D& c, std::size_t layer) {
  auto fail = [&](const std::string& why) {
    throw ShapeMismatchError("layer " + std::to_string(layer) + " (conv): " + why);
  };
  if (c.out_channels == 0 || c.kernel_h == 0 || c.kernel_w == 0 || c.stride == 0) fail("zero-sized parameter");
  if (c.in_channels != in.channels) {
    fail("expects " + std::to_string(c.in_channels) + " input channels, got " + std::to_string(in.channels));
  }
  const std::size_t ph = in.height + 2 * std::size_t{c.padding};
  const std::size_t pw = in.width + 2 * std::size_t{c.padding};
  if (ph < c.kernel_h || pw < c.kernel_w) fail("kernel larger than padded input");
  const std::size_t wcount = std::size_t{c.out_channels} * c.in_channels * c.kernel_h * c.kernel_w;
  if (c.weights.size() != wcount || c.bias.size() != c.out_channels) fail("weight count mismatch");
  return {(ph - c.kernel_h) / c.stride + 1, (pw - c.kernel_w) / c.stride + 1, c.out_channels};
}

// Little-endian reader that reports truncation distinctly.
class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n) {
      throw TruncatedFileError(std::string("MDNN file truncated while reading ") + what);
    }
  }
  std::uint32_t u32(const char* what) {
    need(4, what);
    std::uint32_t v;
    std::memcpy(&v, bytes_.data() + pos_, 4);
    pos_ += 4;
    return v;
  }
  float f32(const char* what) {
    const std::uint32_t bits = u32(what);
    return std::bit_cast<float>(bits);
  }
  std::vector<float> floats(std::size_t n, const char* what) {
    if (n > (bytes_.size() - pos_) / 4) {
      throw TruncatedFileError(std::string("MDNN file truncated while reading ") + what);
    }
    std::vector<float> v(n);
    std::memcpy(v.data(), bytes_.data() + pos_, n * 4);
    pos_ += n * 4;
    return v;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

class Writer {
 public:
  void u32(std::uint32_t v) { append(&v, 4); }
  void f32(float v) { append(&v, 4); }
  void floats(const std::vector<float>& v) { append(v.data(), v.size() * 4); }
  std::vector<std::uint8_t> take() { return std::move(bytes_); }

 private:
  void append(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    bytes_.insert(bytes_.end(), b, b + n);
  }
  std::vector<std::uint8_t> bytes_;
};

std::vector<double> widen(const std::vector<float>& v) { return {v.begin(), v.end()}; }

void apply_activation(std::vector<double>& v, Activation a) {
  if (a == Activation::Relu) {
    for (double& x : v) x = x > 0.0 ? x : 0.0;
  }
}

}  // namespace

Network::Network(Shape input, std::vector<Layer> layers) : input_(input), layers_(std::move(layers)) {
  if (input_.size() == 0) throw ShapeMismatchError("network input shape is empty");
  if (layers_.empty()) throw ShapeMismatchError("network has no layers");
  Shape cur = input_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    std::vector<double> w;
    std::vector<double> b;
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, Conv2D>) {
            cur = conv_shape(cur, l, i);
            w = widen(l.weights);
            b = widen(l.bias);
          } else if constexpr (std::is_same_v<L, MaxPool>) {
            if (l.window == 0 || l.stride == 0 || cur.height < l.window || cur.width < l.window) {
              throw ShapeMismatchError("layer " + std::to_string(i) + " (maxpool): window does not fit " +
                                       shape_str(cur));
            }
            cur = {(cur.height - l.window) / l.stride + 1, (cur.width - l.window) / l.stride + 1, cur.channels};
          } else if constexpr (std::is_same_v<L, Flatten>) {
            cur = {1, 1, cur.size()};
          } else if constexpr (std::is_same_v<L, Dense>) {
            if (l.in != cur.size()) {
              throw ShapeMismatchError("layer " + std::to_string(i) + " (dense): expects " + std::to_string(l.in) +
                                       " inputs, got " + std::to_string(cur.size()));
            }
            if (l.out == 0 || l.weights.size() != std::size_t{l.in} * l.out || l.bias.size() != l.out) {
              throw ShapeMismatchError("layer " + std::to_string(i) + " (dense): weight count mismatch");
            }
            cur = {1, 1, l.out};
            w = widen(l.weights);
            b = widen(l.bias);
          } else {
            if (!(l.rate >= 0.0f && l.rate < 1.0f)) {
              throw ShapeMismatchError("layer " + std::to_string(i) + " (dropout): rate outside [0, 1)");
            }
          }
        },
        layers_[i]);
    shapes_.push_back(cur);
    weights_.push_back(std::move(w));
    biases_.push_back(std::move(b));
  }
}

std::vector<double> Network::logits(std::span<const double> x) const {
  if (x.size() != input_size()) {
    throw ContractError("input has " + std::to_string(x.size()) + " values, network expects " +
                        std::to_string(input_size()));
  }
  std::vector<double> cur(x.begin(), x.end());
  std::vector<double> next;
  Shape shape = input_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Shape& os = shapes_[i];
    const auto& w = weights_[i];
    const auto& b = biases_[i];
    const char* kind = "dropout";
    if (const auto* c = std::get_if<Conv2D>(&layers_[i])) {
      kind = "conv";
      const std::size_t ic = c->in_channels;
      const std::size_t kh = c->kernel_h;
      const std::size_t kw = c->kernel_w;
      const auto pad = static_cast<std::ptrdiff_t>(c->padding);
      next.assign(os.size(), 0.0);
      for (std::size_t oy = 0; oy < os.height; ++oy) {
        for (std::size_t ox = 0; ox < os.width; ++ox) {
          double* dst = &next[(oy * os.width + ox) * os.channels];
          for (std::size_t o = 0; o < os.channels; ++o) {
            double acc = b[o];
            for (std::size_t ky = 0; ky < kh; ++ky) {
              const std::ptrdiff_t iy = static_cast<std::ptrdiff_t>(oy * c->stride + ky) - pad;
              if (iy < 0 || iy >= static_cast<std::ptrdiff_t>(shape.height)) continue;
              for (std::size_t kx = 0; kx < kw; ++kx) {
                const std::ptrdiff_t ix = static_cast<std::ptrdiff_t>(ox * c->stride + kx) - pad;
                if (ix < 0 || ix >= static_cast<std::ptrdiff_t>(shape.width)) continue;
                const double* src = &cur[(static_cast<std::size_t>(iy) * shape.width + static_cast<std::size_t>(ix)) * ic];
                const double* wk = &w[((o * ic) * kh + ky) * kw + kx];
                for (std::size_t ch = 0; ch < ic; ++ch) acc += wk[ch * kh * kw] * src[ch];
              }
            }
            dst[o] = acc;
          }
        }
      }
      apply_activation(next, c->activation);
      cur.swap(next);
    } else if (const auto* p = std::get_if<MaxPool>(&layers_[i])) {
      kind = "maxpool";
      next.assign(os.size(), 0.0);
      for (std::size_t oy = 0; oy < os.height; ++oy) {
        for (std::size_t ox = 0; ox < os.width; ++ox) {
          for (std::size_t ch = 0; ch < os.channels; ++ch) {
            double m = -std::numeric_limits<double>::infinity();
            for (std::size_t ky = 0; ky < p->window; ++ky) {
              for (std::size_t kx = 0; kx < p->window; ++kx) {
                const std::size_t iy = oy * p->stride + ky;
                const std::size_t ix = ox * p->stride + kx;
                m = std::max(m, cur[(iy * shape.width + ix) * shape.channels + ch]);
              }
            }
            next[(oy * os.width + ox) * os.channels + ch] = m;
          }
        }
      }
      cur.swap(next);
    } else if (const auto* d = std::get_if<Dense>(&layers_[i])) {
      kind = "dense";
      next.assign(d->out, 0.0);
      for (std::size_t o = 0; o < d->out; ++o) {
        const double* row = &w[o * d->in];
        double acc = b[o];
        for (std::size_t k = 0; k < d->in; ++k) acc += row[k] * cur[k];
        next[o] = acc;
      }
      apply_activation(next, d->activation);
      cur.swap(next);
    } else if (std::holds_alternative<Flatten>(layers_[i])) {
      kind = "flatten";
    }
    shape = os;
    for (double v : cur) {
      if (!std::isfinite(v)) {
        throw EvaluationError("non-finite activation in layer " + std::to_string(i) + " (" + kind + ")",
                              std::vector<double>(x.begin(), x.end()));
      }
    }
  }
  return cur;
}

Network::Output Network::forward(std::span<const double> x) const {
  Output out;
  out.g = logits(x);
  out.f = softmax(out.g);
  return out;
}

std::string Network::describe() const {
  std::ostringstream s;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    if (i) s << " | ";
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, Conv2D>) {
            s << "conv " << l.out_channels << "x" << l.kernel_h << "x" << l.kernel_w;
            if (l.activation == Activation::Relu) s << " relu";
          } else if constexpr (std::is_same_v<L, MaxPool>) {
            s << "maxpool " << l.window;
          } else if constexpr (std::is_same_v<L, Flatten>) {
            s << "flatten";
          } else if constexpr (std::is_same_v<L, Dense>) {
            s << "dense " << l.out;
            if (l.activation == Activation::Relu) s << " relu";
          } else {
            s << "dropout " << l.rate;
          }
        },
        layers_[i]);
    s << " -> " << shape_str(shapes_[i]);
  }
  return s.str();
}

std::vector<double> softmax(std::span<const double> g) {
  if (g.empty()) return {};
  const double m = *std::max_element(g.begin(), g.end());
  std::vector<double> f(g.size());
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    f[i] = std::exp(g[i] - m);
    total += f[i];
  }
  for (double& v : f) v /= total;
  return f;
}

Network parse_network(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw TruncatedFileError("MDNN file truncated while reading magic");
  if (std::memcmp(bytes.data(), "MDNN", 4) != 0) throw FormatError("not an MDNN file (bad magic)");
  Reader r(bytes.subspan(4));
  const std::uint32_t version = r.u32("version");
  if (version != kNetworkFormatVersion) {
    throw VersionMismatchError("MDNN version " + std::to_string(version) + ", expected " +
                               std::to_string(kNetworkFormatVersion));
  }
  Shape input;
  input.height = r.u32("input height");
  input.width = r.u32("input width");
  input.channels = r.u32("input channels");
  const std::uint32_t count = r.u32("layer count");
  // every layer takes at least its 4-byte tag
  if (count > r.remaining() / 4) throw TruncatedFileError("MDNN layer count exceeds file size");
  std::vector<Layer> layers;
  for (std::uint32_t i = 0; i < count; ++i) {
    const std::uint32_t tag = r.u32("layer tag");
    switch (tag) {
      case kConv: {
        Conv2D c;
        c.out_channels = r.u32("conv shape");
        c.in_channels = r.u32("conv shape");
        c.kernel_h = r.u32("conv shape");
        c.kernel_w = r.u32("conv shape");
        c.stride = r.u32("conv stride");
        c.padding = r.u32("conv padding");
        c.activation = checked_activation(r.u32("conv activation"));
        c.weights = r.floats(std::size_t{c.out_channels} * c.in_channels * c.kernel_h * c.kernel_w, "conv weights");
        c.bias = r.floats(c.out_channels, "conv bias");
        layers.emplace_back(std::move(c));
        break;
      }
      case kMaxPool: {
        MaxPool p;
        p.window = r.u32("pool window");
        p.stride = r.u32("pool stride");
        layers.emplace_back(p);
        break;
      }
      case kFlatten:
        layers.emplace_back(Flatten{});
        break;
      case kDense: {
        Dense d;
        d.in = r.u32("dense shape");
        d.out = r.u32("dense shape");
        d.activation = checked_activation(r.u32("dense activation"));
        d.weights = r.floats(std::size_t{d.in} * d.out, "dense weights");
        d.bias = r.floats(d.out, "dense bias");
        layers.emplace_back(std::move(d));
        break;
      }
      case kDropout:
        layers.emplace_back(Dropout{r.f32("dropout rate")});
        break;
      default:
        throw FormatError("unknown MDNN layer tag " + std::to_string(tag));
    }
  }
  if (r.remaining() != 0) throw FormatError("MDNN file has " + std::to_string(r.remaining()) + " trailing bytes");
  return Network(input, std::move(layers));
}

std::vector<std::uint8_t> serialize_network(const Network& net) {
  Writer w;
  w.u32(0x4e4e444du);  // "MDNN" read as little-endian u32
  w.u32(kNetworkFormatVersion);
  w.u32(static_cast<std::uint32_t>(net.input_shape().height));
  w.u32(static_cast<std::uint32_t>(net.input_shape().width));
  w.u32(static_cast<std::uint32_t>(net.input_shape().channels));
  w.u32(static_cast<std::uint32_t>(net.layers().size()));
  for (const Layer& layer : net.layers()) {
    std::visit(
        [&](const auto& l) {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, Conv2D>) {
            w.u32(kConv);
            for (std::uint32_t v : {l.out_channels, l.in_channels, l.kernel_h, l.kernel_w, l.stride, l.padding}) {
              w.u32(v);
            }
            w.u32(static_cast<std::uint32_t>(l.activation));
            w.floats(l.weights);
            w.floats(l.bias);
          } else if constexpr (std::is_same_v<L, MaxPool>) {
            w.u32(kMaxPool);
            w.u32(l.window);
            w.u32(l.stride);
          } else if constexpr (std::is_same_v<L, Flatten>) {
            w.u32(kFlatten);
          } else if constexpr (std::is_same_v<L, Dense>) {
            w.u32(kDense);
            w.u32(l.in);
            w.u32(l.out);
            w.u32(static_cast<std::uint32_t>(l.activation));
            w.floats(l.weights);
            w.floats(l.bias);
          } else {
            w.u32(kDropout);
            w.f32(l.rate);
          }
        },
        layer);
  }
  return w.take();
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_network(bytes);
}

void save_network(const Network& net, const std::filesystem::path& path) {
  const auto bytes = serialize_network(net);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw FormatError("write failed for " + path.string());
}

std::string network_sidecar_json(const Network& net) {
  using nlohmann::ordered_json;
  auto shape_json = [](const Shape& s) { return ordered_json::array({s.height, s.width, s.channels}); };
  ordered_json layers = ordered_json::array();
  std::size_t params = 0;
  for (std::size_t i = 0; i < net.layers().size(); ++i) {
    ordered_json l;
    std::visit(
        [&](const auto& v) {
          using L = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<L, Conv2D>) {
            l = {{"type", "conv"},
                 {"kernels", v.out_channels},
                 {"kernel", {v.kernel_h, v.kernel_w}},
                 {"stride", v.stride},
                 {"padding", v.padding},
                 {"activation", activation_name(v.activation)}};
            params += v.weights.size() + v.bias.size();
          } else if constexpr (std::is_same_v<L, MaxPool>) {
            l = {{"type", "maxpool"}, {"window", v.window}, {"stride", v.stride}};
          } else if constexpr (std::is_same_v<L, Flatten>) {
            l = {{"type", "flatten"}};
          } else if constexpr (std::is_same_v<L, Dense>) {
            l = {{"type", "dense"}, {"in", v.in}, {"out", v.out}, {"activation", activation_name(v.activation)}};
            params += v.weights.size() + v.bias.size();
          } else {
            l = {{"type", "dropout"}, {"rate", v.rate}};
          }
        },
        net.layers()[i]);
    l["output_shape"] = shape_json(net.layer_shapes()[i]);
    layers.push_back(std::move(l));
  }
  ordered_json j = {{"format", "MDNN"},
                    {"version", kNetworkFormatVersion},
                    {"input_shape", shape_json(net.input_shape())},
                    {"classes", net.classes()},
                    {"parameters", params},
                    {"layers", layers}};
  return j.dump(2);
}

std::string_view to_string(Target t) noexcept { return t == Target::Logit ? "g" : "f"; }

Target parse_target(std::string_view name) {
  if (name == "g" || name == "logit") return Target::Logit;
  if (name == "f" || name == "softmax") return Target::Softmax;
  throw ContractError("unknown target '" + std::string(name) + "' (use g or f)");
}

BlackBox network_box(std::shared_ptr<const Network> net) {
  if (!net) throw ContractError("network_box: null network");
  const std::size_t classes = net->classes();
  auto fn = [net, classes](std::span<const double> x, std::span<double> out) {
    const std::vector<double> g = net->logits(x);
    const std::vector<double> f = softmax(g);
    std::copy(g.begin(), g.end(), out.begin());
    std::copy(f.begin(), f.end(), out.begin() + static_cast<std::ptrdiff_t>(classes));
  };
  return BlackBox(net->input_size(), 2 * classes, fn, true, "network");
}

std::size_t output_index(Target target, std::size_t y, std::size_t classes) {
  if (y >= classes) throw ContractError("class " + std::to_string(y) + " out of range");
  return target == Target::Logit ? y : classes + y;
}

}  // namespace mdim::nn
