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

#include "mdim/anova.hpp"

#include <bit>
#include <cmath>

#include "mdim/error.hpp"
#include "mdim/summation.hpp"

namespace mdim {

namespace {

// Orthonormal basis of functions of one finite coordinate under its
// probabilities, phi_0 == 1. Returned as basis[k * m + a].
std::vector<double> orthonormal_basis(const FiniteSupport& atoms) {
  const std::size_t m = atoms.values.size();
  const auto& p = atoms.probs;
  auto dot = [&](const std::vector<double>& u, const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t a = 0; a < m; ++a) s += p[a] * u[a] * v[a];
    return s;
  };
  std::vector<std::vector<double>> done;
  done.emplace_back(m, 1.0);
  for (std::size_t e = 0; e < m && done.size() < m; ++e) {
    std::vector<double> v(m, 0.0);
    v[e] = 1.0;
    // Two passes of modified Gram-Schmidt keep the basis orthonormal to
    // rounding even for skewed probabilities.
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& u : done) {
        const double c = dot(u, v);
        for (std::size_t a = 0; a < m; ++a) v[a] -= c * u[a];
      }
    }
    const double norm = std::sqrt(dot(v, v));
    if (norm < 1e-10) continue;
    for (double& x : v) x /= norm;
    done.push_back(std::move(v));
  }
  if (done.size() != m) throw ContractError("anova: could not build a basis for a coordinate");
  std::vector<double> flat;
  flat.reserve(m * m);
  for (const auto& v : done) flat.insert(flat.end(), v.begin(), v.end());
  return flat;
}

// Applies out[.., r, ..] = sum_c M[r * in + c] * data[.., c, ..] along one
// axis of a row-major array.
std::vector<double> apply_axis(const std::vector<double>& data, std::vector<std::size_t>& shape,
                               std::size_t axis, const std::vector<double>& matrix,
                               std::size_t rows) {
  const std::size_t in = shape[axis];
  std::size_t outer = 1;
  for (std::size_t t = 0; t < axis; ++t) outer *= shape[t];
  std::size_t inner = 1;
  for (std::size_t t = axis + 1; t < shape.size(); ++t) inner *= shape[t];
  std::vector<double> out(outer * rows * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t r = 0; r < rows; ++r) {
      double* dst = &out[(o * rows + r) * inner];
      for (std::size_t c = 0; c < in; ++c) {
        const double w = matrix[r * in + c];
        if (w == 0.0) continue;
        const double* src = &data[(o * in + c) * inner];
        for (std::size_t i = 0; i < inner; ++i) dst[i] += w * src[i];
      }
    }
  }
  shape[axis] = rows;
  return out;
}

}  // namespace

double VarianceComponents::nu() const {
  if (!(variance_ > 0.0)) throw DegenerateVarianceError("function is constant on the grid");
  return delta_ / variance_;
}

double VarianceComponents::total_index(std::size_t j) const {
  if (j >= dims()) throw ContractError("variable index out of range");
  CompensatedSum s;
  for (Subset u = 0; u < components_.size(); ++u) {
    if (u & (Subset{1} << j)) s.add(components_[u]);
  }
  return s.value();
}

double VarianceComponents::lower_index(std::size_t j) const {
  if (j >= dims()) throw ContractError("variable index out of range");
  return components_[Subset{1} << j];
}

std::vector<double> VarianceComponents::effect_table(Subset u) const {
  const std::size_t d = dims();
  if (u >= (Subset{1} << d)) throw ContractError("subset outside 0..d-1");
  // Coefficients whose support is exactly u, laid out over the axes in u.
  std::vector<std::size_t> axes;
  std::vector<std::size_t> shape;
  for (std::size_t j = 0; j < d; ++j) {
    if (u & (Subset{1} << j)) {
      axes.push_back(j);
      shape.push_back(atoms_[j].values.size());
    }
  }
  std::size_t size = 1;
  for (std::size_t s : shape) size *= s;
  std::vector<double> table(size, 0.0);
  std::vector<std::size_t> sub(axes.size(), 0);
  for (std::size_t t = 0; t < size; ++t) {
    std::size_t rem = t;
    bool interior = true;
    for (std::size_t a = axes.size(); a-- > 0;) {
      sub[a] = rem % shape[a];
      rem /= shape[a];
      if (sub[a] == 0) interior = false;
    }
    if (!interior) continue;
    std::size_t flat = 0;
    std::size_t a = 0;
    for (std::size_t j = 0; j < d; ++j) {
      const std::size_t k = (a < axes.size() && axes[a] == j) ? sub[a++] : 0;
      flat = flat * atoms_[j].values.size() + k;
    }
    table[t] = coefficients_[flat];
  }
  if (u == 0) return {mean_};
  for (std::size_t a = 0; a < axes.size(); ++a) {
    const std::size_t m = shape[a];
    // synthesis matrix S[atom][k] = phi_k(atom)
    std::vector<double> synth(m * m);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t at = 0; at < m; ++at) synth[at * m + k] = basis_[axes[a]][k * m + at];
    }
    table = apply_axis(table, shape, a, synth, m);
  }
  return table;
}

double VarianceComponents::effect_at(Subset u, const std::vector<std::size_t>& grid_index) const {
  if (grid_index.size() != dims()) throw ContractError("grid index has wrong length");
  const std::vector<double> table = effect_table(u);
  std::size_t flat = 0;
  for (std::size_t j = 0; j < dims(); ++j) {
    if (!(u & (Subset{1} << j))) continue;
    const std::size_t m = atoms_[j].values.size();
    if (grid_index[j] >= m) throw ContractError("grid index out of range");
    flat = flat * m + grid_index[j];
  }
  return table[flat];
}

VarianceComponents anova_enumerate(const BlackBox& f, const InputModel& model, std::size_t output) {
  const std::size_t d = model.dims();
  if (d == 0 || d > kMaxEnumerationDims) throw ContractError("anova_enumerate needs 1 <= d <= 20");
  if (f.dims() != d) throw ContractError("black box and input model disagree on d");
  if (output >= f.outputs()) throw ContractError("output index out of range");

  VarianceComponents vc;
  std::size_t grid = 1;
  for (std::size_t j = 0; j < d; ++j) {
    if (!model.coord(j).is_finite()) {
      throw ContractError("anova_enumerate needs finite coordinates (coordinate " +
                          std::to_string(j) + " is " + model.coord(j).name() + ")");
    }
    vc.atoms_.push_back(model.coord(j).atoms());
    grid *= vc.atoms_.back().values.size();
    if (grid > kMaxEnumerationGrid) throw ContractError("enumeration grid exceeds 10^6 points");
  }

  std::vector<std::size_t> shape;
  for (const auto& a : vc.atoms_) shape.push_back(a.values.size());

  std::vector<double> values(grid);
  std::vector<double> x(d);
  std::vector<double> out(f.outputs());
  std::vector<std::size_t> index(d, 0);
  for (std::size_t g = 0; g < grid; ++g) {
    for (std::size_t j = 0; j < d; ++j) x[j] = vc.atoms_[j].values[index[j]];
    f.evaluate(x, out);
    if (!std::isfinite(out[output])) throw EvaluationError("black box returned a non-finite value", x);
    values[g] = out[output];
    for (std::size_t j = d; j-- > 0;) {
      if (++index[j] < shape[j]) break;
      index[j] = 0;
    }
  }

  // Analysis: c_k = E f(X) prod_j phi_{j,k_j}(X_j).
  std::vector<double> coeffs = std::move(values);
  for (std::size_t j = 0; j < d; ++j) {
    const std::size_t m = shape[j];
    vc.basis_.push_back(orthonormal_basis(vc.atoms_[j]));
    std::vector<double> analysis(m * m);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t a = 0; a < m; ++a) {
        analysis[k * m + a] = vc.atoms_[j].probs[a] * vc.basis_[j][k * m + a];
      }
    }
    coeffs = apply_axis(coeffs, shape, j, analysis, m);
  }
  vc.coefficients_ = std::move(coeffs);

  vc.components_.assign(std::size_t{1} << d, 0.0);
  std::vector<CompensatedSum> energy(vc.components_.size());
  std::fill(index.begin(), index.end(), 0);
  for (std::size_t g = 0; g < grid; ++g) {
    Subset u = 0;
    for (std::size_t j = 0; j < d; ++j) {
      if (index[j] != 0) u |= Subset{1} << j;
    }
    const double c = vc.coefficients_[g];
    if (u != 0) energy[u].add(c * c);
    for (std::size_t j = d; j-- > 0;) {
      if (++index[j] < shape[j]) break;
      index[j] = 0;
    }
  }
  CompensatedSum variance;
  CompensatedSum delta;
  for (Subset u = 1; u < vc.components_.size(); ++u) {
    vc.components_[u] = energy[u].value();
    variance.add(vc.components_[u]);
    delta.add(std::popcount(u) * vc.components_[u]);
  }
  vc.mean_ = vc.coefficients_[0];
  vc.variance_ = variance.value();
  vc.delta_ = delta.value();
  return vc;
}

}  // namespace mdim
