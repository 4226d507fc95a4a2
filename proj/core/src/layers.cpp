// Copyright 2026 The LPVC Authors
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

#include "lpvc/layers.hpp"

#include <Eigen/Core>
#include <cmath>

#include "lpvc/error.hpp"

namespace lpvc {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MatrixMap = Eigen::Map<RowMatrix>;
using ConstMatrixMap = Eigen::Map<const RowMatrix>;

struct ConvGeometry {
  int channels, height, width;
  int out_channels, kernel, padding;
  int out_height, out_width;

  Eigen::Index patch_rows() const { return Eigen::Index(channels) * kernel * kernel; }
  Eigen::Index pixels() const { return Eigen::Index(out_height) * out_width; }
};

ConvGeometry geometry(const Tensor& input, const Tensor& kernel, int padding) {
  if (input.rank() != 3) throw InvalidArgument("conv2d input must be (C,H,W), got " + input.shape_string());
  if (kernel.rank() != 4) throw InvalidArgument("conv2d kernel must be (O,C,k,k), got " + kernel.shape_string());
  ConvGeometry g{};
  g.channels = input.dim(0);
  g.height = input.dim(1);
  g.width = input.dim(2);
  g.out_channels = kernel.dim(0);
  g.kernel = kernel.dim(2);
  g.padding = padding;
  if (kernel.dim(1) != g.channels)
    throw InvalidArgument("conv2d channel mismatch: input " + input.shape_string() + ", kernel " +
                          kernel.shape_string());
  if (kernel.dim(3) != g.kernel || g.kernel % 2 == 0) throw InvalidArgument("conv2d kernel must be square and odd");
  if (padding < 0) throw InvalidArgument("conv2d padding must be non-negative");
  g.out_height = g.height + 2 * padding - g.kernel + 1;
  g.out_width = g.width + 2 * padding - g.kernel + 1;
  if (g.out_height <= 0 || g.out_width <= 0) throw InvalidArgument("conv2d input smaller than kernel");
  return g;
}

// Rows are (c, ky, kx), columns are output pixels.
RowMatrix im2col(const Tensor& input, const ConvGeometry& g) {
  RowMatrix col(g.patch_rows(), g.pixels());
  const auto in = input.data();
  Eigen::Index row = 0;
  for (int c = 0; c < g.channels; ++c)
    for (int ky = 0; ky < g.kernel; ++ky)
      for (int kx = 0; kx < g.kernel; ++kx, ++row) {
        double* dst = col.row(row).data();
        for (int oy = 0; oy < g.out_height; ++oy) {
          const int iy = oy + ky - g.padding;
          double* out_row = dst + std::size_t(oy) * g.out_width;
          if (iy < 0 || iy >= g.height) {
            std::fill(out_row, out_row + g.out_width, 0.0);
            continue;
          }
          const double* src = in.data() + (std::size_t(c) * g.height + iy) * g.width;
          for (int ox = 0; ox < g.out_width; ++ox) {
            const int ix = ox + kx - g.padding;
            out_row[ox] = (ix >= 0 && ix < g.width) ? src[ix] : 0.0;
          }
        }
      }
  return col;
}

void col2im(const RowMatrix& col, const ConvGeometry& g, Tensor& out) {
  auto dst = out.data();
  Eigen::Index row = 0;
  for (int c = 0; c < g.channels; ++c)
    for (int ky = 0; ky < g.kernel; ++ky)
      for (int kx = 0; kx < g.kernel; ++kx, ++row) {
        const double* src = col.row(row).data();
        for (int oy = 0; oy < g.out_height; ++oy) {
          const int iy = oy + ky - g.padding;
          if (iy < 0 || iy >= g.height) continue;
          double* in_row = dst.data() + (std::size_t(c) * g.height + iy) * g.width;
          const double* col_row = src + std::size_t(oy) * g.out_width;
          for (int ox = 0; ox < g.out_width; ++ox) {
            const int ix = ox + kx - g.padding;
            if (ix >= 0 && ix < g.width) in_row[ix] += col_row[ox];
          }
        }
      }
}

}  // namespace

Tensor conv2d(const Tensor& input, const Tensor& kernel, const Tensor& bias, int padding) {
  const auto g = geometry(input, kernel, padding);
  if (bias.rank() != 1 || bias.dim(0) != g.out_channels) throw InvalidArgument("conv2d bias must be (O)");
  const RowMatrix col = im2col(input, g);
  Tensor out({g.out_channels, g.out_height, g.out_width});
  MatrixMap out_m(out.data().data(), g.out_channels, g.pixels());
  ConstMatrixMap w_m(kernel.data().data(), g.out_channels, g.patch_rows());
  out_m.noalias() = w_m * col;
  for (int o = 0; o < g.out_channels; ++o) out_m.row(o).array() += bias[std::size_t(o)];
  return out;
}

Conv2dGrads conv2d_backward(const Tensor& input, const Tensor& kernel, int padding, const Tensor& grad_out) {
  const auto g = geometry(input, kernel, padding);
  if (grad_out.shape() != std::vector<int>{g.out_channels, g.out_height, g.out_width})
    throw InvalidArgument("conv2d_backward gradient shape mismatch");
  const RowMatrix col = im2col(input, g);
  ConstMatrixMap gout(grad_out.data().data(), g.out_channels, g.pixels());
  ConstMatrixMap w_m(kernel.data().data(), g.out_channels, g.patch_rows());

  Conv2dGrads grads{Tensor::zeros_like(input), Tensor::zeros_like(kernel), Tensor({g.out_channels})};
  MatrixMap gw(grads.kernel.data().data(), g.out_channels, g.patch_rows());
  gw.noalias() = gout * col.transpose();
  for (int o = 0; o < g.out_channels; ++o) grads.bias[std::size_t(o)] = gout.row(o).sum();
  const RowMatrix gcol = w_m.transpose() * gout;
  col2im(gcol, g, grads.input);
  return grads;
}

double activate(double x, Activation kind) {
  switch (kind) {
    case Activation::kRelu: return x > 0.0 ? x : 0.0;
    case Activation::kLeakyRelu: return x > 0.0 ? x : kLeakySlope * x;
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-x));
  }
  return x;
}

Tensor activate(const Tensor& x, Activation kind) {
  Tensor y = Tensor::zeros_like(x);
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = activate(x[i], kind);
  return y;
}

Tensor activate_backward(const Tensor& x, Activation kind, const Tensor& grad_out) {
  if (!x.same_shape(grad_out)) throw InvalidArgument("activation gradient shape mismatch");
  Tensor g = Tensor::zeros_like(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = 0.0;
    switch (kind) {
      case Activation::kRelu: d = x[i] > 0.0 ? 1.0 : 0.0; break;
      case Activation::kLeakyRelu: d = x[i] > 0.0 ? 1.0 : kLeakySlope; break;
      case Activation::kSigmoid: {
        const double s = activate(x[i], kind);
        d = s * (1.0 - s);
        break;
      }
    }
    g[i] = d * grad_out[i];
  }
  return g;
}

Tensor avg_pool2(const Tensor& x) {
  if (x.rank() != 3) throw InvalidArgument("avg_pool2 expects (C,H,W)");
  const int c = x.dim(0), oh = x.dim(1) / 2, ow = x.dim(2) / 2;
  if (oh == 0 || ow == 0) throw InvalidArgument("avg_pool2 input smaller than 2x2");
  Tensor y({c, oh, ow});
  for (int ch = 0; ch < c; ++ch)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox)
        y.at(ch, oy, ox) = 0.25 * (x.at(ch, 2 * oy, 2 * ox) + x.at(ch, 2 * oy, 2 * ox + 1) +
                                   x.at(ch, 2 * oy + 1, 2 * ox) + x.at(ch, 2 * oy + 1, 2 * ox + 1));
  return y;
}

Tensor avg_pool2_backward(const Tensor& input, const Tensor& grad_out) {
  Tensor g = Tensor::zeros_like(input);
  const int c = grad_out.dim(0), oh = grad_out.dim(1), ow = grad_out.dim(2);
  if (c != input.dim(0) || oh != input.dim(1) / 2 || ow != input.dim(2) / 2)
    throw InvalidArgument("avg_pool2_backward shape mismatch");
  for (int ch = 0; ch < c; ++ch)
    for (int oy = 0; oy < oh; ++oy)
      for (int ox = 0; ox < ow; ++ox) {
        const double v = 0.25 * grad_out.at(ch, oy, ox);
        g.at(ch, 2 * oy, 2 * ox) = v;
        g.at(ch, 2 * oy, 2 * ox + 1) = v;
        g.at(ch, 2 * oy + 1, 2 * ox) = v;
        g.at(ch, 2 * oy + 1, 2 * ox + 1) = v;
      }
  return g;
}

Tensor residual_block(const Tensor& x, ConvRef conv1, ConvRef conv2, double scale, ResidualBlockTape* tape) {
  const int pad1 = (conv1.weight.dim(2) - 1) / 2;
  const int pad2 = (conv2.weight.dim(2) - 1) / 2;
  Tensor hidden = conv2d(x, conv1.weight, conv1.bias, pad1);
  Tensor relu = activate(hidden, Activation::kRelu);
  Tensor branch = conv2d(relu, conv2.weight, conv2.bias, pad2);
  if (!branch.same_shape(x)) throw InvalidArgument("residual block must preserve shape");
  branch *= scale;
  branch += x;
  if (tape) {
    tape->input = x;
    tape->hidden = std::move(hidden);
    tape->relu = std::move(relu);
  }
  return branch;
}

ResidualBlockGrads residual_block_backward(const ResidualBlockTape& tape, ConvRef conv1, ConvRef conv2, double scale,
                                           const Tensor& grad_out) {
  Tensor scaled = grad_out;
  scaled *= scale;
  ResidualBlockGrads grads;
  grads.conv2 = conv2d_backward(tape.relu, conv2.weight, (conv2.weight.dim(2) - 1) / 2, scaled);
  const Tensor grad_hidden = activate_backward(tape.hidden, Activation::kRelu, grads.conv2.input);
  grads.conv1 = conv2d_backward(tape.input, conv1.weight, (conv1.weight.dim(2) - 1) / 2, grad_hidden);
  grads.input = grad_out;
  grads.input += grads.conv1.input;
  return grads;
}

}  // namespace lpvc
