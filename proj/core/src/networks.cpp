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

#include "lpvc/networks.hpp"

#include <cmath>
#include <random>

#include "lpvc/error.hpp"

namespace lpvc {

std::size_t Weights::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params) n += p.value.size();
  return n;
}

Gradients zero_gradients(const Weights& weights) {
  Gradients g;
  g.reserve(weights.params.size());
  for (const auto& p : weights.params) g.push_back(Tensor::zeros_like(p.value));
  return g;
}

void accumulate(Gradients& into, const Gradients& from) {
  if (into.size() != from.size()) throw InvalidArgument("gradient list length mismatch");
  for (std::size_t i = 0; i < into.size(); ++i) into[i] += from[i];
}

void scale(Gradients& grads, double factor) {
  for (auto& g : grads) g *= factor;
}

namespace {

void add_conv(Weights& w, const std::string& name, int out, int in, int k, Init init, std::mt19937_64& rng) {
  Tensor kernel({out, in, k, k});
  Tensor bias({out});
  if (init == Init::kUniformFanIn) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(in) * k * k);
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (auto& v : kernel.data()) v = dist(rng);
    for (auto& v : bias.data()) v = dist(rng);
  }
  w.params.push_back({name + ".weight", std::move(kernel)});
  w.params.push_back({name + ".bias", std::move(bias)});
}

void check_layout(const Weights& expected, const Weights& actual) {
  if (expected.params.size() != actual.params.size())
    throw ConfigMismatch("weights hold " + std::to_string(actual.params.size()) + " tensors, config expects " +
                         std::to_string(expected.params.size()));
  for (std::size_t i = 0; i < expected.params.size(); ++i)
    if (!expected.params[i].value.same_shape(actual.params[i].value))
      throw ConfigMismatch("parameter " + expected.params[i].name + " has shape " +
                           actual.params[i].value.shape_string() + ", expected " +
                           expected.params[i].value.shape_string());
}

}  // namespace

void NetConfig::validate() const {
  if (k < 1 || blocks < 1 || channels < 1) throw InvalidArgument("NetConfig requires K, B, C >= 1");
  if (kernel < 1 || kernel % 2 == 0) throw InvalidArgument("NetConfig kernel must be odd");
  if (!std::isfinite(res_scale)) throw InvalidArgument("NetConfig res_scale must be finite");
}

Weights Generator::make_weights(const NetConfig& config, Init init, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  Weights w;
  add_conv(w, "head", config.channels, config.k, config.kernel, init, rng);
  for (int b = 0; b < config.blocks; ++b) {
    const std::string prefix = "block" + std::to_string(b);
    add_conv(w, prefix + ".conv1", config.channels, config.channels, config.kernel, init, rng);
    add_conv(w, prefix + ".conv2", config.channels, config.channels, config.kernel, init, rng);
  }
  add_conv(w, "tail", 1, config.channels, config.kernel, init, rng);
  return w;
}

Generator::Generator(NetConfig config, Init init, std::uint64_t seed)
    : config_(config), weights_(make_weights(config, init, seed)) {}

Generator::Generator(NetConfig config, Weights weights) : config_(config), weights_(std::move(weights)) {
  check_layout(make_weights(config_, Init::kZeros, 0), weights_);
}

Tensor Generator::forward(const Tensor& input, Tape* tape) const {
  if (input.rank() != 3 || input.dim(0) != config_.k)
    throw ConfigMismatch("generator expects (" + std::to_string(config_.k) + ",H,W) input, got " +
                         input.shape_string());
  const int pad = (config_.kernel - 1) / 2;
  Tensor head = conv2d(input, conv(0).weight, conv(0).bias, pad);
  Tensor x = head;
  if (tape) tape->blocks.resize(static_cast<std::size_t>(config_.blocks));
  for (int b = 0; b < config_.blocks; ++b) {
    const auto base = static_cast<std::size_t>(1 + 2 * b);
    x = residual_block(x, conv(base), conv(base + 1), config_.res_scale,
                       tape ? &tape->blocks[static_cast<std::size_t>(b)] : nullptr);
  }
  x += head;
  const auto tail = static_cast<std::size_t>(1 + 2 * config_.blocks);
  Tensor out = conv2d(x, conv(tail).weight, conv(tail).bias, pad);
  if (tape) {
    tape->input = input;
    tape->head = std::move(head);
    tape->tail_input = std::move(x);
  }
  return out;
}

Gradients Generator::backward(const Tape& tape, const Tensor& grad_out, Tensor* grad_input) const {
  const int pad = (config_.kernel - 1) / 2;
  Gradients grads = zero_gradients(weights_);
  const auto tail = static_cast<std::size_t>(1 + 2 * config_.blocks);

  auto tail_g = conv2d_backward(tape.tail_input, conv(tail).weight, pad, grad_out);
  grads[2 * tail] = std::move(tail_g.kernel);
  grads[2 * tail + 1] = std::move(tail_g.bias);

  // The global skip sends the tail gradient straight to the head as well.
  Tensor grad_head = tail_g.input;
  Tensor g = std::move(tail_g.input);
  for (int b = config_.blocks - 1; b >= 0; --b) {
    const auto base = static_cast<std::size_t>(1 + 2 * b);
    auto bg = residual_block_backward(tape.blocks[static_cast<std::size_t>(b)], conv(base), conv(base + 1),
                                      config_.res_scale, g);
    grads[2 * base] = std::move(bg.conv1.kernel);
    grads[2 * base + 1] = std::move(bg.conv1.bias);
    grads[2 * base + 2] = std::move(bg.conv2.kernel);
    grads[2 * base + 3] = std::move(bg.conv2.bias);
    g = std::move(bg.input);
  }
  grad_head += g;

  auto head_g = conv2d_backward(tape.input, conv(0).weight, pad, grad_head);
  grads[0] = std::move(head_g.kernel);
  grads[1] = std::move(head_g.bias);
  if (grad_input) *grad_input = std::move(head_g.input);
  return grads;
}

void DiscConfig::validate() const {
  if (in_channels < 1 || depth1 < 1 || depth2 < 1) throw InvalidArgument("DiscConfig depths must be >= 1");
  if (kernel < 1 || kernel % 2 == 0) throw InvalidArgument("DiscConfig kernel must be odd");
  int s = input_size - kernel + 1;
  s = s / 2 - kernel + 1;
  s = s / 2 - kernel + 1;
  if (s != 1) throw InvalidArgument("discriminator input " + std::to_string(input_size) + " does not reduce to 1x1");
}

Weights Discriminator::make_weights(const DiscConfig& config, Init init, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  Weights w;
  add_conv(w, "conv1", config.depth1, config.in_channels, config.kernel, init, rng);
  add_conv(w, "conv2", config.depth2, config.depth1, config.kernel, init, rng);
  add_conv(w, "conv3", 1, config.depth2, config.kernel, init, rng);
  return w;
}

Discriminator::Discriminator(DiscConfig config, Init init, std::uint64_t seed)
    : config_(config), weights_(make_weights(config, init, seed)) {}

Discriminator::Discriminator(DiscConfig config, Weights weights) : config_(config), weights_(std::move(weights)) {
  check_layout(make_weights(config_, Init::kZeros, 0), weights_);
}

double Discriminator::forward(const Tensor& input, Tape* tape) const {
  const std::vector<int> expected{config_.in_channels, config_.input_size, config_.input_size};
  if (input.shape() != expected)
    throw InvalidArgument("discriminator expects (" + std::to_string(config_.in_channels) + "," +
                          std::to_string(config_.input_size) + "," + std::to_string(config_.input_size) +
                          ") input, got " + input.shape_string());
  Tensor pre1 = conv2d(input, conv(0).weight, conv(0).bias, 0);
  Tensor act1 = activate(pre1, Activation::kLeakyRelu);
  Tensor pool1 = avg_pool2(act1);
  Tensor pre2 = conv2d(pool1, conv(1).weight, conv(1).bias, 0);
  Tensor act2 = activate(pre2, Activation::kLeakyRelu);
  Tensor pool2 = avg_pool2(act2);
  const Tensor out = conv2d(pool2, conv(2).weight, conv(2).bias, 0);
  const double logit = out[0];
  if (tape) {
    tape->input = input;
    tape->pre1 = std::move(pre1);
    tape->act1 = std::move(act1);
    tape->pool1 = std::move(pool1);
    tape->pre2 = std::move(pre2);
    tape->act2 = std::move(act2);
    tape->pool2 = std::move(pool2);
    tape->logit = logit;
  }
  return activate(logit, Activation::kSigmoid);
}

Gradients Discriminator::backward(const Tape& tape, double grad_score, Tensor* grad_input) const {
  Gradients grads = zero_gradients(weights_);
  const double s = activate(tape.logit, Activation::kSigmoid);
  const Tensor grad_logit({1, 1, 1}, grad_score * s * (1.0 - s));

  auto g3 = conv2d_backward(tape.pool2, conv(2).weight, 0, grad_logit);
  grads[4] = std::move(g3.kernel);
  grads[5] = std::move(g3.bias);
  const Tensor g_act2 = avg_pool2_backward(tape.act2, g3.input);
  const Tensor g_pre2 = activate_backward(tape.pre2, Activation::kLeakyRelu, g_act2);

  auto g2 = conv2d_backward(tape.pool1, conv(1).weight, 0, g_pre2);
  grads[2] = std::move(g2.kernel);
  grads[3] = std::move(g2.bias);
  const Tensor g_act1 = avg_pool2_backward(tape.act1, g2.input);
  const Tensor g_pre1 = activate_backward(tape.pre1, Activation::kLeakyRelu, g_act1);

  auto g1 = conv2d_backward(tape.input, conv(0).weight, 0, g_pre1);
  grads[0] = std::move(g1.kernel);
  grads[1] = std::move(g1.bias);
  if (grad_input) *grad_input = std::move(g1.input);
  return grads;
}

}  // namespace lpvc
