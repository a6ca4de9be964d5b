#include "gdfl/model.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstring>
#include <numeric>

#include "gdfl/error.hpp"
#include "gdfl/rng.hpp"

namespace gdfl {

namespace {

constexpr uint8_t kMagic[4] = {'G', 'D', 'F', 'L'};
constexpr uint16_t kWireVersion = 1;
constexpr size_t kBatchSize = 32;

size_t layer_value_count(const LayerShape& s) {
  return static_cast<size_t>(s.rows) * s.cols + s.bias;
}

void put_u16(std::vector<uint8_t>& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v & 0xff));
  out.push_back(static_cast<uint8_t>(v >> 8));
}

void put_u32(std::vector<uint8_t>& out, uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<uint8_t>((v >> (8 * i)) & 0xff));
}

uint16_t get_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (static_cast<uint16_t>(p[1]) << 8));
}

uint32_t get_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) | (static_cast<uint32_t>(p[3]) << 24);
}

/// Scratch space for one forward/backward pass; reused across samples.
struct Workspace {
  std::vector<std::vector<double>> activations;  // a[0] = input, a[L] = logits
  std::vector<std::vector<double>> deltas;

  void prepare(const ModelParams& params, uint32_t input_dim) {
    const size_t layers = params.layer_shapes.size();
    activations.resize(layers + 1);
    deltas.resize(layers);
    activations[0].resize(input_dim);
    for (size_t l = 0; l < layers; ++l) {
      activations[l + 1].resize(params.layer_shapes[l].cols);
      deltas[l].resize(params.layer_shapes[l].cols);
    }
  }
};

/// Forward pass into ws.activations; returns the log-sum-exp-stabilized loss
/// for `label` (or just fills activations when label == UINT32_MAX).
double forward_into(const ModelParams& params, const double* x, uint32_t label,
                    Workspace& ws) {
  const size_t layers = params.layer_shapes.size();
  std::copy(x, x + ws.activations[0].size(), ws.activations[0].begin());

  size_t offset = 0;
  for (size_t l = 0; l < layers; ++l) {
    const auto& shape = params.layer_shapes[l];
    const auto& in = ws.activations[l];
    auto& out = ws.activations[l + 1];
    const float* w = params.values.data() + offset;
    const float* b = w + static_cast<size_t>(shape.rows) * shape.cols;
    for (uint32_t j = 0; j < shape.cols; ++j) out[j] = static_cast<double>(b[j]);
    for (uint32_t i = 0; i < shape.rows; ++i) {
      const double a = in[i];
      if (a == 0.0) continue;
      const float* wrow = w + static_cast<size_t>(i) * shape.cols;
      for (uint32_t j = 0; j < shape.cols; ++j) out[j] += a * static_cast<double>(wrow[j]);
    }
    if (l + 1 < layers)
      for (auto& v : out) v = v > 0.0 ? v : 0.0;  // ReLU
    offset += layer_value_count(shape);
  }

  if (label == UINT32_MAX) return 0.0;
  const auto& logits = ws.activations[layers];
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double z : logits) sum += std::exp(z - zmax);
  return std::log(sum) - (logits[label] - zmax);
}

/// Backward pass; accumulates dL/dtheta for one sample into grad.
void backward_into(const ModelParams& params, uint32_t label, Workspace& ws,
                   std::vector<double>& grad) {
  const size_t layers = params.layer_shapes.size();
  const auto& logits = ws.activations[layers];

  // softmax - one_hot
  auto& out_delta = ws.deltas[layers - 1];
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (size_t j = 0; j < logits.size(); ++j) {
    out_delta[j] = std::exp(logits[j] - zmax);
    sum += out_delta[j];
  }
  for (size_t j = 0; j < logits.size(); ++j) {
    out_delta[j] /= sum;
    if (j == label) out_delta[j] -= 1.0;
  }

  // layer offsets, back to front
  std::vector<size_t> offsets(layers);
  size_t offset = 0;
  for (size_t l = 0; l < layers; ++l) {
    offsets[l] = offset;
    offset += layer_value_count(params.layer_shapes[l]);
  }

  for (size_t l = layers; l-- > 0;) {
    const auto& shape = params.layer_shapes[l];
    const auto& in = ws.activations[l];
    const auto& delta = ws.deltas[l];
    double* gw = grad.data() + offsets[l];
    double* gb = gw + static_cast<size_t>(shape.rows) * shape.cols;
    for (uint32_t i = 0; i < shape.rows; ++i) {
      const double a = in[i];
      if (a != 0.0) {
        double* grow = gw + static_cast<size_t>(i) * shape.cols;
        for (uint32_t j = 0; j < shape.cols; ++j) grow[j] += a * delta[j];
      }
    }
    for (uint32_t j = 0; j < shape.cols; ++j) gb[j] += delta[j];

    if (l > 0) {
      const float* w = params.values.data() + offsets[l];
      auto& prev_delta = ws.deltas[l - 1];
      for (uint32_t i = 0; i < shape.rows; ++i) {
        double acc = 0.0;
        const float* wrow = w + static_cast<size_t>(i) * shape.cols;
        for (uint32_t j = 0; j < shape.cols; ++j)
          acc += static_cast<double>(wrow[j]) * delta[j];
        // ReLU gate: activations[l] already holds max(z, 0)
        prev_delta[i] = ws.activations[l][i] > 0.0 ? acc : 0.0;
      }
    }
  }
}

}  // namespace

std::vector<LayerShape> mlp_shapes(uint32_t features, const std::vector<uint32_t>& hidden,
                                   uint32_t classes) {
  if (features == 0 || classes < 2)
    fail(ErrorKind::InvalidArgs, "mlp_shapes: need features >= 1 and classes >= 2");
  std::vector<LayerShape> shapes;
  uint32_t in = features;
  for (uint32_t h : hidden) {
    if (h == 0) fail(ErrorKind::InvalidArgs, "mlp_shapes: hidden sizes must be positive");
    shapes.push_back({in, h, h});
    in = h;
  }
  shapes.push_back({in, classes, classes});
  return shapes;
}

size_t param_count_for(const std::vector<LayerShape>& shapes) {
  size_t total = 0;
  for (const auto& s : shapes) total += layer_value_count(s);
  return total;
}

ModelParams init_params(const std::vector<LayerShape>& shapes, uint64_t seed) {
  ModelParams params;
  params.layer_shapes = shapes;
  params.values.resize(param_count_for(shapes));
  Rng rng(mix_seed(seed, 0x1417u));
  for (auto& v : params.values) v = static_cast<float>(rng.uniform(-0.1, 0.1));
  return params;
}

size_t serialized_size(const ModelParams& params) {
  return 8 + 12 * params.layer_shapes.size() + 4 * params.values.size();
}

std::vector<uint8_t> serialize_model(const ModelParams& params) {
  std::vector<uint8_t> out;
  out.reserve(serialized_size(params));
  out.insert(out.end(), kMagic, kMagic + 4);
  put_u16(out, kWireVersion);
  put_u16(out, static_cast<uint16_t>(params.layer_shapes.size()));
  for (const auto& s : params.layer_shapes) {
    put_u32(out, s.rows);
    put_u32(out, s.cols);
    put_u32(out, s.bias);
  }
  for (float v : params.values) put_u32(out, std::bit_cast<uint32_t>(v));
  return out;
}

ModelParams deserialize_model(std::span<const uint8_t> bytes) {
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kMagic, 4) != 0)
    fail(ErrorKind::BadMagic, "model blob does not start with GDFL magic");
  const uint16_t version = get_u16(bytes.data() + 4);
  if (version != kWireVersion)
    fail(ErrorKind::VersionMismatch,
         "unsupported model wire version " + std::to_string(version));
  const uint16_t layer_count = get_u16(bytes.data() + 6);
  const size_t header = 8 + 12 * static_cast<size_t>(layer_count);
  if (bytes.size() < header)
    fail(ErrorKind::LengthMismatch, "model blob truncated in layer table");

  ModelParams params;
  params.layer_shapes.resize(layer_count);
  size_t value_count = 0;
  for (size_t l = 0; l < layer_count; ++l) {
    const uint8_t* p = bytes.data() + 8 + 12 * l;
    params.layer_shapes[l] = {get_u32(p), get_u32(p + 4), get_u32(p + 8)};
    value_count += layer_value_count(params.layer_shapes[l]);
  }
  if (bytes.size() != header + 4 * value_count)
    fail(ErrorKind::LengthMismatch,
         "model blob length " + std::to_string(bytes.size()) + ", expected " +
             std::to_string(header + 4 * value_count));

  params.values.resize(value_count);
  for (size_t i = 0; i < value_count; ++i)
    params.values[i] = std::bit_cast<float>(get_u32(bytes.data() + header + 4 * i));
  return params;
}

void forward_probs(const ModelParams& params, const double* x, std::vector<double>& probs) {
  Workspace ws;
  ws.prepare(params, params.layer_shapes.front().rows);
  forward_into(params, x, UINT32_MAX, ws);
  const auto& logits = ws.activations.back();
  probs.resize(logits.size());
  const double zmax = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (size_t j = 0; j < logits.size(); ++j) {
    probs[j] = std::exp(logits[j] - zmax);
    sum += probs[j];
  }
  for (auto& p : probs) p /= sum;
}

double sample_loss(const ModelParams& params, const double* x, uint32_t label) {
  Workspace ws;
  ws.prepare(params, params.layer_shapes.front().rows);
  return forward_into(params, x, label, ws);
}

double batch_gradient(const ModelParams& params, const Dataset& data,
                      std::span<const uint32_t> batch, std::vector<double>& grad) {
  grad.assign(params.values.size(), 0.0);
  Workspace ws;
  ws.prepare(params, data.num_features);
  double loss = 0.0;
  for (uint32_t idx : batch) {
    loss += forward_into(params, data.row(idx), data.labels[idx], ws);
    backward_into(params, data.labels[idx], ws, grad);
  }
  const double inv = 1.0 / static_cast<double>(batch.size());
  for (auto& g : grad) g *= inv;
  return loss * inv;
}

TrainOutcome train_local(const ModelParams& params, const Dataset& data,
                         std::span<const uint32_t> shard, uint32_t epochs, double lr,
                         uint64_t seed) {
  if (shard.empty()) fail(ErrorKind::InvalidArgs, "train_local: shard is empty");
  if (!(lr > 0.0)) fail(ErrorKind::InvalidArgs, "train_local: learning rate must be positive");

  const auto start = std::chrono::steady_clock::now();

  TrainOutcome outcome;
  outcome.params = params;
  outcome.samples_processed = static_cast<uint64_t>(shard.size()) * epochs;

  Rng rng(mix_seed(seed, 0x7214u));
  std::vector<uint32_t> order(shard.begin(), shard.end());
  std::vector<double> grad;

  for (uint32_t epoch = 0; epoch < epochs; ++epoch) {
    rng.shuffle(order);
    double epoch_loss = 0.0;
    for (size_t pos = 0; pos < order.size(); pos += kBatchSize) {
      const size_t count = std::min(kBatchSize, order.size() - pos);
      const std::span<const uint32_t> batch(order.data() + pos, count);
      const double loss = batch_gradient(outcome.params, data, batch, grad);
      if (!std::isfinite(loss))
        fail(ErrorKind::Numeric, "training loss became non-finite (divergent lr?)");
      epoch_loss += loss * static_cast<double>(count);
      for (size_t i = 0; i < grad.size(); ++i) {
        const double v = static_cast<double>(outcome.params.values[i]) - lr * grad[i];
        outcome.params.values[i] = static_cast<float>(v);
      }
    }
    outcome.train_loss = epoch_loss / static_cast<double>(order.size());
  }

  outcome.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

EvalResult evaluate(const ModelParams& params, const Dataset& data) {
  if (data.size() == 0) fail(ErrorKind::InvalidArgs, "evaluate: dataset is empty");
  const uint32_t classes = params.layer_shapes.back().cols;

  std::vector<uint64_t> tp(classes, 0), fp(classes, 0), fn(classes, 0);
  Workspace ws;
  ws.prepare(params, data.num_features);
  double loss = 0.0;

  for (size_t i = 0; i < data.size(); ++i) {
    loss += forward_into(params, data.row(i), data.labels[i], ws);
    const auto& logits = ws.activations.back();
    uint32_t pred = 0;
    for (uint32_t j = 1; j < classes; ++j)
      if (logits[j] > logits[pred]) pred = j;
    const uint32_t truth = data.labels[i];
    if (pred == truth) {
      ++tp[truth];
    } else {
      ++fp[pred];
      ++fn[truth];
    }
  }

  // absent classes keep F1 = 0 and still count toward the mean
  double f1_sum = 0.0;
  for (uint32_t c = 0; c < classes; ++c) {
    const double denom = static_cast<double>(2 * tp[c] + fp[c] + fn[c]);
    if (denom > 0.0) f1_sum += 2.0 * static_cast<double>(tp[c]) / denom;
  }

  return {f1_sum / static_cast<double>(classes), loss / static_cast<double>(data.size())};
}

}  // namespace gdfl
