#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gdfl/dataset.hpp"

namespace gdfl {

struct LayerShape {
  uint32_t rows = 0;  // fan-in
  uint32_t cols = 0;  // fan-out
  uint32_t bias = 0;

  bool operator==(const LayerShape&) const = default;
};

/// Flat parameter vector of an MLP. Per layer: row-major weights [rows x cols]
/// followed by the bias. Values are 32-bit floats (the wire format); all math
/// runs in double and rounds back on store.
struct ModelParams {
  std::vector<LayerShape> layer_shapes;
  std::vector<float> values;

  size_t param_count() const { return values.size(); }
  bool same_shape(const ModelParams& other) const {
    return layer_shapes == other.layer_shapes;
  }

  bool operator==(const ModelParams&) const = default;
};

std::vector<LayerShape> mlp_shapes(uint32_t features, const std::vector<uint32_t>& hidden,
                                   uint32_t classes);
size_t param_count_for(const std::vector<LayerShape>& shapes);

/// Uniform [-0.1, 0.1] initialization from the seeded stream.
ModelParams init_params(const std::vector<LayerShape>& shapes, uint64_t seed);

/// Wire format: magic "GDFL", u16 LE version (=1), u16 LE layer count, per
/// layer u32 LE rows/cols/bias, then all values as f32 LE in layer order.
/// Length = 8 + 12*L + 4*P.
std::vector<uint8_t> serialize_model(const ModelParams& params);
ModelParams deserialize_model(std::span<const uint8_t> bytes);
size_t serialized_size(const ModelParams& params);

/// Class probabilities for one sample (softmax output).
void forward_probs(const ModelParams& params, const double* x, std::vector<double>& probs);

/// Cross-entropy loss of one sample; the finite-difference oracle in the test
/// suite drives this directly.
double sample_loss(const ModelParams& params, const double* x, uint32_t label);

/// Mean gradient and loss over a mini-batch (analytic backprop).
double batch_gradient(const ModelParams& params, const Dataset& data,
                      std::span<const uint32_t> batch, std::vector<double>& grad);

struct TrainOutcome {
  ModelParams params;
  uint64_t samples_processed = 0;
  double wall_seconds = 0.0;  // meaningful under the measured clock only
  double train_loss = 0.0;
};

/// Mini-batch SGD (batch 32, last batch partial), cross-entropy, per-epoch
/// shuffle from the seeded stream. Deterministic in all inputs. Throws
/// Numeric if the loss goes non-finite.
TrainOutcome train_local(const ModelParams& params, const Dataset& data,
                         std::span<const uint32_t> shard, uint32_t epochs, double lr,
                         uint64_t seed);

struct EvalResult {
  double macro_f1 = 0.0;
  double loss = 0.0;
};

/// Macro-averaged F1 plus mean cross-entropy. Classes absent from the data
/// contribute F1 = 0 and still count toward the average.
EvalResult evaluate(const ModelParams& params, const Dataset& data);

}  // namespace gdfl
