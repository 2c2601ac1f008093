#pragma once

#include "elmfs/errors.hpp"
#include "elmfs/random.hpp"
#include "elmfs/types.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

namespace elmfs {

enum class Activation : std::uint8_t { Sigmoid = 0, Tanh = 1, Relu = 2 };

/// Single-hidden-layer extreme learning machine. The input layer (W, b) is
/// random and fixed; only the output weights are learned.
struct ElmModel {
    RMatrix input_weights;  // hidden x input
    RVector bias;           // hidden
    RMatrix output_weights; // input x hidden (one output per candidate offset)
    Activation activation = Activation::Sigmoid;

    Eigen::Index input_dim() const { return input_weights.cols(); }
    Eigen::Index hidden_dim() const { return input_weights.rows(); }
};

struct TrainingSet {
    RMatrix inputs; // N x N_t, unit-norm columns
    RMatrix labels; // N x N_t, one-hot columns
};

struct TrainReport {
    double reciprocal_condition = 0.0; // estimate for the hidden-layer Gram system
    bool used_pseudo_inverse = false;
};

// Uniform[-1, 1] input weights (hidden x input) and biases.
std::pair<RMatrix, RVector> init_random(int input_dim, int hidden_dim, Rng& rng);

void apply_activation(Activation act, RMatrix& z);

// sigma(W X + b 1^T). Throws std::invalid_argument on a row-count mismatch.
RMatrix hidden_layer(const ElmModel& model, const RMatrix& inputs);

/// Output weights for T ~= U H:
///   U = T H^T (H H^T + ridge I)^{-1}.
/// With ridge == 0 a failed Cholesky falls back to T H^T (H H^T)^+, which
/// equals T H^+.
RMatrix solve_output_weights(const RMatrix& hidden, const RMatrix& targets, double ridge,
                             TrainReport* report = nullptr);

ElmModel train(const TrainingSet& set, int input_dim, int hidden_dim, double ridge, Rng& rng,
               TrainReport* report = nullptr);

RMatrix one_hot_labels(std::span<const int> offsets, int dim);

// O = U sigma(W q + b).
RVector infer(const ElmModel& model, const RVector& qbar);

// argmax_j |o_j|^2 (0-based), ties to the smallest index.
int decide_offset(const RVector& output);

/// Binary model file: "ELMFS", version byte, activation byte, N and hidden
/// count as u32 LE, then W, b, U as row-major f64 LE.
void save_model(const ElmModel& model, const std::filesystem::path& path);
std::vector<std::uint8_t> serialize_model(const ElmModel& model);

// Throws CorruptModelError on bad magic, version, dimensions or truncation.
ElmModel load_model(const std::filesystem::path& path);
ElmModel deserialize_model(std::span<const std::uint8_t> bytes);

} // namespace elmfs
