#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "sgnn/matrix.hpp"
#include "sgnn/node_mask.hpp"
#include "sgnn/rng.hpp"
#include "sgnn/sparse.hpp"
#include "sgnn/tape.hpp"

namespace sgnn {

struct GcnConfig {
  std::size_t hidden = 16;
  bool bias = true;
};

// Two-layer GCN: logits = op * relu(op * x * w1 + b1) * w2 + b2.
struct Model {
  Matrix w1;  // feature_dim x hidden
  Matrix b1;  // 1 x hidden (zero-sized when bias is off)
  Matrix w2;  // hidden x num_classes
  Matrix b2;  // 1 x num_classes

  bool has_bias() const noexcept { return b1.size() != 0; }
  std::size_t hidden() const noexcept { return w1.cols(); }

  friend bool operator==(const Model&, const Model&) = default;
};

// Glorot-uniform weights, zero biases. Draws w1 then w2 in row-major order.
Model init_model(std::size_t feature_dim, std::size_t num_classes, const GcnConfig& cfg,
                 Rng& rng);

// Parameter-shaped gradient buffers.
struct Gradients {
  Matrix w1, b1, w2, b2;
};

struct ForwardPass {
  Tape::Var w1{}, b1{}, w2{}, b2{};
  Tape::Var logits{};
  bool bias = false;
};

// Records the forward pass on `tape`. `hidden_mask`, when given, multiplies
// the post-ReLU activations. Rows that `op` leaves empty get pre-bias zero
// logits.
ForwardPass forward(Tape& tape, const Model& model, const CsrMatrix& op, const Matrix& x,
                    const Matrix* hidden_mask = nullptr);

// Convenience wrapper: logits only, no gradient bookkeeping kept.
Matrix predict(const Model& model, const CsrMatrix& op, const Matrix& x);

Tape::Var masked_cross_entropy(Tape& tape, Tape::Var logits,
                               std::span<const std::int32_t> labels, const NodeMask& mask);

// Standalone loss on a logits matrix.
double masked_cross_entropy(const Matrix& logits, std::span<const std::int32_t> labels,
                            const NodeMask& mask);

Gradients backward(Tape& tape, const ForwardPass& pass, Tape::Var loss);

}  // namespace sgnn
