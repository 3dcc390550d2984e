#pragma once

#include <cstddef>

#include "sgnn/gcn.hpp"
#include "sgnn/matrix.hpp"

namespace sgnn {

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  // L2 penalty added to the gradient of w1 only.
  double weight_decay = 5e-4;
};

struct OptimizerState {
  Gradients m;  // first moments
  Gradients v;  // second moments
  std::size_t step = 0;
};

OptimizerState init_optimizer(const Model& model);

// One bias-corrected Adam update, in place.
void optimizer_step(Model& model, const Gradients& grads, OptimizerState& state,
                    const AdamConfig& cfg);

}  // namespace sgnn
