#include "sgnn/optimizer.hpp"

#include <cmath>

#include "sgnn/errors.hpp"

namespace sgnn {

namespace {

void adam_update(Matrix& param, const Matrix& grad, Matrix& m, Matrix& v, double decay,
                 const AdamConfig& cfg, double bias1, double bias2) {
  if (!param.same_shape(grad) || !param.same_shape(m) || !param.same_shape(v))
    throw ShapeError("optimizer_step: gradient/moment shape does not match parameter");
  auto p = param.values();
  const auto g = grad.values();
  auto mv = m.values();
  auto vv = v.values();
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double gi = g[i] + decay * p[i];
    mv[i] = cfg.beta1 * mv[i] + (1.0 - cfg.beta1) * gi;
    vv[i] = cfg.beta2 * vv[i] + (1.0 - cfg.beta2) * gi * gi;
    const double m_hat = mv[i] / bias1;
    const double v_hat = vv[i] / bias2;
    p[i] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
  }
}

Gradients zeros_like(const Model& model) {
  return Gradients{Matrix(model.w1.rows(), model.w1.cols()),
                   Matrix(model.b1.rows(), model.b1.cols()),
                   Matrix(model.w2.rows(), model.w2.cols()),
                   Matrix(model.b2.rows(), model.b2.cols())};
}

}  // namespace

OptimizerState init_optimizer(const Model& model) {
  return OptimizerState{zeros_like(model), zeros_like(model), 0};
}

void optimizer_step(Model& model, const Gradients& grads, OptimizerState& state,
                    const AdamConfig& cfg) {
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(cfg.beta1, t);
  const double bias2 = 1.0 - std::pow(cfg.beta2, t);
  adam_update(model.w1, grads.w1, state.m.w1, state.v.w1, cfg.weight_decay, cfg, bias1, bias2);
  adam_update(model.w2, grads.w2, state.m.w2, state.v.w2, 0.0, cfg, bias1, bias2);
  if (model.has_bias()) {
    adam_update(model.b1, grads.b1, state.m.b1, state.v.b1, 0.0, cfg, bias1, bias2);
    adam_update(model.b2, grads.b2, state.m.b2, state.v.b2, 0.0, cfg, bias1, bias2);
  }
}

}  // namespace sgnn
