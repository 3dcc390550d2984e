#include "sgnn/gcn.hpp"

#include <cmath>

#include "sgnn/errors.hpp"

namespace sgnn {

namespace {

Matrix glorot(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  Matrix w(fan_in, fan_out);
  const double a = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
  for (double& v : w.values()) v = (2.0 * rng.uniform() - 1.0) * a;
  return w;
}

Matrix grad_or_zero(const Tape& tape, Tape::Var v) {
  const Matrix& g = tape.grad(v);
  if (g.size() != 0 || tape.value(v).size() == 0) return g;
  return Matrix(tape.value(v).rows(), tape.value(v).cols());
}

}  // namespace

Model init_model(std::size_t feature_dim, std::size_t num_classes, const GcnConfig& cfg,
                 Rng& rng) {
  if (cfg.hidden == 0) throw ConfigError("model.hidden must be positive");
  Model m;
  m.w1 = glorot(feature_dim, cfg.hidden, rng);
  m.w2 = glorot(cfg.hidden, num_classes, rng);
  if (cfg.bias) {
    m.b1 = Matrix(1, cfg.hidden);
    m.b2 = Matrix(1, num_classes);
  }
  return m;
}

ForwardPass forward(Tape& tape, const Model& model, const CsrMatrix& op, const Matrix& x,
                    const Matrix* hidden_mask) {
  if (x.cols() != model.w1.rows()) throw ShapeError("forward: feature dim != w1 rows");
  if (op.cols != x.rows() || op.rows != x.rows()) throw ShapeError("forward: operator size");
  ForwardPass pass;
  pass.w1 = tape.parameter(model.w1);
  pass.w2 = tape.parameter(model.w2);
  const bool bias = model.has_bias();
  pass.bias = bias;
  if (bias) {
    pass.b1 = tape.parameter(model.b1);
    pass.b2 = tape.parameter(model.b2);
  }
  const auto xv = tape.input(x);
  auto h = tape.spmm(op, tape.matmul(xv, pass.w1));
  if (bias) h = tape.add_row(h, pass.b1);
  h = tape.relu(h);
  if (hidden_mask != nullptr) h = tape.hadamard(h, *hidden_mask);
  auto out = tape.spmm(op, tape.matmul(h, pass.w2));
  if (bias) out = tape.add_row(out, pass.b2);
  pass.logits = out;
  return pass;
}

Matrix predict(const Model& model, const CsrMatrix& op, const Matrix& x) {
  Tape tape;
  const auto pass = forward(tape, model, op, x);
  return tape.value(pass.logits);
}

Tape::Var masked_cross_entropy(Tape& tape, Tape::Var logits,
                               std::span<const std::int32_t> labels, const NodeMask& mask) {
  return tape.masked_cross_entropy(logits, labels, mask);
}

double masked_cross_entropy(const Matrix& logits, std::span<const std::int32_t> labels,
                            const NodeMask& mask) {
  Tape tape;
  const auto z = tape.input(logits);
  return tape.value(tape.masked_cross_entropy(z, labels, mask))(0, 0);
}

Gradients backward(Tape& tape, const ForwardPass& pass, Tape::Var loss) {
  tape.backward(loss);
  Gradients g;
  g.w1 = grad_or_zero(tape, pass.w1);
  g.w2 = grad_or_zero(tape, pass.w2);
  if (pass.bias) {
    g.b1 = grad_or_zero(tape, pass.b1);
    g.b2 = grad_or_zero(tape, pass.b2);
  }
  return g;
}

}  // namespace sgnn
