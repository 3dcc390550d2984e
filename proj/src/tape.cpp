#include "sgnn/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sgnn/errors.hpp"

namespace sgnn {

Tape::Var Tape::push(Matrix value, bool grad, const char* op,
                     std::function<void(Tape&, const Matrix&)> propagate) {
  if (!all_finite(value)) throw NumericFault(std::string("non-finite value produced by ") + op);
  nodes_.push_back(Node{std::move(value), Matrix{}, grad, std::move(propagate)});
  return Var{nodes_.size() - 1};
}

void Tape::accumulate(Var target, const Matrix& delta) {
  Node& node = nodes_[target.id];
  if (!node.needs_grad) return;
  if (node.grad.size() == 0 && node.value.size() != 0) {
    node.grad = delta;
    return;
  }
  auto g = node.grad.values();
  const auto d = delta.values();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += d[i];
}

Tape::Var Tape::input(Matrix value) { return push(std::move(value), false, "input", nullptr); }

Tape::Var Tape::parameter(Matrix value) {
  return push(std::move(value), true, "parameter", nullptr);
}

Tape::Var Tape::matmul(Var a, Var b) {
  Matrix out = sgnn::matmul(value(a), value(b));
  return push(std::move(out), needs_grad(a) || needs_grad(b), "matmul",
              [a, b](Tape& t, const Matrix& g) {
                if (t.needs_grad(a)) t.accumulate(a, matmul_a_bt(g, t.value(b)));
                if (t.needs_grad(b)) t.accumulate(b, matmul_at_b(t.value(a), g));
              });
}

Tape::Var Tape::spmm(const CsrMatrix& op, Var x) {
  Matrix out = sgnn::spmm(op, value(x));
  const CsrMatrix* op_ptr = &op;
  return push(std::move(out), needs_grad(x), "spmm", [op_ptr, x](Tape& t, const Matrix& g) {
    t.accumulate(x, spmm_transposed(*op_ptr, g));
  });
}

Tape::Var Tape::add_row(Var x, Var bias) {
  const Matrix& xv = value(x);
  const Matrix& bv = value(bias);
  if (bv.rows() != 1 || bv.cols() != xv.cols()) throw ShapeError("add_row: bias shape");
  Matrix out = xv;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bv(0, c);
  }
  return push(std::move(out), needs_grad(x) || needs_grad(bias), "add_row",
              [x, bias](Tape& t, const Matrix& g) {
                if (t.needs_grad(x)) t.accumulate(x, g);
                if (t.needs_grad(bias)) {
                  Matrix db(1, g.cols());
                  for (std::size_t r = 0; r < g.rows(); ++r)
                    for (std::size_t c = 0; c < g.cols(); ++c) db(0, c) += g(r, c);
                  t.accumulate(bias, db);
                }
              });
}

Tape::Var Tape::relu(Var x) {
  Matrix out = value(x);
  for (double& v : out.values()) v = v > 0.0 ? v : 0.0;
  return push(std::move(out), needs_grad(x), "relu", [x](Tape& t, const Matrix& g) {
    Matrix d = g;
    const auto in = t.value(x).values();
    auto dv = d.values();
    for (std::size_t i = 0; i < dv.size(); ++i)
      if (!(in[i] > 0.0)) dv[i] = 0.0;
    t.accumulate(x, d);
  });
}

Tape::Var Tape::hadamard(Var x, const Matrix& constant) {
  if (!value(x).same_shape(constant)) throw ShapeError("hadamard: shape mismatch");
  Matrix out = value(x);
  auto o = out.values();
  const auto c = constant.values();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] *= c[i];
  const Matrix* c_ptr = &constant;
  return push(std::move(out), needs_grad(x), "hadamard", [x, c_ptr](Tape& t, const Matrix& g) {
    Matrix d = g;
    auto dv = d.values();
    const auto cv = c_ptr->values();
    for (std::size_t i = 0; i < dv.size(); ++i) dv[i] *= cv[i];
    t.accumulate(x, d);
  });
}

Tape::Var Tape::masked_cross_entropy(Var logits, std::span<const std::int32_t> labels,
                                     const NodeMask& mask) {
  const Matrix& z = value(logits);
  if (labels.size() != z.rows() || mask.size() != z.rows())
    throw ShapeError("masked_cross_entropy: labels/mask do not match logits");
  if (mask.none()) throw EmptyMaskError("masked_cross_entropy: empty mask");

  // Softmax probabilities of masked rows, kept for the backward pass.
  Matrix probs(z.rows(), z.cols());
  double total = 0.0;
  for (std::size_t r = 0; r < z.rows(); ++r) {
    if (!mask[r]) continue;
    const auto row = z.row(r);
    const double peak = *std::max_element(row.begin(), row.end());
    double sum = 0.0;
    for (double v : row) sum += std::exp(v - peak);
    const double log_sum = std::log(sum);
    total -= row[static_cast<std::size_t>(labels[r])] - peak - log_sum;
    for (std::size_t c = 0; c < row.size(); ++c) probs(r, c) = std::exp(row[c] - peak - log_sum);
  }
  const double count = static_cast<double>(mask.count());
  Matrix loss(1, 1, total / count);
  const NodeMask* mask_ptr = &mask;
  return push(std::move(loss), needs_grad(logits), "masked_cross_entropy",
              [logits, labels, mask_ptr, probs = std::move(probs), count](Tape& t,
                                                                          const Matrix& g) {
                const double scale = g(0, 0) / count;
                Matrix d(probs.rows(), probs.cols());
                for (std::size_t r = 0; r < d.rows(); ++r) {
                  if (!(*mask_ptr)[r]) continue;
                  for (std::size_t c = 0; c < d.cols(); ++c) d(r, c) = probs(r, c) * scale;
                  d(r, static_cast<std::size_t>(labels[r])) -= scale;
                }
                t.accumulate(logits, d);
              });
}

void Tape::backward(Var root) {
  const Matrix& rv = value(root);
  if (rv.rows() != 1 || rv.cols() != 1) throw ShapeError("backward: root must be a scalar");
  for (auto& node : nodes_) node.grad = Matrix{};
  if (!needs_grad(root)) return;
  nodes_[root.id].grad = Matrix(1, 1, 1.0);
  for (std::size_t i = root.id + 1; i-- > 0;) {
    Node& node = nodes_[i];
    if (!node.needs_grad || !node.propagate || node.grad.size() == 0) continue;
    if (!all_finite(node.grad)) throw NumericFault("non-finite gradient during backward");
    node.propagate(*this, node.grad);
  }
}

}  // namespace sgnn
