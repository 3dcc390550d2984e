#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "sgnn/matrix.hpp"
#include "sgnn/node_mask.hpp"
#include "sgnn/sparse.hpp"

namespace sgnn {

// Minimal reverse-mode tape over dense matrices, covering exactly the ops a
// two-layer GCN with masked cross-entropy needs. Nodes are appended in
// evaluation order, so a reverse sweep is a valid topological order.
//
// Sparse operators, label spans and masks handed to an op are referenced,
// not copied, and must outlive the tape.
class Tape {
 public:
  struct Var {
    std::size_t id;
  };

  // A value that never receives a gradient.
  Var input(Matrix value);
  // A leaf whose gradient is accumulated by backward().
  Var parameter(Matrix value);

  Var matmul(Var a, Var b);
  Var spmm(const CsrMatrix& op, Var x);
  // x + bias broadcast over rows; bias is 1 x cols.
  Var add_row(Var x, Var bias);
  Var relu(Var x);
  // Elementwise product with a constant matrix.
  Var hadamard(Var x, const Matrix& constant);
  // Mean over masked rows of -log softmax(row)[label]; 1 x 1. Softmax uses
  // max subtraction. Throws EmptyMaskError for an empty mask.
  Var masked_cross_entropy(Var logits, std::span<const std::int32_t> labels,
                           const NodeMask& mask);

  const Matrix& value(Var v) const { return nodes_[v.id].value; }
  // Zero-sized until backward() reaches the node.
  const Matrix& grad(Var v) const { return nodes_[v.id].grad; }

  // Seeds d(root)/d(root) = 1 and sweeps the tape once. root must be 1 x 1.
  void backward(Var root);

  std::size_t size() const noexcept { return nodes_.size(); }

 private:
  struct Node {
    Matrix value;
    Matrix grad;
    bool needs_grad = false;
    // Pushes this node's grad into its parents' grads.
    std::function<void(Tape&, const Matrix&)> propagate;
  };

  Var push(Matrix value, bool needs_grad, const char* op,
           std::function<void(Tape&, const Matrix&)> propagate);
  void accumulate(Var target, const Matrix& delta);
  bool needs_grad(Var v) const { return nodes_[v.id].needs_grad; }

  std::vector<Node> nodes_;
};

}  // namespace sgnn
