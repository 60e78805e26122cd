#pragma once

// Reverse-mode automatic differentiation over dense 2D arrays.
//
// A Tape records operations in execution order; node ids are dense and every
// node's inputs have smaller ids, so a single sweep in decreasing id order is
// a valid reverse topological traversal. Scalars are 1x1 arrays. The only
// broadcast supported by the elementwise ops is scalar-with-array; the fused
// affine op adds a 1xN bias row to every row of its product.

#include "swefinn/array2d.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace swefinn::ad {

using NodeId = std::uint32_t;

enum class Op : std::uint8_t {
  Leaf,
  Add,
  Sub,
  Mul,
  Div,
  MatMul,
  Affine,
  Neg,
  Scale,
  Tanh,
  Relu,
  Sqrt,
  Slice,
  PadZero,
  StackAdjacentX,
  StackAdjacentY,
  Reshape,
  Sum,
  Mean,
};

const char *op_name(Op op) noexcept;

class Tape;

/// Handle to a node on a tape.
class Var {
public:
  Var() = default;
  Var(Tape *tape, NodeId id) : tape_(tape), id_(id) {}

  NodeId id() const noexcept { return id_; }
  Tape *tape() const noexcept { return tape_; }
  const Array2D &value() const;
  std::size_t rows() const { return value().rows(); }
  std::size_t cols() const { return value().cols(); }

private:
  Tape *tape_ = nullptr;
  NodeId id_ = 0;
};

/// Adjoints keyed by node id. Every requested id is present.
class Grads {
public:
  const Array2D &at(NodeId id) const;
  const Array2D &at(const Var &v) const { return at(v.id()); }
  bool contains(NodeId id) const { return adjoints_.count(id) != 0; }
  std::size_t size() const noexcept { return adjoints_.size(); }
  void set(NodeId id, Array2D adjoint) { adjoints_[id] = std::move(adjoint); }

  auto begin() const { return adjoints_.begin(); }
  auto end() const { return adjoints_.end(); }

private:
  std::map<NodeId, Array2D> adjoints_;
};

/// Single-owner recording tape. Not thread-safe; use one tape per rollout.
class Tape {
public:
  Tape() = default;
  Tape(const Tape &) = delete;
  Tape &operator=(const Tape &) = delete;
  Tape(Tape &&) = default;
  Tape &operator=(Tape &&) = default;

  /// Leaf whose adjoint can be requested from backward().
  Var variable(Array2D value);
  /// Leaf that never receives an adjoint.
  Var constant(Array2D value);
  Var constant_scalar(double value) { return constant(Array2D::scalar(value)); }

  // Binary ops. Elementwise ops accept equal shapes or a 1x1 operand.
  Var add(Var a, Var b);
  Var sub(Var a, Var b);
  Var mul(Var a, Var b);
  Var div(Var a, Var b);
  Var matmul(Var a, Var b);
  /// x * w + bias, with bias a 1 x cols(w) row added to every row.
  Var affine(Var x, Var w, Var bias);

  // Unary ops.
  Var neg(Var a);
  Var scale(Var a, double factor);
  Var tanh(Var a);
  Var relu(Var a);
  Var sqrt(Var a);
  /// Rows [r0, r1) and columns [c0, c1).
  Var slice(Var a, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1);
  Var pad_zero(Var a, std::size_t top, std::size_t bottom, std::size_t left, std::size_t right);
  /// (nx x ny) -> ((nx-1)*ny x 2); row i*ny+j holds (a[i,j], a[i+1,j]).
  Var stack_adjacent_x(Var a);
  /// (nx x ny) -> (nx*(ny-1) x 2); row i*(ny-1)+j holds (a[i,j], a[i,j+1]).
  Var stack_adjacent_y(Var a);
  Var reshape(Var a, std::size_t rows, std::size_t cols);
  Var sum(Var a);
  Var mean(Var a);

  /// Adjoints of a scalar loss with respect to `wrt`. A second call needs
  /// reset_adjoints() first.
  Grads backward(Var loss, std::span<const Var> wrt);
  void reset_adjoints();

  const Array2D &value(NodeId id) const;
  Op op(NodeId id) const;
  std::span<const NodeId> inputs(NodeId id) const;
  bool requires_grad(NodeId id) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  void reserve(std::size_t n) { nodes_.reserve(n); }
  void clear();

private:
  struct Node {
    Op op = Op::Leaf;
    std::uint8_t arity = 0;
    bool requires_grad = false;
    NodeId in[3] = {0, 0, 0};
    std::size_t meta[4] = {0, 0, 0, 0};
    double factor = 0.0;
    Array2D value;
  };

  Var push(Node node);
  void check_owned(const Var &v) const;
  Var elementwise(Op op, Var a, Var b);
  void accumulate(NodeId id, const Array2D &contribution);
  Array2D &adjoint_slot(NodeId id);
  void backprop_node(NodeId id);

  std::vector<Node> nodes_;
  std::vector<Array2D> adjoints_;
  bool adjoints_dirty_ = false;
};

Var operator+(const Var &a, const Var &b);
Var operator-(const Var &a, const Var &b);
Var operator*(const Var &a, const Var &b);
Var operator/(const Var &a, const Var &b);
Var operator-(const Var &a);
Var operator*(const Var &a, double factor);
Var operator*(double factor, const Var &a);

} // namespace swefinn::ad
