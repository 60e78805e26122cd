#include "swefinn/autodiff.hpp"

#include "swefinn/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace swefinn::ad {

namespace {

constexpr NodeId kMaxNodes = 0xFFFFFFFFu;

bool broadcastable(const Array2D &a, const Array2D &b) {
  return a.same_shape(b) || a.is_scalar() || b.is_scalar();
}

Array2D result_like(const Array2D &a, const Array2D &b) {
  const Array2D &big = a.is_scalar() ? b : a;
  return Array2D(big.rows(), big.cols());
}

template <class F>
void apply_elementwise(const Array2D &a, const Array2D &b, Array2D &out, F f) {
  const std::size_t n = out.size();
  const bool sa = a.size() == 1 && n != 1;
  const bool sb = b.size() == 1 && n != 1;
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = f(a[sa ? 0 : k], b[sb ? 0 : k]);
  }
}

// Reduce an adjoint to the shape of a (possibly broadcast) operand.
void add_reduced(Array2D &slot, const Array2D &contribution) {
  if (slot.same_shape(contribution)) {
    for (std::size_t k = 0; k < slot.size(); ++k) slot[k] += contribution[k];
  } else {
    double total = 0.0;
    for (std::size_t k = 0; k < contribution.size(); ++k) total += contribution[k];
    slot[0] += total;
  }
}

} // namespace

const char *op_name(Op op) noexcept {
  switch (op) {
  case Op::Leaf: return "leaf";
  case Op::Add: return "add";
  case Op::Sub: return "sub";
  case Op::Mul: return "mul";
  case Op::Div: return "div";
  case Op::MatMul: return "matmul";
  case Op::Affine: return "affine";
  case Op::Neg: return "neg";
  case Op::Scale: return "scale";
  case Op::Tanh: return "tanh";
  case Op::Relu: return "relu";
  case Op::Sqrt: return "sqrt";
  case Op::Slice: return "slice";
  case Op::PadZero: return "pad-zero";
  case Op::StackAdjacentX: return "stack-adjacent-x";
  case Op::StackAdjacentY: return "stack-adjacent-y";
  case Op::Reshape: return "reshape";
  case Op::Sum: return "sum";
  case Op::Mean: return "mean";
  }
  return "?";
}

const Array2D &Var::value() const {
  if (tape_ == nullptr) throw Error("Var: unbound handle");
  return tape_->value(id_);
}

const Array2D &Grads::at(NodeId id) const {
  auto it = adjoints_.find(id);
  if (it == adjoints_.end()) {
    throw Error("Grads: no adjoint recorded for node " + std::to_string(id));
  }
  return it->second;
}

// ---------------------------------------------------------------------------
// Recording

Var Tape::push(Node node) {
  if (nodes_.size() >= kMaxNodes) throw Error("Tape: node id space exhausted");
  if (!node.value.all_finite()) {
    std::size_t k = 0;
    while (k < node.value.size() && std::isfinite(node.value[k])) ++k;
    throw NonFiniteError(std::string("non-finite value produced by ") + op_name(node.op) +
                         " node " + std::to_string(nodes_.size()) + " at element (" +
                         std::to_string(k / node.value.cols()) + ", " +
                         std::to_string(k % node.value.cols()) + ")");
  }
  nodes_.push_back(std::move(node));
  return Var(this, static_cast<NodeId>(nodes_.size() - 1));
}

void Tape::check_owned(const Var &v) const {
  if (v.tape() != this || v.id() >= nodes_.size()) {
    throw Error("Tape: variable " + std::to_string(v.id()) + " is not on this tape");
  }
}

Var Tape::variable(Array2D value) {
  Node n;
  n.op = Op::Leaf;
  n.requires_grad = true;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::constant(Array2D value) {
  Node n;
  n.op = Op::Leaf;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::elementwise(Op op, Var a, Var b) {
  check_owned(a);
  check_owned(b);
  const Array2D &va = a.value();
  const Array2D &vb = b.value();
  if (!broadcastable(va, vb)) {
    throw ShapeError(std::string(op_name(op)) + ": incompatible shapes " + va.shape_string() +
                     " and " + vb.shape_string());
  }
  Node n;
  n.op = op;
  n.arity = 2;
  n.in[0] = a.id();
  n.in[1] = b.id();
  n.requires_grad = requires_grad(a.id()) || requires_grad(b.id());
  n.value = result_like(va, vb);
  switch (op) {
  case Op::Add: apply_elementwise(va, vb, n.value, [](double x, double y) { return x + y; }); break;
  case Op::Sub: apply_elementwise(va, vb, n.value, [](double x, double y) { return x - y; }); break;
  case Op::Mul: apply_elementwise(va, vb, n.value, [](double x, double y) { return x * y; }); break;
  case Op::Div:
    for (std::size_t k = 0; k < vb.size(); ++k) {
      if (vb[k] == 0.0) {
        throw DomainError("div: divisor element " + std::to_string(k) + " of shape " +
                          vb.shape_string() + " is exactly zero");
      }
    }
    apply_elementwise(va, vb, n.value, [](double x, double y) { return x / y; });
    break;
  default: throw Error("elementwise: unsupported op");
  }
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) { return elementwise(Op::Add, a, b); }
Var Tape::sub(Var a, Var b) { return elementwise(Op::Sub, a, b); }
Var Tape::mul(Var a, Var b) { return elementwise(Op::Mul, a, b); }
Var Tape::div(Var a, Var b) { return elementwise(Op::Div, a, b); }

Var Tape::matmul(Var a, Var b) {
  check_owned(a);
  check_owned(b);
  const Array2D &va = a.value();
  const Array2D &vb = b.value();
  if (va.cols() != vb.rows()) {
    throw ShapeError("matmul: inner dimensions differ for " + va.shape_string() + " and " +
                     vb.shape_string());
  }
  Node n;
  n.op = Op::MatMul;
  n.arity = 2;
  n.in[0] = a.id();
  n.in[1] = b.id();
  n.requires_grad = requires_grad(a.id()) || requires_grad(b.id());
  n.value = Array2D(va.rows(), vb.cols());
  const std::size_t m = va.rows(), k = va.cols(), p = vb.cols();
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t l = 0; l < k; ++l) {
      const double x = va[i * k + l];
      for (std::size_t j = 0; j < p; ++j) n.value[i * p + j] += x * vb[l * p + j];
    }
  }
  return push(std::move(n));
}

Var Tape::affine(Var x, Var w, Var bias) {
  check_owned(x);
  check_owned(w);
  check_owned(bias);
  const Array2D &vx = x.value();
  const Array2D &vw = w.value();
  const Array2D &vb = bias.value();
  if (vx.cols() != vw.rows() || vb.rows() != 1 || vb.cols() != vw.cols()) {
    throw ShapeError("affine: incompatible shapes x" + vx.shape_string() + " w" +
                     vw.shape_string() + " bias" + vb.shape_string());
  }
  Node n;
  n.op = Op::Affine;
  n.arity = 3;
  n.in[0] = x.id();
  n.in[1] = w.id();
  n.in[2] = bias.id();
  n.requires_grad = requires_grad(x.id()) || requires_grad(w.id()) || requires_grad(bias.id());
  const std::size_t m = vx.rows(), k = vx.cols(), p = vw.cols();
  n.value = Array2D(m, p);
  for (std::size_t i = 0; i < m; ++i) {
    double *row = &n.value[i * p];
    for (std::size_t j = 0; j < p; ++j) row[j] = vb[j];
    for (std::size_t l = 0; l < k; ++l) {
      const double xv = vx[i * k + l];
      const double *wrow = vw.data() + l * p;
      for (std::size_t j = 0; j < p; ++j) row[j] += xv * wrow[j];
    }
  }
  return push(std::move(n));
}

namespace {

template <class F>
Array2D map_values(const Array2D &a, F f) {
  Array2D out(a.rows(), a.cols());
  for (std::size_t k = 0; k < a.size(); ++k) out[k] = f(a[k]);
  return out;
}

} // namespace

#define SWEFINN_UNARY_NODE(OPKIND, VAR)                                                            \
  check_owned(VAR);                                                                                \
  Node n;                                                                                          \
  n.op = OPKIND;                                                                                   \
  n.arity = 1;                                                                                     \
  n.in[0] = (VAR).id();                                                                            \
  n.requires_grad = requires_grad((VAR).id())

Var Tape::neg(Var a) {
  SWEFINN_UNARY_NODE(Op::Neg, a);
  n.value = map_values(a.value(), [](double x) { return -x; });
  return push(std::move(n));
}

Var Tape::scale(Var a, double factor) {
  SWEFINN_UNARY_NODE(Op::Scale, a);
  n.factor = factor;
  n.value = map_values(a.value(), [factor](double x) { return factor * x; });
  return push(std::move(n));
}

Var Tape::tanh(Var a) {
  SWEFINN_UNARY_NODE(Op::Tanh, a);
  n.value = map_values(a.value(), [](double x) { return std::tanh(x); });
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  SWEFINN_UNARY_NODE(Op::Relu, a);
  n.value = map_values(a.value(), [](double x) { return x > 0.0 ? x : 0.0; });
  return push(std::move(n));
}

Var Tape::sqrt(Var a) {
  SWEFINN_UNARY_NODE(Op::Sqrt, a);
  const Array2D &va = a.value();
  for (std::size_t k = 0; k < va.size(); ++k) {
    if (va[k] < 0.0) {
      throw DomainError("sqrt: negative input at element " + std::to_string(k));
    }
  }
  n.value = map_values(va, [](double x) { return std::sqrt(x); });
  return push(std::move(n));
}

Var Tape::slice(Var a, std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) {
  SWEFINN_UNARY_NODE(Op::Slice, a);
  const Array2D &va = a.value();
  if (r0 >= r1 || c0 >= c1 || r1 > va.rows() || c1 > va.cols()) {
    throw DomainError("slice: rows [" + std::to_string(r0) + "," + std::to_string(r1) +
                      ") cols [" + std::to_string(c0) + "," + std::to_string(c1) +
                      ") out of bounds for " + va.shape_string());
  }
  n.meta[0] = r0;
  n.meta[1] = r1;
  n.meta[2] = c0;
  n.meta[3] = c1;
  n.value = Array2D(r1 - r0, c1 - c0);
  const std::size_t w = c1 - c0;
  for (std::size_t i = r0; i < r1; ++i) {
    std::copy_n(va.data() + i * va.cols() + c0, w, &n.value[(i - r0) * w]);
  }
  return push(std::move(n));
}

Var Tape::pad_zero(Var a, std::size_t top, std::size_t bottom, std::size_t left,
                   std::size_t right) {
  SWEFINN_UNARY_NODE(Op::PadZero, a);
  const Array2D &va = a.value();
  n.meta[0] = top;
  n.meta[1] = bottom;
  n.meta[2] = left;
  n.meta[3] = right;
  const std::size_t cols = va.cols() + left + right;
  n.value = Array2D(va.rows() + top + bottom, cols);
  for (std::size_t i = 0; i < va.rows(); ++i) {
    std::copy_n(va.data() + i * va.cols(), va.cols(), &n.value[(i + top) * cols + left]);
  }
  return push(std::move(n));
}

Var Tape::stack_adjacent_x(Var a) {
  SWEFINN_UNARY_NODE(Op::StackAdjacentX, a);
  const Array2D &va = a.value();
  if (va.rows() < 2) throw ShapeError("stack-adjacent-x: need at least 2 rows, got " + va.shape_string());
  const std::size_t nx = va.rows(), ny = va.cols();
  n.value = Array2D((nx - 1) * ny, 2);
  for (std::size_t i = 0; i + 1 < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const std::size_t p = i * ny + j;
      n.value[2 * p] = va[i * ny + j];
      n.value[2 * p + 1] = va[(i + 1) * ny + j];
    }
  }
  return push(std::move(n));
}

Var Tape::stack_adjacent_y(Var a) {
  SWEFINN_UNARY_NODE(Op::StackAdjacentY, a);
  const Array2D &va = a.value();
  if (va.cols() < 2) throw ShapeError("stack-adjacent-y: need at least 2 cols, got " + va.shape_string());
  const std::size_t nx = va.rows(), ny = va.cols();
  n.value = Array2D(nx * (ny - 1), 2);
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j + 1 < ny; ++j) {
      const std::size_t p = i * (ny - 1) + j;
      n.value[2 * p] = va[i * ny + j];
      n.value[2 * p + 1] = va[i * ny + j + 1];
    }
  }
  return push(std::move(n));
}

Var Tape::reshape(Var a, std::size_t rows, std::size_t cols) {
  SWEFINN_UNARY_NODE(Op::Reshape, a);
  const Array2D &va = a.value();
  if (rows * cols != va.size()) {
    throw ShapeError("reshape: cannot view " + va.shape_string() + " as " +
                     shape_string(rows, cols));
  }
  n.value = Array2D(rows, cols, va.values());
  return push(std::move(n));
}

Var Tape::sum(Var a) {
  SWEFINN_UNARY_NODE(Op::Sum, a);
  double total = 0.0;
  for (double x : a.value().values()) total += x;
  n.value = Array2D::scalar(total);
  return push(std::move(n));
}

Var Tape::mean(Var a) {
  SWEFINN_UNARY_NODE(Op::Mean, a);
  const Array2D &va = a.value();
  if (va.empty()) throw ShapeError("mean: empty input");
  double total = 0.0;
  for (double x : va.values()) total += x;
  n.value = Array2D::scalar(total / static_cast<double>(va.size()));
  return push(std::move(n));
}

#undef SWEFINN_UNARY_NODE

// ---------------------------------------------------------------------------
// Queries

const Array2D &Tape::value(NodeId id) const {
  if (id >= nodes_.size()) throw Error("Tape: node " + std::to_string(id) + " not on tape");
  return nodes_[id].value;
}

Op Tape::op(NodeId id) const { return nodes_.at(id).op; }

std::span<const NodeId> Tape::inputs(NodeId id) const {
  const Node &n = nodes_.at(id);
  return {n.in, n.arity};
}

bool Tape::requires_grad(NodeId id) const { return nodes_.at(id).requires_grad; }

void Tape::clear() {
  nodes_.clear();
  adjoints_.clear();
  adjoints_dirty_ = false;
}

// ---------------------------------------------------------------------------
// Backward

Array2D &Tape::adjoint_slot(NodeId id) {
  Array2D &slot = adjoints_[id];
  if (slot.empty()) slot = Array2D(nodes_[id].value.rows(), nodes_[id].value.cols());
  return slot;
}

void Tape::accumulate(NodeId id, const Array2D &contribution) {
  if (!nodes_[id].requires_grad) return;
  add_reduced(adjoint_slot(id), contribution);
}

void Tape::reset_adjoints() {
  adjoints_.clear();
  adjoints_dirty_ = false;
}

Grads Tape::backward(Var loss, std::span<const Var> wrt) {
  check_owned(loss);
  if (!loss.value().is_scalar()) {
    throw ShapeError("backward: loss must be scalar, got " + loss.value().shape_string());
  }
  for (const Var &v : wrt) check_owned(v);
  if (adjoints_dirty_) {
    throw Error("backward: adjoints already populated; call reset_adjoints() first");
  }
  adjoints_.assign(nodes_.size(), Array2D());
  adjoints_dirty_ = true;

  if (nodes_[loss.id()].requires_grad) {
    adjoint_slot(loss.id())[0] = 1.0;
    for (NodeId id = loss.id() + 1; id-- > 0;) {
      if (!adjoints_[id].empty() && nodes_[id].arity > 0) backprop_node(id);
    }
  }

  Grads grads;
  for (const Var &v : wrt) {
    const Array2D &slot = adjoints_[v.id()];
    grads.set(v.id(), slot.empty() ? Array2D(v.rows(), v.cols()) : slot);
  }
  return grads;
}

void Tape::backprop_node(NodeId id) {
  const Node &node = nodes_[id];
  const Array2D &g = adjoints_[id];
  const Array2D &out = node.value;
  const NodeId ia = node.in[0];
  const NodeId ib = node.in[1];

  switch (node.op) {
  case Op::Leaf: break;

  case Op::Add:
    accumulate(ia, g);
    accumulate(ib, g);
    break;

  case Op::Sub: {
    accumulate(ia, g);
    if (nodes_[ib].requires_grad) {
      Array2D ng = map_values(g, [](double x) { return -x; });
      accumulate(ib, ng);
    }
    break;
  }

  case Op::Mul: {
    const Array2D &va = nodes_[ia].value;
    const Array2D &vb = nodes_[ib].value;
    if (nodes_[ia].requires_grad) {
      Array2D ga(g.rows(), g.cols());
      apply_elementwise(g, vb, ga, [](double x, double y) { return x * y; });
      accumulate(ia, ga);
    }
    if (nodes_[ib].requires_grad) {
      Array2D gb(g.rows(), g.cols());
      apply_elementwise(g, va, gb, [](double x, double y) { return x * y; });
      accumulate(ib, gb);
    }
    break;
  }

  case Op::Div: {
    const Array2D &vb = nodes_[ib].value;
    if (nodes_[ia].requires_grad) {
      Array2D ga(g.rows(), g.cols());
      apply_elementwise(g, vb, ga, [](double x, double y) { return x / y; });
      accumulate(ia, ga);
    }
    if (nodes_[ib].requires_grad) {
      // d(a/b)/db = -(a/b)/b
      Array2D q(g.rows(), g.cols());
      apply_elementwise(g, out, q, [](double x, double y) { return -x * y; });
      Array2D gb(g.rows(), g.cols());
      apply_elementwise(q, vb, gb, [](double x, double y) { return x / y; });
      accumulate(ib, gb);
    }
    break;
  }

  case Op::MatMul: {
    const Array2D &va = nodes_[ia].value;
    const Array2D &vb = nodes_[ib].value;
    const std::size_t m = va.rows(), k = va.cols(), p = vb.cols();
    if (nodes_[ia].requires_grad) {
      Array2D &ga = adjoint_slot(ia);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < k; ++l) {
          double acc = 0.0;
          for (std::size_t j = 0; j < p; ++j) acc += g[i * p + j] * vb[l * p + j];
          ga[i * k + l] += acc;
        }
    }
    if (nodes_[ib].requires_grad) {
      Array2D &gb = adjoint_slot(ib);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < k; ++l) {
          const double x = va[i * k + l];
          for (std::size_t j = 0; j < p; ++j) gb[l * p + j] += x * g[i * p + j];
        }
    }
    break;
  }

  case Op::Affine: {
    const NodeId ic = node.in[2];
    const Array2D &vx = nodes_[ia].value;
    const Array2D &vw = nodes_[ib].value;
    const std::size_t m = vx.rows(), k = vx.cols(), p = vw.cols();
    if (nodes_[ia].requires_grad) {
      Array2D &gx = adjoint_slot(ia);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < k; ++l) {
          double acc = 0.0;
          for (std::size_t j = 0; j < p; ++j) acc += g[i * p + j] * vw[l * p + j];
          gx[i * k + l] += acc;
        }
    }
    if (nodes_[ib].requires_grad) {
      Array2D &gw = adjoint_slot(ib);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t l = 0; l < k; ++l) {
          const double x = vx[i * k + l];
          for (std::size_t j = 0; j < p; ++j) gw[l * p + j] += x * g[i * p + j];
        }
    }
    if (nodes_[ic].requires_grad) {
      Array2D &gbias = adjoint_slot(ic);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < p; ++j) gbias[j] += g[i * p + j];
    }
    break;
  }

  case Op::Neg: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] -= g[k];
    break;
  }

  case Op::Scale: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += node.factor * g[k];
    break;
  }

  case Op::Tanh: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k] * (1.0 - out[k] * out[k]);
    break;
  }

  case Op::Relu: {
    if (!nodes_[ia].requires_grad) break;
    const Array2D &va = nodes_[ia].value;
    Array2D &ga = adjoint_slot(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += va[k] > 0.0 ? g[k] : 0.0;
    break;
  }

  case Op::Sqrt: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (g[k] == 0.0) continue;
      if (out[k] == 0.0) {
        throw DomainError("sqrt: derivative undefined at zero (element " + std::to_string(k) + ")");
      }
      ga[k] += 0.5 * g[k] / out[k];
    }
    break;
  }

  case Op::Slice: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    const std::size_t r0 = node.meta[0], r1 = node.meta[1], c0 = node.meta[2], c1 = node.meta[3];
    const std::size_t w = c1 - c0, cols = ga.cols();
    for (std::size_t i = r0; i < r1; ++i)
      for (std::size_t j = 0; j < w; ++j) ga[i * cols + c0 + j] += g[(i - r0) * w + j];
    break;
  }

  case Op::PadZero: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    const std::size_t top = node.meta[0], left = node.meta[2];
    const std::size_t cols = out.cols();
    for (std::size_t i = 0; i < ga.rows(); ++i)
      for (std::size_t j = 0; j < ga.cols(); ++j) ga[i * ga.cols() + j] += g[(i + top) * cols + j + left];
    break;
  }

  case Op::StackAdjacentX: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    const std::size_t nx = ga.rows(), ny = ga.cols();
    for (std::size_t i = 0; i + 1 < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) {
        const std::size_t p = i * ny + j;
        ga[i * ny + j] += g[2 * p];
        ga[(i + 1) * ny + j] += g[2 * p + 1];
      }
    break;
  }

  case Op::StackAdjacentY: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    const std::size_t nx = ga.rows(), ny = ga.cols();
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j + 1 < ny; ++j) {
        const std::size_t p = i * (ny - 1) + j;
        ga[i * ny + j] += g[2 * p];
        ga[i * ny + j + 1] += g[2 * p + 1];
      }
    break;
  }

  case Op::Reshape: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    for (std::size_t k = 0; k < g.size(); ++k) ga[k] += g[k];
    break;
  }

  case Op::Sum:
  case Op::Mean: {
    if (!nodes_[ia].requires_grad) break;
    Array2D &ga = adjoint_slot(ia);
    const double s = node.op == Op::Sum ? g[0] : g[0] / static_cast<double>(ga.size());
    for (std::size_t k = 0; k < ga.size(); ++k) ga[k] += s;
    break;
  }
  }
}

// ---------------------------------------------------------------------------

Var operator+(const Var &a, const Var &b) { return a.tape()->add(a, b); }
Var operator-(const Var &a, const Var &b) { return a.tape()->sub(a, b); }
Var operator*(const Var &a, const Var &b) { return a.tape()->mul(a, b); }
Var operator/(const Var &a, const Var &b) { return a.tape()->div(a, b); }
Var operator-(const Var &a) { return a.tape()->neg(a); }
Var operator*(const Var &a, double factor) { return a.tape()->scale(a, factor); }
Var operator*(double factor, const Var &a) { return a.tape()->scale(a, factor); }

} // namespace swefinn::ad
