#include "doctest.h"

#include "swefinn/autodiff.hpp"
#include "swefinn/errors.hpp"
#include "swefinn/rng.hpp"

#include <cmath>
#include <functional>
#include <vector>

using namespace swefinn;
using ad::Tape;
using ad::Var;

namespace {

Array2D random_array(SplitMix64 &rng, std::size_t r, std::size_t c, double lo = -1.0, double hi = 1.0) {
  Array2D a(r, c);
  for (double &x : a.span()) x = rng.uniform(lo, hi);
  return a;
}

using Build = std::function<Var(Tape &, const std::vector<Var> &)>;

// Loss = sum(f(inputs) * weights) with fixed random weights, so the adjoint
// seed of f's output is not uniform.
double weighted_loss(const Build &f, const std::vector<Array2D> &inputs, const Array2D *weights,
                     Array2D *weights_out, std::vector<Array2D> *grads) {
  Tape tape;
  std::vector<Var> vars;
  for (const Array2D &a : inputs) vars.push_back(tape.variable(a));
  Var y = f(tape, vars);
  Array2D w;
  if (weights != nullptr) {
    w = *weights;
  } else {
    SplitMix64 rng(99);
    w = random_array(rng, y.rows(), y.cols());
  }
  if (weights_out != nullptr) *weights_out = w;
  Var loss = tape.sum(tape.mul(y, tape.constant(w)));
  if (grads != nullptr) {
    const ad::Grads g = tape.backward(loss, vars);
    for (const Var &v : vars) grads->push_back(g.at(v));
  }
  return loss.value().item();
}

void check_op_gradient(const Build &f, const std::vector<Array2D> &inputs, double tol = 1e-7) {
  Array2D w;
  std::vector<Array2D> grads;
  weighted_loss(f, inputs, nullptr, &w, &grads);
  for (std::size_t a = 0; a < inputs.size(); ++a) {
    for (std::size_t k = 0; k < inputs[a].size(); ++k) {
      std::vector<Array2D> plus = inputs, minus = inputs;
      const double h = 1e-6 * std::max(1.0, std::abs(inputs[a][k]));
      plus[a][k] += h;
      minus[a][k] -= h;
      const double fd = (weighted_loss(f, plus, &w, nullptr, nullptr) - weighted_loss(f, minus, &w, nullptr, nullptr)) /
                        (2.0 * h);
      CHECK(grads[a][k] == doctest::Approx(fd).epsilon(tol).scale(1.0));
    }
  }
}

} // namespace

TEST_SUITE("autodiff") {

TEST_CASE("add of scalars seeds unit adjoints") {
  Tape tape;
  Var a = tape.variable(Array2D::scalar(2.0));
  Var b = tape.variable(Array2D::scalar(3.0));
  Var y = a + b;
  CHECK(y.value().item() == 5.0);
  const Var wrt[] = {a, b};
  const ad::Grads g = tape.backward(y, wrt);
  CHECK(g.at(a).item() == 1.0);
  CHECK(g.at(b).item() == 1.0);
}

TEST_CASE("mul gives the other factor as derivative") {
  Tape tape;
  Var x = tape.variable(Array2D::scalar(3.0));
  Var y = tape.variable(Array2D::scalar(4.0));
  Var z = x * y;
  CHECK(z.value().item() == 12.0);
  const Var wrt[] = {x, y};
  const ad::Grads g = tape.backward(z, wrt);
  CHECK(g.at(x).item() == 4.0);
  CHECK(g.at(y).item() == 3.0);
}

TEST_CASE("matmul row by column") {
  Tape tape;
  Var a = tape.variable(Array2D(1, 2, {1.0, 2.0}));
  Var b = tape.variable(Array2D(2, 1, {3.0, 4.0}));
  Var c = tape.matmul(a, b);
  CHECK(c.value().item() == 11.0);
  const Var wrt[] = {a, b};
  const ad::Grads g = tape.backward(c, wrt);
  CHECK(g.at(a)[0] == 3.0);
  CHECK(g.at(a)[1] == 4.0);
  CHECK(g.at(b)[0] == 1.0);
  CHECK(g.at(b)[1] == 2.0);
}

TEST_CASE("reused variable accumulates both paths") {
  Tape tape;
  Var x = tape.variable(Array2D::scalar(3.0));
  Var y = x * x;
  const Var wrt[] = {x};
  CHECK(tape.backward(y, wrt).at(x).item() == 6.0);
}

TEST_CASE("tanh and relu local derivatives") {
  Tape tape;
  Var x = tape.variable(Array2D::scalar(0.0));
  Var y = tape.tanh(x);
  CHECK(y.value().item() == 0.0);
  const Var wx[] = {x};
  CHECK(tape.backward(y, wx).at(x).item() == 1.0);

  Tape t2;
  Var r = t2.variable(Array2D::scalar(-2.5));
  Var z = t2.relu(r);
  CHECK(z.value().item() == 0.0);
  const Var wr[] = {r};
  CHECK(t2.backward(z, wr).at(r).item() == 0.0);
}

TEST_CASE("stack-adjacent-x pairs consecutive rows") {
  Array2D a(3, 3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) a(i, j) = static_cast<double>(i);
  Tape tape;
  Var s = tape.stack_adjacent_x(tape.constant(a));
  REQUIRE(s.rows() == 6);
  REQUIRE(s.cols() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(s.value()(i * 3 + j, 0) == static_cast<double>(i));
      CHECK(s.value()(i * 3 + j, 1) == static_cast<double>(i + 1));
    }
  }
}

TEST_CASE("stack-adjacent-y pairs consecutive columns") {
  Array2D a(2, 3, {0, 1, 2, 10, 11, 12});
  Tape tape;
  Var s = tape.stack_adjacent_y(tape.constant(a));
  REQUIRE(s.rows() == 4);
  CHECK(s.value()(0, 0) == 0.0);
  CHECK(s.value()(0, 1) == 1.0);
  CHECK(s.value()(1, 0) == 1.0);
  CHECK(s.value()(1, 1) == 2.0);
  CHECK(s.value()(2, 0) == 10.0);
  CHECK(s.value()(3, 1) == 12.0);
}

TEST_CASE("sum over a field gives unit adjoints") {
  Tape tape;
  Var H = tape.variable(Array2D(2, 2, {1, 2, 3, 4}));
  Var s = tape.sum(H);
  const Var wrt[] = {H};
  const Array2D g = tape.backward(s, wrt).at(H);
  for (double x : g.values()) CHECK(x == 1.0);
}

TEST_CASE("shape errors name both shapes") {
  Tape tape;
  Var a = tape.constant(Array2D(2, 3));
  Var b = tape.constant(Array2D(3, 2));
  try {
    tape.add(a, b);
    FAIL("expected ShapeError");
  } catch (const ShapeError &e) {
    const std::string msg = e.what();
    CHECK(msg.find("(2x3)") != std::string::npos);
    CHECK(msg.find("(3x2)") != std::string::npos);
  }
  CHECK_THROWS_AS(tape.matmul(a, a), ShapeError);
}

TEST_CASE("scalar broadcast works on either side") {
  Tape tape;
  Var f = tape.variable(Array2D(2, 2, {1, 2, 3, 4}));
  Var s = tape.variable(Array2D::scalar(10.0));
  Var y = tape.sum(tape.mul(s, f) + tape.sub(f, s));
  // sum(10 f) + sum(f) - 4*10
  CHECK(y.value().item() == doctest::Approx(110.0 - 40.0));
  const Var wrt[] = {f, s};
  const ad::Grads g = tape.backward(y, wrt);
  CHECK(g.at(s).item() == doctest::Approx(10.0 - 4.0));
  for (double x : g.at(f).values()) CHECK(x == 11.0);
}

TEST_CASE("division by an exact zero is a domain error") {
  Tape tape;
  Var a = tape.constant(Array2D(1, 2, {1.0, 2.0}));
  Var b = tape.constant(Array2D(1, 2, {1.0, 0.0}));
  CHECK_THROWS_AS(tape.div(a, b), DomainError);
}

TEST_CASE("slice bounds and sqrt domain are checked") {
  Tape tape;
  Var a = tape.constant(Array2D(3, 3, 1.0));
  CHECK_THROWS_AS(tape.slice(a, 0, 4, 0, 1), DomainError);
  CHECK_THROWS_AS(tape.slice(a, 2, 1, 0, 1), DomainError);
  CHECK_THROWS_AS(tape.sqrt(tape.constant(Array2D(1, 1, -1.0))), DomainError);
}

TEST_CASE("backward rejects non-scalar loss, foreign ids and dirty adjoints") {
  Tape tape;
  Var x = tape.variable(Array2D(2, 2, 1.0));
  const Var wrt[] = {x};
  CHECK_THROWS_AS(tape.backward(x, wrt), ShapeError);

  Var loss = tape.sum(x);
  Tape other;
  Var foreign = other.variable(Array2D::scalar(1.0));
  const Var bad[] = {foreign};
  CHECK_THROWS_AS(tape.backward(loss, bad), Error);

  tape.reset_adjoints();
  const Array2D g1 = tape.backward(loss, wrt).at(x);
  CHECK_THROWS_AS(tape.backward(loss, wrt), Error);
  tape.reset_adjoints();
  const Array2D g2 = tape.backward(loss, wrt).at(x);
  CHECK(g1.bit_equal(g2));
}

TEST_CASE("non-finite forward values are reported") {
  Tape tape;
  Var big = tape.constant(Array2D::scalar(1e200));
  CHECK_THROWS_AS(tape.mul(big, big), NonFiniteError);
}

TEST_CASE("node ids increase and inputs precede their node") {
  Tape tape;
  Var a = tape.variable(Array2D(2, 2, 1.0));
  Var b = tape.tanh(a);
  Var c = tape.add(a, b);
  Var d = tape.sum(c);
  CHECK(a.id() < b.id());
  CHECK(b.id() < c.id());
  CHECK(c.id() < d.id());
  for (ad::NodeId id = 0; id < tape.size(); ++id) {
    for (ad::NodeId in : tape.inputs(id)) CHECK(in < id);
  }
}

TEST_CASE("per-op adjoints match finite differences") {
  SplitMix64 rng(12345);
  const Array2D a = random_array(rng, 3, 4);
  const Array2D b = random_array(rng, 3, 4);
  const Array2D pos = random_array(rng, 3, 4, 0.5, 2.0);
  const Array2D s = random_array(rng, 1, 1);
  const Array2D m = random_array(rng, 4, 2);
  const Array2D bias = random_array(rng, 1, 2);

  SUBCASE("add") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.add(v[0], v[1]); }, {a, b}); }
  SUBCASE("sub") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.sub(v[0], v[1]); }, {a, b}); }
  SUBCASE("mul") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.mul(v[0], v[1]); }, {a, b}); }
  SUBCASE("div") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.div(v[0], v[1]); }, {a, pos}); }
  SUBCASE("scalar broadcast mul") {
    check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.mul(v[0], v[1]); }, {s, a});
  }
  SUBCASE("scalar broadcast div") {
    check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.div(v[1], v[0]); }, {Array2D::scalar(1.7), a});
  }
  SUBCASE("matmul") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.matmul(v[0], v[1]); }, {a, m}); }
  SUBCASE("affine") {
    check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.affine(v[0], v[1], v[2]); }, {a, m, bias});
  }
  SUBCASE("neg") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.neg(v[0]); }, {a}); }
  SUBCASE("scale") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.scale(v[0], -2.5); }, {a}); }
  SUBCASE("tanh") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.tanh(v[0]); }, {a}); }
  SUBCASE("relu") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.relu(v[0]); }, {a}); }
  SUBCASE("sqrt") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.sqrt(v[0]); }, {pos}); }
  SUBCASE("slice") {
    check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.slice(v[0], 1, 3, 1, 4); }, {a});
  }
  SUBCASE("pad_zero") {
    check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.pad_zero(v[0], 1, 2, 0, 1); }, {a});
  }
  SUBCASE("stack_adjacent_x") {
    check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.stack_adjacent_x(v[0]); }, {a});
  }
  SUBCASE("stack_adjacent_y") {
    check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.stack_adjacent_y(v[0]); }, {a});
  }
  SUBCASE("reshape") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.reshape(v[0], 6, 2); }, {a}); }
  SUBCASE("sum") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.sum(v[0]); }, {a}); }
  SUBCASE("mean") { check_op_gradient([](Tape &t, const std::vector<Var> &v) { return t.mean(v[0]); }, {a}); }
  SUBCASE("composite") {
    check_op_gradient(
        [](Tape &t, const std::vector<Var> &v) {
          Var h = t.tanh(t.affine(v[0], v[1], v[2]));
          return t.mul(h, h);
        },
        {a, m, bias});
  }
}

TEST_CASE("identical op sequences give bit-identical values and gradients") {
  auto run = [] {
    SplitMix64 rng(7);
    Tape tape;
    Var x = tape.variable(random_array(rng, 4, 2));
    Var w = tape.variable(random_array(rng, 2, 3));
    Var b = tape.variable(random_array(rng, 1, 3));
    Var loss = tape.mean(tape.tanh(tape.affine(x, w, b)));
    const Var wrt[] = {x, w, b};
    const ad::Grads g = tape.backward(loss, wrt);
    return std::vector<Array2D>{loss.value(), g.at(x), g.at(w), g.at(b)};
  };
  const auto r1 = run();
  const auto r2 = run();
  for (std::size_t k = 0; k < r1.size(); ++k) CHECK(r1[k].bit_equal(r2[k]));
}

TEST_CASE("constants are skipped by backward") {
  Tape tape;
  Var c = tape.constant(Array2D(2, 2, 3.0));
  Var x = tape.variable(Array2D(2, 2, 1.0));
  Var loss = tape.sum(tape.mul(c, x));
  CHECK_FALSE(tape.requires_grad(c.id()));
  CHECK(tape.requires_grad(loss.id()));
  const Var wrt[] = {x};
  const ad::Grads grads = tape.backward(loss, wrt);
  for (double g : grads.at(x).values()) CHECK(g == 3.0);
}

} // TEST_SUITE
