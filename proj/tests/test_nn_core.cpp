// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mofgcn/adam.hpp"
#include "mofgcn/errors.hpp"
#include "mofgcn/gradcheck.hpp"
#include "mofgcn/mlp.hpp"
#include "mofgcn/model.hpp"
#include "mofgcn/tape.hpp"

using namespace mofgcn;

namespace {

void set_all(Tensor& t, double v) { std::fill(t.data.begin(), t.data.end(), v); }

}  // namespace

TEST_CASE("mlp_forward: zero-weight network returns the final-layer bias") {
  ParamStore store;
  std::mt19937_64 rng(7);
  MlpSpec spec{3, {4}, 2, Activation::kTanh, Activation::kIdentity};
  MlpRef mlp = create_mlp(store, "net", spec, rng);
  for (std::size_t i = 0; i < store.count(); ++i) set_all(store.at(static_cast<int>(i)), 0.0);
  store.at("net.b1").data = {1.5, -2.5};

  Tape tape(store);
  const NodeId out = mlp_forward(tape, mlp, tape.constant({0.3, -0.9, 2.0}));
  CHECK(tape.value(out) == Vec{1.5, -2.5});
}

TEST_CASE("mlp_forward: identity-configured 1->1 linear layer") {
  ParamStore store;
  std::mt19937_64 rng(7);
  MlpSpec spec{1, {}, 1, Activation::kTanh, Activation::kIdentity};
  MlpRef mlp = create_mlp(store, "net", spec, rng);
  store.at("net.W0").data = {1.0};
  store.at("net.b0").data = {0.0};

  Tape tape(store);
  CHECK(tape.scalar(mlp_forward(tape, mlp, tape.constant({0.7}))) == 0.7);
}

TEST_CASE("mlp_forward: 1->2->1 tanh network, all weights 0.5, hand-evaluated") {
  // 0.5*tanh(0.5*1) + 0.5*tanh(0.5*1) = tanh(0.5) = 0.4621171572600098
  ParamStore store;
  std::mt19937_64 rng(7);
  MlpSpec spec{1, {2}, 1, Activation::kTanh, Activation::kIdentity};
  MlpRef mlp = create_mlp(store, "net", spec, rng);
  store.at("net.W0").data = {0.5, 0.5};
  store.at("net.b0").data = {0.0, 0.0};
  store.at("net.W1").data = {0.5, 0.5};
  store.at("net.b1").data = {0.0};

  Tape tape(store);
  const double out = tape.scalar(mlp_forward(tape, mlp, tape.constant({1.0})));
  CHECK(out == doctest::Approx(0.4621171572600098).epsilon(1e-12));
}

TEST_CASE("mlp_forward: dimension mismatch rejected with shape diagnostic") {
  ParamStore store;
  std::mt19937_64 rng(7);
  MlpRef mlp = create_mlp(store, "net", MlpSpec{3, {2}, 1}, rng);
  Tape tape(store);
  try {
    mlp_forward(tape, mlp, tape.constant({1.0, 2.0}));
    FAIL("expected NumericError");
  } catch (const NumericError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("dimension 2") != std::string::npos);
    CHECK(msg.find('3') != std::string::npos);
  }
}

TEST_CASE("mlp_forward: deterministic, bit-identical repeat") {
  ParamStore store;
  std::mt19937_64 rng(99);
  MlpRef mlp = create_mlp(store, "net", MlpSpec{4, {8, 8}, 3}, rng);
  const Vec input = {0.1, -0.7, 1.3, 0.002};
  const Vec a = mlp_eval(store, mlp, input);
  const Vec b = mlp_eval(store, mlp, input);
  CHECK(a == b);

  Tape tape(store);
  const Vec& taped = tape.value(mlp_forward(tape, mlp, tape.constant(input)));
  CHECK(taped == a);  // taped and plain paths share the same kernel
}

TEST_CASE("backward: linear case d(w*x)/dw = x") {
  ParamStore store;
  const int w = store.add("w", {1, 1});
  const int b = store.add("b", {1});
  store.at(w).data = {1.5};

  Tape tape(store);
  const NodeId loss = tape.affine(w, b, tape.constant({3.0}));
  tape.backward(loss);
  CHECK(store.at(w).grad == Vec{3.0});
  CHECK(store.at(b).grad == Vec{1.0});
  CHECK(store.grads_valid());
}

TEST_CASE("backward: quadratic chain rule d((w*x - y)^2)/dw = 2(wx-y)x") {
  ParamStore store;
  const int w = store.add("w", {1, 1});
  const int b = store.add("b", {1});
  store.at(w).data = {1.0};

  Tape tape(store);
  const NodeId loss = tape.squared_error(tape.affine(w, b, tape.constant({2.0})), 1.0);
  tape.backward(loss);
  CHECK(store.at(w).grad == Vec{4.0});
  CHECK(store.at(b).grad == Vec{2.0});
}

TEST_CASE("backward: replaces rather than accumulates across tapes") {
  ParamStore store;
  const int w = store.add("w", {1, 1});
  const int b = store.add("b", {1});
  store.at(w).data = {1.5};

  for (int round = 0; round < 2; ++round) {
    Tape tape(store);
    tape.backward(tape.affine(w, b, tape.constant({3.0})));
    CHECK(store.at(w).grad == Vec{3.0});  // not doubled on the second round
  }
}

TEST_CASE("backward: second backward without new forward is an error") {
  ParamStore store;
  const int w = store.add("w", {1, 1});
  const int b = store.add("b", {1});
  Tape tape(store);
  const NodeId loss = tape.affine(w, b, tape.constant({3.0}));
  tape.backward(loss);
  CHECK_THROWS_AS(tape.backward(loss), NumericError);
}

TEST_CASE("backward: non-scalar loss rejected") {
  ParamStore store;
  const int w = store.add("w", {2, 1});
  const int b = store.add("b", {2});
  Tape tape(store);
  const NodeId out = tape.affine(w, b, tape.constant({3.0}));
  CHECK_THROWS_AS(tape.backward(out), NumericError);
}

TEST_CASE("backward: random 2-layer MLP matches central finite differences") {
  ParamStore store;
  std::mt19937_64 rng(1234);
  MlpRef mlp = create_mlp(store, "net", MlpSpec{3, {6, 6}, 1}, rng);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Vec input = {u(rng), u(rng), u(rng)};

  const auto build = [&](Tape& tape) {
    return tape.squared_error(mlp_forward(tape, mlp, tape.constant(input)), 0.25);
  };
  const GradCheckResult res = gradcheck(build, store, 1e-5);
  CHECK(res.max_relative_error < 1e-4);
}

TEST_CASE("adam: zero gradient is a parameter no-op, step counter advances") {
  ParamStore store;
  const int w = store.add("w", {2});
  store.at(w).data = {0.4, -1.2};
  AdamState adam(store, {});

  store.zero_grad();
  store.set_grads_valid(true);
  adam.step(store);
  CHECK(store.at(w).data == Vec{0.4, -1.2});
  CHECK(adam.step_count() == 1);
  CHECK_FALSE(store.grads_valid());  // gradients cleared by the step
}

TEST_CASE("adam: missing gradients rejected") {
  ParamStore store;
  store.add("w", {1});
  AdamState adam(store, {});
  CHECK_THROWS_AS(adam.step(store), NumericError);
}

TEST_CASE("adam: first step with unit gradient moves by ~lr") {
  ParamStore store;
  const int w = store.add("w", {1});
  store.at(w).data = {0.3};
  AdamConfig cfg;
  AdamState adam(store, cfg);

  store.at(w).grad = {1.0};
  store.set_grads_valid(true);
  adam.step(store);

  // bias correction at t=1: m_hat = g, v_hat = g^2 -> step = lr/(1 + eps)
  const double expected = 0.3 - cfg.learning_rate * 1.0 / (1.0 + cfg.epsilon);
  CHECK(store.at(w).data[0] == expected);
}

TEST_CASE("adam: two identical gradients match the scalar reference") {
  ParamStore store;
  const int w = store.add("w", {1});
  store.at(w).data = {0.5};
  AdamConfig cfg;
  AdamState adam(store, cfg);

  const double g = -0.7;
  // independent scalar evaluation of the bias-corrected update
  double rm = 0.0, rv = 0.0, rp = 0.5;
  for (int t = 1; t <= 2; ++t) {
    rm = cfg.beta1 * rm + (1.0 - cfg.beta1) * g;
    rv = cfg.beta2 * rv + (1.0 - cfg.beta2) * g * g;
    const double m_hat = rm / (1.0 - std::pow(cfg.beta1, t));
    const double v_hat = rv / (1.0 - std::pow(cfg.beta2, t));
    rp -= cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon);
  }

  for (int t = 0; t < 2; ++t) {
    store.at(w).grad = {g};
    store.set_grads_valid(true);
    adam.step(store);
  }
  CHECK(store.at(w).data[0] == doctest::Approx(rp).epsilon(1e-15));
  CHECK(adam.step_count() == 2);
}

TEST_CASE("gradcheck: quadratic f(w) = w^2 at w = 3") {
  ParamStore store;
  const int w = store.add("w", {1, 1});
  const int b = store.add("b", {1});
  store.at(w).data = {3.0};
  const auto build = [&](Tape& tape) {
    return tape.squared_error(tape.affine(w, b, tape.constant({1.0})), 0.0);
  };
  const GradCheckResult res = gradcheck(build, store, 1e-5);
  CHECK(res.max_relative_error < 1e-7);
}

TEST_CASE("gradcheck: constant function has ~zero error") {
  ParamStore store;
  store.add("w", {2, 2});
  const auto build = [&](Tape& tape) { return tape.constant_scalar(5.0); };
  const GradCheckResult res = gradcheck(build, store, 1e-5);
  CHECK(res.max_relative_error < 1e-10);
}

TEST_CASE("gradcheck: non-finite values rejected") {
  ParamStore store;
  const int w = store.add("w", {1, 1});
  const int b = store.add("b", {1});
  store.at(w).data = {std::nan("")};
  const auto build = [&](Tape& tape) {
    return tape.squared_error(tape.affine(w, b, tape.constant({1.0})), 0.0);
  };
  CHECK_THROWS_AS(gradcheck(build, store, 1e-5), NumericError);
}

TEST_CASE("gradcheck: randomized op coverage, 100 trials at 1e-4") {
  // mixes affine/tanh/softplus/add/append/sum/stack/softmax/dot/mean nodes
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    ParamStore store;
    std::mt19937_64 init(rng());
    const Activation act = trial % 3 == 0 ? Activation::kSoftplus : Activation::kTanh;
    MlpRef f = create_mlp(store, "f", MlpSpec{3, {4}, 2, act, Activation::kIdentity}, init);
    MlpRef g = create_mlp(store, "g", MlpSpec{2, {3}, 1, act, Activation::kIdentity}, init);
    const Vec x1 = {u(rng), u(rng), u(rng)};
    const Vec x2 = {u(rng), u(rng), u(rng)};
    const double target = u(rng);

    const auto build = [&](Tape& tape) {
      const NodeId a = mlp_forward(tape, f, tape.constant(x1));
      const NodeId b = mlp_forward(tape, f, tape.append(tape.constant({x2[0], x2[1]}), {x2[2]}));
      const NodeId summed = tape.sum({a, b, tape.add(a, b)});
      const NodeId ga = mlp_forward(tape, g, a);
      const NodeId gb = mlp_forward(tape, g, b);
      const NodeId gs = mlp_forward(tape, g, summed);
      const NodeId weights = tape.softmax(tape.stack({ga, gb, gs}));
      const NodeId score = tape.dot(weights, tape.stack({gs, ga, gb}));
      return tape.mean({tape.squared_error(score, target),
                        tape.squared_error(tape.sum_entries(summed), -target)});
    };
    const GradCheckResult res = gradcheck(build, store, 1e-5);
    worst = std::max(worst, res.max_relative_error);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("param store: duplicate names and shape bookkeeping") {
  ParamStore store;
  const int w = store.add("w", {2, 3});
  CHECK_THROWS_AS(store.add("w", {1}), ConfigError);
  CHECK(store.at(w).size() == 6);
  CHECK(store.at(w).grad.size() == 6);  // gradient slot mirrors the shape
  CHECK(store.total_elements() == 6);
  CHECK(store.index_of("nope") == -1);
}

TEST_CASE("checkpoint: JSON round-trip is bit-exact") {
  ModelConfig mc;
  mc.vocab_labels = {"A", "B", "C"};
  mc.conv.hidden_dims = {5, 4};
  EnergyModel model = EnergyModel::create(mc, 77);
  // awkward values on top of the seeded init
  Tensor& w0 = model.params().at("msg.W0");
  w0.data[0] = 0.1 + 0.2;
  w0.data[1] = 1e-300;
  w0.data[2] = -0.0;
  w0.data[3] = 3.141592653589793;
  TargetNorm norm{12.3456789012345678, 0.000123456789};

  const auto path = std::filesystem::temp_directory_path() / "mofgcn_ckpt_test.json";
  save_checkpoint(path, model, norm);
  const Checkpoint cp = load_checkpoint(path);
  std::filesystem::remove(path);

  CHECK(cp.norm.mean == norm.mean);
  CHECK(cp.norm.std_dev == norm.std_dev);
  CHECK(cp.config.vocab_labels == mc.vocab_labels);
  REQUIRE(cp.model.params().count() == model.params().count());
  for (std::size_t i = 0; i < model.params().count(); ++i) {
    const Tensor& orig = model.params().at(static_cast<int>(i));
    const Tensor& back = cp.model.params().at(model.params().name_of(static_cast<int>(i)));
    CHECK(orig.shape == back.shape);
    CHECK(orig.data == back.data);
  }
}
