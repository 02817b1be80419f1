#include <doctest.h>

#include <cmath>
#include <vector>

#include "sglayout/gradcheck.hpp"
#include "sglayout/optim.hpp"
#include "sglayout/rng.hpp"
#include "sglayout/tensor.hpp"

using namespace sglayout;
using namespace sglayout::ad;

namespace {

// Straight-line Adam update for one scalar, written directly from the update
// formulas so the optimizer is checked against an independent computation.
struct AdamOracle {
  double m = 0.0, v = 0.0;
  int t = 0;

  double step(double param, double g, double lr, double b1 = 0.9, double b2 = 0.999,
              double eps = 1e-8) {
    ++t;
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g * g;
    const double m_hat = m / (1.0 - std::pow(b1, t));
    const double v_hat = v / (1.0 - std::pow(b2, t));
    return param - lr * m_hat / (std::sqrt(v_hat) + eps);
  }
};

}  // namespace

TEST_SUITE("ndgrad") {

TEST_CASE("matmul of 1x1 matrices multiplies the scalars") {
  const Tensor a = Tensor::from_data({1, 1}, {2.0});
  const Tensor b = Tensor::from_data({1, 1}, {3.0});
  const Tensor c = matmul(a, b);
  CHECK(c.shape() == std::vector<int>{1, 1});
  CHECK(c.data()[0] == 6.0);
}

TEST_CASE("matmul matches a hand-computed 2x3 * 3x2 product") {
  const Tensor a = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor b = Tensor::from_data({3, 2}, {7, 8, 9, 10, 11, 12});
  // Row-by-column by hand: [1*7+2*9+3*11, ...] = [58, 64, 139, 154].
  CHECK(matmul(a, b).data() == std::vector<double>{58, 64, 139, 154});
}

TEST_CASE("backward of x*x at 3 gives 6") {
  Tensor x = Tensor::from_data({1}, {3.0}, /*requires_grad=*/true);
  Tensor y = mul(x, x);
  CHECK(y.value() == 9.0);
  y.backward();
  CHECK(x.grad()[0] == 6.0);
}

TEST_CASE("L2 norm value and gradient match hand differentiation") {
  // Oracle first: ||x|| = sqrt(sum x_i^2), d||x||/dx_i = x_i / ||x||.
  const std::vector<double> point = {0.0, 0.2};
  const double norm = std::sqrt(point[0] * point[0] + point[1] * point[1]);
  const std::vector<double> dnorm = {point[0] / norm, point[1] / norm};
  REQUIRE(norm == 0.2);
  REQUIRE(dnorm[1] == 1.0);

  Tensor x = Tensor::from_data({2}, point, /*requires_grad=*/true);
  Tensor n = l2_norm(x, 0);
  CHECK(n.value() == norm);
  n.backward();
  CHECK(x.grad()[0] == dnorm[0]);
  CHECK(x.grad()[1] == dnorm[1]);
}

TEST_CASE("elementwise forward values are exact") {
  const Tensor a = Tensor::from_data({4}, {1.0, -2.0, 3.0, 0.0});
  const Tensor b = Tensor::from_data({4}, {2.0, 4.0, -1.0, 5.0});
  CHECK(add(a, b).data() == std::vector<double>{3.0, 2.0, 2.0, 5.0});
  CHECK(sub(a, b).data() == std::vector<double>{-1.0, -6.0, 4.0, -5.0});
  CHECK(mul(a, b).data() == std::vector<double>{2.0, -8.0, -3.0, 0.0});
  CHECK(div(a, b).data() == std::vector<double>{0.5, -0.5, -3.0, 0.0});
  CHECK(relu(a).data() == std::vector<double>{1.0, 0.0, 3.0, 0.0});
  CHECK(abs(a).data() == std::vector<double>{1.0, 2.0, 3.0, 0.0});
  CHECK(add_scalar(a, 1.5).data() == std::vector<double>{2.5, -0.5, 4.5, 1.5});
  CHECK(mul_scalar(a, -2.0).data() == std::vector<double>{-2.0, 4.0, -6.0, 0.0});
  CHECK(sum(a).value() == 2.0);
  CHECK(mean(a, 0).value() == 0.5);
}

TEST_CASE("row broadcast adds a row vector to every row") {
  const Tensor m = Tensor::from_data({2, 3}, {1, 2, 3, 4, 5, 6});
  const Tensor row = Tensor::from_data({3}, {10, 20, 30});
  CHECK(add(m, row).data() == std::vector<double>{11, 22, 33, 14, 25, 36});
  CHECK(mul(m, row).data() == std::vector<double>{10, 40, 90, 40, 100, 180});
}

TEST_CASE("shape mismatch errors name both shapes") {
  const Tensor a = Tensor::zeros({2, 3});
  const Tensor b = Tensor::zeros({3, 3});
  CHECK_THROWS_WITH_AS(add(a, b), doctest::Contains("{2,3}"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(add(a, b), doctest::Contains("{3,3}"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(matmul(a, Tensor::zeros({2, 2})), doctest::Contains("{2,3}"),
                       std::invalid_argument);
}

TEST_CASE("backward requires a scalar and names the offending shape") {
  Tensor x = Tensor::from_data({2}, {1.0, 2.0}, true);
  CHECK_THROWS_WITH_AS(mul(x, x).backward(), doctest::Contains("{2}"), std::invalid_argument);
}

TEST_CASE("gradients accumulate across shared subexpressions") {
  // Diamond: y = sum(x*x) + sum(x*c); both branches feed the same x.
  Tensor x = Tensor::from_data({3}, {0.7, -1.1, 2.0}, true);
  const Tensor c = Tensor::from_data({3}, {1.5, 0.5, -2.5});
  Tensor y = add(sum(mul(x, x)), sum(mul(x, c)));
  y.backward();
  for (int i = 0; i < 3; ++i) {
    const double expected = 2.0 * x.data()[i] + c.data()[i];  // d/dx (x^2 + c x)
    CHECK(x.grad()[i] == doctest::Approx(expected).epsilon(1e-12));
  }

  // Same structure against finite differences.
  Tensor probe = Tensor::from_data({3}, {0.7, -1.1, 2.0}, true);
  const double err = grad_check(
      [&](const Tensor& t) { return add(sum(mul(t, t)), sum(mul(t, c))); }, probe);
  CHECK(err < 1e-6);
}

TEST_CASE("grad_check on sum of squares is tight") {
  Rng rng(41);
  std::vector<double> vals(6);
  for (double& v : vals) v = rng.uniform(-1.0, 1.0);
  Tensor x = Tensor::from_data({6}, vals, true);
  CHECK(grad_check([](const Tensor& t) { return sum(mul(t, t)); }, x) < 1e-6);
}

TEST_CASE("grad_check of a constant function reports zero error") {
  Tensor x = Tensor::from_data({3}, {0.3, 0.6, 0.9}, true);
  CHECK(grad_check([](const Tensor&) { return Tensor::scalar(4.0); }, x) == 0.0);
}

TEST_CASE("grad_check rejects non-scalar functions") {
  Tensor x = Tensor::from_data({2}, {1.0, 2.0}, true);
  CHECK_THROWS_WITH_AS(grad_check([](const Tensor& t) { return mul(t, t); }, x),
                       doctest::Contains("scalar"), std::invalid_argument);
}

TEST_CASE("every core op passes grad checks at 100 random points") {
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    for (const CheckResult& r : gradcheck_core_ops(seed)) {
      INFO("op ", r.name, " seed ", seed);
      CHECK(r.max_rel_error < 1e-4);
      worst = std::max(worst, r.max_rel_error);
    }
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("forward evaluation is deterministic bit for bit") {
  auto run = [](std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> vals(12);
    for (double& v : vals) v = rng.normal();
    Tensor a = Tensor::from_data({3, 4}, vals);
    Tensor b = Tensor::from_data({4, 3}, std::vector<double>(vals.rbegin(), vals.rend()));
    return sigmoid(matmul(a, b)).data();
  };
  CHECK(run(7) == run(7));
  CHECK(run(7) != run(8));
}

TEST_CASE("no-grad guard suppresses graph recording") {
  Tensor x = Tensor::from_data({2}, {1.0, 2.0}, true);
  {
    NoGradGuard guard;
    CHECK_FALSE(grad_enabled());
    Tensor y = sum(mul(x, x));
    CHECK(y.value() == 5.0);
    CHECK_FALSE(y.requires_grad());
  }
  CHECK(grad_enabled());
}

TEST_CASE("adam first step matches the hand-evaluated update") {
  // param 1.0, grad 0.5, lr 1e-3: bias correction makes m_hat = g and
  // sqrt(v_hat) = |g|, so the first step moves by lr * g / (|g| + eps).
  AdamOracle oracle;
  const double expected = oracle.step(1.0, 0.5, 1e-3);
  REQUIRE(expected == doctest::Approx(0.999).epsilon(1e-6));

  Tensor p = Tensor::from_data({1}, {1.0}, true);
  NamedParams params = {{"p", p}};
  AdamState state = make_adam_state(params, 1e-3);
  p.zero_grad();
  p.grad()[0] = 0.5;
  adam_step(params, state);
  CHECK(p.data()[0] == doctest::Approx(expected).epsilon(1e-12));
  CHECK(state.step_count == 1);
}

TEST_CASE("adam follows the oracle over a varying gradient sequence") {
  AdamOracle oracle;
  Tensor p = Tensor::from_data({1}, {0.25}, true);
  NamedParams params = {{"p", p}};
  AdamState state = make_adam_state(params, 0.01);
  double expected = 0.25;
  Rng rng(3);
  for (int i = 0; i < 20; ++i) {
    const double g = rng.normal();
    expected = oracle.step(expected, g, 0.01);
    p.zero_grad();
    p.grad()[0] = g;
    adam_step(params, state);
    CHECK(p.data()[0] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("adam with zero gradient leaves parameters unchanged") {
  Tensor p = Tensor::from_data({3}, {0.1, 0.2, 0.3}, true);
  NamedParams params = {{"p", p}};
  AdamState state = make_adam_state(params);
  p.zero_grad();
  adam_step(params, state);
  CHECK(p.data() == std::vector<double>{0.1, 0.2, 0.3});
}

TEST_CASE("adam is stateful: momentum persists across steps") {
  Tensor p = Tensor::from_data({1}, {1.0}, true);
  NamedParams params = {{"p", p}};
  AdamState state = make_adam_state(params, 1e-3);

  p.zero_grad();
  p.grad()[0] = 0.5;
  adam_step(params, state);
  const double after_one = p.data()[0];

  // Second call with an identical gradient moves the parameter again.
  p.zero_grad();
  p.grad()[0] = 0.5;
  adam_step(params, state);
  const double after_two = p.data()[0];
  CHECK(after_two != after_one);
  CHECK(state.step_count == 2);

  // Even a zero gradient now moves the parameter: the first moment is nonzero.
  p.zero_grad();
  adam_step(params, state);
  CHECK(p.data()[0] != after_two);
}

TEST_CASE("adam clears gradients after the update") {
  Tensor p = Tensor::from_data({1}, {1.0}, true);
  NamedParams params = {{"p", p}};
  AdamState state = make_adam_state(params);
  p.zero_grad();
  p.grad()[0] = 1.0;
  adam_step(params, state);
  CHECK(p.grad()[0] == 0.0);
}

TEST_CASE("adam names a parameter that is missing its gradient") {
  Tensor p = Tensor::from_data({1}, {1.0}, true);
  Tensor q = Tensor::from_data({1}, {2.0}, true);
  NamedParams params = {{"weights.p", p}, {"weights.q", q}};
  AdamState state = make_adam_state(params);
  p.zero_grad();  // q left without a buffer
  CHECK_THROWS_WITH_AS(adam_step(params, state), doctest::Contains("weights.q"),
                       std::runtime_error);
}

TEST_CASE("adam rejects invalid hyperparameters") {
  Tensor p = Tensor::from_data({1}, {1.0}, true);
  NamedParams params = {{"p", p}};
  CHECK_THROWS_AS(make_adam_state(params, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_adam_state(params, 1e-3, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(make_adam_state(params, 1e-3, 0.9, -0.1), std::invalid_argument);
}

}  // TEST_SUITE
