#include <doctest.h>

#include <cmath>

#include "clgl/stats.hpp"
#include "clgl/tape.hpp"
#include "testutil.hpp"

using namespace clgl;

TEST_CASE("forward: identity record returns its input") {
  Tape tape;
  const Tensor x = Tensor::matrix(2, 2, {1, 2, 3, 4});
  const Tape::NodeId id = tape.input(x);
  CHECK(tape.value(id).data == std::vector<double>{1, 2, 3, 4});
}

TEST_CASE("forward: sum(x o x)") {
  Tape tape;
  Parameter x("x", Tensor::vector({1, 2}));
  const Tape::NodeId xi = tape.param(x);
  const Tape::NodeId out = tape.sum(tape.mul(xi, xi));
  CHECK(tape.value(out).data[0] == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("forward: mean over axis 0") {
  Tape tape;
  const Tape::NodeId m = tape.input(Tensor::matrix(2, 2, {2, 4, 6, 8}));
  const Tensor& out = tape.value(tape.mean_rows(m));
  CHECK(out.shape == std::vector<std::size_t>{1, 2});
  CHECK(out.data[0] == doctest::Approx(4.0));
  CHECK(out.data[1] == doctest::Approx(6.0));
}

TEST_CASE("forward: shape mismatch is rejected with the operation index") {
  Tape tape;
  const Tape::NodeId a = tape.input(Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}));
  const Tape::NodeId b = tape.input(Tensor::matrix(2, 3, {1, 2, 3, 4, 5, 6}));
  CHECK_THROWS_WITH_AS(tape.matmul(a, b), doctest::Contains("node 2"), std::invalid_argument);
}

TEST_CASE("backward: d/dx sum(x o x) = 2x") {
  Tape tape;
  Parameter x("x", Tensor::vector({1, 2}));
  const Tape::NodeId xi = tape.param(x);
  tape.backward(tape.sum(tape.mul(xi, xi)));
  CHECK(x.grad.data[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(x.grad.data[1] == doctest::Approx(4.0).epsilon(1e-15));
}

TEST_CASE("backward: gradient of a constant path is zero") {
  Tape tape;
  Parameter x("x", Tensor::vector({3, 4}));
  const Tape::NodeId xi = tape.param(x);
  const Tape::NodeId c = tape.input(Tensor::vector({7, 7}));
  // Root depends only on the constant; x participates in no op.
  tape.backward(tape.sum(c));
  CHECK(x.grad.data == std::vector<double>{0, 0});
  CHECK(tape.grad_of(xi).data == std::vector<double>{0, 0});
}

TEST_CASE("backward before forward is a usage error") {
  Tape tape;
  CHECK_THROWS_AS(tape.backward(0), std::logic_error);
  Tape tape2;
  const Tape::NodeId a = tape2.input(Tensor::vector({1}));
  CHECK_THROWS_AS(tape2.grad_of(a), std::logic_error);
}

TEST_CASE("backward: softmax cross-entropy matches central finite differences") {
  // d/dW of CE(softmax(x W + b), y) at a seeded random point.
  Rng rng(42);
  Tensor w = Tensor::zeros({3, 4});
  for (double& v : w.data) v = rng.next_range(-1.0, 1.0);
  Tensor x = Tensor::zeros({1, 3});
  for (double& v : x.data) v = rng.next_range(-1.0, 1.0);
  Tensor b = Tensor::zeros({4});
  for (double& v : b.data) v = rng.next_range(-0.5, 0.5);
  const std::size_t label = 2;

  auto eval = [&](const Tensor& wv) {
    Tape tape;
    Parameter wp("w", wv);
    Tape::NodeId logits = tape.add_rowvec(tape.matmul(tape.input(x), tape.param(wp)), tape.input(b));
    return tape.value(tape.cross_entropy(logits, label)).data[0];
  };

  Tape tape;
  Parameter wp("w", w);
  Tape::NodeId logits = tape.add_rowvec(tape.matmul(tape.input(x), tape.param(wp)), tape.input(b));
  tape.backward(tape.cross_entropy(logits, label));

  const double h = 1e-5;
  for (std::size_t i = 0; i < w.size(); ++i) {
    Tensor wplus = w, wminus = w;
    wplus.data[i] += h;
    wminus.data[i] -= h;
    const double numeric = (eval(wplus) - eval(wminus)) / (2 * h);
    const double analytic = wp.grad.data[i];
    if (std::abs(analytic) <= 1e-6 && std::abs(numeric) <= 1e-6) continue;
    const double rel = std::abs(analytic - numeric) / std::max(std::abs(analytic), std::abs(numeric));
    CHECK(rel < 1e-4);
  }
}

TEST_CASE("kl_divergence: examples") {
  CHECK(kl_divergence({0.5, 0.5}, {0.5, 0.5}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(kl_divergence({1.0, 0.0}, {0.5, 0.5}) == doctest::Approx(0.6931471805599453).epsilon(1e-12));
  CHECK(kl_divergence({0.75, 0.25}, {0.5, 0.5}) == doctest::Approx(0.13081203594113698).epsilon(1e-12));
}

TEST_CASE("kl_divergence: rejects bad input") {
  CHECK_THROWS_AS(kl_divergence({0.5, 0.5}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(kl_divergence({0.5, 0.4}, {0.5, 0.5}), std::invalid_argument);
  CHECK_THROWS_AS(kl_divergence({-0.5, 1.5}, {0.5, 0.5}), std::invalid_argument);
}

TEST_CASE("kl_divergence: nonnegative, zero iff equal") {
  Rng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + rng.next_below(5);
    std::vector<double> p(n), q(n);
    double sp = 0, sq = 0;
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = rng.next_range(0.01, 1.0);
      q[i] = rng.next_range(0.01, 1.0);
      sp += p[i];
      sq += q[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
      p[i] /= sp;
      q[i] /= sq;
    }
    CHECK(kl_divergence(p, q) >= 0.0);
    CHECK(kl_divergence(p, p) == doctest::Approx(0.0).epsilon(1e-12));
    bool equal = true;
    for (std::size_t i = 0; i < n; ++i) equal = equal && std::abs(p[i] - q[i]) <= 1e-12;
    if (!equal) CHECK(kl_divergence(p, q) > 0.0);
  }
}

TEST_CASE("cross_entropy: examples") {
  CHECK(cross_entropy({100.0, 0.0, 0.0}, 0) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK(cross_entropy({1.0, 1.0, 1.0}, 1) == doctest::Approx(1.0986122886681098).epsilon(1e-12));
  CHECK(cross_entropy({0.0, std::log(3.0)}, 0) == doctest::Approx(1.3862943611198906).epsilon(1e-12));
  CHECK_THROWS_AS(cross_entropy({0.0, 1.0}, 2), std::invalid_argument);
}

TEST_CASE("softmax_normalize: symmetry, two-term closed form, shift invariance") {
  const auto u = softmax_normalize({0.0, 0.0, 0.0});
  for (double v : u) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-15));

  for (double c : {-3.0, 0.0, 11.5}) {
    const auto two = softmax_normalize({c, c + std::log(2.0)});
    CHECK(two[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(two[1] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  }

  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(3 + rng.next_below(3));
    for (double& x : v) x = rng.next_range(-4.0, 4.0);
    auto shifted = v;
    for (double& x : shifted) x += 5.0;
    const auto a = softmax_normalize(v);
    const auto b = softmax_normalize(shifted);
    double total = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
      total += a[i];
    }
    CHECK(std::abs(total - 1.0) <= 1e-9);
  }
}

TEST_CASE("cosine_similarity: examples") {
  CHECK(cosine_similarity({2.0, 1.0, -3.0}, {2.0, 1.0, -3.0}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cosine_similarity({1.0, 0.0}, {0.0, 1.0}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(cosine_similarity({1.0, 1.0}, {1.0, 0.0}) == doctest::Approx(0.7071067811865475).epsilon(1e-12));
  CHECK_THROWS_AS(cosine_similarity({0.0, 0.0}, {1.0, 0.0}), std::invalid_argument);
}

TEST_CASE("tape KL matches the scalar KL and is differentiable") {
  const std::vector<double> p{0.0125, 0.0125, 0.9625, 0.0125};
  Parameter q("q", Tensor::vector({0.25, 0.25, 0.25, 0.25}));
  Tape tape;
  const Tape::NodeId kl = tape.kl_to(Tensor::vector(p), tape.param(q));
  CHECK(tape.value(kl).data[0] == doctest::Approx(kl_divergence(p, q.value.data)).epsilon(1e-12));
  tape.backward(kl);
  // d KL / dq_k = 1/sum - p_k / q_k at unclamped entries (sum = 1 here).
  for (std::size_t k = 0; k < 4; ++k)
    CHECK(q.grad.data[k] == doctest::Approx(1.0 - p[k] / 0.25).epsilon(1e-9));
}

TEST_CASE("gradients: 100 random composed records vs finite differences") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto rec = testutil::make_random_record(seed ^ 0xABCD1234);
    const auto res = testutil::finite_difference_check(rec);
    INFO("seed ", seed, " detail ", res.detail);
    CHECK(res.pass);
  }
}

TEST_CASE("bitwise determinism: rebuilding a record reproduces outputs exactly") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto rec = testutil::make_random_record(seed);
    const double a = testutil::eval_record(rec, rec.init_values);
    const double b = testutil::eval_record(rec, rec.init_values);
    CHECK(a == b);  // bit-identical replay
  }
}

TEST_CASE("all tape outputs stay finite on random records") {
  for (std::uint64_t seed = 200; seed < 230; ++seed) {
    const auto rec = testutil::make_random_record(seed);
    const double v = testutil::eval_record(rec, rec.init_values);
    CHECK(std::isfinite(v));
  }
}
