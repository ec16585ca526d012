#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <numeric>

#include "dsel/classifier.hpp"

#ifdef DSEL_HAVE_OPENMP
#include <omp.h>
#endif

using namespace dsel;

namespace {

std::vector<Example> random_examples(Rng& rng, std::size_t n, std::uint32_t features) {
  std::vector<Example> out;
  for (std::size_t i = 0; i < n; ++i) {
    Example e;
    for (std::uint32_t f = 1; f <= features; ++f)
      if (rng.unit() < 0.4) e.features.push_back(f);
    e.label = static_cast<int>(rng.below(2));
    out.push_back(std::move(e));
  }
  out[0].label = 1;
  out[1].label = 0;
  return out;
}

Model random_model(Rng& rng, std::size_t vocab) {
  auto m = zero_model(vocab);
  for (auto& w : m.weights) w = 4.0 * rng.unit() - 2.0;
  return m;
}

// Plain summation with std::log/std::exp, independent of the library kernels.
double naive_objective(const Model& m, const std::vector<Example>& xs, double c) {
  double reg = 0.0;
  for (std::size_t j = 1; j < m.weights.size(); ++j) reg += m.weights[j] * m.weights[j];
  double loss = 0.0;
  for (const auto& x : xs) {
    double z = m.weights[0];
    for (auto id : x.features) z += m.weights[id];
    const double y = x.label ? 1.0 : -1.0;
    loss += std::log(1.0 + std::exp(-y * z));
  }
  return 0.5 * reg + c * loss;
}

double weight_norm(const Model& m) {
  double s = 0.0;
  for (std::size_t j = 1; j < m.weights.size(); ++j) s += m.weights[j] * m.weights[j];
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("objective at zero weights") {
  auto m = zero_model(3);
  std::vector<Example> one{{{1}, 1}};
  CHECK(objective(m, one, 2.0) == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
  std::vector<Example> many(37, Example{{1, 2}, 0});
  CHECK(objective(m, many, 0.5) == doctest::Approx(37 * 0.5 * std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("objective matches a naive summation") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto xs = random_examples(rng, 40, 10);
    auto m = random_model(rng, 10);
    const double c = 0.1 + rng.unit();
    const double expect = naive_objective(m, xs, c);
    CHECK(std::abs(objective(m, xs, c) - expect) <= 1e-12 * std::abs(expect));
    CHECK(std::abs(reference::objective(m, xs, c) - expect) <= 1e-12 * std::abs(expect));
  }
}

TEST_CASE("gradient examples") {
  auto m = zero_model(2);
  std::vector<Example> one{{{1}, 1}};
  auto g = gradient(m, one, 3.0);
  CHECK(g[1] == doctest::Approx(-1.5));
  CHECK(g[2] == 0.0);
  CHECK(g[0] == doctest::Approx(-1.5));

  Rng rng(2);
  auto r = random_model(rng, 4);
  auto reg = gradient(r, std::vector<Example>{}, 1.0);
  CHECK(reg[0] == 0.0);
  for (std::size_t j = 1; j < reg.size(); ++j) CHECK(reg[j] == r.weights[j]);
}

TEST_CASE("gradient matches central differences") {
  Rng rng(5);
  const double h = 1e-5;
  for (int trial = 0; trial < 20; ++trial) {
    auto xs = random_examples(rng, 20, 10);
    auto m = random_model(rng, 10);
    const double c = 0.5 + rng.unit();
    auto g = gradient(m, xs, c);
    double worst = 0.0;
    for (std::size_t j = 0; j < m.weights.size(); ++j) {
      auto plus = m, minus = m;
      plus.weights[j] += h;
      minus.weights[j] -= h;
      const double fd = (naive_objective(plus, xs, c) - naive_objective(minus, xs, c)) / (2 * h);
      worst = std::max(worst, std::abs(fd - g[j]) / std::max(1.0, std::abs(fd)));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("parallel kernels equal the serial reference") {
  Rng rng(8);
  auto xs = random_examples(rng, 3000, 50);
  auto m = random_model(rng, 50);
  CHECK(objective(m, xs, 0.7) == doctest::Approx(reference::objective(m, xs, 0.7)).epsilon(1e-12));
  auto g = gradient(m, xs, 0.7);
  auto r = reference::gradient(m, xs, 0.7);
  REQUIRE(g.size() == r.size());
  for (std::size_t j = 0; j < g.size(); ++j) CHECK(g[j] == doctest::Approx(r[j]).epsilon(1e-12));
}

#ifdef DSEL_HAVE_OPENMP
TEST_CASE("kernel results do not depend on the thread count") {
  Rng rng(10);
  auto xs = random_examples(rng, 5000, 40);
  auto m = random_model(rng, 40);
  const int before = omp_get_max_threads();
  omp_set_num_threads(1);
  const double f1 = objective(m, xs, 0.3);
  const auto g1 = gradient(m, xs, 0.3);
  omp_set_num_threads(7);
  const double f7 = objective(m, xs, 0.3);
  const auto g7 = gradient(m, xs, 0.3);
  omp_set_num_threads(before);
  CHECK(f1 == f7);
  CHECK(g1 == g7);
}
#endif

TEST_CASE("learning-rate schedule") {
  Hyperparams h;
  h.eta0 = 0.1;
  h.decay = 1.0;
  CHECK(step_size(h, 0) == 0.1);
  CHECK(step_size(h, 10) == doctest::Approx(0.05));
  h.decay = 0.0;
  CHECK(step_size(h, 1000) == 0.1);
}

TEST_CASE("sigmoid and prediction") {
  CHECK(sigmoid(0.0) == 0.5);
  const double p = sigmoid(20.0);
  CHECK(p < 1.0);
  CHECK(1.0 - p == doctest::Approx(2.06115362e-9).epsilon(1e-6));
  CHECK(std::abs(1.0 - p) < 1e-8);
  for (double z : {-1e6, -800.0, -40.0, 40.0, 800.0, 1e6}) {
    CHECK(sigmoid(z) > 0.0);
    CHECK(sigmoid(z) < 1.0);
    CHECK(std::isfinite(log1p_exp_neg(z)));
  }
  CHECK(log1p_exp_neg(-1000.0) == doctest::Approx(1000.0));
  CHECK(log1p_exp_neg(0.0) == doctest::Approx(std::log(2.0)));

  auto m = zero_model(3);
  SparseVector any{1, 3};
  CHECK(predict_proba(m, any) == 0.5);
  m.weights = {0.3, 5.0, 5.0, 5.0};
  SparseVector oov{7, 9};
  CHECK(predict_proba(m, oov) == sigmoid(0.3));
  SparseVector mixed{2, 9};
  CHECK(margin(m, mixed) == doctest::Approx(5.3));
}

TEST_CASE("bias shift preserves ranking") {
  Rng rng(4);
  auto m = random_model(rng, 6);
  std::vector<SparseVector> xs{{1, 2}, {3}, {4, 5, 6}, {2, 6}};
  auto shifted = m;
  shifted.weights[0] += 1.7;
  for (std::size_t i = 0; i < xs.size(); ++i)
    for (std::size_t j = 0; j < xs.size(); ++j)
      if (predict_proba(m, xs[i]) < predict_proba(m, xs[j]))
        CHECK(predict_proba(shifted, xs[i]) < predict_proba(shifted, xs[j]));
}

TEST_CASE("training orients weights toward their class") {
  std::vector<Example> xs{{{1}, 1}, {{2}, 0}};
  for (bool full : {false, true}) {
    Hyperparams h;
    h.full_batch = full;
    auto r = train(xs, h, 2);
    CHECK(r.model.weights[1] > 0.0);
    CHECK(r.model.weights[2] < 0.0);
    CHECK(r.log.objective.front() == doctest::Approx(2 * std::log(2.0)));
    CHECK(r.log.objective.back() < r.log.objective.front());
  }
}

TEST_CASE("stronger regularization shrinks the weights") {
  Rng rng(9);
  auto xs = random_examples(rng, 60, 8);
  double previous = INFINITY;
  for (double c : {1.0, 0.1, 0.01}) {
    Hyperparams h;
    h.c = c;
    h.full_batch = true;
    h.max_epochs = 2000;
    h.tolerance = 1e-12;
    const double norm = weight_norm(train(xs, h, 8).model);
    CHECK(norm < previous);
    previous = norm;
  }
}

TEST_CASE("full-batch objective never increases") {
  Rng rng(12);
  auto xs = random_examples(rng, 80, 10);
  Hyperparams h;
  h.full_batch = true;
  h.c = 5.0;
  h.max_epochs = 300;
  auto log = train(xs, h, 10).log;
  for (std::size_t t = 1; t < log.objective.size(); ++t) CHECK(log.objective[t] <= log.objective[t - 1]);
}

TEST_CASE("training is deterministic per seed") {
  Rng rng(14);
  auto xs = random_examples(rng, 50, 10);
  Hyperparams h;
  h.seed = 3;
  CHECK(format_model(train(xs, h, 10).model) == format_model(train(xs, h, 10).model));
}

TEST_CASE("training rejects degenerate input") {
  std::vector<Example> ones{{{1}, 1}, {{2}, 1}};
  try {
    train(ones, Hyperparams{}, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(std::string(e.what()).find("degenerate labels") != std::string::npos);
  }
  Hyperparams bad;
  bad.c = 0.0;
  CHECK_THROWS_AS(validate(bad), Error);
  bad = Hyperparams{};
  bad.eta0 = -1.0;
  CHECK_THROWS_AS(validate(bad), Error);
}

TEST_CASE("huge step sizes are reported as divergence") {
  Rng rng(21);
  auto xs = random_examples(rng, 200, 10);
  Hyperparams h;
  h.eta0 = 150.0;
  h.decay = 0.0;
  h.c = 100.0;
  h.max_epochs = 100;
  try {
    train(xs, h, 10);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::data);
    CHECK(std::string(e.what()).find("diverged") != std::string::npos);
  }
  h.eta0 = 1e6;
  try {
    train(xs, h, 10);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
  }
}

TEST_CASE("folds are stratified") {
  std::vector<Example> xs{{{1}, 1}, {{1}, 0}, {{1}, 1}, {{1}, 0}};
  auto folds = assign_folds(xs, 2, 1);
  for (std::size_t f = 0; f < 2; ++f) {
    int pos = 0, neg = 0;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if (folds[i] == f) (xs[i].label ? pos : neg)++;
    CHECK(pos == 1);
    CHECK(neg == 1);
  }
}

TEST_CASE("binary F1") {
  CHECK(binary_f1(0, 0, 0) == 0.0);
  CHECK(binary_f1(3, 1, 1) == doctest::Approx(0.75));
  CHECK(binary_f1(2, 0, 0) == 1.0);
}

TEST_CASE("cross-validation selection") {
  Rng rng(3);
  std::vector<Example> xs;
  for (int i = 0; i < 40; ++i) xs.push_back({{static_cast<std::uint32_t>(1 + i % 2)}, i % 2 == 0});

  Hyperparams only;
  only.c = 0.3;
  std::vector<Hyperparams> one{only};
  auto r1 = cross_validate(xs, one, 2, 5, 1);
  CHECK(r1.best == only);
  CHECK(r1.table.size() == 1);
  CHECK(r1.table[0].mean_f1 == doctest::Approx(1.0));

  // a tiny, non-decaying step cannot move the weights far enough in one epoch
  Hyperparams weak, strong;
  weak.c = 0.01;
  weak.eta0 = 1e-6;
  weak.decay = 0.0;
  weak.max_epochs = 1;
  strong.c = 1.0;
  std::vector<Example> skewed;
  for (int i = 0; i < 40; ++i) skewed.push_back({{i % 4 == 0 ? 1u : 2u}, i % 4 == 0});
  std::vector<Hyperparams> two{weak, strong};
  auto r2 = cross_validate(skewed, two, 2, 4, 1);
  CHECK(r2.table[1].mean_f1 > r2.table[0].mean_f1);
  CHECK(r2.best == strong);
  CHECK(format_cv_table(r2).starts_with("c,eta0,decay,mean_f1,flagged_folds\n"));
}

TEST_CASE("single-class folds are flagged") {
  std::vector<Example> xs{{{1}, 1}, {{1}, 1}, {{1}, 1}, {{2}, 0}};
  std::vector<Hyperparams> grid{Hyperparams{}};
  auto r = cross_validate(xs, grid, 2, 2, 1);
  CHECK(r.table[0].flagged_folds >= 1);
}

TEST_CASE("model files") {
  auto zero = zero_model(0);
  const auto text = format_model(zero);
  CHECK(text.starts_with("dsel-model 1\n"));
  CHECK(text.ends_with("\n0 0\n"));
  CHECK(parse_model(text) == zero);

  Rng rng(6);
  auto m = random_model(rng, 30);
  for (std::size_t j = 1; j < m.weights.size(); j += 3) m.weights[j] = 0.0;
  m.config = make_feature_config(FeatureFamily::ws_pos, 2);
  m.pairing = Pairing::plain;
  m.vocab_hash = "00ff00ff00ff00ff";
  auto path = (std::filesystem::temp_directory_path() / "dsel_test_model.txt").string();
  save_model(m, path);
  auto back = load_model(path);
  CHECK(back == m);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    SparseVector x;
    for (std::uint32_t f = 1; f <= 32; ++f)
      if (rng.unit() < 0.3) x.push_back(f);
    worst = std::max(worst, std::abs(predict_proba(m, x) - predict_proba(back, x)));
  }
  CHECK(worst < 1e-12);
  std::filesystem::remove(path);

  auto full = format_model(m);
  auto cut = full.substr(0, full.rfind('\n', full.size() - 2) + 1);
  try {
    parse_model(cut);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_model("not a model\n"), Error);
}

TEST_CASE("models are tied to their vocabulary") {
  Vocabulary v;
  v.add("a");
  v.add("b");
  auto m = zero_model(2);
  m.vocab_hash = v.hash();
  CHECK_NOTHROW(check_compatible(m, v));
  v.add("c");
  CHECK_THROWS_AS(check_compatible(m, v), Error);
}
