#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include "abdiv/kernel.hpp"
#include "abdiv/svm.hpp"

using namespace abdiv;

namespace {

LabeledDataset toy(std::size_t pos, std::size_t neg) {
  LabeledDataset d;
  for (std::size_t i = 0; i < pos + neg; ++i) {
    const double v = 0.1 + 0.01 * static_cast<double>(i);
    d.densities.push_back(DiscreteDensity::with_unit_weights({v, 1.0 - v}));
    d.labels.push_back(i < pos ? 1 : -1);
  }
  return d;
}

Eigen::MatrixXd random_psd(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_int_distribution<int> rank(1, static_cast<int>(n));
  const Eigen::Index r = rank(rng);
  Eigen::MatrixXd a(n, r);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) a(i, j) = g(rng);
  }
  return a * a.transpose();
}

std::vector<int> random_labels(std::size_t n, std::mt19937_64& rng) {
  std::vector<int> y(n);
  std::bernoulli_distribution coin(0.5);
  for (int& v : y) v = coin(rng) ? 1 : -1;
  y[0] = 1;
  y[1] = -1;
  return y;
}

// Perceptron on the raw atom values: terminates iff the points are
// linearly separable with a bias, given enough epochs.
bool linearly_separable(const LabeledDataset& d) {
  const std::size_t dim = d.densities[0].size();
  std::vector<double> w(dim + 1, 0.0);
  for (int epoch = 0; epoch < 10000; ++epoch) {
    bool clean = true;
    for (std::size_t i = 0; i < d.size(); ++i) {
      double s = w[dim];
      for (std::size_t k = 0; k < dim; ++k) s += w[k] * d.densities[i].value(k);
      if (d.labels[i] * s <= 0) {
        clean = false;
        for (std::size_t k = 0; k < dim; ++k) w[k] += d.labels[i] * d.densities[i].value(k);
        w[dim] += d.labels[i];
      }
    }
    if (clean) return true;
  }
  return false;
}

SvmModel fixed_model(std::vector<double> alpha, std::vector<int> labels, double bias) {
  SvmModel m;
  m.dual_coeffs = Eigen::Map<Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(alpha.size()));
  m.train_labels = std::move(labels);
  m.bias = bias;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > 0) m.support_indices.push_back(i);
  }
  return m;
}

}  // namespace

TEST_CASE("train_test_split") {
  const LabeledDataset d = toy(5, 5);
  const Split s = train_test_split(d, 0.8, 1);
  CHECK(s.train.size() == 8);
  CHECK(s.test.size() == 2);
  CHECK(std::count(s.train.labels.begin(), s.train.labels.end(), 1) == 4);
  CHECK(std::count(s.test.labels.begin(), s.test.labels.end(), -1) == 1);
  std::set<std::size_t> all(s.train_indices.begin(), s.train_indices.end());
  all.insert(s.test_indices.begin(), s.test_indices.end());
  CHECK(all.size() == 10);

  const Split again = train_test_split(d, 0.8, 1);
  CHECK(again.train_indices == s.train_indices);
  CHECK(again.test_indices == s.test_indices);
  const Split other = train_test_split(d, 0.8, 2);
  CHECK(other.train.size() == 8);

  const Split half = train_test_split(toy(2, 2), 0.5, 4);
  CHECK(half.train.size() == 2);
  CHECK(std::count(half.train.labels.begin(), half.train.labels.end(), 1) == 1);
  CHECK(std::count(half.test.labels.begin(), half.test.labels.end(), 1) == 1);

  CHECK_THROWS_AS(train_test_split(toy(1, 5), 0.3, 1), SvmError);
  CHECK_THROWS_AS(train_test_split(d, 1.0, 1), SvmError);
}

TEST_CASE("condition_gram") {
  std::mt19937_64 rng(1);
  const Eigen::MatrixXd psd = random_psd(6, rng) + Eigen::MatrixXd::Identity(6, 6);
  CHECK((condition_gram(psd, Conditioning::Clip) - psd).cwiseAbs().maxCoeff() < 1e-10);
  CHECK(condition_gram(psd, Conditioning::None) == psd);
  Eigen::Matrix2d m;
  m << 1, 2, 2, 1;
  const Eigen::MatrixXd c = condition_gram(m, Conditioning::Clip);
  CHECK((c - Eigen::MatrixXd::Constant(2, 2, 1.5)).cwiseAbs().maxCoeff() < 1e-12);
  const Eigen::MatrixXd j = condition_gram(m, Conditioning::Jitter);
  CHECK(j(0, 0) == doctest::Approx(2.0 + 1e-10).epsilon(1e-14));
  CHECK(j(0, 1) == 2.0);
  CHECK(psd_check(j).min_eig == doctest::Approx(0.0).epsilon(1e-9));
  Eigen::Matrix2d bad;
  bad << 1, std::nan(""), 0, 1;
  CHECK_THROWS(condition_gram(bad, Conditioning::Clip));
}

TEST_CASE("two-sample closed form") {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(2, 2);
  const std::vector<int> y{1, -1};
  const SvmModel m = solve_dual_smo(g, y, 10.0);
  CHECK(m.converged);
  CHECK(m.dual_coeffs(0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.dual_coeffs(1) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(m.bias == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  CHECK(decision_function(m, Eigen::Vector2d(1, 0)) == doctest::Approx(1.0));
  CHECK(decision_function(m, Eigen::Vector2d(0, 1)) == doctest::Approx(-1.0));
  CHECK(m.support_indices == std::vector<std::size_t>{0, 1});
  CHECK(m.objective == doctest::Approx(1.0));
}

TEST_CASE("degenerate and malformed training input") {
  const Eigen::MatrixXd g = Eigen::MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(solve_dual_smo(g, std::vector<int>{1, 1, 1}, 1.0), SvmError);
  CHECK_THROWS_AS(solve_dual_smo(g, std::vector<int>{1, -1}, 1.0), SvmError);
  CHECK_THROWS_AS(solve_dual_smo(g, std::vector<int>{1, -1, 2}, 1.0), SvmError);
  CHECK_THROWS_AS(solve_dual_smo(g, std::vector<int>{1, -1, 1}, 0.0), SvmError);
}

TEST_CASE("decision function, predict and test error") {
  const SvmModel zero = fixed_model({0, 0, 0}, {1, -1, 1}, 0.3);
  CHECK(decision_function(zero, Eigen::Vector3d::Zero()) == doctest::Approx(0.3));
  CHECK(decision_function(zero, Eigen::Vector3d(5, -2, 7)) == doctest::Approx(0.3));
  CHECK_THROWS_AS(decision_function(zero, Eigen::Vector2d(1, 1)), SvmError);
  const std::vector<double> row{0.0, 0.0, 0.0};
  CHECK(decision_function(zero, std::span<const double>(row)) == doctest::Approx(0.3));

  const SvmModel tie = fixed_model({0, 0}, {1, -1}, 0.0);
  CHECK(predict(tie, Eigen::Vector2d::Zero()) == 1);

  // One training point with label +1 and alpha 1: f(x) = k(x) - 0.5.
  const SvmModel m = fixed_model({1.0}, {1}, -0.5);
  Eigen::MatrixXd rows(8, 1);
  rows << 1, 1, 1, 1, 0, 0, 0, 0;
  const std::vector<int> right{1, 1, 1, 1, -1, -1, -1, -1};
  std::vector<int> wrong(right);
  for (int& v : wrong) v = -v;
  std::vector<int> one_off(right);
  one_off[5] = 1;
  CHECK(test_error(m, rows, right) == 0.0);
  CHECK(test_error(m, rows, wrong) == 1.0);
  CHECK(test_error(m, rows, one_off) == 0.125);
  CHECK_THROWS_AS(test_error(m, Eigen::MatrixXd(0, 1), std::vector<int>{}), SvmError);
}

TEST_CASE("separable blobs reach zero training error with the lemma kernel") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> noise(0.0, 0.03);
  LabeledDataset d;
  for (int i = 0; i < 20; ++i) {
    const double c = i < 10 ? 0.25 : 0.65;
    const double a = std::clamp(c + noise(rng), 0.01, 0.99);
    const double b = std::clamp(0.3 + noise(rng), 0.01, 0.99 - a);
    d.densities.push_back(DiscreteDensity::with_unit_weights({a, b, 1.0 - a - b}));
    d.labels.push_back(i < 10 ? 1 : -1);
  }
  REQUIRE(linearly_separable(d));
  const GramMatrix g = gram(KernelSpec{DivergenceSpec::abs(1, 1), KernelMode::LemmaPd, 1.0}, d.densities);
  const SvmModel m = solve_dual_smo(g.entries, d.labels, 1000.0);
  CHECK(m.converged);
  CHECK(test_error(m, g.entries, d.labels) == 0.0);
}

TEST_CASE("random PSD problems: feasibility, KKT and monotone objective") {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> n_dist(2, 40);
  std::uniform_real_distribution<double> c_dist(-1.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = n_dist(rng);
    const Eigen::MatrixXd g = random_psd(n, rng);
    const auto y = random_labels(static_cast<std::size_t>(n), rng);
    const double c = std::pow(10.0, c_dist(rng));
    SmoOptions opt;
    opt.record_objective = true;
    const SvmModel m = solve_dual_smo(g, y, c, opt);
    REQUIRE(m.converged);
    double balance = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      REQUIRE(m.dual_coeffs(i) >= 0.0);
      REQUIRE(m.dual_coeffs(i) <= c);
      balance += m.dual_coeffs(i) * y[static_cast<std::size_t>(i)];
    }
    REQUIRE(std::abs(balance) <= 1e-9);
    REQUIRE(kkt_violation(m, g) <= opt.kkt_tol * (1 + 1e-9));
    REQUIRE(m.objective >= 0.0);
    REQUIRE(m.objective == doctest::Approx(dual_objective(m.dual_coeffs, y, g)));
    for (std::size_t k = 1; k < m.objective_trace.size(); ++k) {
      REQUIRE(m.objective_trace[k] >= m.objective_trace[k - 1] - 1e-12 * std::max(1.0, std::abs(m.objective_trace[k])));
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const bool listed = std::find(m.support_indices.begin(), m.support_indices.end(), static_cast<std::size_t>(i)) !=
                          m.support_indices.end();
      REQUIRE(listed == (m.dual_coeffs(i) > 0.0));
    }
  }
}

TEST_CASE("iteration budget exhaustion is reported") {
  std::mt19937_64 rng(3);
  const Eigen::MatrixXd g = random_psd(30, rng);
  const auto y = random_labels(30, rng);
  SmoOptions opt;
  opt.max_passes = 0;
  const SvmModel m = solve_dual_smo(g, y, 10.0, opt);
  CHECK_FALSE(m.converged);
  CHECK(m.dual_coeffs.size() == 30);
}

TEST_CASE("conditioning none vs clip on a PSD Gram gives identical predictions") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 20; ++trial) {
    const auto data = sample_simplex_densities(24, 5, rng);
    const Eigen::MatrixXd k =
        kernel_from_divergence_matrix(divergence_matrix(DivergenceSpec::dt(0.5), data), KernelMode::Gaussian, 0.7);
    const auto y = random_labels(16, rng);
    const Eigen::MatrixXd train = k.topLeftCorner(16, 16);
    const Eigen::MatrixXd rows = k.bottomLeftCorner(8, 16);
    SmoOptions opt;
    opt.kkt_tol = 1e-8;
    const SvmModel a = solve_dual_smo(condition_gram(train, Conditioning::None), y, 10.0, opt);
    const SvmModel b = solve_dual_smo(condition_gram(train, Conditioning::Clip), y, 10.0, opt);
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      const Eigen::VectorXd row = rows.row(r).transpose();
      REQUIRE(predict(a, row) == predict(b, row));
    }
  }
}

TEST_CASE("cpd kernel and lemma kernel give the same decision signs") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> n_dist(6, 30);
  const DivergenceSpec specs[] = {DivergenceSpec::abs(1, 1), DivergenceSpec::abs(0.5, 0.5), DivergenceSpec::dt(-0.5)};
  for (int trial = 0; trial < 30; ++trial) {
    const int n = n_dist(rng);
    const int n_train = std::max(4, n * 2 / 3);
    const auto data = sample_simplex_densities(static_cast<std::size_t>(n), 5, rng);
    const Eigen::MatrixXd cpd = -divergence_matrix(specs[trial % 3], data);
    const Eigen::MatrixXd lemma = lemma_gram_from_cpd(cpd, 0);
    const auto y = random_labels(static_cast<std::size_t>(n_train), rng);
    SmoOptions opt;
    opt.kkt_tol = 1e-9;
    const SvmModel a = solve_dual_smo(cpd.topLeftCorner(n_train, n_train), y, 5.0, opt);
    const SvmModel b = solve_dual_smo(lemma.topLeftCorner(n_train, n_train), y, 5.0, opt);
    REQUIRE(a.converged);
    REQUIRE(b.converged);
    for (Eigen::Index r = 0; r < n; ++r) {
      const double fa = decision_function(a, Eigen::VectorXd(cpd.row(r).head(n_train).transpose()));
      const double fb = decision_function(b, Eigen::VectorXd(lemma.row(r).head(n_train).transpose()));
      if (std::abs(fa) > 1e-6) REQUIRE((fa > 0) == (fb > 0));
      REQUIRE(fa == doctest::Approx(fb).epsilon(1e-5).scale(1.0));
    }
  }
}

TEST_CASE("stratified folds and cross-validation") {
  const std::vector<int> y{1, 1, 1, 1, 1, -1, -1, -1, -1, -1};
  const auto folds = stratified_folds(y, 5, 3);
  CHECK(folds.size() == 5);
  for (const auto& f : folds) {
    CHECK(f.size() == 2);
    CHECK(y[f[0]] != y[f[1]]);
  }
  CHECK(stratified_folds(y, 5, 3) == folds);
  CHECK_THROWS_AS(stratified_folds(y, 6, 3), SvmError);
  CHECK_THROWS_AS(stratified_folds(y, 1, 3), SvmError);

  std::mt19937_64 rng(10);
  LabeledDataset d;
  for (int i = 0; i < 30; ++i) {
    const double a = (i < 15 ? 0.2 : 0.6) + 0.1 * std::uniform_real_distribution<double>(0, 1)(rng);
    d.densities.push_back(DiscreteDensity::with_unit_weights({a, 1 - a}));
    d.labels.push_back(i < 15 ? 1 : -1);
  }
  const std::vector<double> c10{10.0};
  const CvReport single = cross_validate(d, DivergenceSpec::abs(1, 1), KernelTransform::Direct, c10, {}, 1);
  CHECK(single.best.penalty == 10.0);
  CHECK_FALSE(single.best.sigma.has_value());
  CHECK(single.grid.size() == 1);

  const std::vector<double> cs{1, 10, 100}, sigmas{0.5, 1.5};
  const CvReport full = cross_validate(d, DivergenceSpec::dt(0.5), KernelTransform::Gaussian, cs, sigmas, 5);
  CHECK(full.grid.size() == 6);
  double worst = 0.0;
  for (const CvEntry& e : full.grid) {
    worst = std::max(worst, e.mean_error);
    CHECK(full.best.mean_error <= e.mean_error);
  }
  CHECK(full.best.mean_error <= worst);
  const CvReport again = cross_validate(d, DivergenceSpec::dt(0.5), KernelTransform::Gaussian, cs, sigmas, 5);
  CHECK(again.to_table() == full.to_table());
  // The first grid point attaining the minimum, in (C, sigma) order, wins.
  for (const CvEntry& e : full.grid) {
    if (e.mean_error == full.best.mean_error) {
      CHECK(e.penalty == full.best.penalty);
      CHECK(e.sigma == full.best.sigma);
      break;
    }
  }
  CHECK_THROWS_AS(cross_validate(d, DivergenceSpec::abs(1, 1), KernelTransform::Direct, {}, {}, 1), SvmError);
}
