#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "abdiv/bench.hpp"
#include "abdiv/cli.hpp"
#include "abdiv/datasets.hpp"
#include "abdiv/divergence.hpp"
#include "abdiv/image.hpp"
#include "abdiv/kernel.hpp"
#include "abdiv/measure.hpp"
#include "abdiv/segmentation.hpp"
#include "abdiv/svm.hpp"

using namespace abdiv;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail << "first failure: " << what << "; ";
    pass = pass && ok;
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) {
  if (a == b) return true;
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

// A singular line exactly, or at least 0.05 away from all of them.
bool off_singular(double a, double b) {
  for (double v : {a, b, a + b}) {
    if (v != 0.0 && std::abs(v) < 0.05) return false;
  }
  return true;
}

double draw_param(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  double v = u(rng);
  while (v != 0.0 && std::abs(v) < 0.05) v = u(rng);
  return v;
}

std::pair<double, double> draw_pair(std::mt19937_64& rng) {
  for (;;) {
    const double a = draw_param(rng), b = draw_param(rng);
    if (off_singular(a, b)) return {a, b};
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

Outcome ac1() {
  Outcome o;
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> lx(std::log(0.1), std::log(10.0));
  const auto t0 = Clock::now();
  double worst = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const auto [a, b] = draw_pair(rng);
    const double x = std::exp(lx(rng)), y = std::exp(lx(rng));
    const double lhs = abs_divergence({a, b}, x, y);
    const double rhs = ab_divergence({a, b}, x, y) + ab_divergence({a, b}, y, x);
    const double err = lhs == rhs ? 0.0 : std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
    worst = std::max(worst, err);
  }
  const double elapsed = seconds_since(t0);
  o.require(worst <= 1e-10, "relative error " + fmt(worst));
  o.require(elapsed < 5.0, "runtime " + fmt(elapsed) + " s");
  o.detail << "samples=100000 worst_rel=" << fmt(worst) << " runtime_s=" << fmt(elapsed);
  return o;
}

Outcome ac2() {
  Outcome o;
  std::mt19937_64 rng(202);
  std::uniform_real_distribution<double> lx(std::log(0.1), std::log(10.0));
  std::uniform_real_distribution<double> lc(std::log(1e-2), std::log(1e2));
  std::uniform_real_distribution<double> ut(-3.0, 3.0);
  std::uniform_int_distribution<int> special(0, 4);
  double worst_abs = 0.0, worst_dt = 0.0;
  for (int i = 0; i < 10000; ++i) {
    auto [a, b] = draw_pair(rng);
    switch (special(rng)) {
      case 0: b = 0.0; break;
      case 1: a = 0.0; break;
      case 2: b = -a; break;
      default: break;
    }
    const double x = std::exp(lx(rng)), y = std::exp(lx(rng)), c = std::exp(lc(rng));
    double t = ut(rng);
    if (i % 10 == 0) t = 0.0;
    const double l1 = abs_divergence({a, b}, c * x, c * y);
    const double r1 = std::pow(c, a + b) * abs_divergence({a, b}, x, y);
    const double l2 = dt_squared(t, c * x, c * y);
    const double r2 = std::pow(c, 2 * t) * dt_squared(t, x, y);
    if (!rel_close(l1, r1, 1e-9)) worst_abs = std::max(worst_abs, std::abs(l1 - r1) / std::abs(r1));
    if (!rel_close(l2, r2, 1e-9)) worst_dt = std::max(worst_dt, std::abs(l2 - r2) / std::abs(r2));
  }
  o.require(worst_abs == 0.0, "abs homogeneity off by " + fmt(worst_abs));
  o.require(worst_dt == 0.0, "dt homogeneity off by " + fmt(worst_dt));
  o.detail << "samples=10000 tol=1e-9";
  return o;
}

Outcome ac3() {
  Outcome o;
  const double h = 1e-7;
  std::size_t checks = 0;
  auto check = [&](double near, double on, const std::string& what) {
    ++checks;
    o.require(rel_close(near, on, 1e-5), what + " " + fmt(near) + " vs " + fmt(on));
  };
  for (double x : {0.1, 0.7, 2.0, 9.5}) {
    for (double y : {0.3, 1.0, 4.0}) {
      for (double a : {-3.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0}) {
        for (double s : {h, -h}) {
          check(ab_divergence({a, s}, x, y), ab_divergence({a, 0}, x, y), "ab beta->0");
          check(ab_divergence({s, a}, x, y), ab_divergence({0, a}, x, y), "ab alpha->0");
          check(ab_divergence({a, -a + s}, x, y), ab_divergence({a, -a}, x, y), "ab alpha+beta->0");
          check(abs_divergence({a, s}, x, y), abs_divergence({a, 0}, x, y), "abs beta->0");
          check(abs_divergence({s, a}, x, y), abs_divergence({0, a}, x, y), "abs alpha->0");
          check(abs_divergence({a, -a + s}, x, y), abs_divergence({a, -a}, x, y), "abs alpha+beta->0");
        }
      }
      check(ab_divergence({h, 2 * h}, x, y), ab_divergence({0, 0}, x, y), "ab origin");
      check(abs_divergence({h, h}, x, y), abs_divergence({0, 0}, x, y), "abs origin");
      check(dt_squared(h, x, y), dt_squared(0, x, y), "dt t->0+");
      check(dt_squared(-h, x, y), dt_squared(0, x, y), "dt t->0-");
    }
  }
  o.detail << "checks=" << checks << " distance=1e-7 tol=1e-5";
  return o;
}

Outcome ac4() {
  Outcome o;
  std::mt19937_64 rng(404);
  double worst_table = 0.0;
  for (DivergenceName n : all_divergence_names()) {
    const NamedDivergence nd = named_divergence(n);
    for (int i = 0; i < 1000; ++i) {
      const auto d = sample_simplex_densities(2, 8, rng);
      const double a = nd.evaluate(d[0], d[1]);
      const double b = divergence_measures(nd.spec, d[0], d[1]);
      worst_table = std::max(worst_table, std::abs(a - b) / std::abs(b));
    }
  }
  double worst_kernel = 0.0;
  std::size_t kernels = 0;
  const DivergenceSpec candidates[] = {DivergenceSpec::abs(1, 1),   DivergenceSpec::abs(0.5, 1),
                                       DivergenceSpec::abs(0.5, 0.5), DivergenceSpec::abs(2, 1),
                                       DivergenceSpec::dt(1),         DivergenceSpec::dt(0.5),
                                       DivergenceSpec::dt(2)};
  for (const DivergenceSpec& s : candidates) {
    for (int i = 0; i < 1000; ++i) {
      const auto d = sample_simplex_densities(2, 8, rng);
      const auto closed = kernel_closed_form(s, d[0], d[1]);
      if (!closed) break;
      if (i == 0) ++kernels;
      const double lemma = kernel_from_divergence(s, d[0], d[1]);
      worst_kernel = std::max(worst_kernel, std::abs(lemma - *closed) / std::abs(*closed));
    }
  }
  o.require(worst_table <= 1e-12, "table row off by " + fmt(worst_table));
  o.require(worst_kernel <= 1e-10, "kernel list off by " + fmt(worst_kernel));
  o.require(kernels >= 5, "too few closed-form kernels");
  o.detail << "names=" << all_divergence_names().size() << " pairs=1000 worst_table=" << fmt(worst_table)
           << " kernels=" << kernels << " worst_kernel=" << fmt(worst_kernel);
  return o;
}

Outcome ac5() {
  Outcome o;
  const DivergenceSpec guaranteed[] = {DivergenceSpec::abs(1, 1), DivergenceSpec::abs(0.5, 0.5), DivergenceSpec::dt(1),
                                       DivergenceSpec::dt(0.5),   DivergenceSpec::dt(-0.5),      DivergenceSpec::dt(-1)};
  std::mt19937_64 rng(505);
  for (const DivergenceSpec& s : guaranteed) {
    const ProbeResult r = probe_hilbertianity(s, 20, 50, 5, 8, 1e-8);
    o.require(r.reports.size() == 50 && r.indefinite_count == 0,
              "cpd " + s.to_string() + " indefinite " + std::to_string(r.indefinite_count));
    std::size_t gauss_bad = 0;
    for (int trial = 0; trial < 50; ++trial) {
      const auto data = sample_simplex_densities(20, 8, rng);
      for (double sigma : {0.5, 1.5}) {
        if (!psd_check(gram(KernelSpec{s, KernelMode::Gaussian, sigma}, data), 1e-8).psd) ++gauss_bad;
      }
    }
    o.require(gauss_bad == 0, "gaussian " + s.to_string() + " indefinite " + std::to_string(gauss_bad));
  }
  o.detail << "guaranteed specs psd over 50x20;";
  for (const DivergenceSpec& s : {DivergenceSpec::abs(0.5, 1), DivergenceSpec::abs(1, 0)}) {
    const ProbeResult r = probe_hilbertianity(s, 20, 50, 5, 8, 1e-8);
    o.require(r.reports.size() == 50, "probe " + s.to_string() + " did not run");
    o.detail << " probe " << s.to_string() << " indefinite=" << r.indefinite_count << "/50 worst_rel_eig="
             << fmt(r.worst_relative_eig) << ";";
  }
  return o;
}

Outcome ac6() {
  Outcome o;
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> uw(0.01, 100.0);
  std::vector<double> alphas{0.5, 1.0, 0.0, 2.0, -1.0, 3.0, -2.0};
  for (int i = 0; i < 20; ++i) {
    double a = draw_param(rng);
    while (!off_singular(a, 1.0 - a)) a = draw_param(rng);
    alphas.push_back(a);
  }
  double worst = 0.0;
  for (double a : alphas) {
    const DivergenceSpec s = DivergenceSpec::abs(a, 1.0 - a);
    for (int i = 0; i < 200; ++i) {
      const auto d = sample_simplex_densities(2, 7, rng);
      std::vector<double> w(7);
      for (double& v : w) v = uw(rng);
      const double before = divergence_measures(s, d[0], d[1]);
      const double after = divergence_measures(s, change_dominating_measure(d[0], w), change_dominating_measure(d[1], w));
      worst = std::max(worst, std::abs(after - before) / std::abs(before));
    }
  }
  o.require(worst <= 1e-10, "invariance off by " + fmt(worst));
  o.detail << "alphas=" << alphas.size() << " pairs=200 worst_rel=" << fmt(worst);
  return o;
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

Outcome ac7() {
  Outcome o;
  std::mt19937_64 rng(707);
  std::uniform_int_distribution<int> n_dist(2, 40);
  std::uniform_real_distribution<double> c_dist(-1.0, 2.0);
  double worst_kkt = 0.0, worst_balance = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto n = n_dist(rng);
    const Eigen::MatrixXd g = random_psd(n, rng);
    const auto y = random_labels(static_cast<std::size_t>(n), rng);
    const double c = std::pow(10.0, c_dist(rng));
    const SvmModel m = solve_dual_smo(g, y, c);
    o.require(m.converged, "problem " + std::to_string(trial) + " did not converge");
    double balance = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      o.require(m.dual_coeffs(i) >= 0.0 && m.dual_coeffs(i) <= c, "box constraint");
      balance += m.dual_coeffs(i) * y[static_cast<std::size_t>(i)];
    }
    worst_balance = std::max(worst_balance, std::abs(balance));
    worst_kkt = std::max(worst_kkt, kkt_violation(m, g));
  }
  o.require(worst_balance <= 1e-9, "equality constraint off by " + fmt(worst_balance));
  o.require(worst_kkt <= 1e-3 * (1 + 1e-9), "kkt violation " + fmt(worst_kkt));

  const std::vector<int> two{1, -1};
  const SvmModel m2 = solve_dual_smo(Eigen::MatrixXd::Identity(2, 2), two, 10.0);
  o.require(m2.converged && m2.dual_coeffs(0) == 1.0 && m2.dual_coeffs(1) == 1.0 && m2.bias == 0.0,
            "two-sample example alpha=(" + fmt(m2.dual_coeffs(0)) + "," + fmt(m2.dual_coeffs(1)) +
                ") b=" + fmt(m2.bias));

  std::uniform_int_distribution<int> s_dist(6, 30);
  const DivergenceSpec specs[] = {DivergenceSpec::abs(1, 1), DivergenceSpec::abs(0.5, 0.5), DivergenceSpec::dt(-0.5)};
  std::size_t disagreements = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const int n = s_dist(rng);
    const int n_train = std::max(4, n * 2 / 3);
    const auto data = sample_simplex_densities(static_cast<std::size_t>(n), 5, rng);
    const Eigen::MatrixXd cpd = -divergence_matrix(specs[trial % 3], data);
    const Eigen::MatrixXd lemma = lemma_gram_from_cpd(cpd, 0);
    const auto y = random_labels(static_cast<std::size_t>(n_train), rng);
    SmoOptions opt;
    opt.kkt_tol = 1e-9;
    const SvmModel a = solve_dual_smo(cpd.topLeftCorner(n_train, n_train), y, 5.0, opt);
    const SvmModel b = solve_dual_smo(lemma.topLeftCorner(n_train, n_train), y, 5.0, opt);
    o.require(a.converged && b.converged, "sign-agreement solve did not converge");
    for (Eigen::Index r = 0; r < n; ++r) {
      const double fa = decision_function(a, Eigen::VectorXd(cpd.row(r).head(n_train).transpose()));
      const double fb = decision_function(b, Eigen::VectorXd(lemma.row(r).head(n_train).transpose()));
      if (std::abs(fa) > 1e-6 && (fa > 0) != (fb > 0)) ++disagreements;
    }
  }
  o.require(disagreements == 0, std::to_string(disagreements) + " sign disagreements");
  o.detail << "kkt_problems=100 worst_kkt=" << fmt(worst_kkt) << " two_sample=exact sign_instances=30 disagreements="
           << disagreements;
  return o;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& d, const std::vector<std::size_t>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      out(i, j) = d(static_cast<Eigen::Index>(idx[static_cast<std::size_t>(i)]),
                    static_cast<Eigen::Index>(idx[static_cast<std::size_t>(j)]));
    }
  }
  return out;
}

BenchRow gaussian_row(const LabeledDataset& data, const DivergenceSpec& spec, const BenchOptions& opt) {
  const Split split = train_test_split(data, opt.train_fraction, opt.seed);
  const Eigen::MatrixXd d = divergence_matrix(spec, data.densities);
  CvOptions cv;
  cv.folds = opt.folds;
  const CvReport r = cross_validate(submatrix(d, split.train_indices), split.train.labels, KernelTransform::Gaussian,
                                    opt.c_grid, opt.sigma_grid, opt.seed, cv);
  return evaluate_kernel(d, data.labels, split, KernelTransform::Gaussian, r.best.penalty, r.best.sigma);
}

const BenchRow* find_row(const BenchResult& r, const std::string& name, KernelTransform t) {
  for (const BenchRow& row : r.rows) {
    if (row.divergence == name && row.transform == t) return &row;
  }
  return nullptr;
}

Outcome ac8() {
  Outcome o;
  const auto t0 = Clock::now();
  BenchOptions opt;
  opt.dataset = "synth";
  opt.seed = 7;
  const LabeledDataset data = load_bench_dataset(opt);
  o.require(data.size() == 200, "synthetic set size " + std::to_string(data.size()));
  const BenchRow euclid = gaussian_row(data, DivergenceSpec::abs(1, 1), opt);
  const BenchRow hell = gaussian_row(data, DivergenceSpec::abs(0.5, 0.5), opt);
  const BenchResult bench = run_bench(data, opt);
  const BenchRow* is_dir = find_row(bench, "Itakura-Saito", KernelTransform::Direct);
  const BenchRow* is_tr = find_row(bench, "Itakura-Saito", KernelTransform::Gaussian);
  const double elapsed = seconds_since(t0);
  o.require(euclid.test_error <= 0.05, "gaussian abs:1,1 error " + fmt(euclid.test_error));
  o.require(hell.test_error <= 0.05, "gaussian hellinger error " + fmt(hell.test_error));
  o.require(is_dir && is_tr, "Itakura-Saito rows missing from the bench");
  if (is_dir && is_tr) {
    o.require(is_tr->test_error <= is_dir->test_error, "transformed Itakura-Saito error " + fmt(is_tr->test_error) +
                                                           " > direct " + fmt(is_dir->test_error));
  }
  o.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  o.detail << "gauss_abs11=" << fmt(euclid.test_error) << " gauss_hellinger=" << fmt(hell.test_error);
  if (is_dir && is_tr) {
    o.detail << " is_direct=" << fmt(is_dir->test_error) << " is_gauss=" << fmt(is_tr->test_error)
             << " is_gauss_sigma=" << (is_tr->sigma ? fmt(*is_tr->sigma) : "none");
  }
  o.detail << " runtime_s=" << fmt(elapsed);
  return o;
}

Outcome ac9() {
  Outcome o;
  const auto t0 = Clock::now();
  BenchOptions opt;
  opt.dataset = "cats";
  const BenchResult bench = run_bench(opt);
  const double elapsed = seconds_since(t0);
  const BenchRow* row = find_row(bench, "Euclidean", KernelTransform::Gaussian);
  o.require(row != nullptr, "Euclidean gaussian row missing");
  if (row) {
    o.require(row->test_error >= 0.10 && row->test_error <= 0.35, "test error " + fmt(row->test_error));
    o.detail << "gauss_euclidean=" << fmt(row->test_error) << " C=" << fmt(row->penalty)
             << " sigma=" << (row->sigma ? fmt(*row->sigma) : "none") << " ";
  }
  o.require(elapsed < 60.0, "runtime " + fmt(elapsed) + " s");
  o.detail << "train=" << bench.train_size << " test=" << bench.test_size << " runtime_s=" << fmt(elapsed);
  return o;
}

RgbImage random_image(std::size_t w, std::size_t h, std::mt19937_64& rng, int lo, int hi) {
  std::uniform_int_distribution<int> v(lo, hi);
  RgbImage img(w, h);
  for (std::size_t r = 0; r < h; ++r) {
    for (std::size_t c = 0; c < w; ++c) {
      img.at(r, c) = {static_cast<std::uint8_t>(v(rng)), static_cast<std::uint8_t>(v(rng)),
                      static_cast<std::uint8_t>(v(rng))};
    }
  }
  return img;
}

bool border_background(const RgbImage& out, const Rgb& bg) {
  for (std::size_t c = 0; c < out.width(); ++c) {
    if (out.at(0, c) != bg) return false;
  }
  for (std::size_t r = 0; r < out.height(); ++r) {
    if (out.at(r, 0) != bg) return false;
  }
  return true;
}

double mid_gap(std::vector<double> values, double q) {
  std::sort(values.begin(), values.end());
  const double target = values[static_cast<std::size_t>(q * static_cast<double>(values.size() - 1))];
  values.erase(std::unique(values.begin(), values.end(), [](double a, double b) { return b <= a * (1 + 1e-9); }),
               values.end());
  auto it = std::lower_bound(values.begin(), values.end(), target);
  if (it == values.end()) --it;
  if (it == values.begin()) return values.front() > 0 ? values.front() / 2 : 0.5 * values[1];
  return 0.5 * (*(it - 1) + *it);
}

Outcome ac10() {
  Outcome o;
  SegmentationConfig cfg;

  cfg.k = 0.5;
  const RgbImage flat = segment(RgbImage(9, 7, {40, 80, 120}), cfg);
  bool flat_ok = border_background(flat, cfg.background);
  for (std::size_t r = 1; r < 7; ++r) {
    for (std::size_t c = 1; c < 9; ++c) flat_ok = flat_ok && flat.at(r, c) == cfg.foreground;
  }
  o.require(flat_ok, "constant image");

  RgbImage edge(8, 6);
  for (std::size_t r = 0; r < 6; ++r) {
    for (std::size_t c = 0; c < 8; ++c) {
      const std::uint8_t v = c < 4 ? 10 : 200;
      edge.at(r, c) = {v, v, v};
    }
  }
  cfg.k = 1354;
  for (NeighborMode mode : {NeighborMode::Literal, NeighborMode::CurrentVsNeighbors}) {
    cfg.neighbor_mode = mode;
    const RgbImage out = segment(edge, cfg);
    bool ok = border_background(out, cfg.background);
    for (std::size_t r = 1; r < 6; ++r) {
      for (std::size_t c = 1; c < 8; ++c) ok = ok && out.at(r, c) == (c == 4 ? cfg.background : cfg.foreground);
    }
    o.require(ok, "two-tone edge");
  }

  std::mt19937_64 rng(1010);
  const RgbImage noisy = random_image(40, 30, rng, 0, 255);
  const std::vector<double> ks{1, 10, 50, 100, 200, 400, 800, 1600, 1e5};
  for (NeighborMode mode : {NeighborMode::Literal, NeighborMode::CurrentVsNeighbors}) {
    cfg.neighbor_mode = mode;
    const auto outs = threshold_sweep(noisy, ks, cfg);
    for (std::size_t i = 1; i < outs.size(); ++i) {
      for (std::size_t p = 0; p < noisy.pixel_count(); ++p) {
        if (outs[i - 1].pixels()[p] == cfg.foreground) o.require(outs[i].pixels()[p] == cfg.foreground, "monotone");
      }
    }
  }

  const RgbImage base_img = random_image(30, 24, rng, 1, 85);
  for (const DivergenceSpec& s : {DivergenceSpec::abs(1, 1), DivergenceSpec::abs(0.5, 0.5), DivergenceSpec::dt(-1)}) {
    for (int c : {2, 3}) {
      RgbImage scaled(base_img.width(), base_img.height());
      for (std::size_t p = 0; p < base_img.pixel_count(); ++p) {
        const Rgb& px = base_img.pixels()[p];
        scaled.at(p / base_img.width(), p % base_img.width()) = {static_cast<std::uint8_t>(px[0] * c), static_cast<std::uint8_t>(px[1] * c),
                              static_cast<std::uint8_t>(px[2] * c)};
      }
      SegmentationConfig sc;
      sc.spec = s;
      sc.epsilon = 1e-12;
      const auto map = divergence_map(base_img, sc);
      const double factor = std::pow(static_cast<double>(c), s.homogeneity());
      for (double q : {0.2, 0.5, 0.8}) {
        sc.k = mid_gap(map, q);
        SegmentationConfig scaled_cfg = sc;
        scaled_cfg.k = sc.k * factor;
        o.require(segment(scaled, scaled_cfg) == segment(base_img, sc), "scale covariance " + s.to_string());
      }
    }
  }

  const RgbImage big = random_image(512, 512, rng, 0, 255);
  const std::string bytes = encode_ppm(big);
  const auto dir = std::filesystem::temp_directory_path() / "abdiv_acceptance_ppm";
  std::filesystem::create_directories(dir);
  write_image(big, dir / "a.ppm");
  write_image(load_image(dir / "a.ppm"), dir / "b.ppm");
  std::ifstream fa(dir / "a.ppm", std::ios::binary), fb(dir / "b.ppm", std::ios::binary);
  const std::string sa((std::istreambuf_iterator<char>(fa)), {});
  const std::string sb((std::istreambuf_iterator<char>(fb)), {});
  o.require(sa == bytes && sb == bytes && decode_ppm(bytes) == big, "ppm round trip");

  SegmentationConfig full;
  full.k = 2000;
  const auto t0 = Clock::now();
  write_image(segment(load_image(dir / "a.ppm"), full), dir / "seg.ppm");
  const double elapsed = seconds_since(t0);
  const RgbImage seg = load_image(dir / "seg.ppm");
  std::filesystem::remove_all(dir);
  o.require(seg.width() == 512 && seg.height() == 512, "512x512 output size");
  o.require(elapsed < 2.0, "512x512 runtime " + fmt(elapsed) + " s");
  o.detail << "properties=constant,edge,monotone,scale ppm_roundtrip=identical full_512_s=" << fmt(elapsed);
  return o;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(f), {}};
}

Outcome ac11() {
  Outcome o;
  const auto root = std::filesystem::temp_directory_path() / "abdiv_acceptance_bench";
  std::filesystem::remove_all(root);
  std::string txt[2], kv[2];
  for (int run = 0; run < 2; ++run) {
    const auto dir = root / std::to_string(run);
    std::ostringstream out, err;
    const int code = cli::main_entry({"bench", "--data", "synth", "--seed", "7", "--out", dir.string()}, out, err);
    o.require(code == 0, "bench exit code " + std::to_string(code) + " " + err.str());
    txt[run] = slurp(dir / "bench_synth_seed7.txt");
    kv[run] = slurp(dir / "bench_synth_seed7.kv");
  }
  std::filesystem::remove_all(root);
  o.require(!txt[0].empty() && !kv[0].empty(), "empty report");
  o.require(txt[0] == txt[1], "table reports differ");
  o.require(kv[0] == kv[1], "key-value reports differ");
  o.detail << "report_bytes=" << txt[0].size() + kv[0].size() << " identical=" << (txt[0] == txt[1] && kv[0] == kv[1]);
  return o;
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},   {"AC5", ac5},   {"AC6", ac6},
      {"AC7", ac7}, {"AC8", ac8}, {"AC9", ac9}, {"AC10", ac10}, {"AC11", ac11},
  };
  int failed = 0;
  for (const auto& [name, fn] : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double elapsed = seconds_since(t0);
    if (!o.pass) ++failed;
    std::cout << std::left << std::setw(5) << name << ' ' << (o.pass ? "PASS" : "FAIL") << "  [" << std::fixed
              << std::setprecision(2) << elapsed << " s]  " << std::defaultfloat << o.detail.str() << std::endl;
  }
  std::cout << (std::size(criteria) - static_cast<std::size_t>(failed)) << "/" << std::size(criteria) << " passed"
            << std::endl;
  return failed == 0 ? 0 : 1;
}
