#include "abdiv/bench.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace abdiv {

namespace {

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, std::span<const std::size_t> rows,
                          std::span<const std::size_t> cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < cols.size(); ++j) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          m(static_cast<Eigen::Index>(rows[i]), static_cast<Eigen::Index>(cols[j]));
    }
  }
  return out;
}

const char* transform_name(KernelTransform t) { return t == KernelTransform::Direct ? "dir" : "tran"; }

std::string format_number(double v) {
  std::ostringstream os;
  os << std::setprecision(6) << v;
  return os.str();
}

}  // namespace

std::vector<std::pair<std::string, DivergenceSpec>> bench_divergences() {
  return {
      {"Euclidean", DivergenceSpec::dt(1.0)},
      {"Hellinger", DivergenceSpec::dt(0.5)},
      {"Itakura-Saito", DivergenceSpec::dt(-0.5)},
      {"S-Euclidean", DivergenceSpec::dt(-1.0)},
  };
}

bool BenchResult::all_converged() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const BenchRow& r) { return r.converged; });
}

std::string BenchResult::to_table() const {
  const auto divs = bench_divergences();
  std::ostringstream os;
  os << "dataset " << dataset << " (train " << train_size << ", test " << test_size << ")\n";
  os << std::left << std::setw(8) << "kernel";
  for (const auto& [name, spec] : divs) os << std::setw(26) << name;
  os << '\n' << std::setw(8) << "";
  for (std::size_t i = 0; i < divs.size(); ++i) {
    os << std::setw(10) << "error" << std::setw(8) << "C" << std::setw(8) << "sigma";
  }
  os << '\n';
  for (KernelTransform t : {KernelTransform::Direct, KernelTransform::Gaussian}) {
    os << std::setw(8) << transform_name(t);
    for (const auto& [name, spec] : divs) {
      const auto it = std::find_if(rows.begin(), rows.end(),
                                   [&](const BenchRow& r) { return r.divergence == name && r.transform == t; });
      if (it == rows.end()) {
        os << std::setw(26) << "n/a";
        continue;
      }
      std::ostringstream err;
      err << std::fixed << std::setprecision(4) << it->test_error;
      os << std::setw(10) << err.str() << std::setw(8) << format_number(it->penalty) << std::setw(8)
         << (it->sigma ? format_number(*it->sigma) : "-");
    }
    os << '\n';
  }
  return os.str();
}

std::string BenchResult::to_key_value() const {
  std::ostringstream os;
  os << "dataset=" << dataset << '\n' << "train_size=" << train_size << '\n' << "test_size=" << test_size << '\n';
  for (const BenchRow& r : rows) {
    os << '[' << r.divergence << ' ' << transform_name(r.transform) << "]\n";
    os << "spec=" << r.spec.to_string() << '\n';
    os << "kernel=" << (r.transform == KernelTransform::Direct ? "cpd" : "gaussian") << '\n';
    os << "test_error=" << std::setprecision(12) << r.test_error << '\n';
    os << "cv_error=" << std::setprecision(12) << r.cv_error << '\n';
    os << "C=" << format_number(r.penalty) << '\n';
    os << "sigma=" << (r.sigma ? format_number(*r.sigma) : "none") << '\n';
    os << "converged=" << (r.converged ? "true" : "false") << '\n';
  }
  return os.str();
}

LabeledDataset load_bench_dataset(const BenchOptions& options) {
  if (options.dataset == "synth") {
    SynthConfig cfg;
    if (options.synth_config) {
      cfg = load_synth_config(*options.synth_config);
    } else if (const auto p = data_directory() / "synth_default.json"; std::filesystem::exists(p)) {
      cfg = load_synth_config(p);
    }
    return synth_two_class(cfg, options.seed);
  }
  if (options.dataset == "cats") {
    const RawDataset raw = load_csv_dataset(data_directory() / "cats.csv", "Sex", "F");
    return to_labeled(raw, options.density_mode.value_or(DensityMode::RawPositive), options.density_epsilon);
  }
  if (options.dataset == "gene") {
    if (!options.gene_path) throw DataError(0, 0, "the gene dataset is not bundled; pass its CSV path");
    const RawDataset raw = load_csv_dataset(*options.gene_path, options.gene_label_column, options.gene_positive);
    return to_labeled(raw, options.density_mode.value_or(DensityMode::Simplex), options.density_epsilon);
  }
  throw DataError(0, 0, "unknown dataset '" + options.dataset + "' (expected synth, cats or gene)");
}

BenchRow evaluate_kernel(const Eigen::MatrixXd& divergences, std::span<const int> labels, const Split& split,
                         KernelTransform transform, double penalty, std::optional<double> sigma) {
  const Eigen::MatrixXd kernel =
      transform == KernelTransform::Gaussian
          ? kernel_from_divergence_matrix(divergences, KernelMode::Gaussian, sigma.value())
          : kernel_from_divergence_matrix(divergences, KernelMode::NegDivergenceCpd, 0.0);
  Eigen::MatrixXd k_train = submatrix(kernel, split.train_indices, split.train_indices);
  if (transform == KernelTransform::Gaussian) k_train = condition_gram(k_train, Conditioning::Clip);
  std::vector<int> y_train, y_test;
  for (std::size_t i : split.train_indices) y_train.push_back(labels[i]);
  for (std::size_t i : split.test_indices) y_test.push_back(labels[i]);
  const SvmModel model = solve_dual_smo(k_train, y_train, penalty);
  BenchRow row;
  row.transform = transform;
  row.penalty = penalty;
  row.sigma = sigma;
  row.converged = model.converged;
  row.test_error = test_error(model, submatrix(kernel, split.test_indices, split.train_indices), y_test);
  return row;
}

BenchResult run_bench(const LabeledDataset& data, const BenchOptions& options) {
  data.validate();
  const Split split = train_test_split(data, options.train_fraction, options.seed);
  BenchResult result;
  result.dataset = options.dataset;
  result.train_size = split.train_indices.size();
  result.test_size = split.test_indices.size();

  CvOptions cv;
  cv.folds = options.folds;
  for (const auto& [name, spec] : bench_divergences()) {
    const Eigen::MatrixXd d = divergence_matrix(spec, data.densities);
    const Eigen::MatrixXd d_train = submatrix(d, split.train_indices, split.train_indices);
    for (KernelTransform t : {KernelTransform::Direct, KernelTransform::Gaussian}) {
      const CvReport report =
          cross_validate(d_train, split.train.labels, t, options.c_grid, options.sigma_grid, options.seed, cv);
      BenchRow row = evaluate_kernel(d, data.labels, split, t, report.best.penalty, report.best.sigma);
      row.divergence = name;
      row.spec = spec;
      row.cv_error = report.best.mean_error;
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

BenchResult run_bench(const BenchOptions& options) { return run_bench(load_bench_dataset(options), options); }

}  // namespace abdiv
