#include "abdiv/cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "abdiv/bench.hpp"
#include "abdiv/datasets.hpp"
#include "abdiv/image.hpp"
#include "abdiv/kernel.hpp"
#include "abdiv/measure.hpp"
#include "abdiv/segmentation.hpp"
#include "abdiv/svm.hpp"

namespace abdiv::cli {

namespace {

constexpr const char* kNameNote =
    "Divergence names: euclidean=abs:1,1 v1-hellinger=abs:0.5,1 v2-hellinger=abs:0.5,-1 hellinger=abs:0.5,0.5 "
    "jeffrey=abs:1,0 s-euclidean=dt:-1 itakura-saito (s-itakurasaito)=dt:-0.5 euclidean-dt=dt:1 "
    "hellinger-dt=dt:0.5. In the d_t family t=1/2 is the Hellinger form and t=-1/2 the symmetrized "
    "Itakura-Saito form, as the d_t formula gives.";

std::string shortest(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) return std::to_string(v);
  return std::string(buf, ptr);
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += shortest(v[i]);
  }
  return s;
}

double parse_number(std::string_view s, std::string_view context) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw UsageError("malformed number '" + std::string(s) + "' in " + std::string(context));
  }
  return v;
}

std::vector<double> parse_list(std::string_view s, std::string_view context) {
  std::vector<double> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = s.find(',', start);
    out.push_back(parse_number(s.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start),
                               context));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

struct Bindings {
  CLI::App app{"Alpha-beta divergences, Hilbertian metrics and kernels on discrete measures", "abdiv"};
  std::vector<CLI::App*> commands;
};

void add_spec(CLI::App* cmd, RunConfig& cfg, bool required) {
  auto* opt = cmd->add_option("--spec", cfg.spec_text,
                              "divergence: table name, ab:a,b, abs:a,b or dt:t (see footer for names)");
  if (required) opt->required();
  cmd->add_flag("--literal", cfg.literal_skew,
                "evaluate the alpha=-beta row with the extra log term instead of its continuous limit");
}

void add_data(CLI::App* cmd, RunConfig& cfg) {
  cmd->add_option("--data", cfg.data, "dataset: synth, cats or gene")
      ->check(CLI::IsMember({"synth", "cats", "gene"}));
  cmd->add_option("--gene-path", cfg.gene_path, "CSV file for --data gene (not bundled)");
  cmd->add_option("--label-column", cfg.label_column, "label column of the gene CSV");
  cmd->add_option("--positive", cfg.positive_label, "label value mapped to +1 in the gene CSV");
  cmd->add_option("--density", cfg.density, "feature-to-density conversion: simplex or raw")
      ->check(CLI::IsMember({"simplex", "raw"}));
}

void build(Bindings& b, RunConfig& cfg) {
  CLI::App& app = b.app;
  app.require_subcommand(1);
  app.footer(kNameNote);

  auto* div = app.add_subcommand("div", "evaluate a divergence on scalars (--x/--y) or densities (--p/--q)");
  add_spec(div, cfg, true);
  div->add_option("--x", cfg.x, "first positive scalar");
  div->add_option("--y", cfg.y, "second positive scalar");
  div->add_option("--p", cfg.p, "first density, comma-separated values");
  div->add_option("--q", cfg.q, "second density, comma-separated values");
  div->add_option("--weights", cfg.weights, "dominating-measure weights (default: all ones)");
  div->add_option("--sigma", cfg.sigma, "also report the gaussian kernel with this bandwidth")
      ->check(CLI::PositiveNumber);

  auto* gram = app.add_subcommand("gram", "Gram matrix and its spectrum over a dataset");
  add_spec(gram, cfg, true);
  gram->add_option("--mode", cfg.kernel_mode, "kernel: cpd (-D), lemma (zero-measure origin) or gaussian")
      ->check(CLI::IsMember({"cpd", "lemma", "gaussian"}));
  gram->add_option("--sigma", cfg.sigma, "gaussian bandwidth (> 0)")->check(CLI::PositiveNumber);
  gram->add_option("--n", cfg.n, "number of synthetic densities")->check(CLI::PositiveNumber);
  gram->add_option("--tol", cfg.tol, "eigenvalue tolerance")->check(CLI::PositiveNumber);
  gram->add_option("--seed", cfg.seed, "random seed")->required();
  add_data(gram, cfg);
  gram->add_option("--out", cfg.out_path, "write the matrix here");

  auto* probe = app.add_subcommand("probe", "search random densities for indefinite centered divergence Grams");
  add_spec(probe, cfg, true);
  probe->add_option("--n", cfg.n, "densities per trial (>= 3)")->check(CLI::Range(3, 100000));
  probe->add_option("--trials", cfg.trials, "number of trials")->check(CLI::PositiveNumber);
  probe->add_option("--atoms", cfg.atoms, "atoms per density")->check(CLI::PositiveNumber);
  probe->add_option("--tol", cfg.tol, "eigenvalue tolerance")->check(CLI::PositiveNumber);
  probe->add_option("--seed", cfg.seed, "random seed")->required();
  probe->add_option("--out", cfg.out_path, "write the report here");

  auto* svm = app.add_subcommand("svm", "cross-validate, train and test an SVM on an 80/20 split");
  add_spec(svm, cfg, true);
  add_data(svm, cfg);
  svm->add_option("--kernel", cfg.transform, "direct (-D) or gaussian")
      ->check(CLI::IsMember({"direct", "gaussian"}));
  svm->add_option("--C", cfg.c_grid, "penalty grid")->delimiter(',')->check(CLI::PositiveNumber);
  svm->add_option("--sigma-grid", cfg.sigma_grid, "bandwidth grid")->delimiter(',')->check(CLI::PositiveNumber);
  svm->add_option("--folds", cfg.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  svm->add_option("--condition", cfg.conditioning, "Gram repair for gaussian kernels: none, clip or jitter")
      ->check(CLI::IsMember({"none", "clip", "jitter"}));
  svm->add_option("--seed", cfg.seed, "random seed")->required();
  svm->add_option("--out", cfg.out_path, "write key=value records here");

  auto* seg = app.add_subcommand("segment", "threshold neighbour divergences of a PPM image");
  add_spec(seg, cfg, true);
  seg->add_option("--k", cfg.ks, "threshold(s); several values produce one output each")
      ->required()
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  seg->add_option("--norm", cfg.norm, "channel scale: raw (0..255 + eps) or unit (v/255 floored at eps)")
      ->check(CLI::IsMember({"raw", "unit"}));
  seg->add_option("--mode", cfg.neighbor, "literal (left vs top neighbour) or current (pixel vs neighbours)")
      ->check(CLI::IsMember({"literal", "current"}));
  seg->add_option("--eps", cfg.epsilon, "channel floor (default 1 raw, 1e-3 unit)")->check(CLI::PositiveNumber);
  seg->add_option("--in", cfg.in_path, "input P6 PPM")->required();
  seg->add_option("--out", cfg.out_path, "output P6 PPM")->required();

  auto* bench = app.add_subcommand("bench", "regenerate an experiment table (direct and gaussian kernels)");
  add_data(bench, cfg);
  bench->add_option("--C", cfg.c_grid, "penalty grid")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--sigma-grid", cfg.sigma_grid, "bandwidth grid")->delimiter(',')->check(CLI::PositiveNumber);
  bench->add_option("--folds", cfg.folds, "cross-validation folds")->check(CLI::Range(2, 1000));
  bench->add_option("--seed", cfg.seed, "random seed")->required();
  bench->add_option("--out", cfg.out_path, "report directory (default: current directory)");

  b.commands = {div, gram, probe, svm, seg, bench};
}

BenchOptions bench_options(const RunConfig& cfg) {
  BenchOptions o;
  o.dataset = cfg.data;
  o.seed = cfg.seed.value_or(0);
  if (!cfg.gene_path.empty()) o.gene_path = cfg.gene_path;
  o.gene_label_column = cfg.label_column;
  o.gene_positive = cfg.positive_label;
  if (cfg.density == "simplex") o.density_mode = DensityMode::Simplex;
  if (cfg.density == "raw") o.density_mode = DensityMode::RawPositive;
  o.c_grid = cfg.c_grid;
  o.sigma_grid = cfg.sigma_grid;
  o.folds = cfg.folds;
  return o;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw DataError(0, 0, "cannot write " + path);
  f << contents;
}

int run_div(const RunConfig& cfg, std::ostream& out) {
  const DivergenceSpec& spec = cfg.spec;
  out << std::setprecision(17);
  out << "spec=" << spec.to_string() << '\n';
  if (cfg.x || cfg.y) {
    if (!cfg.x || !cfg.y) throw UsageError("div needs both --x and --y");
    if (spec.family != Family::DT) out << "branch=" << branch_name(branch_select(spec.params, spec.param_eps)) << '\n';
    out << "value=" << scalar_divergence(spec, *cfg.x, *cfg.y) << '\n';
    return 0;
  }
  if (cfg.p.empty() || cfg.q.empty()) throw UsageError("div needs --x/--y or --p/--q");
  auto pv = parse_list(cfg.p, "--p");
  auto qv = parse_list(cfg.q, "--q");
  std::vector<double> w = cfg.weights.empty() ? std::vector<double>(pv.size(), 1.0) : parse_list(cfg.weights, "--weights");
  const DiscreteDensity p(std::move(pv), w);
  const DiscreteDensity q(std::move(qv), w);
  out << "value=" << divergence_measures(spec, p, q) << '\n';
  if (spec.family != Family::AB) {
    try {
      out << "lemma_kernel=" << kernel_from_divergence(spec, p, q) << '\n';
    } catch (const UnsupportedSpecError&) {
      out << "lemma_kernel=unsupported\n";
    }
  }
  if (cfg.sigma) out << "gaussian_kernel=" << gaussian_kernel(spec, *cfg.sigma, p, q) << '\n';
  return 0;
}

int run_gram(const RunConfig& cfg, std::ostream& out) {
  BenchOptions o = bench_options(cfg);
  LabeledDataset data;
  if (cfg.data == "synth") {
    SynthConfig sc;
    sc.n_per_class = (cfg.n + 1) / 2;
    data = synth_two_class(sc, *cfg.seed);
  } else {
    data = load_bench_dataset(o);
  }
  KernelSpec ks;
  ks.base = cfg.spec;
  ks.mode = cfg.kernel_mode == "cpd" ? KernelMode::NegDivergenceCpd
            : cfg.kernel_mode == "lemma" ? KernelMode::LemmaPd
                                         : KernelMode::Gaussian;
  if (ks.mode == KernelMode::Gaussian) {
    if (!cfg.sigma) throw UsageError("gram --mode gaussian needs --sigma");
    ks.sigma = *cfg.sigma;
  }
  const GramMatrix g = gram(ks, data.densities);
  const SpectrumReport r = ks.mode == KernelMode::NegDivergenceCpd ? cpd_check(-g.entries, cfg.tol) : psd_check(g, cfg.tol);
  out << "spec=" << cfg.spec.to_string() << '\n' << "mode=" << kernel_mode_name(ks.mode) << '\n' << r.to_key_value();
  if (!cfg.out_path.empty()) {
    std::ostringstream m;
    m << std::setprecision(17);
    for (Eigen::Index i = 0; i < g.order(); ++i) {
      for (Eigen::Index j = 0; j < g.order(); ++j) m << (j ? " " : "") << g.entries(i, j);
      m << '\n';
    }
    write_file(cfg.out_path, m.str());
  }
  return 0;
}

int run_probe(const RunConfig& cfg, std::ostream& out) {
  const ProbeResult r = probe_hilbertianity(cfg.spec, cfg.n, cfg.trials, *cfg.seed, cfg.atoms, cfg.tol);
  const std::string text = r.to_key_value(cfg.spec);
  if (!cfg.out_path.empty()) {
    write_file(cfg.out_path, text);
    out << "spec=" << cfg.spec.to_string() << "\nindefinite=" << r.indefinite_count
        << "\nworst_relative_eig=" << std::setprecision(12) << r.worst_relative_eig << '\n';
  } else {
    out << text;
  }
  return 0;
}

int run_svm(const RunConfig& cfg, std::ostream& out) {
  const LabeledDataset data = load_bench_dataset(bench_options(cfg));
  const Split split = train_test_split(data, 0.8, *cfg.seed);
  const Eigen::MatrixXd d = divergence_matrix(cfg.spec, data.densities);
  Eigen::MatrixXd d_train(split.train_indices.size(), split.train_indices.size());
  for (std::size_t i = 0; i < split.train_indices.size(); ++i) {
    for (std::size_t j = 0; j < split.train_indices.size(); ++j) {
      d_train(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          d(static_cast<Eigen::Index>(split.train_indices[i]), static_cast<Eigen::Index>(split.train_indices[j]));
    }
  }
  const KernelTransform t = cfg.transform == "direct" ? KernelTransform::Direct : KernelTransform::Gaussian;
  CvOptions cv;
  cv.folds = cfg.folds;
  cv.conditioning = cfg.conditioning == "none" ? Conditioning::None
                    : cfg.conditioning == "jitter" ? Conditioning::Jitter
                                                   : Conditioning::Clip;
  const CvReport report = cross_validate(d_train, split.train.labels, t, cfg.c_grid, cfg.sigma_grid, *cfg.seed, cv);
  const BenchRow row = evaluate_kernel(d, data.labels, split, t, report.best.penalty, report.best.sigma);

  std::ostringstream kv;
  kv << "spec=" << cfg.spec.to_string() << "\nkernel=" << cfg.transform << "\ndata=" << cfg.data
     << "\ntrain_size=" << split.train_indices.size() << "\ntest_size=" << split.test_indices.size()
     << "\nbest_C=" << shortest(report.best.penalty)
     << "\nbest_sigma=" << (report.best.sigma ? shortest(*report.best.sigma) : "none")
     << "\ncv_error=" << std::setprecision(12) << report.best.mean_error << "\ntest_error=" << row.test_error
     << "\nconverged=" << (row.converged ? "true" : "false") << '\n';
  out << report.to_table() << kv.str();
  if (!cfg.out_path.empty()) write_file(cfg.out_path, kv.str());
  return row.converged ? 0 : static_cast<int>(ExitCode::NonConvergence);
}

int run_segment(const RunConfig& cfg, std::ostream& out) {
  SegmentationConfig sc;
  sc.spec = cfg.spec;
  sc.normalization = cfg.norm == "unit" ? Normalization::UnitInterval : Normalization::Raw255;
  sc.neighbor_mode = cfg.neighbor == "current" ? NeighborMode::CurrentVsNeighbors : NeighborMode::Literal;
  sc.epsilon = cfg.epsilon;
  const RgbImage image = load_image(cfg.in_path);
  const auto outputs = threshold_sweep(image, cfg.ks, sc);
  for (std::size_t i = 0; i < outputs.size(); ++i) {
    std::filesystem::path path = cfg.out_path;
    if (outputs.size() > 1) {
      path = path.parent_path() / (path.stem().string() + "_k" + shortest(cfg.ks[i]) + path.extension().string());
    }
    write_image(outputs[i], path);
    std::size_t fg = 0;
    for (const Rgb& px : outputs[i].pixels()) fg += px == sc.foreground ? 1 : 0;
    out << "k=" << shortest(cfg.ks[i]) << " foreground=" << fg << " out=" << path.string() << '\n';
  }
  return 0;
}

int run_bench_command(const RunConfig& cfg, std::ostream& out) {
  const BenchResult result = run_bench(bench_options(cfg));
  const std::filesystem::path dir = cfg.out_path.empty() ? std::filesystem::path(".") : std::filesystem::path(cfg.out_path);
  std::filesystem::create_directories(dir);
  const std::string stem = "bench_" + cfg.data + "_seed" + std::to_string(*cfg.seed);
  write_file((dir / (stem + ".txt")).string(), result.to_table());
  write_file((dir / (stem + ".kv")).string(), result.to_key_value());
  out << result.to_table();
  return result.all_converged() ? 0 : static_cast<int>(ExitCode::NonConvergence);
}

}  // namespace

DivergenceSpec parse_spec(std::string_view text) {
  const std::string s(text);
  auto fail = [&](const std::string& why) { return UsageError("malformed --spec '" + s + "': " + why); };
  if (s.empty()) throw fail("empty");
  const auto colon = s.find(':');
  if (colon != std::string::npos) {
    const std::string family = s.substr(0, colon);
    const std::string args = s.substr(colon + 1);
    std::vector<double> v;
    try {
      v = parse_list(args, "--spec");
    } catch (const UsageError&) {
      throw fail("parameters must be numbers");
    }
    if (family == "ab" || family == "abs") {
      if (v.size() != 2) throw fail("expected two parameters alpha,beta");
      return family == "ab" ? DivergenceSpec::ab(v[0], v[1]) : DivergenceSpec::abs(v[0], v[1]);
    }
    if (family == "dt") {
      if (v.size() != 1) throw fail("expected one parameter t");
      return DivergenceSpec::dt(v[0]);
    }
    throw fail("unknown family '" + family + "' (expected ab, abs or dt)");
  }
  const bool numeric = s.find_first_not_of("0123456789+-.,eE ") == std::string::npos;
  if (numeric) {
    std::vector<double> v;
    try {
      v = parse_list(s, "--spec");
    } catch (const UsageError&) {
      throw fail("parameters must be numbers");
    }
    if (v.size() == 2) return DivergenceSpec::abs(v[0], v[1]);
    if (v.size() == 1) return DivergenceSpec::dt(v[0]);
    throw fail("expected a,b or t");
  }
  try {
    return named_divergence(s).spec;
  } catch (const std::invalid_argument&) {
    throw fail("unknown divergence name");
  }
}

std::vector<std::string> RunConfig::render() const {
  const RunConfig d;
  std::vector<std::string> a{command};
  auto opt = [&](const char* flag, const std::string& v) {
    a.emplace_back(flag);
    a.push_back(v);
  };
  const bool has_spec = command != "bench";
  if (has_spec) opt("--spec", spec_text);
  if (has_spec && literal_skew) a.emplace_back("--literal");
  if (seed) opt("--seed", std::to_string(*seed));
  if (command == "div") {
    if (x) opt("--x", shortest(*x));
    if (y) opt("--y", shortest(*y));
    if (!p.empty()) opt("--p", p);
    if (!q.empty()) opt("--q", q);
    if (!weights.empty()) opt("--weights", weights);
    if (sigma) opt("--sigma", shortest(*sigma));
  }
  if (command == "gram" || command == "probe") {
    if (n != d.n) opt("--n", std::to_string(n));
    if (tol != d.tol) opt("--tol", shortest(tol));
  }
  if (command == "gram") {
    if (kernel_mode != d.kernel_mode) opt("--mode", kernel_mode);
    if (sigma) opt("--sigma", shortest(*sigma));
  }
  if (command == "probe") {
    if (trials != d.trials) opt("--trials", std::to_string(trials));
    if (atoms != d.atoms) opt("--atoms", std::to_string(atoms));
  }
  if (command == "gram" || command == "svm" || command == "bench") {
    if (data != d.data) opt("--data", data);
    if (!gene_path.empty()) opt("--gene-path", gene_path);
    if (label_column != d.label_column) opt("--label-column", label_column);
    if (positive_label != d.positive_label) opt("--positive", positive_label);
    if (!density.empty()) opt("--density", density);
  }
  if (command == "svm" || command == "bench") {
    if (c_grid != d.c_grid) opt("--C", join(c_grid));
    if (sigma_grid != d.sigma_grid) opt("--sigma-grid", join(sigma_grid));
    if (folds != d.folds) opt("--folds", std::to_string(folds));
  }
  if (command == "svm") {
    if (transform != d.transform) opt("--kernel", transform);
    if (conditioning != d.conditioning) opt("--condition", conditioning);
  }
  if (command == "segment") {
    opt("--k", join(ks));
    if (norm != d.norm) opt("--norm", norm);
    if (neighbor != d.neighbor) opt("--mode", neighbor);
    if (epsilon) opt("--eps", shortest(*epsilon));
    opt("--in", in_path);
  }
  if (!out_path.empty()) opt("--out", out_path);
  return a;
}

RunConfig parse_args(const std::vector<std::string>& args) {
  RunConfig cfg;
  Bindings b;
  build(b, cfg);
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    b.app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    std::string help = b.app.help();
    for (CLI::App* c : b.commands) {
      if (c->parsed()) help = c->help();
    }
    throw HelpRequested(help);
  } catch (const CLI::CallForAllHelp&) {
    throw HelpRequested(b.app.help("", CLI::AppFormatMode::All));
  } catch (const CLI::ParseError& e) {
    std::string usage = b.app.help();
    for (CLI::App* c : b.commands) {
      if (c->parsed()) usage = c->help();
    }
    throw UsageError(std::string(e.get_name()) + ": " + e.what() + "\n" + usage);
  }
  for (CLI::App* c : b.commands) {
    if (c->parsed()) cfg.command = c->get_name();
  }
  if (!cfg.spec_text.empty()) {
    cfg.spec = parse_spec(cfg.spec_text);
    if (cfg.literal_skew) cfg.spec.skew = SkewMode::Literal;
  }
  return cfg;
}

int run(const RunConfig& config, std::ostream& out, std::ostream& /*err*/) {
  if (config.command == "div") return run_div(config, out);
  if (config.command == "gram") return run_gram(config, out);
  if (config.command == "probe") return run_probe(config, out);
  if (config.command == "svm") return run_svm(config, out);
  if (config.command == "segment") return run_segment(config, out);
  if (config.command == "bench") return run_bench_command(config, out);
  throw UsageError("unknown command '" + config.command + "'");
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = parse_args(args);
  } catch (const HelpRequested& h) {
    out << h.what();
    return static_cast<int>(ExitCode::Success);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Usage);
  }
  try {
    return run(cfg, out, err);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Usage);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::Data);
  }
}

}  // namespace abdiv::cli
