#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "abdiv/divergence.hpp"

namespace abdiv::cli {

enum class ExitCode : int { Success = 0, Usage = 1, Data = 2, NonConvergence = 3 };

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// `--help` was requested; `what()` is the help text.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Accepts a table name ("hellinger", "s-euclidean", "itakura-saito", ...),
/// `ab:a,b`, `abs:a,b`, `dt:t`, a bare `a,b` (symmetric family) or a bare `t`.
DivergenceSpec parse_spec(std::string_view text);

struct RunConfig {
  std::string command;  // div | gram | probe | svm | segment | bench
  std::string spec_text;
  DivergenceSpec spec{};
  bool literal_skew = false;
  std::optional<std::uint64_t> seed;

  // div
  std::optional<double> x, y;
  std::string p, q, weights;  // comma lists

  // gram / probe
  std::string kernel_mode = "cpd";  // cpd | lemma | gaussian
  std::optional<double> sigma;
  std::size_t n = 20;
  std::size_t trials = 50;
  std::size_t atoms = 8;
  double tol = 1e-8;

  // svm / bench / gram data
  std::string data = "synth";  // synth | cats | gene
  std::string gene_path;
  std::string label_column = "label";
  std::string positive_label = "B";
  std::string density;  // simplex | raw, empty = dataset default
  std::string transform = "gaussian";  // direct | gaussian
  std::vector<double> c_grid{1.0, 10.0, 100.0};
  std::vector<double> sigma_grid{0.5, 1.5};
  std::size_t folds = 5;
  std::string conditioning = "clip";  // none | clip | jitter

  // segment
  std::vector<double> ks;
  std::string norm = "raw";      // raw | unit
  std::string neighbor = "literal";  // literal | current
  std::optional<double> epsilon;
  std::string in_path;

  std::string out_path;

  /// argv (without program name) that parses back to this config.
  std::vector<std::string> render() const;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Throws UsageError (with the offending token and usage) or HelpRequested.
RunConfig parse_args(const std::vector<std::string>& args);

/// Executes one command; returns the process exit code.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + run with error-to-exit-code mapping.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace abdiv::cli
