#include "abdiv/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <random>
#include <sstream>

#include <json.hpp>

namespace abdiv {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      break;
    }
    out.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

std::optional<double> parse_real(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

RawDataset parse_csv_dataset(std::string_view text, std::optional<std::string_view> label_column,
                             std::string_view positive_label) {
  std::vector<std::string_view> lines;
  {
    std::size_t start = 0;
    while (start <= text.size()) {
      std::size_t nl = text.find('\n', start);
      if (nl == std::string_view::npos) nl = text.size();
      lines.push_back(text.substr(start, nl - start));
      start = nl + 1;
    }
  }
  // Drop trailing blank lines.
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) throw DataError(0, 0, "CSV input is empty; a header row is required");

  const auto header = split_fields(lines.front());
  std::optional<std::size_t> label_idx;
  if (label_column) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (header[c] == *label_column) label_idx = c;
    }
    if (!label_idx) {
      throw DataError(1, 0, "label column '" + std::string(*label_column) + "' not found in the header");
    }
  }

  RawDataset out;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!label_idx || c != *label_idx) out.column_names.emplace_back(header[c]);
  }
  if (out.column_names.empty()) throw DataError(1, 0, "CSV has no feature columns");

  std::vector<std::vector<double>> rows;
  std::vector<int> labels;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const std::size_t line_no = r + 1;
    if (trim(lines[r]).empty()) throw DataError(line_no, 0, "empty row at line " + std::to_string(line_no));
    const auto fields = split_fields(lines[r]);
    if (fields.size() != header.size()) {
      std::ostringstream os;
      os << "ragged row at line " << line_no << ": " << fields.size() << " fields, header has " << header.size();
      throw DataError(line_no, 0, os.str());
    }
    std::vector<double> row;
    row.reserve(out.column_names.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (label_idx && c == *label_idx) {
        labels.push_back(fields[c] == positive_label ? 1 : -1);
        continue;
      }
      const auto v = parse_real(fields[c]);
      if (!v) {
        std::ostringstream os;
        os << "non-numeric value '" << fields[c] << "' at line " << line_no << ", column " << (c + 1);
        throw DataError(line_no, c + 1, os.str());
      }
      row.push_back(*v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError(0, 0, "CSV has a header but no data rows");

  out.features.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(out.column_names.size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      out.features(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  if (label_idx) out.labels = std::move(labels);
  return out;
}

RawDataset load_csv_dataset(const std::filesystem::path& path, std::optional<std::string_view> label_column,
                            std::string_view positive_label) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(0, 0, "cannot open dataset " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_csv_dataset(text, label_column, positive_label);
}

std::vector<DiscreteDensity> to_densities(const RawDataset& data, DensityMode mode, double epsilon) {
  if (!(epsilon > 0.0)) throw DataError(0, 0, "density epsilon must be positive");
  std::vector<DiscreteDensity> out;
  out.reserve(static_cast<std::size_t>(data.rows()));
  for (Eigen::Index r = 0; r < data.rows(); ++r) {
    std::vector<double> v(static_cast<std::size_t>(data.cols()));
    double raw_sum = 0.0;
    for (Eigen::Index c = 0; c < data.cols(); ++c) {
      raw_sum += data.features(r, c);
      v[static_cast<std::size_t>(c)] = std::max(data.features(r, c), epsilon);
    }
    if (mode == DensityMode::Simplex) {
      if (raw_sum == 0.0) {
        throw DataError(static_cast<std::size_t>(r) + 1, 0,
                        "row " + std::to_string(r + 1) + " sums to zero and cannot be normalized");
      }
      double s = 0.0;
      for (double x : v) s += x;
      for (double& x : v) x /= s;
    }
    out.push_back(DiscreteDensity::with_unit_weights(std::move(v)));
  }
  return out;
}

LabeledDataset to_labeled(const RawDataset& data, DensityMode mode, double epsilon) {
  if (!data.labels) throw DataError(0, 0, "dataset has no label column");
  LabeledDataset out{to_densities(data, mode, epsilon), *data.labels};
  out.validate();
  return out;
}

SynthConfig load_synth_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError(0, 0, "cannot open synthetic config " + path.string());
  SynthConfig cfg;
  try {
    const auto j = nlohmann::json::parse(in);
    if (j.contains("n_per_class")) cfg.n_per_class = j.at("n_per_class").get<std::size_t>();
    if (j.contains("concentration_a")) cfg.concentration_a = j.at("concentration_a").get<std::vector<double>>();
    if (j.contains("concentration_b")) cfg.concentration_b = j.at("concentration_b").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw DataError(0, 0, "invalid synthetic config " + path.string() + ": " + e.what());
  }
  return cfg;
}

LabeledDataset synth_two_class(std::size_t n_per_class, std::span<const double> concentration_a,
                               std::span<const double> concentration_b, std::uint64_t seed) {
  if (concentration_a.size() < 2) throw std::invalid_argument("synthetic generator needs at least two atoms");
  if (concentration_a.size() != concentration_b.size()) {
    throw std::invalid_argument("concentration vectors differ in length");
  }
  for (std::size_t j = 0; j < concentration_a.size(); ++j) {
    if (!(concentration_a[j] > 0.0) || !(concentration_b[j] > 0.0) || !std::isfinite(concentration_a[j]) ||
        !std::isfinite(concentration_b[j])) {
      throw std::invalid_argument("concentrations must be finite and positive");
    }
  }
  if (n_per_class == 0) throw std::invalid_argument("synthetic generator needs n_per_class >= 1");

  std::mt19937_64 rng(seed);
  LabeledDataset out;
  auto draw_class = [&](std::span<const double> conc, int label) {
    for (std::size_t k = 0; k < n_per_class; ++k) {
      std::vector<double> v(conc.size());
      double s = 0.0;
      for (std::size_t j = 0; j < conc.size(); ++j) {
        std::gamma_distribution<double> gamma(conc[j], 1.0);
        do {
          v[j] = gamma(rng);
        } while (!(v[j] > 0.0));
        s += v[j];
      }
      for (double& x : v) x /= s;
      out.densities.push_back(DiscreteDensity::with_unit_weights(std::move(v)));
      out.labels.push_back(label);
    }
  };
  draw_class(concentration_a, 1);
  draw_class(concentration_b, -1);
  return out;
}

LabeledDataset synth_two_class(const SynthConfig& config, std::uint64_t seed) {
  return synth_two_class(config.n_per_class, config.concentration_a, config.concentration_b, seed);
}

std::filesystem::path data_directory() {
  if (const char* env = std::getenv("ABDIV_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return ABDIV_SOURCE_DATA_DIR;
}

}  // namespace abdiv
