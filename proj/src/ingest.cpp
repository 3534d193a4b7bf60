#include "budgetreg/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <stdexcept>
#include <string_view>

namespace budgetreg {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      return cells;
    }
    cells.push_back(trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

double parse_cell(std::string_view cell, std::size_t line_no, std::size_t column) {
  std::string_view text = cell;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (cell.empty() || ec != std::errc() || ptr != text.data() + text.size() ||
      !std::isfinite(value)) {
    throw std::runtime_error("line " + std::to_string(line_no) + ", column " +
                             std::to_string(column + 1) + ": non-numeric cell '" +
                             std::string(cell) + "'");
  }
  return value;
}

}  // namespace

Dataset parse_csv(std::istream& in, bool has_header, std::optional<std::size_t> label_column,
                  const std::string& source) {
  Dataset dataset;
  std::string line;
  std::size_t line_no = 0;
  std::size_t columns = 0;
  std::size_t label = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    if (header_pending) {
      header_pending = false;
      continue;
    }
    const auto cells = split_cells(line);
    if (columns == 0) {
      columns = cells.size();
      if (columns < 2) {
        throw std::runtime_error(source + ": line " + std::to_string(line_no) +
                                 ": need at least one attribute and a label");
      }
      label = label_column.value_or(columns - 1);
      if (label >= columns) {
        throw std::runtime_error(source + ": label column " + std::to_string(label + 1) +
                                 " out of range (" + std::to_string(columns) + " columns)");
      }
      dataset.dim = columns - 1;
    } else if (cells.size() != columns) {
      throw std::runtime_error(source + ": line " + std::to_string(line_no) + ": expected " +
                               std::to_string(columns) + " columns, got " +
                               std::to_string(cells.size()));
    }
    Example ex;
    ex.x.reserve(dataset.dim);
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value = 0.0;
      try {
        value = parse_cell(cells[c], line_no, c);
      } catch (const std::runtime_error& err) {
        throw std::runtime_error(source + ": " + err.what());
      }
      if (c == label) {
        ex.y = value;
      } else {
        ex.x.push_back(value);
      }
    }
    dataset.examples.push_back(std::move(ex));
  }
  if (dataset.examples.empty()) throw std::runtime_error(source + ": empty file");
  return dataset;
}

Dataset load_csv(const std::filesystem::path& path, bool has_header,
                 std::optional<std::size_t> label_column) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  return parse_csv(in, has_header, label_column, path.string());
}

std::string format_number(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_csv(const Dataset& dataset, std::ostream& out) {
  for (const Example& ex : dataset.examples) {
    for (double value : ex.x) out << format_number(value) << ',';
    out << format_number(ex.y) << '\n';
  }
}

void write_csv(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  write_csv(dataset, out);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

Dataset binarize_labels(const Dataset& dataset, double positive_class,
                        const std::optional<std::vector<double>>& keep) {
  Dataset out;
  out.dim = dataset.dim;
  out.regime = dataset.regime;
  std::set<double> distinct;
  bool positive_seen = false;
  for (const Example& ex : dataset.examples) {
    if (keep && std::find(keep->begin(), keep->end(), ex.y) == keep->end()) continue;
    distinct.insert(ex.y);
    positive_seen = positive_seen || ex.y == positive_class;
    Example copy = ex;
    copy.y = ex.y == positive_class ? 1.0 : -1.0;
    out.examples.push_back(std::move(copy));
  }
  if (distinct.size() < 2) throw std::invalid_argument("labels take fewer than two distinct values");
  if (!positive_seen) throw std::invalid_argument("positive class absent");
  return out;
}

Normalizer Normalizer::fit(const Dataset& train, Regime regime) {
  if (train.empty()) throw std::invalid_argument("cannot normalize an empty dataset");
  Normalizer n;
  n.regime_ = regime;
  if (regime == Regime::l2) {
    double largest = 0.0;
    for (const Example& ex : train.examples) largest = std::max(largest, norm(ex.x, NormKind::two));
    if (largest == 0.0) throw std::invalid_argument("all-zero dataset");
    n.scales_.assign(1, largest);
  } else {
    n.scales_.assign(train.dim, 0.0);
    for (const Example& ex : train.examples) {
      for (std::size_t i = 0; i < train.dim; ++i) {
        n.scales_[i] = std::max(n.scales_[i], std::abs(ex.x[i]));
      }
    }
    if (std::all_of(n.scales_.begin(), n.scales_.end(), [](double s) { return s == 0.0; })) {
      throw std::invalid_argument("all-zero dataset");
    }
    // Columns that are identically zero in training stay unscaled.
    for (double& s : n.scales_) {
      if (s == 0.0) s = 1.0;
    }
  }
  return n;
}

NormalizeResult Normalizer::apply(const Dataset& dataset) const {
  NormalizeResult out;
  out.dataset.dim = dataset.dim;
  out.dataset.regime = regime_;
  out.dataset.examples.reserve(dataset.size());
  if (regime_ == Regime::linf && scales_.size() != dataset.dim) {
    throw std::invalid_argument("normalizer fitted on a different dimension");
  }
  const NormKind ball = regime_ == Regime::l2 ? NormKind::two : NormKind::inf;
  for (const Example& ex : dataset.examples) {
    Example scaled = ex;
    for (std::size_t i = 0; i < scaled.x.size(); ++i) {
      scaled.x[i] /= regime_ == Regime::l2 ? scales_[0] : scales_[i];
    }
    const double length = norm(scaled.x, ball);
    if (length > 1.0 + kBallTolerance) {
      for (double& v : scaled.x) v /= length;
      ++out.rescaled;
    }
    out.dataset.examples.push_back(std::move(scaled));
  }
  return out;
}

Dataset normalize(const Dataset& dataset, Regime regime) {
  return Normalizer::fit(dataset, regime).apply(dataset).dataset;
}

bool inside_unit_ball(const Dataset& dataset, Regime regime) {
  const NormKind ball = regime == Regime::l2 ? NormKind::two : NormKind::inf;
  return std::all_of(dataset.examples.begin(), dataset.examples.end(), [&](const Example& ex) {
    return norm(ex.x, ball) <= 1.0 + kBallTolerance;
  });
}

}  // namespace budgetreg
