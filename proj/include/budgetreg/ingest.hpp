#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "budgetreg/core.hpp"

namespace budgetreg {

/// Comma-separated ASCII decimals, optional single header line, one label
/// column (default: last). No quoting. Throws std::runtime_error naming the
/// offending line for ragged rows, non-numeric cells and empty input.
Dataset parse_csv(std::istream& in, bool has_header = false,
                  std::optional<std::size_t> label_column = std::nullopt,
                  const std::string& source = "<stream>");
Dataset load_csv(const std::filesystem::path& path, bool has_header = false,
                 std::optional<std::size_t> label_column = std::nullopt);

/// Attributes then label, 17 significant digits, no header.
void write_csv(const Dataset& dataset, std::ostream& out);
void write_csv(const Dataset& dataset, const std::filesystem::path& path);

/// Round-trip safe decimal rendering (17 significant digits).
std::string format_number(double value);

/// Labels equal to positive_class become +1, all others -1. When keep is
/// given, rows whose label is not listed are dropped first.
Dataset binarize_labels(const Dataset& dataset, double positive_class,
                        const std::optional<std::vector<double>>& keep = std::nullopt);

struct NormalizeResult {
  Dataset dataset;
  /// Examples that fell outside the ball after scaling and were rescaled
  /// individually onto its boundary.
  std::size_t rescaled = 0;
};

/// Scaling fitted on a training split: one global factor (max ||x||_2) in
/// the l2 regime, one factor per column (max |x_i|) in the linf regime.
class Normalizer {
 public:
  static Normalizer fit(const Dataset& train, Regime regime);

  NormalizeResult apply(const Dataset& dataset) const;

  Regime regime() const { return regime_; }
  const std::vector<double>& scales() const { return scales_; }

 private:
  Regime regime_ = Regime::l2;
  std::vector<double> scales_;
};

/// Fit and apply on the same data.
Dataset normalize(const Dataset& dataset, Regime regime);

/// True when every example already lies in the unit ball of the regime.
bool inside_unit_ball(const Dataset& dataset, Regime regime);

}  // namespace budgetreg
