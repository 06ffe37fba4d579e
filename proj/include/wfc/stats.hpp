// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace wfc::stats {

enum class Direction { kHigherBetter, kLowerBetter };

/// Blocks (rows, e.g. APIs) by treatments (columns, e.g. tools).
struct ResultMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> values;
  Direction direction = Direction::kHigherBetter;

  /// Throws std::invalid_argument unless rectangular and labelled.
  void validate() const;
};

struct RankMatrix {
  std::vector<std::string> rows;
  std::vector<std::string> cols;
  std::vector<std::vector<double>> ranks;
};

class DegenerateInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Rank 1 is the best value; tied values share the mean of their ranks.
std::vector<double> rank_row(const std::vector<double>& row, Direction direction);
RankMatrix rank_rows(const ResultMatrix& m);

struct FriedmanResult {
  double chi2 = 0;
  double p = 1;
  int df = 0;
};

/// Tie-corrected Friedman statistic with a chi-square(k-1) p-value.
FriedmanResult friedman(const RankMatrix& r);

/// Vargha-Delaney A: P(X > Y) + 0.5 P(X == Y) over all pairs.
double a12(const std::vector<double>& xs, const std::vector<double>& ys);

/// Mann-Whitney U of `xs`: #{x > y} + 0.5 #{x == y}.
double mann_whitney_u(const std::vector<double>& xs, const std::vector<double>& ys);

inline constexpr std::size_t kExactLimit = 12;

/// Two-sided p-value. Exact enumeration of all label splits when
/// |xs| + |ys| <= kExactLimit, else the normal approximation with tie and
/// continuity corrections.
double mann_whitney_p(const std::vector<double>& xs, const std::vector<double>& ys);

struct ColumnSummary {
  std::string label;
  double mean = 0;
  double median = 0;
  double mean_rank = 0;
  double median_rank = 0;
};

std::vector<ColumnSummary> summarize(const ResultMatrix& m);
/// Same, with ranks taken from `ranks` instead of recomputed.
std::vector<ColumnSummary> summarize(const ResultMatrix& m, const RankMatrix& ranks);

double mean(const std::vector<double>& xs);
/// Midpoint mean for even lengths.
double median(std::vector<double> xs);

/// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

double chi_square_cdf(double x, double df);
double chi_square_sf(double x, double df);
double normal_cdf(double z);

/// A CSV table whose first column labels rows. Columns named `T:rank` fill
/// the rank matrix; `T:value` or plain `T` fill the values.
struct Table {
  ResultMatrix values;
  std::optional<RankMatrix> ranks;
};

Table parse_table_csv(std::string_view text, Direction direction);

/// The Average/Median footer in `value (rank)` form plus the Friedman line.
std::string format_summary(const Table& table);

}  // namespace wfc::stats
