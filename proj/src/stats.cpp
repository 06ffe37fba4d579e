// Copyright 2026 The wfcfuzz Authors
// SPDX-License-Identifier: Apache-2.0

#include "wfc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <sstream>

namespace wfc::stats {

namespace {

constexpr double kEpsilon = 1e-15;
constexpr int kMaxIterations = 1000;

double gamma_p_series(double a, double x) {
  double sum = 1.0 / a;
  double term = sum;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEpsilon) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double gamma_q_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEpsilon;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  bool quoted = false;
  for (char c : line) {
    if (c == '"') {
      quoted = !quoted;
    } else if (c == ',' && !quoted) {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  return out;
}

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

}  // namespace

void ResultMatrix::validate() const {
  if (values.size() != rows.size()) throw std::invalid_argument("row labels do not match row count");
  for (const auto& row : values) {
    if (row.size() != cols.size()) throw std::invalid_argument("matrix is not rectangular");
    for (double v : row) {
      if (std::isnan(v)) throw std::invalid_argument("matrix has a missing cell");
    }
  }
}

std::vector<double> rank_row(const std::vector<double>& row, Direction direction) {
  std::vector<std::size_t> order(row.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return direction == Direction::kHigherBetter ? row[a] > row[b] : row[a] < row[b];
  });
  std::vector<double> ranks(row.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && row[order[j + 1]] == row[order[i]]) ++j;
    double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = shared;
    i = j + 1;
  }
  return ranks;
}

RankMatrix rank_rows(const ResultMatrix& m) {
  m.validate();
  RankMatrix r{m.rows, m.cols, {}};
  for (const auto& row : m.values) r.ranks.push_back(rank_row(row, m.direction));
  return r;
}

FriedmanResult friedman(const RankMatrix& r) {
  const double n = static_cast<double>(r.ranks.size());
  const double k = static_cast<double>(r.cols.size());
  if (r.ranks.size() < 2 || r.cols.size() < 2) throw DegenerateInput("friedman needs at least 2 rows and 2 columns");
  std::vector<double> sums(r.cols.size(), 0.0);
  double squares = 0;
  for (const auto& row : r.ranks) {
    if (row.size() != r.cols.size()) throw std::invalid_argument("rank matrix is not rectangular");
    for (std::size_t j = 0; j < row.size(); ++j) {
      sums[j] += row[j];
      squares += row[j] * row[j];
    }
  }
  double sum_sq = 0;
  for (double s : sums) sum_sq += s * s;
  const double c = n * k * (k + 1) * (k + 1) / 4.0;
  const double denominator = squares - c;
  if (std::fabs(denominator) < 1e-12) throw DegenerateInput("every row is fully tied");
  FriedmanResult out;
  out.df = static_cast<int>(k) - 1;
  out.chi2 = (k - 1) * (sum_sq - n * c) / denominator;
  out.p = chi_square_sf(out.chi2, out.df);
  return out;
}

double mann_whitney_u(const std::vector<double>& xs, const std::vector<double>& ys) {
  double u = 0;
  for (double x : xs) {
    for (double y : ys) {
      if (x > y) {
        u += 1;
      } else if (x == y) {
        u += 0.5;
      }
    }
  }
  return u;
}

double a12(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("a12 needs non-empty samples");
  return mann_whitney_u(xs, ys) / (static_cast<double>(xs.size()) * static_cast<double>(ys.size()));
}

double mann_whitney_p(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.empty() || ys.empty()) throw std::invalid_argument("mann_whitney_p needs non-empty samples");
  const std::size_t n = xs.size();
  const std::size_t m = ys.size();
  const double center = static_cast<double>(n * m) / 2.0;
  const double observed = std::fabs(mann_whitney_u(xs, ys) - center);

  std::vector<double> pooled(xs);
  pooled.insert(pooled.end(), ys.begin(), ys.end());
  const std::size_t total = pooled.size();

  if (total <= kExactLimit) {
    // Every way of labelling n of the pooled values as "x".
    std::vector<bool> mask(total, false);
    std::fill(mask.begin(), mask.begin() + static_cast<std::ptrdiff_t>(n), true);
    std::size_t extreme = 0;
    std::size_t splits = 0;
    std::vector<double> a;
    std::vector<double> b;
    do {
      a.clear();
      b.clear();
      for (std::size_t i = 0; i < total; ++i) (mask[i] ? a : b).push_back(pooled[i]);
      if (std::fabs(mann_whitney_u(a, b) - center) >= observed - 1e-9) ++extreme;
      ++splits;
    } while (std::prev_permutation(mask.begin(), mask.end()));
    return static_cast<double>(extreme) / static_cast<double>(splits);
  }

  std::vector<double> sorted(pooled);
  std::sort(sorted.begin(), sorted.end());
  double tie_term = 0;
  for (std::size_t i = 0; i < total;) {
    std::size_t j = i;
    while (j < total && sorted[j] == sorted[i]) ++j;
    double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    i = j;
  }
  const double nn = static_cast<double>(total);
  const double variance =
      static_cast<double>(n * m) / 12.0 * ((nn + 1.0) - tie_term / (nn * (nn - 1.0)));
  if (variance <= 0) return 1.0;
  const double z = std::max(0.0, observed - 0.5) / std::sqrt(variance);
  return std::min(1.0, std::erfc(z / std::sqrt(2.0)));
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double median(std::vector<double> xs) {
  if (xs.empty()) return 0;
  std::sort(xs.begin(), xs.end());
  std::size_t mid = xs.size() / 2;
  return xs.size() % 2 == 1 ? xs[mid] : (xs[mid - 1] + xs[mid]) / 2.0;
}

std::vector<ColumnSummary> summarize(const ResultMatrix& m, const RankMatrix& ranks) {
  m.validate();
  std::vector<ColumnSummary> out;
  for (std::size_t j = 0; j < m.cols.size(); ++j) {
    std::vector<double> values;
    std::vector<double> col_ranks;
    for (std::size_t i = 0; i < m.values.size(); ++i) {
      values.push_back(m.values[i][j]);
      col_ranks.push_back(ranks.ranks.at(i).at(j));
    }
    out.push_back({m.cols[j], mean(values), median(values), mean(col_ranks), median(col_ranks)});
  }
  return out;
}

std::vector<ColumnSummary> summarize(const ResultMatrix& m) { return summarize(m, rank_rows(m)); }

double regularized_gamma_p(double a, double x) {
  if (a <= 0 || x < 0) throw std::invalid_argument("regularized_gamma_p needs a > 0 and x >= 0");
  if (x == 0) return 0;
  if (x < a + 1) return gamma_p_series(a, x);
  return 1.0 - gamma_q_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  if (a <= 0 || x < 0) throw std::invalid_argument("regularized_gamma_q needs a > 0 and x >= 0");
  if (x == 0) return 1;
  if (x < a + 1) return 1.0 - gamma_p_series(a, x);
  return gamma_q_fraction(a, x);
}

double chi_square_cdf(double x, double df) { return x <= 0 ? 0.0 : regularized_gamma_p(df / 2.0, x / 2.0); }

double chi_square_sf(double x, double df) { return x <= 0 ? 1.0 : regularized_gamma_q(df / 2.0, x / 2.0); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

Table parse_table_csv(std::string_view text, Direction direction) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    if (!line.empty() && line != "\r") {
      header = split_csv_line(line);
      break;
    }
  }
  if (header.size() < 2) throw std::invalid_argument("table needs a label column and at least one data column");

  Table table;
  table.values.direction = direction;
  RankMatrix ranks;
  std::vector<int> role(header.size(), 0);  // 1 value, 2 rank
  for (std::size_t c = 1; c < header.size(); ++c) {
    const auto& name = header[c];
    auto colon = name.rfind(':');
    std::string suffix = colon == std::string::npos ? "" : name.substr(colon + 1);
    if (suffix == "rank") {
      role[c] = 2;
      ranks.cols.push_back(name.substr(0, colon));
    } else {
      role[c] = 1;
      table.values.cols.push_back(suffix == "value" ? name.substr(0, colon) : name);
    }
  }

  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw std::invalid_argument("ragged row: " + line);
    std::vector<double> values;
    std::vector<double> row_ranks;
    for (std::size_t c = 1; c < cells.size(); ++c) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(cells[c], &used);
      } catch (const std::exception&) {
        throw std::invalid_argument("non-numeric cell '" + cells[c] + "' in row " + cells[0]);
      }
      if (used != cells[c].size()) throw std::invalid_argument("non-numeric cell '" + cells[c] + "'");
      (role[c] == 2 ? row_ranks : values).push_back(v);
    }
    table.values.rows.push_back(cells[0]);
    table.values.values.push_back(std::move(values));
    ranks.rows.push_back(cells[0]);
    ranks.ranks.push_back(std::move(row_ranks));
  }
  table.values.validate();
  if (!ranks.cols.empty()) table.ranks = std::move(ranks);
  return table;
}

std::string format_summary(const Table& table) {
  RankMatrix ranks = table.ranks ? *table.ranks : rank_rows(table.values);
  auto summary = summarize(table.values, ranks);
  std::ostringstream out;
  out << "SUT";
  for (const auto& s : summary) out << "," << s.label;
  out << "\nAverage";
  for (const auto& s : summary) out << "," << format_number(s.mean) << " (" << format_number(s.mean_rank) << ")";
  out << "\nMedian";
  for (const auto& s : summary) out << "," << format_number(s.median) << " (" << format_number(s.median_rank) << ")";
  out << "\n";
  try {
    auto f = friedman(ranks);
    char buf[96];
    std::snprintf(buf, sizeof buf, "Friedman chi2 = %.3f, df = %d, p = %.3g\n", f.chi2, f.df, f.p);
    out << buf;
  } catch (const DegenerateInput& e) {
    out << "Friedman not applicable: " << e.what() << "\n";
  }
  return out.str();
}

}  // namespace wfc::stats
