#include "svgauge/correlation.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>

#include "svgauge/error.h"

namespace svgauge {
namespace {

void CheckInputs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "correlation inputs have lengths " +
                                                std::to_string(x.size()) + " and " +
                                                std::to_string(y.size()));
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::kTooFew, "correlation needs at least 2 points");
  }
  for (size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
      throw Error(ErrorCode::kSchemaViolation, "non-finite correlation input");
    }
  }
}

double Clamp1(double r) { return std::clamp(r, -1.0, 1.0); }

// Pairs tied in a run of equal values: sum of t(t-1)/2.
int64_t TiedPairs(std::span<const double> sorted) {
  int64_t total = 0;
  size_t run = 1;
  for (size_t i = 1; i <= sorted.size(); ++i) {
    if (i < sorted.size() && sorted[i] == sorted[i - 1]) {
      ++run;
    } else {
      total += static_cast<int64_t>(run) * static_cast<int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  return total;
}

// Stable merge sort counting inversions (strict a[i] > a[j], i < j).
int64_t SortCountingSwaps(std::vector<double>& a, std::vector<double>& buf, size_t lo,
                          size_t hi) {
  if (hi - lo < 2) return 0;
  const size_t mid = lo + (hi - lo) / 2;
  int64_t swaps = SortCountingSwaps(a, buf, lo, mid) + SortCountingSwaps(a, buf, mid, hi);
  size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (a[j] < a[i]) {
      swaps += static_cast<int64_t>(mid - i);
      buf[k++] = a[j++];
    } else {
      buf[k++] = a[i++];
    }
  }
  while (i < mid) buf[k++] = a[i++];
  while (j < hi) buf[k++] = a[j++];
  std::copy(buf.begin() + lo, buf.begin() + hi, a.begin() + lo);
  return swaps;
}

std::optional<double> PearsonUnchecked(std::span<const double> x, std::span<const double> y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx, dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0 || syy == 0) return std::nullopt;
  return Clamp1(sxy / std::sqrt(sxx * syy));
}

}  // namespace

std::vector<double> MidRanks(std::span<const double> x) {
  std::vector<size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i + 1;
    while (j < order.size() && x[order[j]] == x[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of i+1 … j
    for (size_t k = i; k < j; ++k) ranks[order[k]] = rank;
    i = j;
  }
  return ranks;
}

std::optional<double> Pearson(std::span<const double> x, std::span<const double> y) {
  CheckInputs(x, y);
  return PearsonUnchecked(x, y);
}

std::optional<double> Spearman(std::span<const double> x, std::span<const double> y) {
  CheckInputs(x, y);
  const std::vector<double> rx = MidRanks(x), ry = MidRanks(y);
  return PearsonUnchecked(rx, ry);
}

std::optional<double> KendallTauB(std::span<const double> x, std::span<const double> y) {
  CheckInputs(x, y);
  const size_t n = x.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) {
    return x[a] < x[b] || (x[a] == x[b] && y[a] < y[b]);
  });
  std::vector<double> xs(n), ys(n);
  for (size_t i = 0; i < n; ++i) {
    xs[i] = x[order[i]];
    ys[i] = y[order[i]];
  }

  const int64_t n0 = static_cast<int64_t>(n) * static_cast<int64_t>(n - 1) / 2;
  const int64_t n1 = TiedPairs(xs);
  int64_t n3 = 0;  // tied in both
  size_t run = 1;
  for (size_t i = 1; i <= n; ++i) {
    if (i < n && xs[i] == xs[i - 1] && ys[i] == ys[i - 1]) {
      ++run;
    } else {
      n3 += static_cast<int64_t>(run) * static_cast<int64_t>(run - 1) / 2;
      run = 1;
    }
  }
  std::vector<double> buf(n);
  const int64_t swaps = SortCountingSwaps(ys, buf, 0, n);
  const int64_t n2 = TiedPairs(ys);

  const int64_t tx = n0 - n1, ty = n0 - n2;
  if (tx == 0 || ty == 0) return std::nullopt;
  const int64_t s = n0 - n1 - n2 + n3 - 2 * swaps;  // concordant minus discordant
  return Clamp1(static_cast<double>(s) /
                std::sqrt(static_cast<double>(tx) * static_cast<double>(ty)));
}

CorrelationTriple Correlations(std::span<const double> x, std::span<const double> y) {
  CheckInputs(x, y);
  return {Spearman(x, y), KendallTauB(x, y), Pearson(x, y)};
}

nlohmann::ordered_json TripleToJson(const CorrelationTriple& t, bool raw) {
  const double scale = raw ? 1.0 : 100.0;
  auto put = [&](const std::optional<double>& v) {
    return v ? nlohmann::ordered_json(*v * scale) : nlohmann::ordered_json(nullptr);
  };
  nlohmann::ordered_json j;
  j["spearman"] = put(t.spearman);
  j["kendall"] = put(t.kendall);
  j["pearson"] = put(t.pearson);
  return j;
}

}  // namespace svgauge
