#ifndef SVGAUGE_TESTS_TESTING_ORACLES_H_
#define SVGAUGE_TESTS_TESTING_ORACLES_H_

// Slow, independent reference implementations used only by tests.

#include <optional>
#include <vector>

namespace svgauge::testing {

using Matrix = std::vector<std::vector<double>>;

struct EigenPairs {
  std::vector<double> values;  // descending
  Matrix vectors;              // vectors[k] pairs with values[k]
};

// Cyclic Jacobi rotations on a symmetric matrix.
EigenPairs JacobiEigen(Matrix a, double tol = 1e-15, int max_sweeps = 100);

// Population covariance (divisor n) of row-vector samples.
Matrix Covariance(const Matrix& samples);

// rank_i = 1 + #{x_j < x_i} + (#{x_j == x_i} - 1) / 2
std::vector<double> BruteMidRanks(const std::vector<double>& x);

std::optional<double> BrutePearson(const std::vector<double>& x, const std::vector<double>& y);
std::optional<double> BruteSpearman(const std::vector<double>& x, const std::vector<double>& y);
// Enumerates all n(n-1)/2 pairs.
std::optional<double> BruteTauB(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace svgauge::testing

#endif  // SVGAUGE_TESTS_TESTING_ORACLES_H_
