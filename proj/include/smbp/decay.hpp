#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace smbp {

enum class DecayClass { none, exponential, super_exponential, hyper_exponential };

std::string_view to_string(DecayClass c);

/// Tail statistics of an eigenvalue sequence, indexed by d = 1..p-1 where p
/// is the length of the strictly positive prefix.
///
///   exponential[d-1] = lambda_d^-1 * sum_{j>d} lambda_j
///   ratio[d-1]       = lambda_{d+1} / lambda_d
///   hyper[d-1]       = d * (sum_{j>d} lambda_j) * (sum_{j<=d} 1/lambda_j)
///
/// The limit conditions are judged on the last ceil(25%) of the d range.
struct DecayReport {
  std::vector<double> exponential;
  std::vector<double> ratio;
  std::vector<double> hyper;
  double C = 1.0 / 3.0;
  double tail_tol = 0.05;
  std::size_t tail_begin = 0;  // first d (1-based) of the judged tail

  bool exponential_test = false;  // sup_d exponential < C
  bool super_test = false;        // tail of ratio < tail_tol
  bool hyper_test = false;        // tail of hyper < tail_tol

  /// Strongest regime whose test and all weaker tests pass.
  DecayClass classification = DecayClass::none;
};

DecayReport classify_decay(std::span<const double> eigenvalues, double C = 1.0 / 3.0,
                           double tail_tol = 0.05);

/// Volume of the d-dimensional ball of the given radius, via log-Gamma.
double ball_volume(std::size_t d, double radius);

}  // namespace smbp
