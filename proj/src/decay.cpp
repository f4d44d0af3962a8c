#include "smbp/decay.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "smbp/error.hpp"

namespace smbp {

std::string_view to_string(DecayClass c) {
  switch (c) {
    case DecayClass::hyper_exponential: return "hyper";
    case DecayClass::super_exponential: return "super";
    case DecayClass::exponential: return "exponential";
    case DecayClass::none: break;
  }
  return "none";
}

DecayReport classify_decay(std::span<const double> eigenvalues, double C, double tail_tol) {
  if (!(C > 0.0) || !(tail_tol > 0.0)) {
    throw Error(ErrorCode::invalid_input, "decay constants C and tail_tol must be positive");
  }
  std::size_t p = 0;
  while (p < eigenvalues.size() && eigenvalues[p] > 0.0) ++p;
  if (p < 4) {
    throw Error(ErrorCode::insufficient_spectrum,
                "decay diagnostics need at least 4 positive eigenvalues, got " + std::to_string(p));
  }
  for (std::size_t j = 1; j < p; ++j) {
    if (eigenvalues[j] > eigenvalues[j - 1]) {
      throw Error(ErrorCode::invalid_input, "eigenvalues must be non-increasing");
    }
  }

  // suffix[j] = sum of lambda_{j+1..p} (0-based j), summed from the small end
  std::vector<double> suffix(p + 1, 0.0);
  for (std::size_t j = p; j-- > 0;) suffix[j] = suffix[j + 1] + eigenvalues[j];

  DecayReport report;
  report.C = C;
  report.tail_tol = tail_tol;
  const std::size_t count = p - 1;
  report.exponential.resize(count);
  report.ratio.resize(count);
  report.hyper.resize(count);
  double reciprocal = 0.0;
  for (std::size_t d = 1; d <= count; ++d) {
    const double lambda_d = eigenvalues[d - 1];
    reciprocal += 1.0 / lambda_d;
    const double tail = suffix[d];
    report.exponential[d - 1] = tail / lambda_d;
    report.ratio[d - 1] = eigenvalues[d] / lambda_d;
    report.hyper[d - 1] = static_cast<double>(d) * tail * reciprocal;
  }

  const std::size_t tail_len = (count + 3) / 4;
  report.tail_begin = count - tail_len + 1;
  const auto tail_max = [&](const std::vector<double>& v) {
    return *std::max_element(v.end() - static_cast<std::ptrdiff_t>(tail_len), v.end());
  };
  report.exponential_test =
      *std::max_element(report.exponential.begin(), report.exponential.end()) < C;
  report.super_test = tail_max(report.ratio) < tail_tol;
  report.hyper_test = tail_max(report.hyper) < tail_tol;

  if (report.exponential_test) {
    report.classification = DecayClass::exponential;
    if (report.super_test) {
      report.classification = DecayClass::super_exponential;
      if (report.hyper_test) report.classification = DecayClass::hyper_exponential;
    }
  }
  return report;
}

double ball_volume(std::size_t d, double radius) {
  if (d == 0 || !(radius > 0.0)) {
    throw Error(ErrorCode::invalid_input, "ball volume needs d >= 1 and a positive radius");
  }
  const double half_d = 0.5 * static_cast<double>(d);
  const double log_volume = static_cast<double>(d) * std::log(radius) +
                            half_d * std::log(std::numbers::pi) - std::lgamma(half_d + 1.0);
  return std::exp(log_volume);
}

}  // namespace smbp
