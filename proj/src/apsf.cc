#include "lpsim/apsf.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "lpsim/error.h"

namespace lpsim {
namespace {

// g_m(T) = exp(-beta_m T - (m + 1) ln T), beta_m = (2m + 1)/m (1 - q^(m-1)).
double series_weight(int m, double t, double q) {
  const double beta = (2.0 * m + 1.0) / m * (1.0 - std::pow(q, m - 1));
  return std::exp(-beta * t - (m + 1.0) * std::log(t));
}

struct Series {
  std::vector<double> values;
  int order = 0;
};

Series evaluate_series(const ApsfParams& params, int n_samples) {
  params.validate();
  if (n_samples < 2) throw ParameterError("n_samples", "must be >= 2");
  const double t = params.optical_thickness;
  const double q = params.forward_scatter;

  std::vector<double> mu(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    const double rho = static_cast<double>(k) / (n_samples - 1);
    mu[k] = std::cos(std::numbers::pi * rho);
  }
  // Legendre recurrence state: p_prev = P_{m-1}, p_cur = P_m.
  std::vector<double> p_prev(n_samples, 1.0);
  std::vector<double> p_cur = mu;
  Series series;
  series.values.assign(n_samples, 0.0);

  for (int m = 1; m <= kApsfMaxOrder; ++m) {
    const double coeff = series_weight(m, t, q) + series_weight(m + 1, t, q);
    double peak = 0.0;
    for (double p : p_cur) peak = std::max(peak, std::fabs(coeff * p));
    if (!std::isfinite(peak)) {
      throw ParameterError("apsf", "series term " + std::to_string(m) +
                                       " is not finite");
    }
    if (peak < kApsfTermTolerance) break;
    for (int k = 0; k < n_samples; ++k) series.values[k] += coeff * p_cur[k];
    series.order = m;

    for (int k = 0; k < n_samples; ++k) {
      const double next =
          ((2.0 * m + 1.0) * mu[k] * p_cur[k] - m * p_prev[k]) / (m + 1.0);
      p_prev[k] = p_cur[k];
      p_cur[k] = next;
    }
  }
  for (double& v : series.values) {
    if (!std::isfinite(v)) throw ParameterError("apsf", "profile is not finite");
    v = std::max(v, 0.0);
  }
  return series;
}

}  // namespace

void ApsfParams::validate() const {
  if (!(optical_thickness > 0.0 && optical_thickness <= 4.0)) {
    throw ParameterError("T", "optical thickness must lie in (0, 4], got " +
                                  std::to_string(optical_thickness));
  }
  if (!(forward_scatter > 0.0 && forward_scatter < 1.0)) {
    throw ParameterError("q", "forward-scattering parameter must lie in (0, 1), got " +
                                  std::to_string(forward_scatter));
  }
  if (size < 3 || size % 2 == 0) {
    throw ParameterError("size", "kernel size must be odd and >= 3, got " +
                                     std::to_string(size));
  }
}

std::vector<ProfileSample> apsf_radial_profile(const ApsfParams& params,
                                               int n_samples) {
  const Series series = evaluate_series(params, n_samples);
  std::vector<ProfileSample> profile(n_samples);
  for (int k = 0; k < n_samples; ++k) {
    profile[k] = {static_cast<double>(k) / (n_samples - 1), series.values[k]};
  }
  return profile;
}

int apsf_series_order(const ApsfParams& params) {
  return evaluate_series(params, 2).order;
}

Kernel generate_apsf(const ApsfParams& params) {
  const Series series = evaluate_series(params, kApsfProfileSamples);
  const auto& values = series.values;
  const int s = params.size;
  const int r = s / 2;
  const double half = s / 2.0;
  const int last = kApsfProfileSamples - 1;

  Kernel kernel(s);
  for (int j = 0; j < s; ++j) {
    for (int i = 0; i < s; ++i) {
      const int dx = i - r;
      const int dy = j - r;
      const double rho =
          std::min(1.0, std::sqrt(static_cast<double>(dx * dx + dy * dy)) / half);
      const double pos = rho * last;
      const int k = std::min(static_cast<int>(pos), last - 1);
      const double f = pos - k;
      kernel.at(i, j) = (1.0 - f) * values[k] + f * values[k + 1];
    }
  }
  kernel.normalize();
  return kernel;
}

int kernel_size_for(double scalor, int width, int height) {
  if (!(scalor > 0.0) || width <= 0 || height <= 0) {
    throw ParameterError("scalor", "scalor and image dimensions must be positive");
  }
  int s = static_cast<int>(std::floor(scalor * std::max(width, height)));
  if (s % 2 == 0) ++s;
  return std::max(s, 3);
}

}  // namespace lpsim
