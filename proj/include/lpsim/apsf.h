#ifndef LPSIM_APSF_H_
#define LPSIM_APSF_H_

#include <vector>

#include "lpsim/image.h"

namespace lpsim {

// Isotropic atmospheric point spread function parameters.
struct ApsfParams {
  double optical_thickness = 1.45;  // T, in (0, 4]
  double forward_scatter = 0.45;    // q, in (0, 1)
  int size = 65;                    // kernel side, odd and >= 3

  // Throws ParameterError naming the first invalid field.
  void validate() const;

  bool operator==(const ApsfParams&) const = default;
};

struct ProfileSample {
  double radius_fraction;
  double intensity;
};

// Series truncation controls for the Legendre expansion.
inline constexpr int kApsfMaxOrder = 100;
inline constexpr double kApsfTermTolerance = 1e-6;
inline constexpr int kApsfProfileSamples = 4096;

// Radial intensity of the multiple-scattering glow on a uniform grid of
// `n_samples` radius fractions in [0, 1]. A radius fraction rho maps to the
// scattering cosine mu = cos(pi * rho), and
//
//   I(T, mu) = sum_{m >= 1} (g_m + g_{m+1}) P_m(mu)
//   g_m      = exp(-beta_m T - (m + 1) ln T)
//   beta_m   = (2m + 1) / m * (1 - q^(m - 1))
//
// summed until a term's largest magnitude on the grid drops below
// kApsfTermTolerance, or through order kApsfMaxOrder. Negative values (series
// ringing in the back-scatter lobe) are clamped to zero.
std::vector<ProfileSample> apsf_radial_profile(const ApsfParams& params,
                                               int n_samples);

// Number of series terms apsf_radial_profile sums for these parameters.
int apsf_series_order(const ApsfParams& params);

// size x size kernel sampled from the radial profile at
// rho = min(1, hypot(dx, dy) / (size / 2)) with linear interpolation, then
// normalized to unit sum.
Kernel generate_apsf(const ApsfParams& params);

// floor(scalor * max(width, height)), bumped to the next odd number.
int kernel_size_for(double scalor, int width, int height);

}  // namespace lpsim

#endif  // LPSIM_APSF_H_
