#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "lpsim/apsf.h"
#include "lpsim/error.h"
#include "lpsim/rng.h"
#include "oracles.h"

using namespace lpsim;

namespace {

// Radius within which half the profile mass lies, weighting each sample by
// its circumference.
double half_mass_radius(const std::vector<ProfileSample>& p) {
  double total = 0.0;
  for (const auto& s : p) total += s.intensity * s.radius_fraction;
  double acc = 0.0;
  for (const auto& s : p) {
    acc += s.intensity * s.radius_fraction;
    if (acc >= 0.5 * total) return s.radius_fraction;
  }
  return 1.0;
}

}  // namespace

TEST_SUITE("apsf") {

TEST_CASE("profile matches a std::legendre evaluation") {
  Rng rng(21);
  for (int n = 0; n < 25; ++n) {
    ApsfParams p;
    p.optical_thickness = rng.uniform(1.1, 1.8);
    p.forward_scatter = rng.uniform(0.2, 0.7);
    const auto profile = apsf_radial_profile(p, 257);
    const auto ref = oracle::apsf_profile(p.optical_thickness, p.forward_scatter, 257);
    const double peak = *std::max_element(ref.begin(), ref.end());
    for (int k = 0; k < 257; ++k) {
      CHECK(profile[k].radius_fraction == doctest::Approx(k / 256.0));
      CHECK(std::fabs(profile[k].intensity - ref[k]) <= 1e-9 * peak);
    }
  }
}

TEST_CASE("profile peaks at the center and is non-negative") {
  Rng rng(22);
  for (int n = 0; n < 100; ++n) {
    ApsfParams p;
    p.optical_thickness = rng.uniform(1.1, 1.8);
    p.forward_scatter = rng.uniform(0.2, 0.7);
    const auto profile = apsf_radial_profile(p, 512);
    double peak = 0.0;
    for (const auto& s : profile) {
      CHECK(s.intensity >= 0.0);
      peak = std::max(peak, s.intensity);
    }
    CHECK(profile[0].intensity == peak);
  }
}

TEST_CASE("larger optical thickness spreads mass outward") {
  for (double q : {0.2, 0.45, 0.7}) {
    double prev = 0.0;
    for (double t : {1.1, 1.45, 1.8}) {
      const double r = half_mass_radius(apsf_radial_profile({t, q, 65}, 4096));
      CHECK(r >= prev);
      prev = r;
    }
  }
}

TEST_CASE("series order is bounded") {
  CHECK(apsf_series_order({1.1, 0.7, 65}) <= kApsfMaxOrder);
  CHECK(apsf_series_order({1.8, 0.2, 65}) >= 1);
  CHECK(apsf_series_order({1.8, 0.2, 65}) <= apsf_series_order({1.1, 0.2, 65}));
}

TEST_CASE("kernel symmetry, unit sum and monotonicity") {
  Rng rng(23);
  for (int n = 0; n < 30; ++n) {
    ApsfParams p;
    p.optical_thickness = rng.uniform(1.1, 1.8);
    p.forward_scatter = rng.uniform(0.2, 0.7);
    p.size = 2 * rng.uniform_int(2, 30) + 1;
    const Kernel k = generate_apsf(p);
    const int s = k.size(), c = s / 2;
    CHECK(std::fabs(k.sum() - 1.0) <= 1e-12);
    double peak = 0.0;
    for (double w : k.weights()) peak = std::max(peak, w);
    CHECK(k.at(c, c) == peak);
    for (int j = 0; j < s; ++j) {
      for (int i = 0; i < s; ++i) {
        const double w = k.at(i, j);
        CHECK(w >= 0.0);
        CHECK(k.at(s - 1 - i, j) == w);
        CHECK(k.at(i, s - 1 - j) == w);
        CHECK(k.at(j, i) == w);
      }
    }
    // Non-increasing in radius.
    std::map<int, double> by_r2;
    for (int j = 0; j < s; ++j)
      for (int i = 0; i < s; ++i) by_r2[(i - c) * (i - c) + (j - c) * (j - c)] = k.at(i, j);
    double last = by_r2.begin()->second;
    for (const auto& [r2, w] : by_r2) {
      CHECK(w <= last);
      last = w;
    }
  }
}

TEST_CASE("kernel sizing") {
  CHECK(kernel_size_for(1.0, 64, 48) == 65);
  CHECK(kernel_size_for(0.75, 100, 30) == 75);
  CHECK(kernel_size_for(1.5, 512, 512) == 769);
  CHECK(kernel_size_for(0.01, 10, 10) == 3);
}

TEST_CASE("invalid parameters name the field") {
  auto field = [](ApsfParams p) {
    try {
      p.validate();
    } catch (const ParameterError& e) {
      return e.field();
    }
    return std::string();
  };
  CHECK(field({0.0, 0.5, 65}) == "T");
  CHECK(field({1.5, 1.0, 65}) == "q");
  CHECK(field({1.5, 0.5, 64}) == "size");
  CHECK(field({1.5, 0.5, 65}).empty());
}

}  // TEST_SUITE
