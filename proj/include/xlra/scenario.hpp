#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "xlra/rng.hpp"

namespace xlra {

enum class VrMode { bernoulli, full };

// All scalar parameters of the cell, array, protocol and campaign.
// Defaults are the crowded urban-micro operating point used throughout.
struct ScenarioConfig {
  int M = 500;                   // total antennas
  int B = 4;                     // subarrays
  int M_b = 125;                 // antennas per subarray (derived, kept in sync)
  double array_length_m = 100.0;
  double cell_side_m = 200.0;
  int K = 1000;                  // inactive-UE pool size
  double P_a = 0.01;             // per-block activation probability
  int tau_p = 10;                // orthogonal RA pilots
  double P_b = 0.5;              // per-subarray visibility probability
  double rho = 1.0;              // UL transmit power [W]
  double q = 1.0;                // DL transmit power [W]
  double sigma2 = 1e-13;         // noise variance [W]
  double kappa = 3.8;            // pathloss exponent
  double g_dB = -34.53;          // reference pathloss at 1 m
  double sigma_sf_dB = 10.0;     // shadow-fading std
  double r = 0.7;                // correlation index (correlated model)
  double delta = -1.0;           // decision-bias scale factor
  double retry_prob = 0.5;
  int max_attempts = 10;
  int n_blocks = 1000;
  VrMode vr_mode = VrMode::bernoulli;

  void finalize() { M_b = (B > 0) ? M / B : 0; }
  // Throws std::invalid_argument naming the offending key.
  void validate() const;
};

struct ArrayGeometry {
  std::vector<std::array<double, 2>> antenna_positions;   // meters
  std::vector<int> subarray_index;                        // antenna -> b in [0, B)
  std::vector<std::array<double, 2>> subarray_centroids;  // per subarray
};

struct VisibilityRegion {
  std::vector<std::uint8_t> visible;  // length B, 1 = subarray visible
  int popcount() const;
};

bool vrs_overlap(const VisibilityRegion& a, const VisibilityRegion& b);

struct UserRecord {
  std::uint64_t id = 0;
  std::array<double, 2> position{};
  double shadow_dB = 0.0;            // one draw per UE, shared by all antennas
  std::vector<double> beta_per_sa;   // zero exactly where invisible
  VisibilityRegion vr;
  int attempts_made = 0;
  bool backlogged = false;
  int chosen_pilot = -1;             // [0, tau_p) or -1 = none

  double beta_sum() const;           // sum of beta over visible subarrays
};

// Minimum UE-antenna distance; positions are resampled until satisfied.
inline constexpr double kMinUserAntennaDistanceM = 1.0;

ArrayGeometry build_geometry(const ScenarioConfig& cfg);

// 10^(-kappa*log10(d) + (g_dB + shadow_dB)/10); rejects d_m <= 0.
double pathloss_linear(double d_m, double shadow_dB, const ScenarioConfig& cfg);

// i.i.d. Bernoulli(P_b) bits, redrawn until at least one subarray is visible.
VisibilityRegion sample_visibility(const ScenarioConfig& cfg, Rng& rng);

UserRecord sample_user(const ArrayGeometry& geo, const ScenarioConfig& cfg,
                       Rng& rng);

// Probability that s contenders' VRs are pairwise non-overlapping, on
// unconditioned Bernoulli(P_b) visibility bits:
// ((1-P_b)^s + s*P_b*(1-P_b)^(s-1))^B.
double p_no_analytic(int s, double P_b, int B);

// Debug surface: one row per user with position, shadowing, per-SA beta and
// the VR bitmap.
void dump_scenario_csv(std::ostream& os, const ScenarioConfig& cfg,
                       const std::vector<UserRecord>& users);

}  // namespace xlra
