#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xlra/channel.hpp"
#include "xlra/linalg.hpp"
#include "xlra/rng.hpp"
#include "xlra/scenario.hpp"

namespace xlra {

// tau_p mutually orthogonal pilots as matrix rows, ||s_t||^2 = tau_p exactly.
// Built from the scaled DCT-II basis, so rows are real and orthogonality holds
// under both plain and conjugated inner products.
struct PilotBook {
  int tau_p = 0;
  CMat S;  // tau_p x tau_p, row t = pilot s_t

  static PilotBook make(int tau_p);
  std::span<const cplx> pilot(int t) const { return S.row(t); }
};

struct Transmitter {
  const UserRecord* user = nullptr;
  const UserChannels* channels = nullptr;
  int pilot = -1;
};

// Step-1 uplink: per-subarray received blocks, the despread per-pilot vectors,
// their across-subarray sum, and the true per-pilot contention gain alpha_t.
struct UplinkObservation {
  int B = 0;
  int M_b = 0;
  int tau_p = 0;
  std::vector<CMat> Y;                // Y[b]: M_b x tau_p
  std::vector<std::vector<CVec>> y;   // y[b][t] = Y[b] s_t* / ||s_t||
  std::vector<CVec> y_sum;            // y_sum[t] = sum_b y[b][t]
  std::vector<double> alpha_true;     // alpha_t = sum_b sum_{i in S_t} rho beta_i^b tau_p
};

UplinkObservation superimpose_uplink(std::span<const Transmitter> transmitters,
                                     const PilotBook& pilots,
                                     const ScenarioConfig& cfg, Rng& rng);

// Step-2 precoders. The XL variant broadcasts one matrix from every subarray;
// the per-subarray variant is the naive adaptation kept as a diagnostic.
struct Precoders {
  bool per_sa = false;
  CMat V_xl;                 // M_b x tau_p when per_sa == false
  std::vector<CMat> V_sa;    // B matrices when per_sa == true
};

Precoders precode_xl(const UplinkObservation& obs, const PilotBook& pilots,
                     const ScenarioConfig& cfg);
Precoders precode_per_sa(const UplinkObservation& obs, const PilotBook& pilots,
                         const ScenarioConfig& cfg);

// Step-2 downlink at the UE: receive over the visible subarrays, correlate
// with the user's own pilot. Returns z_k (or v_k for the per-SA variant).
cplx ue_observe(const UserRecord& user, const UserChannels& channels,
                const Precoders& prec, const PilotBook& pilots,
                const ScenarioConfig& cfg, Rng& rng);

// gamma_k = rho * tau_p * sum_{m in V_k} beta_k^(m), the UE's own overall gain.
double gamma_own(const UserRecord& user, const ScenarioConfig& cfg);

// c(M_b) = (Gamma(M_b + 1/2) / Gamma(M_b))^2, evaluated in the log domain.
double chi_mean_factor_sq(int M_b);

// Contention-gain estimate; +infinity when Re(z) = 0. Never below gamma_k.
double estimate_alpha(cplx z, const UserRecord& user, const ScenarioConfig& cfg);

// epsilon_k = (delta / sqrt(M_b)) * sum_{b in V_k} beta_k^(b).
double bias_term(const UserRecord& user, const ScenarioConfig& cfg);

enum class Verdict { repeat, inactive };

// Repeat iff gamma > alpha_hat/2 + epsilon; ties go inactive.
Verdict decide(double gamma, double alpha_hat, double epsilon);

// One UE's step-2/3 state: observation, estimate, bias and verdict.
struct UEDecision {
  std::uint64_t user = 0;
  int pilot = -1;
  cplx z{0.0, 0.0};
  double alpha_hat = 0.0;
  double epsilon = 0.0;
  Verdict verdict = Verdict::inactive;
};

// Runs the estimate -> bias -> decision chain on a received z_k.
UEDecision make_decision(const UserRecord& user, cplx z,
                         const ScenarioConfig& cfg);

enum class ContentionCase {
  nonoverlap_multi,   // i: >= 2 repeaters, pairwise disjoint VRs
  single_winner,      // ii: exactly one repeater
  none_repeated,      // iii: no repeater (false negative)
  overlap_collision,  // iv: >= 2 repeaters with overlapping VRs
};

struct Contender {
  std::uint64_t id = 0;
  const VisibilityRegion* vr = nullptr;
  bool repeats = false;
};

struct ContentionOutcome {
  int pilot = -1;
  std::vector<std::uint64_t> contenders;
  std::vector<std::uint64_t> repeaters;
  ContentionCase kase = ContentionCase::none_repeated;
  std::vector<std::uint64_t> admitted;
};

// Step 3/4: classify the pilot into the four contention cases and apply the
// idealized decoding rule (cases i and ii admit the repeaters). With
// admit_disjoint_subset, repeaters disjoint from every other repeater are
// admitted even when the pilot as a whole collides; off by default.
ContentionOutcome classify_contention(int pilot,
                                      std::span<const Contender> contenders,
                                      bool admit_disjoint_subset = false);

// ALOHA-like reference scheme: every contender retransmits; admission iff a
// single contender or pairwise-disjoint VRs. Uses no channel observations.
ContentionOutcome baseline_decide(int pilot,
                                  std::span<const Contender> contenders);

// Numerical check of the despread-sum limit ||sum_b y_t||^2 / M_b ->
// alpha_t + B*sigma2 on a fixed large-scale slice, swept over M_b.
// exact_hardening replaces the Rayleigh draws by deterministic orthogonal
// vectors with ||h||^2 = M_b * beta, which zeroes the error when sigma2 = 0.
struct ConvergenceSlice {
  std::vector<std::vector<double>> beta;  // [contender][subarray], 0 = invisible
  double rho = 1.0;
  double sigma2 = 1e-13;
  int tau_p = 10;
  bool exact_hardening = false;
};

struct ConvergencePoint {
  int M_b = 0;
  double mean_rel_error = 0.0;
};

std::vector<ConvergencePoint> verify_sum_gain_convergence(
    const ConvergenceSlice& slice, std::span<const int> mb_grid, int trials,
    Rng& rng);

// Deterministic channels with exact hardening and exact cross-orthogonality:
// user u's subarray-b vector is sqrt(M_b * beta) times a distinct canonical
// basis direction. Requires M_b >= n_users * B.
UserChannels stub_hardening_channels(const UserRecord& user, int user_index,
                                     int n_users, const ScenarioConfig& cfg);

}  // namespace xlra
