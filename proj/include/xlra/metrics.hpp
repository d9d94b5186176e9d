#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "xlra/protocol.hpp"

namespace xlra {

// Streaming campaign aggregates. Accumulators are mergeable monoids: shards
// own one each and merge() is associative and order-insensitive.
struct MetricAccumulator {
  // Contention bookkeeping (per pilot-block).
  std::uint64_t collision_count = 0;    // |S_t| >= 2 at step 1
  std::uint64_t resolved_count = 0;     // collisions with nonempty admitted set
  std::uint64_t admitted_in_resolved = 0;
  std::uint64_t case_count[4] = {0, 0, 0, 0};  // indexed by ContentionCase
  std::uint64_t pilot_events = 0;       // pilot-blocks with |S_t| >= 1

  // Estimator quality: sum of (alpha_hat - alpha_t)^2 / alpha_t.
  double nmse_sum = 0.0;
  std::uint64_t nmse_count = 0;
  double nmse_single_sum = 0.0;         // restricted to |S_t| = 1
  std::uint64_t nmse_single_count = 0;

  // Access bookkeeping over terminally admitted-or-failed users.
  std::vector<std::uint64_t> attempts_hist;  // index = attempts - 1
  std::uint64_t admitted_total = 0;
  std::uint64_t failed_total = 0;
  std::uint64_t attempter_total = 0;    // distinct users that ever attempted
  std::uint64_t arrival_total = 0;      // fresh activations
  std::uint64_t block_count = 0;

  // |S_t| histogram over every (block, pilot) sample, zeros included.
  std::vector<std::uint64_t> s_t_hist;

  void record_pilot_count(std::size_t n_contenders);
  void record_outcome(const ContentionOutcome& outcome, std::size_t n_contenders);
  void record_estimate(double alpha_hat, double alpha_true,
                       std::size_t n_contenders);
  void record_terminal(int attempts, bool admitted, int max_attempts);
  void merge(const MetricAccumulator& other);
};

// Resolved collisions per collision; empty when no collision occurred.
std::optional<double> prc(const MetricAccumulator& acc);

// Alternative convention: collisions counted at step 3 (>= 2 repeaters),
// resolved iff non-overlapping. case_i / (case_i + case_iv).
std::optional<double> prc_step3(const MetricAccumulator& acc);

// Mean of (alpha_hat - alpha_t)^2 / alpha_t over recorded estimates.
std::optional<double> nmse(const MetricAccumulator& acc);
std::optional<double> nmse_single_contender(const MetricAccumulator& acc);

struct AccessStats {
  std::optional<double> avg_attempts;
  std::optional<double> failed_fraction;
  std::optional<double> xi;       // admitted per resolved collision
  std::optional<double> lambda;   // admitted_total / (K * P_a * n_blocks)
  std::uint64_t admitted_total = 0;  // equals lambda * K * P_a * n_blocks
};

AccessStats access_stats(const MetricAccumulator& acc, int K, double P_a,
                         std::uint64_t n_blocks);

}  // namespace xlra
