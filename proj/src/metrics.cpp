#include "xlra/metrics.hpp"

#include <algorithm>

namespace xlra {

void MetricAccumulator::record_pilot_count(std::size_t n_contenders) {
  if (s_t_hist.size() <= n_contenders) s_t_hist.resize(n_contenders + 1, 0);
  s_t_hist[n_contenders]++;
}

void MetricAccumulator::record_outcome(const ContentionOutcome& outcome,
                                       std::size_t n_contenders) {
  if (n_contenders == 0) return;
  pilot_events++;
  case_count[static_cast<int>(outcome.kase)]++;
  if (n_contenders >= 2) {
    collision_count++;
    if (!outcome.admitted.empty()) {
      resolved_count++;
      admitted_in_resolved += outcome.admitted.size();
    }
  }
}

void MetricAccumulator::record_estimate(double alpha_hat, double alpha_true,
                                        std::size_t n_contenders) {
  const double err = alpha_hat - alpha_true;
  const double value = err * err / alpha_true;
  nmse_sum += value;
  nmse_count++;
  if (n_contenders == 1) {
    nmse_single_sum += value;
    nmse_single_count++;
  }
}

void MetricAccumulator::record_terminal(int attempts, bool admitted,
                                        int max_attempts) {
  if (attempts_hist.size() < static_cast<std::size_t>(max_attempts))
    attempts_hist.resize(max_attempts, 0);
  if (attempts >= 1 && attempts <= max_attempts) attempts_hist[attempts - 1]++;
  if (admitted)
    admitted_total++;
  else
    failed_total++;
}

void MetricAccumulator::merge(const MetricAccumulator& other) {
  collision_count += other.collision_count;
  resolved_count += other.resolved_count;
  admitted_in_resolved += other.admitted_in_resolved;
  for (int i = 0; i < 4; ++i) case_count[i] += other.case_count[i];
  pilot_events += other.pilot_events;
  nmse_sum += other.nmse_sum;
  nmse_count += other.nmse_count;
  nmse_single_sum += other.nmse_single_sum;
  nmse_single_count += other.nmse_single_count;
  if (attempts_hist.size() < other.attempts_hist.size())
    attempts_hist.resize(other.attempts_hist.size(), 0);
  for (std::size_t i = 0; i < other.attempts_hist.size(); ++i)
    attempts_hist[i] += other.attempts_hist[i];
  admitted_total += other.admitted_total;
  failed_total += other.failed_total;
  attempter_total += other.attempter_total;
  arrival_total += other.arrival_total;
  block_count += other.block_count;
  if (s_t_hist.size() < other.s_t_hist.size())
    s_t_hist.resize(other.s_t_hist.size(), 0);
  for (std::size_t i = 0; i < other.s_t_hist.size(); ++i)
    s_t_hist[i] += other.s_t_hist[i];
}

std::optional<double> prc(const MetricAccumulator& acc) {
  if (acc.collision_count == 0) return std::nullopt;  // "no collisions"
  return static_cast<double>(acc.resolved_count) /
         static_cast<double>(acc.collision_count);
}

std::optional<double> prc_step3(const MetricAccumulator& acc) {
  const std::uint64_t i = acc.case_count[static_cast<int>(
      ContentionCase::nonoverlap_multi)];
  const std::uint64_t iv = acc.case_count[static_cast<int>(
      ContentionCase::overlap_collision)];
  if (i + iv == 0) return std::nullopt;
  return static_cast<double>(i) / static_cast<double>(i + iv);
}

std::optional<double> nmse(const MetricAccumulator& acc) {
  if (acc.nmse_count == 0) return std::nullopt;
  return acc.nmse_sum / static_cast<double>(acc.nmse_count);
}

std::optional<double> nmse_single_contender(const MetricAccumulator& acc) {
  if (acc.nmse_single_count == 0) return std::nullopt;
  return acc.nmse_single_sum / static_cast<double>(acc.nmse_single_count);
}

AccessStats access_stats(const MetricAccumulator& acc, int K, double P_a,
                         std::uint64_t n_blocks) {
  AccessStats st;
  st.admitted_total = acc.admitted_total;

  const std::uint64_t terminal = acc.admitted_total + acc.failed_total;
  if (terminal > 0) {
    double weighted = 0.0;
    std::uint64_t count = 0;
    for (std::size_t i = 0; i < acc.attempts_hist.size(); ++i) {
      weighted += static_cast<double>(i + 1) * acc.attempts_hist[i];
      count += acc.attempts_hist[i];
    }
    if (count > 0) st.avg_attempts = weighted / static_cast<double>(count);
    st.failed_fraction =
        static_cast<double>(acc.failed_total) / static_cast<double>(terminal);
  }
  if (acc.resolved_count > 0)
    st.xi = static_cast<double>(acc.admitted_in_resolved) /
            static_cast<double>(acc.resolved_count);
  const double expected_arrivals = K * P_a * static_cast<double>(n_blocks);
  if (expected_arrivals > 0.0)
    st.lambda = static_cast<double>(acc.admitted_total) / expected_arrivals;
  return st;
}

}  // namespace xlra
