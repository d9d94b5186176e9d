#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "support.hpp"
#include "xlra/metrics.hpp"

using namespace xlra;

namespace {

ContentionOutcome outcome_of(ContentionCase kase, int n_contenders,
                             int n_admitted) {
  ContentionOutcome o;
  o.pilot = 0;
  o.kase = kase;
  for (int i = 0; i < n_contenders; ++i) o.contenders.push_back(i);
  for (int i = 0; i < n_admitted; ++i) o.admitted.push_back(i);
  return o;
}

}  // namespace

TEST_CASE("prc: three collisions, two resolved") {
  MetricAccumulator acc;
  acc.record_outcome(outcome_of(ContentionCase::single_winner, 2, 1), 2);
  acc.record_outcome(outcome_of(ContentionCase::nonoverlap_multi, 3, 3), 3);
  acc.record_outcome(outcome_of(ContentionCase::overlap_collision, 2, 0), 2);
  REQUIRE(prc(acc).has_value());
  CHECK(*prc(acc) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("prc: undefined without collisions, singletons do not count") {
  MetricAccumulator acc;
  CHECK_FALSE(prc(acc).has_value());
  acc.record_outcome(outcome_of(ContentionCase::single_winner, 1, 1), 1);
  CHECK_FALSE(prc(acc).has_value());  // |S_t| = 1 is not a collision
  CHECK(acc.pilot_events == 1);
}

TEST_CASE("prc: step-3 convention counts only repeat-phase collisions") {
  MetricAccumulator acc;
  CHECK_FALSE(prc_step3(acc).has_value());
  acc.record_outcome(outcome_of(ContentionCase::nonoverlap_multi, 2, 2), 2);
  acc.record_outcome(outcome_of(ContentionCase::overlap_collision, 2, 0), 2);
  acc.record_outcome(outcome_of(ContentionCase::none_repeated, 2, 0), 2);
  REQUIRE(prc_step3(acc).has_value());
  CHECK(*prc_step3(acc) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("nmse: exact estimates give zero, single sample gives the formula") {
  MetricAccumulator acc;
  acc.record_estimate(2.0, 2.0, 1);
  CHECK(*nmse(acc) == 0.0);
  MetricAccumulator acc2;
  acc2.record_estimate(3.0, 2.0, 1);
  CHECK(*nmse(acc2) == doctest::Approx(0.5).epsilon(1e-12));
  MetricAccumulator empty;
  CHECK_FALSE(nmse(empty).has_value());
}

TEST_CASE("nmse: single-contender slice only counts |S_t| = 1 estimates") {
  MetricAccumulator acc;
  acc.record_estimate(3.0, 2.0, 1);
  acc.record_estimate(30.0, 2.0, 2);
  CHECK(*nmse_single_contender(acc) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(*nmse(acc) > 100.0);
}

TEST_CASE("access stats: everyone admitted on the first try") {
  MetricAccumulator acc;
  for (int i = 0; i < 10; ++i) {
    acc.record_terminal(1, true, 10);
    acc.attempter_total++;
  }
  const AccessStats st = access_stats(acc, 100, 0.1, 50);
  CHECK(*st.avg_attempts == 1.0);
  CHECK(*st.failed_fraction == 0.0);
  CHECK(*st.lambda == doctest::Approx(10.0 / (100 * 0.1 * 50)).epsilon(1e-12));
}

TEST_CASE("access stats: xi = 1 when every resolution is a single winner") {
  MetricAccumulator acc;
  for (int i = 0; i < 7; ++i)
    acc.record_outcome(outcome_of(ContentionCase::single_winner, 2, 1), 2);
  const AccessStats st = access_stats(acc, 100, 0.1, 50);
  CHECK(*st.xi == 1.0);
}

TEST_CASE("access stats: xi >= 1 whenever something resolved") {
  std::mt19937 gen(7);
  MetricAccumulator acc;
  for (int i = 0; i < 200; ++i) {
    const int n = 2 + static_cast<int>(gen() % 3);
    const bool resolved = gen() % 2;
    acc.record_outcome(
        outcome_of(resolved ? ContentionCase::nonoverlap_multi
                            : ContentionCase::overlap_collision,
                   n, resolved ? n : 0),
        n);
  }
  const AccessStats st = access_stats(acc, 100, 0.1, 50);
  if (acc.resolved_count > 0) CHECK(*st.xi >= 1.0);
}

TEST_CASE("access stats: lambda identity reproduces admitted_total") {
  MetricAccumulator acc;
  acc.admitted_total = 137;
  const int K = 1000;
  const double P_a = 0.01;
  const std::uint64_t n_blocks = 10000;
  const AccessStats st = access_stats(acc, K, P_a, n_blocks);
  CHECK(*st.lambda * K * P_a * n_blocks ==
        doctest::Approx(137.0).epsilon(1e-12));
  CHECK(st.admitted_total == 137);
}

TEST_CASE("access stats: undefined quantities are reported as missing") {
  MetricAccumulator acc;
  const AccessStats st = access_stats(acc, 100, 0.1, 50);
  CHECK_FALSE(st.avg_attempts.has_value());
  CHECK_FALSE(st.failed_fraction.has_value());
  CHECK_FALSE(st.xi.has_value());
  const AccessStats st0 = access_stats(acc, 100, 0.0, 50);
  CHECK_FALSE(st0.lambda.has_value());
}

TEST_CASE("merge: associative, commutative, and order-insensitive") {
  std::mt19937 gen(11);
  auto random_acc = [&gen](int blocks) {
    MetricAccumulator acc;
    for (int i = 0; i < blocks; ++i) {
      const int n = static_cast<int>(gen() % 4);
      acc.record_pilot_count(n);
      if (n > 0) {
        const bool resolved = gen() % 2;
        acc.record_outcome(
            outcome_of(resolved ? ContentionCase::single_winner
                                : ContentionCase::none_repeated,
                       n, resolved ? 1 : 0),
            n);
        acc.record_estimate(1.0 + 0.001 * static_cast<double>(gen() % 100),
                            1.0, n);
      }
      acc.record_terminal(1 + static_cast<int>(gen() % 10), gen() % 2, 10);
      acc.block_count++;
    }
    return acc;
  };
  const MetricAccumulator a = random_acc(50);
  const MetricAccumulator b = random_acc(80);
  const MetricAccumulator c = random_acc(30);

  MetricAccumulator ab_c = a;
  ab_c.merge(b);
  ab_c.merge(c);
  MetricAccumulator c_ba = c;
  c_ba.merge(b);
  c_ba.merge(a);

  CHECK(ab_c.collision_count == c_ba.collision_count);
  CHECK(ab_c.resolved_count == c_ba.resolved_count);
  CHECK(ab_c.admitted_total == c_ba.admitted_total);
  CHECK(ab_c.failed_total == c_ba.failed_total);
  CHECK(ab_c.attempts_hist == c_ba.attempts_hist);
  CHECK(ab_c.s_t_hist == c_ba.s_t_hist);
  CHECK(ab_c.nmse_count == c_ba.nmse_count);
  CHECK(ab_c.nmse_sum ==
        doctest::Approx(c_ba.nmse_sum).epsilon(1e-12));
  CHECK(*prc(ab_c) == doctest::Approx(*prc(c_ba)).epsilon(1e-12));
  CHECK(*nmse(ab_c) == doctest::Approx(*nmse(c_ba)).epsilon(1e-12));
}
