#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "xlra/channel.hpp"
#include "xlra/metrics.hpp"
#include "xlra/protocol.hpp"
#include "xlra/scenario.hpp"

namespace xlra {

enum class ProtocolMode { sucre_xl, naive_sa, baseline };

const char* to_string(ProtocolMode mode);
const char* to_string(CorrelationMode mode);
const char* to_string(ContentionCase kase);

// Per-block trace record, one entry per contended pilot.
struct PilotTrace {
  int pilot = -1;
  std::vector<std::uint64_t> contenders;
  double alpha_true = 0.0;
  std::vector<std::uint64_t> repeaters;
  std::vector<double> alpha_hat;   // aligned with contenders (sucre/naive only)
  std::vector<int> verdicts;       // 1 = repeat, aligned with contenders
  ContentionCase kase = ContentionCase::none_repeated;
  std::vector<std::uint64_t> admitted;
};

struct BlockTrace {
  std::uint64_t block = 0;
  std::vector<PilotTrace> pilots;
};

using TraceSink = std::function<void(const BlockTrace&)>;

struct BacklogEntry {
  int attempts_made = 0;
  bool waiting = false;
};

struct CampaignResult {
  MetricAccumulator metrics;
  std::uint64_t still_backlogged = 0;
  std::uint64_t n_blocks = 0;
  // Campaign identity, echoed into serialized results.
  std::uint64_t seed = 0;
  ProtocolMode mode = ProtocolMode::sucre_xl;
  CorrelationMode channel = CorrelationMode::iid;
};

// Sequential RA blocks over a fixed pool of K inactive users. Admitted and
// exhausted users are replaced by fresh samples so arrival statistics stay
// stationary across the campaign.
class Campaign {
 public:
  Campaign(const ScenarioConfig& cfg, const CorrelationSpec& corr,
           ProtocolMode mode, std::uint64_t seed);

  // Runs one RA block; returns the contention outcomes of that block.
  std::vector<ContentionOutcome> run_block();

  CampaignResult finish() const;

  const std::vector<UserRecord>& pool() const { return pool_; }
  std::map<std::uint64_t, BacklogEntry> backlog() const;
  void set_trace_sink(TraceSink sink) { trace_ = std::move(sink); }

 private:
  UserRecord fresh_user();

  ScenarioConfig cfg_;
  CorrelationSpec corr_;
  ProtocolMode mode_;
  ArrayGeometry geometry_;
  PilotBook pilots_;
  Rng rng_;
  std::vector<UserRecord> pool_;
  std::uint64_t next_id_ = 0;
  std::uint64_t block_index_ = 0;
  MetricAccumulator metrics_;
  std::uint64_t seed_ = 0;
  TraceSink trace_;
};

CampaignResult run_campaign(const ScenarioConfig& cfg,
                            const CorrelationSpec& corr, ProtocolMode mode,
                            std::uint64_t seed, TraceSink trace = nullptr);

}  // namespace xlra
