#include "xlra/engine.hpp"

#include <algorithm>
#include <stdexcept>

namespace xlra {

const char* to_string(ProtocolMode mode) {
  switch (mode) {
    case ProtocolMode::sucre_xl: return "sucre_xl";
    case ProtocolMode::naive_sa: return "naive";
    case ProtocolMode::baseline: return "baseline";
  }
  return "?";
}

const char* to_string(CorrelationMode mode) {
  return mode == CorrelationMode::iid ? "iid" : "correlated";
}

const char* to_string(ContentionCase kase) {
  switch (kase) {
    case ContentionCase::nonoverlap_multi: return "i_nonoverlap_multi";
    case ContentionCase::single_winner: return "ii_single_winner";
    case ContentionCase::none_repeated: return "iii_none";
    case ContentionCase::overlap_collision: return "iv_overlap_collision";
  }
  return "?";
}

Campaign::Campaign(const ScenarioConfig& cfg, const CorrelationSpec& corr,
                   ProtocolMode mode, std::uint64_t seed)
    : cfg_(cfg),
      corr_(corr),
      mode_(mode),
      geometry_(build_geometry(cfg)),
      pilots_(PilotBook::make(cfg.tau_p)),
      rng_(Rng::derive(seed, 0x9a9e7e11)),
      seed_(seed) {
  cfg_.validate();
  pool_.reserve(cfg_.K);
  for (int k = 0; k < cfg_.K; ++k) pool_.push_back(fresh_user());
}

UserRecord Campaign::fresh_user() {
  UserRecord u = sample_user(geometry_, cfg_, rng_);
  u.id = next_id_++;
  return u;
}

std::map<std::uint64_t, BacklogEntry> Campaign::backlog() const {
  std::map<std::uint64_t, BacklogEntry> out;
  for (const UserRecord& u : pool_)
    if (u.backlogged) out[u.id] = {u.attempts_made, true};
  return out;
}

std::vector<ContentionOutcome> Campaign::run_block() {
  metrics_.block_count++;

  // Arrivals: fresh users activate with P_a; backlogged users are governed
  // solely by retry_prob. Every attempter redraws its pilot uniformly.
  std::vector<std::size_t> attempters;
  for (std::size_t i = 0; i < pool_.size(); ++i) {
    UserRecord& u = pool_[i];
    const bool attempts = u.backlogged ? rng_.bernoulli(cfg_.retry_prob)
                                       : rng_.bernoulli(cfg_.P_a);
    if (!attempts) {
      u.chosen_pilot = -1;
      continue;
    }
    if (!u.backlogged) metrics_.arrival_total++;
    if (u.attempts_made == 0) metrics_.attempter_total++;
    u.chosen_pilot = static_cast<int>(rng_.uniform_int(cfg_.tau_p));
    attempters.push_back(i);
  }

  std::vector<std::vector<std::size_t>> per_pilot(cfg_.tau_p);
  for (std::size_t i : attempters) per_pilot[pool_[i].chosen_pilot].push_back(i);
  for (int t = 0; t < cfg_.tau_p; ++t)
    metrics_.record_pilot_count(per_pilot[t].size());

  std::vector<ContentionOutcome> outcomes;
  if (attempters.empty()) {
    block_index_++;
    return outcomes;
  }

  // Per-attempter repeat decisions.
  std::vector<char> repeats(pool_.size(), 0);
  std::vector<double> alpha_hats(pool_.size(), 0.0);
  UplinkObservation obs;
  if (mode_ != ProtocolMode::baseline) {
    std::vector<UserChannels> channels(attempters.size());
    std::vector<Transmitter> txs(attempters.size());
    for (std::size_t a = 0; a < attempters.size(); ++a) {
      UserRecord& u = pool_[attempters[a]];
      channels[a] = sample_channel(u, corr_, geometry_, cfg_, rng_);
      txs[a] = {&u, &channels[a], u.chosen_pilot};
    }
    obs = superimpose_uplink(txs, pilots_, cfg_, rng_);
    const Precoders prec = (mode_ == ProtocolMode::sucre_xl)
                               ? precode_xl(obs, pilots_, cfg_)
                               : precode_per_sa(obs, pilots_, cfg_);
    for (std::size_t a = 0; a < attempters.size(); ++a) {
      UserRecord& u = pool_[attempters[a]];
      const cplx z = ue_observe(u, channels[a], prec, pilots_, cfg_, rng_);
      const UEDecision d = make_decision(u, z, cfg_);
      repeats[attempters[a]] = (d.verdict == Verdict::repeat) ? 1 : 0;
      alpha_hats[attempters[a]] = d.alpha_hat;
      metrics_.record_estimate(d.alpha_hat, obs.alpha_true[u.chosen_pilot],
                               per_pilot[u.chosen_pilot].size());
    }
  }

  // Contention resolution per pilot, then backlog bookkeeping.
  BlockTrace trace;
  trace.block = block_index_;
  for (int t = 0; t < cfg_.tau_p; ++t) {
    if (per_pilot[t].empty()) continue;
    std::vector<Contender> contenders;
    contenders.reserve(per_pilot[t].size());
    for (std::size_t i : per_pilot[t])
      contenders.push_back({pool_[i].id, &pool_[i].vr, repeats[i] != 0});
    const ContentionOutcome outcome =
        (mode_ == ProtocolMode::baseline)
            ? baseline_decide(t, contenders)
            : classify_contention(t, contenders);
    metrics_.record_outcome(outcome, per_pilot[t].size());
    if (trace_) {
      PilotTrace pt;
      pt.pilot = t;
      pt.contenders = outcome.contenders;
      pt.alpha_true =
          (mode_ != ProtocolMode::baseline) ? obs.alpha_true[t] : 0.0;
      pt.repeaters = outcome.repeaters;
      for (std::size_t i : per_pilot[t]) {
        pt.alpha_hat.push_back(alpha_hats[i]);
        pt.verdicts.push_back(repeats[i]);
      }
      pt.kase = outcome.kase;
      pt.admitted = outcome.admitted;
      trace.pilots.push_back(std::move(pt));
    }
    outcomes.push_back(outcome);
  }

  // Admitted users leave the pool; exhausted users are declared failed.
  // Both are replaced by fresh samples to keep the pool size constant.
  std::vector<char> admitted_flag(pool_.size(), 0);
  for (const ContentionOutcome& o : outcomes)
    for (std::uint64_t id : o.admitted)
      for (std::size_t i : per_pilot[o.pilot])
        if (pool_[i].id == id) admitted_flag[i] = 1;

  for (std::size_t i : attempters) {
    UserRecord& u = pool_[i];
    u.attempts_made++;
    if (admitted_flag[i]) {
      metrics_.record_terminal(u.attempts_made, true, cfg_.max_attempts);
      pool_[i] = fresh_user();
    } else if (u.attempts_made >= cfg_.max_attempts) {
      metrics_.record_terminal(u.attempts_made, false, cfg_.max_attempts);
      pool_[i] = fresh_user();
    } else {
      u.backlogged = true;
      u.chosen_pilot = -1;
    }
  }

  if (trace_) trace_(trace);
  block_index_++;
  return outcomes;
}

CampaignResult Campaign::finish() const {
  CampaignResult res;
  res.metrics = metrics_;
  res.n_blocks = block_index_;
  res.seed = seed_;
  res.mode = mode_;
  res.channel = corr_.mode;
  for (const UserRecord& u : pool_)
    if (u.backlogged) res.still_backlogged++;
  return res;
}

CampaignResult run_campaign(const ScenarioConfig& cfg,
                            const CorrelationSpec& corr, ProtocolMode mode,
                            std::uint64_t seed, TraceSink trace) {
  Campaign campaign(cfg, corr, mode, seed);
  if (trace) campaign.set_trace_sink(std::move(trace));
  for (int n = 0; n < cfg.n_blocks; ++n) campaign.run_block();
  return campaign.finish();
}

}  // namespace xlra
