#include "xlra/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace xlra {

PilotBook PilotBook::make(int tau_p) {
  if (tau_p < 1) throw std::invalid_argument("tau_p: must be >= 1");
  PilotBook book;
  book.tau_p = tau_p;
  book.S = CMat(tau_p, tau_p);
  // DCT-II rows scaled so ||s_t||^2 = tau_p.
  const double root = std::sqrt(static_cast<double>(tau_p));
  for (int t = 0; t < tau_p; ++t) {
    const double c = (t == 0) ? root * std::sqrt(1.0 / tau_p)
                              : root * std::sqrt(2.0 / tau_p);
    for (int n = 0; n < tau_p; ++n) {
      book.S(t, n) = c * std::cos(std::numbers::pi * (2 * n + 1) * t /
                                  (2.0 * tau_p));
    }
  }
  return book;
}

UplinkObservation superimpose_uplink(std::span<const Transmitter> transmitters,
                                     const PilotBook& pilots,
                                     const ScenarioConfig& cfg, Rng& rng) {
  UplinkObservation obs;
  obs.B = cfg.B;
  obs.M_b = cfg.M_b;
  obs.tau_p = cfg.tau_p;
  if (pilots.tau_p != cfg.tau_p)
    throw std::invalid_argument("superimpose_uplink: pilot book length mismatch");

  obs.Y.assign(cfg.B, CMat(cfg.M_b, cfg.tau_p));
  obs.alpha_true.assign(cfg.tau_p, 0.0);

  // Y^(b) = sum_k sqrt(rho) h_k^(b) s_{r(k)}^T + N^(b)
  for (const Transmitter& tx : transmitters) {
    if (tx.pilot < 0 || tx.pilot >= cfg.tau_p)
      throw std::invalid_argument("superimpose_uplink: pilot index out of range");
    const double amp = std::sqrt(cfg.rho);
    std::span<const cplx> s = pilots.pilot(tx.pilot);
    for (int b = 0; b < cfg.B; ++b) {
      const CVec& h = tx.channels->per_sa[b];
      if (!tx.user->vr.visible[b]) continue;
      CMat& Yb = obs.Y[b];
      for (int m = 0; m < cfg.M_b; ++m) {
        const cplx hm = amp * h[m];
        std::span<cplx> row = Yb.row(m);
        for (int t = 0; t < cfg.tau_p; ++t) row[t] += hm * s[t];
      }
      obs.alpha_true[tx.pilot] +=
          cfg.rho * tx.user->beta_per_sa[b] * cfg.tau_p;
    }
  }
  if (cfg.sigma2 > 0.0) {
    for (int b = 0; b < cfg.B; ++b) {
      for (cplx& v : obs.Y[b].data()) v += rng.cnormal(cfg.sigma2);
    }
  }

  // Despread: y_t^(b) = Y^(b) s_t* / ||s_t||, and the across-subarray sum.
  const double inv_norm = 1.0 / std::sqrt(static_cast<double>(cfg.tau_p));
  obs.y.assign(cfg.B, std::vector<CVec>(cfg.tau_p));
  obs.y_sum.assign(cfg.tau_p, CVec(cfg.M_b, cplx{0.0, 0.0}));
  for (int b = 0; b < cfg.B; ++b) {
    for (int t = 0; t < cfg.tau_p; ++t) {
      std::span<const cplx> s = pilots.pilot(t);
      CVec& yt = obs.y[b][t];
      yt.assign(cfg.M_b, cplx{0.0, 0.0});
      for (int m = 0; m < cfg.M_b; ++m) {
        cplx acc{0.0, 0.0};
        std::span<const cplx> row = obs.Y[b].row(m);
        for (int n = 0; n < cfg.tau_p; ++n) acc += row[n] * std::conj(s[n]);
        yt[m] = acc * inv_norm;
        obs.y_sum[t][m] += yt[m];
      }
    }
  }
  return obs;
}

namespace {

// Accumulate sqrt(q/B) * (u* / ||u||) s_t^H into V; skips ||u|| = 0 pilots.
void add_precoded_pilot(CMat& V, std::span<const cplx> u,
                        std::span<const cplx> s, double scale) {
  const double nrm = vec_norm(u);
  if (nrm == 0.0) return;
  const double f = scale / nrm;
  for (std::size_t m = 0; m < u.size(); ++m) {
    const cplx um = f * std::conj(u[m]);
    std::span<cplx> row = V.row(m);
    for (std::size_t t = 0; t < s.size(); ++t) row[t] += um * std::conj(s[t]);
  }
}

}  // namespace

Precoders precode_xl(const UplinkObservation& obs, const PilotBook& pilots,
                     const ScenarioConfig& cfg) {
  Precoders p;
  p.per_sa = false;
  p.V_xl = CMat(obs.M_b, obs.tau_p);
  const double scale = std::sqrt(cfg.q / cfg.B);
  for (int t = 0; t < obs.tau_p; ++t)
    add_precoded_pilot(p.V_xl, obs.y_sum[t], pilots.pilot(t), scale);
  return p;
}

Precoders precode_per_sa(const UplinkObservation& obs, const PilotBook& pilots,
                         const ScenarioConfig& cfg) {
  Precoders p;
  p.per_sa = true;
  p.V_sa.assign(obs.B, CMat(obs.M_b, obs.tau_p));
  const double scale = std::sqrt(cfg.q / cfg.B);
  for (int b = 0; b < obs.B; ++b)
    for (int t = 0; t < obs.tau_p; ++t)
      add_precoded_pilot(p.V_sa[b], obs.y[b][t], pilots.pilot(t), scale);
  return p;
}

cplx ue_observe(const UserRecord& user, const UserChannels& channels,
                const Precoders& prec, const PilotBook& pilots,
                const ScenarioConfig& cfg, Rng& rng) {
  if (user.chosen_pilot < 0 || user.chosen_pilot >= cfg.tau_p)
    throw std::invalid_argument("ue_observe: user has no step-1 pilot");
  // Received row vector over the visible subarrays, then correlate with the
  // user's own pilot: z_k = (sum_m h^(m)T V^(m)) s_t / ||s_t|| + eta_k.
  CVec received(cfg.tau_p, cplx{0.0, 0.0});
  for (int b = 0; b < cfg.B; ++b) {
    if (!user.vr.visible[b]) continue;
    const CMat& V = prec.per_sa ? prec.V_sa[b] : prec.V_xl;
    const CVec contrib = vecmat(channels.per_sa[b], V);
    for (int t = 0; t < cfg.tau_p; ++t) received[t] += contrib[t];
  }
  std::span<const cplx> s = pilots.pilot(user.chosen_pilot);
  cplx z = dotu(received, s) / std::sqrt(static_cast<double>(cfg.tau_p));
  if (cfg.sigma2 > 0.0) z += rng.cnormal(cfg.sigma2);
  return z;
}

double gamma_own(const UserRecord& user, const ScenarioConfig& cfg) {
  return cfg.rho * cfg.tau_p * user.beta_sum();
}

double chi_mean_factor_sq(int M_b) {
  // Direct Gamma overflows past M_b ~ 85; the log-domain difference does not.
  const double lg = std::lgamma(M_b + 0.5) - std::lgamma(static_cast<double>(M_b));
  return std::exp(2.0 * lg);
}

double estimate_alpha(cplx z, const UserRecord& user, const ScenarioConfig& cfg) {
  const double gamma = gamma_own(user, cfg);
  const double re = z.real();
  if (re == 0.0) return std::numeric_limits<double>::infinity();
  const double beta_sum = user.beta_sum();
  const double second =
      chi_mean_factor_sq(cfg.M_b) * cfg.rho * cfg.q * cfg.tau_p * cfg.tau_p *
          beta_sum * beta_sum / (cfg.B * re * re) -
      cfg.B * cfg.sigma2;
  return std::max(gamma, second);
}

double bias_term(const UserRecord& user, const ScenarioConfig& cfg) {
  return cfg.delta / std::sqrt(static_cast<double>(cfg.M_b)) * user.beta_sum();
}

Verdict decide(double gamma, double alpha_hat, double epsilon) {
  return (gamma > 0.5 * alpha_hat + epsilon) ? Verdict::repeat
                                             : Verdict::inactive;
}

UEDecision make_decision(const UserRecord& user, cplx z,
                         const ScenarioConfig& cfg) {
  UEDecision d;
  d.user = user.id;
  d.pilot = user.chosen_pilot;
  d.z = z;
  d.alpha_hat = estimate_alpha(z, user, cfg);
  d.epsilon = bias_term(user, cfg);
  d.verdict = decide(gamma_own(user, cfg), d.alpha_hat, d.epsilon);
  return d;
}

namespace {

bool pairwise_disjoint(std::span<const Contender> contenders,
                       const std::vector<std::size_t>& idx) {
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = a + 1; b < idx.size(); ++b)
      if (vrs_overlap(*contenders[idx[a]].vr, *contenders[idx[b]].vr))
        return false;
  return true;
}

}  // namespace

ContentionOutcome classify_contention(int pilot,
                                      std::span<const Contender> contenders,
                                      bool admit_disjoint_subset) {
  ContentionOutcome out;
  out.pilot = pilot;
  std::vector<std::size_t> rep_idx;
  for (std::size_t i = 0; i < contenders.size(); ++i) {
    out.contenders.push_back(contenders[i].id);
    if (contenders[i].repeats) {
      out.repeaters.push_back(contenders[i].id);
      rep_idx.push_back(i);
    }
  }

  if (rep_idx.empty()) {
    out.kase = ContentionCase::none_repeated;
    return out;
  }
  if (rep_idx.size() == 1) {
    out.kase = ContentionCase::single_winner;
    out.admitted = out.repeaters;
    return out;
  }
  if (pairwise_disjoint(contenders, rep_idx)) {
    out.kase = ContentionCase::nonoverlap_multi;
    out.admitted = out.repeaters;
    return out;
  }
  out.kase = ContentionCase::overlap_collision;
  if (admit_disjoint_subset) {
    // Variant rule: admit repeaters whose VR is disjoint from every other
    // repeater's VR.
    for (std::size_t a : rep_idx) {
      bool clean = true;
      for (std::size_t b : rep_idx) {
        if (a != b && vrs_overlap(*contenders[a].vr, *contenders[b].vr)) {
          clean = false;
          break;
        }
      }
      if (clean) out.admitted.push_back(contenders[a].id);
    }
  }
  return out;
}

ContentionOutcome baseline_decide(int pilot,
                                  std::span<const Contender> contenders) {
  std::vector<Contender> all(contenders.begin(), contenders.end());
  for (Contender& c : all) c.repeats = true;
  return classify_contention(pilot, all, false);
}

UserChannels stub_hardening_channels(const UserRecord& user, int user_index,
                                     int n_users, const ScenarioConfig& cfg) {
  if (cfg.M_b < n_users * cfg.B)
    throw std::invalid_argument(
        "stub_hardening_channels: needs M_b >= n_users * B");
  UserChannels ch;
  ch.per_sa.assign(cfg.B, CVec(cfg.M_b, cplx{0.0, 0.0}));
  for (int b = 0; b < cfg.B; ++b) {
    if (!user.vr.visible[b]) continue;
    const int direction = user_index * cfg.B + b;
    ch.per_sa[b][direction] = std::sqrt(cfg.M_b * user.beta_per_sa[b]);
  }
  return ch;
}

std::vector<ConvergencePoint> verify_sum_gain_convergence(
    const ConvergenceSlice& slice, std::span<const int> mb_grid, int trials,
    Rng& rng) {
  if (slice.beta.empty())
    throw std::invalid_argument("verify_sum_gain_convergence: empty slice");
  const int B = static_cast<int>(slice.beta.front().size());
  const int n_users = static_cast<int>(slice.beta.size());

  std::vector<ConvergencePoint> table;
  for (int mb : mb_grid) {
    ScenarioConfig cfg;
    cfg.B = B;
    cfg.M = B * mb;
    cfg.finalize();
    cfg.tau_p = slice.tau_p;
    cfg.rho = slice.rho;
    cfg.sigma2 = slice.sigma2;

    const PilotBook pilots = PilotBook::make(cfg.tau_p);

    // Synthetic users pinned to the slice's large-scale coefficients; every
    // contender transmits pilot 0.
    std::vector<UserRecord> users(n_users);
    for (int k = 0; k < n_users; ++k) {
      users[k].id = k;
      users[k].beta_per_sa = slice.beta[k];
      users[k].vr.visible.assign(B, 0);
      for (int b = 0; b < B; ++b)
        users[k].vr.visible[b] = slice.beta[k][b] > 0.0 ? 1 : 0;
      users[k].chosen_pilot = 0;
    }

    double err_acc = 0.0;
    CorrelationSpec iid;
    ArrayGeometry geo;  // unused by the iid sampler
    std::vector<UserChannels> chans(n_users);
    for (int trial = 0; trial < trials; ++trial) {
      std::vector<Transmitter> txs(n_users);
      for (int k = 0; k < n_users; ++k) {
        chans[k] = slice.exact_hardening
                       ? stub_hardening_channels(users[k], k, n_users, cfg)
                       : sample_channel(users[k], iid, geo, cfg, rng);
        txs[k] = {&users[k], &chans[k], 0};
      }
      const UplinkObservation obs = superimpose_uplink(txs, pilots, cfg, rng);
      const double target = obs.alpha_true[0] + B * cfg.sigma2;
      const double value = norm2(obs.y_sum[0]) / cfg.M_b;
      err_acc += std::abs(value - target) / target;
    }
    table.push_back({mb, err_acc / trials});
  }
  return table;
}

}  // namespace xlra
