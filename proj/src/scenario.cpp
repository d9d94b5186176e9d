#include "xlra/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace xlra {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(M >= 1, "M: must be a positive integer");
  require(B >= 1, "B: must be a positive integer");
  require(M % B == 0, "B: must divide M (M mod B = 0)");
  require(M_b == M / B, "M_b: inconsistent with M/B");
  require(array_length_m > 0.0, "array_length_m: must be positive");
  require(cell_side_m > 0.0, "cell_side_m: must be positive");
  require(array_length_m <= cell_side_m,
          "array_length_m: must not exceed cell_side_m");
  require(K >= 1, "K: must be a positive integer");
  require(P_a >= 0.0 && P_a <= 1.0, "P_a: must be in [0,1]");
  require(tau_p >= 1, "tau_p: must be >= 1");
  require(P_b >= 0.0 && P_b <= 1.0, "P_b: must be in [0,1]");
  require(vr_mode == VrMode::full || P_b > 0.0,
          "P_b: must be > 0 (no valid visibility region exists otherwise)");
  require(rho >= 0.0, "rho: must be nonnegative");
  require(q >= 0.0, "q: must be nonnegative");
  require(sigma2 > 0.0, "sigma2: must be positive");
  require(sigma_sf_dB >= 0.0, "sigma_sf_dB: must be nonnegative");
  require(r > 0.0 && r < 1.0, "r: must be in (0,1)");
  require(retry_prob >= 0.0 && retry_prob <= 1.0,
          "retry_prob: must be in [0,1]");
  require(max_attempts >= 1, "max_attempts: must be a positive integer");
  require(n_blocks >= 0, "n_blocks: must be nonnegative");
}

int VisibilityRegion::popcount() const {
  int n = 0;
  for (std::uint8_t v : visible) n += (v != 0);
  return n;
}

bool vrs_overlap(const VisibilityRegion& a, const VisibilityRegion& b) {
  for (std::size_t i = 0; i < a.visible.size(); ++i)
    if (a.visible[i] && b.visible[i]) return true;
  return false;
}

double UserRecord::beta_sum() const {
  double s = 0.0;
  for (double b : beta_per_sa) s += b;
  return s;
}

ArrayGeometry build_geometry(const ScenarioConfig& cfg) {
  ArrayGeometry geo;
  geo.antenna_positions.resize(cfg.M);
  geo.subarray_index.resize(cfg.M);
  geo.subarray_centroids.assign(cfg.B, {0.0, 0.0});

  // ULA on the cell edge y = 0, centered: x spans
  // [(cell_side - array_length)/2, (cell_side + array_length)/2].
  const double x0 = 0.5 * (cfg.cell_side_m - cfg.array_length_m);
  const double spacing =
      (cfg.M > 1) ? cfg.array_length_m / static_cast<double>(cfg.M - 1) : 0.0;
  for (int m = 0; m < cfg.M; ++m) {
    const double x = (cfg.M > 1) ? x0 + spacing * m
                                 : 0.5 * cfg.cell_side_m;
    geo.antenna_positions[m] = {x, 0.0};
    const int b = m / cfg.M_b;  // contiguous runs of M_b antennas
    geo.subarray_index[m] = b;
    geo.subarray_centroids[b][0] += x / cfg.M_b;
  }
  return geo;
}

double pathloss_linear(double d_m, double shadow_dB, const ScenarioConfig& cfg) {
  if (d_m <= 0.0) throw std::invalid_argument("pathloss_linear: d_m must be > 0");
  return std::pow(10.0, -cfg.kappa * std::log10(d_m) +
                            (cfg.g_dB + shadow_dB) / 10.0);
}

VisibilityRegion sample_visibility(const ScenarioConfig& cfg, Rng& rng) {
  VisibilityRegion vr;
  vr.visible.assign(cfg.B, 0);
  if (cfg.vr_mode == VrMode::full) {
    for (auto& v : vr.visible) v = 1;
    return vr;
  }
  if (cfg.P_b <= 0.0)
    throw std::invalid_argument("P_b: must be > 0 to sample a visibility region");
  // Rejection sampling conditions on |V| >= 1.
  while (true) {
    int count = 0;
    for (int b = 0; b < cfg.B; ++b) {
      vr.visible[b] = rng.bernoulli(cfg.P_b) ? 1 : 0;
      count += vr.visible[b];
    }
    if (count > 0) return vr;
  }
}

UserRecord sample_user(const ArrayGeometry& geo, const ScenarioConfig& cfg,
                       Rng& rng) {
  UserRecord u;

  // Uniform position in the cell square, at least d_min from every antenna.
  // The array sits on the edge, so checking the two ends and the nearest
  // antenna would be enough; checking all antennas keeps it obvious.
  constexpr int kMaxResample = 100000;
  int tries = 0;
  while (true) {
    if (++tries > kMaxResample)
      throw std::runtime_error(
          "sample_user: position resampling cap exceeded (d_min unsatisfiable)");
    u.position = {rng.uniform() * cfg.cell_side_m,
                  rng.uniform() * cfg.cell_side_m};
    bool ok = true;
    for (const auto& a : geo.antenna_positions) {
      const double dx = u.position[0] - a[0];
      const double dy = u.position[1] - a[1];
      if (dx * dx + dy * dy < kMinUserAntennaDistanceM * kMinUserAntennaDistanceM) {
        ok = false;
        break;
      }
    }
    if (ok) break;
  }

  u.shadow_dB = rng.normal() * cfg.sigma_sf_dB;
  u.vr = sample_visibility(cfg, rng);

  // Per-subarray large-scale coefficient: mean of the per-antenna pathloss
  // over the subarray, zero for invisible subarrays.
  u.beta_per_sa.assign(cfg.B, 0.0);
  for (int m = 0; m < cfg.M; ++m) {
    const int b = geo.subarray_index[m];
    if (!u.vr.visible[b]) continue;
    const double dx = u.position[0] - geo.antenna_positions[m][0];
    const double dy = u.position[1] - geo.antenna_positions[m][1];
    const double d = std::sqrt(dx * dx + dy * dy);
    u.beta_per_sa[b] += pathloss_linear(d, u.shadow_dB, cfg) / cfg.M_b;
  }
  return u;
}

double p_no_analytic(int s, double P_b, int B) {
  if (s < 1) throw std::invalid_argument("p_no_analytic: s must be >= 1");
  const double base = std::pow(1.0 - P_b, s) +
                      s * P_b * std::pow(1.0 - P_b, s - 1);
  return std::pow(base, B);
}

void dump_scenario_csv(std::ostream& os, const ScenarioConfig& cfg,
                       const std::vector<UserRecord>& users) {
  os << "id,x_m,y_m,shadow_dB,vr_bitmap,vr_size";
  for (int b = 0; b < cfg.B; ++b) os << ",beta_sa" << (b + 1);
  os << "\r\n";
  char buf[64];
  for (const auto& u : users) {
    os << u.id;
    std::snprintf(buf, sizeof(buf), ",%.6f,%.6f,%.6f", u.position[0],
                  u.position[1], u.shadow_dB);
    os << buf << ",";
    for (int b = 0; b < cfg.B; ++b) os << (u.vr.visible[b] ? '1' : '0');
    os << "," << u.vr.popcount();
    for (int b = 0; b < cfg.B; ++b) {
      std::snprintf(buf, sizeof(buf), ",%.10e", u.beta_per_sa[b]);
      os << buf;
    }
    os << "\r\n";
  }
}

}  // namespace xlra
