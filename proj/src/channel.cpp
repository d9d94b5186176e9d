#include "xlra/channel.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace xlra {

namespace {

void check_r(double r) {
  if (!(r > 0.0 && r < 1.0))
    throw std::invalid_argument("correlation index r must be in (0,1)");
}

}  // namespace

CMat correlation_matrix(double theta, double r, int M_b) {
  check_r(r);
  CMat R(M_b, M_b);
  for (int i = 0; i < M_b; ++i) {
    for (int l = 0; l < M_b; ++l) {
      const int lag = l - i;
      const double mag = std::pow(r, std::abs(lag));
      R(i, l) = std::polar(mag, theta * lag);
    }
  }
  return R;
}

CMat correlation_factor(double theta, double r, int M_b) {
  check_r(r);
  // T = AR(1) Toeplitz: L_T(i,j) = r^(i-j) * s for j >= 1, first column r^i,
  // with s = sqrt(1 - r^2). Phase ramp D on the left keeps L lower-triangular.
  const double s = std::sqrt(1.0 - r * r);
  CMat L(M_b, M_b);
  for (int i = 0; i < M_b; ++i) {
    const cplx phase = std::polar(1.0, -theta * i);
    for (int j = 0; j <= i; ++j) {
      const double mag = std::pow(r, i - j) * (j == 0 ? 1.0 : s);
      L(i, j) = phase * mag;
    }
  }
  return L;
}

double subarray_angle(const ArrayGeometry& geo, int b,
                      const std::array<double, 2>& position) {
  const double dx = position[0] - geo.subarray_centroids[b][0];
  const double dy = position[1] - geo.subarray_centroids[b][1];
  return std::atan2(dx, dy);
}

UserChannels sample_channel(const UserRecord& user, const CorrelationSpec& spec,
                            const ArrayGeometry& geo, const ScenarioConfig& cfg,
                            Rng& rng) {
  UserChannels ch;
  ch.per_sa.assign(cfg.B, CVec{});
  for (int b = 0; b < cfg.B; ++b) {
    CVec& h = ch.per_sa[b];
    h.assign(cfg.M_b, cplx{0.0, 0.0});
    if (!user.vr.visible[b]) continue;  // invisible subarray: exact zero

    const double amp = std::sqrt(user.beta_per_sa[b]);
    if (spec.mode == CorrelationMode::iid) {
      for (int m = 0; m < cfg.M_b; ++m) h[m] = amp * rng.cnormal(1.0);
      continue;
    }

    // Correlated draw: h = sqrt(beta) * D * (L_T w), applying the AR(1)
    // factor as a first-order recursion and the phase ramp elementwise.
    check_r(spec.r);
    const double theta = subarray_angle(geo, b, user.position);
    const double s = std::sqrt(1.0 - spec.r * spec.r);
    cplx prev{0.0, 0.0};
    for (int m = 0; m < cfg.M_b; ++m) {
      const cplx w = rng.cnormal(1.0);
      const cplx x = (m == 0) ? w : spec.r * prev + s * w;
      prev = x;
      h[m] = amp * std::polar(1.0, -theta * m) * x;
    }
  }
  return ch;
}

void dump_channel_csv(std::ostream& os, const UserChannels& ch) {
  os << "subarray,antenna,re,im\r\n";
  char buf[96];
  for (std::size_t b = 0; b < ch.per_sa.size(); ++b) {
    for (std::size_t m = 0; m < ch.per_sa[b].size(); ++m) {
      std::snprintf(buf, sizeof(buf), "%zu,%zu,%.12e,%.12e\r\n", b + 1, m + 1,
                    ch.per_sa[b][m].real(), ch.per_sa[b][m].imag());
      os << buf;
    }
  }
}

}  // namespace xlra
