#pragma once

#include <vector>

#include "xlra/linalg.hpp"
#include "xlra/rng.hpp"
#include "xlra/scenario.hpp"

namespace xlra {

enum class CorrelationMode { iid, exponential };

struct CorrelationSpec {
  CorrelationMode mode = CorrelationMode::iid;
  double r = 0.7;  // correlation index, used by the exponential model only
};

// [R]_{i,l} = r^{|l-i|} * exp(j*theta*(l-i)). Hermitian, unit diagonal, PSD.
CMat correlation_matrix(double theta, double r, int M_b);

// Lower-triangular L with L L^H = correlation_matrix(theta, r, M_b), built in
// closed form: R = D T D^H with D = diag(exp(-j*theta*i)) and T the real AR(1)
// Toeplitz matrix, whose factor is the first-order recursion below.
CMat correlation_factor(double theta, double r, int M_b);

// Angle of the user position relative to the subarray centroid, measured from
// array broadside (the +y direction).
double subarray_angle(const ArrayGeometry& geo, int b,
                      const std::array<double, 2>& position);

// One user's slice of a ChannelRealization: a length-M_b vector per subarray,
// exactly zero outside the visibility region.
struct UserChannels {
  std::vector<CVec> per_sa;
};

struct ChannelRealization {
  std::vector<UserChannels> users;
};

UserChannels sample_channel(const UserRecord& user, const CorrelationSpec& spec,
                            const ArrayGeometry& geo, const ScenarioConfig& cfg,
                            Rng& rng);

// Debug surface: one realization as CSV (subarray, antenna, re, im).
void dump_channel_csv(std::ostream& os, const UserChannels& ch);

}  // namespace xlra
