#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "vvsim/optics.hpp"
#include "vvsim/qcore.hpp"

// Projective measurement simulation: tomography settings, Poissonian
// coincidence counting with an accidental background, dark-count
// correction and CHSH estimation.
namespace vvsim {

struct MeasurementSetting {
  PureState projector_1;
  PureState projector_2;
  std::string id_1;
  std::string id_2;
  std::string label;
};

struct CountRecord {
  MeasurementSetting setting;
  long long coincidences = 0;  // raw records include the accidentals
  long long accidentals = 0;
  double integration = 0.0;    // nominal exposure: expected counts per unit Born probability
  bool corrected = false;
};

// Hyper-complete per-qubit tomography: the six Pauli eigenstates of the
// polarization and OAM qubits of each photon, 6^4 = 1296 product
// settings. Ordering runs (pol1, oam1, pol2, oam2), last index fastest.
std::vector<MeasurementSetting> tomography_settings(VVOrder m1, VVOrder m2);

// Tr(rho P1 (x) P2).
double born_probability(const DensityMatrix& rho, const MeasurementSetting& setting);

// Poissonian counts: coincidences ~ Poisson(n * p_born) plus an
// independent Poisson(n * dark_rate) accidental background, both stored.
// Setting k draws from stream (seed, k), so any evaluation order yields
// the same records.
std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                         const std::vector<MeasurementSetting>& settings,
                                         long long n_per_setting, double dark_rate,
                                         std::uint64_t seed);

// coincidences' = max(0, coincidences - accidentals), corrected flag set.
std::vector<CountRecord> dark_correct(const std::vector<CountRecord>& records);

// Ordered measurement bases on the VV qubit (|0> = |r_m>, |1> = |theta_m>),
// index 0 = +1 outcome. Alice measures along Bloch angles {0, pi/2}, Bob
// along {pi/4, -pi/4}: the settings of the standard maximal CHSH
// violation, with outcome signs fixed so S reaches 2 sqrt 2 on the
// source state.
struct ChshBases {
  std::array<std::array<Eigen::Vector2cd, 2>, 2> alice;  // [basis][outcome]
  std::array<std::array<Eigen::Vector2cd, 2>, 2> bob;
};

ChshBases chsh_bases();

// The 16 product settings (4 basis pairs x 4 outcome pairs) lifted to the
// photons' order spaces; ids "a0+", "b1-", labels "a0b1:+-".
std::vector<MeasurementSetting> chsh_settings(VVOrder m1, VVOrder m2);

struct CHSHResult {
  double S = 0.0;
  double sigma_S = 0.0;
  std::array<double, 4> correlators{};  // E(a_i, b_j), index i*2+j
};

// S = |E(a0,b0) + E(a1,b0) + E(a0,b1) - E(a1,b1)| from Born probabilities.
CHSHResult chsh_s(const DensityMatrix& rho16, VVOrder m1, VVOrder m2);

// Same S from a complete 16-record count set; correlators are count
// ratios and sigma_S comes from first-order Poisson propagation.
CHSHResult chsh_s_from_counts(const std::vector<CountRecord>& records);

// CSV with columns label,projector1,projector2,coincidences,accidentals,
// integration,corrected.
void write_counts_csv(std::ostream& out, const std::vector<CountRecord>& records);

// Rebuilds records written by write_counts_csv, resolving projector ids
// against the tomography and CHSH id schemes for the given orders.
std::vector<CountRecord> read_counts_csv(std::istream& in, VVOrder m1, VVOrder m2);

}  // namespace vvsim
