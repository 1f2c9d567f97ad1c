#pragma once

#include <array>
#include <optional>
#include <utility>

#include "vvsim/qcore.hpp"

// Vector-vortex mode construction and optical-element action.
//
// Conventions, fixed once for the whole artifact:
//   - circular basis coordinates are (R, L); |H> = (|R>+|L>)/sqrt2 and
//     |V> = i(|R>-|L>)/sqrt2, so the HWP Jones matrix in the circular
//     basis is [[0, e^{2i theta}], [e^{-2i theta}, 0]];
//   - a q-plate maps alpha|R,0> + beta|L,0> to alpha|L,-2q> + beta|R,2q>
//     and is its own inverse on the full mode ladder;
//   - the order-m basis is ((R,+m),(L,-m),(L,+m),(R,-m)): the VV pair
//     spans the leading block, the pi pair the trailing one.
namespace vvsim {

// Nonzero OAM order; negative values select the pi-mode encoding of |m|.
struct VVOrder {
  int m;

  explicit VVOrder(int order) : m(order) {
    if (m == 0) throw std::invalid_argument("VVOrder: order must be nonzero");
  }
  int magnitude() const { return m < 0 ? -m : m; }
  bool pi_encoded() const { return m < 0; }
};

enum class VVKind { radial, azimuthal };
enum class PiSign { plus, minus };
enum class BellLabel { psi_minus, psi_plus, phi_minus, phi_plus };

enum class ElementKind { qplate, hwp, qwp, polarizer };

// A unitary (or isometry, for the q-plate) with explicit input and output
// bases. Waveplates and polarizers act on the polarization factor and
// leave OAM alone.
struct OpticalElement {
  ElementKind kind;
  double parameter;  // q for qplate, angle in radians otherwise
  ModeBasis in_basis;
  ModeBasis out_basis;
  ComplexMatrix matrix;  // out_basis.dim() x in_basis.dim()
};

// Jones matrices on the circular polarization basis.
Eigen::Matrix2cd hwp_jones(double angle);
Eigen::Matrix2cd qwp_jones(double angle);

OpticalElement waveplate(ElementKind kind, double angle, const ModeBasis& basis);
OpticalElement polarizer_element(double angle, const ModeBasis& basis);
// Generation q-plate: isometry from the polarization qubit into the
// order-2q space.
OpticalElement qplate_element(double q);

PureState apply_element(const OpticalElement& e, const PureState& state);
// Applies a square element to one photon of a two-photon state.
PureState apply_to_photon(const OpticalElement& e, const PureState& state,
                          int photon);

// |r_m> = (|R,m>+|L,-m>)/sqrt2,  |theta_m> = (|R,m>-|L,-m>)/sqrt2.
PureState vv_state(VVOrder m, VVKind which);

// |pi+-_m> = (|R,-m> +- |L,m>)/sqrt2.
PureState pi_mode(VVOrder m, PiSign sign);

// q-plate action on a polarization qubit (OAM 0): result lives on the
// 4-dim order-2q basis. 2q must be a nonzero integer.
PureState qplate_generate(const PureState& pol, double q);

struct AnalyzeResult {
  std::optional<PureState> pol;  // empty when nothing survives the OAM-0 filter
  double success_prob = 0.0;
};

// Adjoint of qplate_generate followed by postselection on zero OAM
// (single-mode-fiber filtering). Requires 2q == basis order.
AnalyzeResult qplate_analyze(const PureState& state, double q);

// The logical qubit carried by a photon of given signed order: (|0>, |1>)
// = (|r_m>, |theta_m>) for m > 0; for m < 0 the hwp(0)-transported pair,
// which in this library's phase convention coincides with
// (pi_mode(+), pi_mode(-)) as stored (the hwp sign on |1> is absorbed by
// the first-amplitude-positive normalization of pi_mode).
std::array<PureState, 2> vv_qubit_basis(VVOrder m);

// Embeds 2-dim qubit coefficients into the photon's 4-dim order space via
// vv_qubit_basis.
PureState lift_qubit(VVOrder m, const Eigen::Vector2cd& coeffs);

// Entangled VV Bell pair on the 16-dim two-photon space. Photons with
// negative order pass an hwp(0) after their q-plate (pi-mode encoding).
// Output is phase-normalized (first nonzero amplitude real-positive).
PureState bell_vv(VVOrder m1, VVOrder m2, BellLabel which);

// 16x4 isometry whose columns span the intersystem qubit-pair subspace
// {|0>,|1>}_1 (x) {|0>,|1>}_2 (columns ordered 00,01,10,11), with the
// per-photon qubits from vv_qubit_basis.
ComplexMatrix intersystem_isometry(VVOrder m1, VVOrder m2);

// One-parameter noise model: p |Bell><Bell| + (1-p) P/4 with P the
// projector onto the intersystem qubit-pair subspace. Equivalent to a
// polarization-source Werner state pushed through ideal q-plates.
// Requires p in [1/3, 1].
DensityMatrix werner_vv(VVOrder m1, VVOrder m2, BellLabel which, double p);

// Pauli expectation values on the hybrid Poincare sphere of span
// {|R,m>, |L,-m>}; rejects states with support outside that block.
std::array<double, 3> hps_coords(const PureState& state);

// Permutation matrix taking order-basis coordinates
// ((R,+m),(L,-m),(L,+m),(R,-m)) to polarization (x) OAM tensor
// coordinates ((R,+m),(R,-m),(L,+m),(L,-m)).
Eigen::Matrix4cd mode_to_pol_oam();

// 4-dim single-photon product state from a polarization qubit (R,L
// coords) and an OAM qubit (+m,-m coords), expressed on the order basis.
ComplexVector pol_oam_product(const Eigen::Vector2cd& pol,
                              const Eigen::Vector2cd& oam);

}  // namespace vvsim
