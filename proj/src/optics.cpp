#include "vvsim/optics.hpp"

#include <cmath>

namespace vvsim {

namespace {

const Complex kI(0.0, 1.0);

constexpr double kSqrt2Inv = 0.70710678118654752440;

// Columns are |R>, |L> expressed in (H, V) coordinates.
Eigen::Matrix2cd circular_to_linear() {
  Eigen::Matrix2cd c;
  c << Complex(kSqrt2Inv, 0), Complex(kSqrt2Inv, 0),
       Complex(0, -kSqrt2Inv), Complex(0, kSqrt2Inv);
  return c;
}

int check_half_integer_charge(double q) {
  const double two_q = 2.0 * q;
  const double rounded = std::round(two_q);
  if (std::abs(two_q - rounded) > 1e-12)
    throw std::invalid_argument("qplate: charge must be a half-integer");
  if (rounded == 0.0)
    throw std::invalid_argument("qplate: charge must map to a nonzero order");
  return static_cast<int>(rounded);
}

// Lifts a polarization Jones matrix to a basis whose labels are
// (pol, oam): acts on pol, identity on oam.
ComplexMatrix lift_jones(const Eigen::Matrix2cd& jones, const ModeBasis& basis) {
  if (basis.photons() != 1)
    throw std::invalid_argument("waveplate: single-photon basis required");
  const int d = basis.dim();
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (int j = 0; j < d; ++j) {
    const ModeLabel& in = basis.label(j).front();
    for (Pol p : {Pol::R, Pol::L}) {
      const int i = basis.index_of({{p, in.oam}});
      if (i < 0) continue;
      out(i, j) = jones(p == Pol::R ? 0 : 1, in.pol == Pol::R ? 0 : 1);
    }
  }
  return out;
}

}  // namespace

Eigen::Matrix2cd hwp_jones(double angle) {
  Eigen::Matrix2cd m;
  m << Complex(0, 0), std::exp(Complex(0, 2.0 * angle)),
       std::exp(Complex(0, -2.0 * angle)), Complex(0, 0);
  return m;
}

Eigen::Matrix2cd qwp_jones(double angle) {
  // Fast axis at `angle` in the linear basis, retardance pi/2, conjugated
  // into the circular basis.
  const double c = std::cos(angle), s = std::sin(angle);
  Eigen::Matrix2cd rot;
  rot << c, -s, s, c;
  Eigen::Matrix2cd ret = Eigen::Matrix2cd::Zero();
  ret(0, 0) = 1.0;
  ret(1, 1) = kI;
  const Eigen::Matrix2cd lin = rot * ret * rot.transpose();
  const Eigen::Matrix2cd cb = circular_to_linear();
  return cb.adjoint() * lin * cb;
}

OpticalElement waveplate(ElementKind kind, double angle, const ModeBasis& basis) {
  if (kind != ElementKind::hwp && kind != ElementKind::qwp)
    throw std::invalid_argument("waveplate: kind must be hwp or qwp");
  const Eigen::Matrix2cd jones =
      kind == ElementKind::hwp ? hwp_jones(angle) : qwp_jones(angle);
  return {kind, angle, basis, basis, lift_jones(jones, basis)};
}

OpticalElement polarizer_element(double angle, const ModeBasis& basis) {
  const double c = std::cos(angle), s = std::sin(angle);
  // Linear polarization at `angle` in circular coordinates.
  Eigen::Vector2cd lin;
  lin << (c - kI * s) * kSqrt2Inv, (c + kI * s) * kSqrt2Inv;
  const Eigen::Matrix2cd jones = lin * lin.adjoint();
  return {ElementKind::polarizer, angle, basis, basis, lift_jones(jones, basis)};
}

OpticalElement qplate_element(double q) {
  const int m = check_half_integer_charge(q);
  const ModeBasis in = ModeBasis::polarization();
  const ModeBasis out = ModeBasis::vv_order(m);
  // alpha|R,0> + beta|L,0>  ->  alpha|L,-2q> + beta|R,2q>.
  ComplexMatrix mat = ComplexMatrix::Zero(4, 2);
  mat(0, 1) = 1.0;  // |L,0> -> |R,m>
  mat(1, 0) = 1.0;  // |R,0> -> |L,-m>
  return {ElementKind::qplate, q, in, out, mat};
}

PureState apply_element(const OpticalElement& e, const PureState& state) {
  if (!(state.basis() == e.in_basis))
    throw std::invalid_argument("apply_element: state basis does not match element");
  ComplexVector out = e.matrix * state.amp();
  if (e.kind == ElementKind::polarizer)
    return PureState::normalized(e.out_basis, out);
  return PureState(e.out_basis, std::move(out));
}

PureState apply_to_photon(const OpticalElement& e, const PureState& state,
                          int photon) {
  if (photon != 1 && photon != 2)
    throw std::invalid_argument("apply_to_photon: photon must be 1 or 2");
  if (e.matrix.rows() != e.matrix.cols())
    throw std::invalid_argument("apply_to_photon: element must be square");
  const int d = e.matrix.rows();
  if (state.dim() != d * d || state.basis().photons() != 2)
    throw std::invalid_argument("apply_to_photon: dimension mismatch");
  const ComplexMatrix id = ComplexMatrix::Identity(d, d);
  const ComplexMatrix full = photon == 1 ? tensor(e.matrix, id) : tensor(id, e.matrix);
  return PureState(state.basis(), full * state.amp());
}

PureState vv_state(VVOrder m, VVKind which) {
  ComplexVector amp = ComplexVector::Zero(4);
  amp[0] = kSqrt2Inv;
  amp[1] = which == VVKind::radial ? kSqrt2Inv : -kSqrt2Inv;
  return PureState(ModeBasis::vv_order(m.m), amp).phase_normalized();
}

PureState pi_mode(VVOrder m, PiSign sign) {
  ComplexVector amp = ComplexVector::Zero(4);
  amp[2] = sign == PiSign::plus ? kSqrt2Inv : -kSqrt2Inv;
  amp[3] = kSqrt2Inv;
  return PureState(ModeBasis::vv_order(m.m), amp).phase_normalized();
}

PureState qplate_generate(const PureState& pol, double q) {
  if (!(pol.basis() == ModeBasis::polarization()))
    throw std::invalid_argument("qplate_generate: input must be a polarization qubit at OAM 0");
  return apply_element(qplate_element(q), pol);
}

AnalyzeResult qplate_analyze(const PureState& state, double q) {
  const int m = check_half_integer_charge(q);
  if (!(state.basis() == ModeBasis::vv_order(m)))
    throw std::invalid_argument("qplate_analyze: charge does not match state order");
  // The q-plate sends |R,m>,|L,-m> back to OAM 0 and the pi pair to OAM
  // +-2m, which the fiber filter removes.
  Eigen::Vector2cd pol_amp;
  pol_amp << state.amp()[1],   // |L,-m> -> |R,0>
             state.amp()[0];   // |R,m>  -> |L,0>
  const double prob = pol_amp.squaredNorm();
  AnalyzeResult out;
  out.success_prob = prob;
  if (prob > 1e-15)
    out.pol = PureState::normalized(ModeBasis::polarization(), pol_amp);
  return out;
}

std::array<PureState, 2> vv_qubit_basis(VVOrder m) {
  const VVOrder mag(m.magnitude());
  PureState zero = vv_state(mag, VVKind::radial);
  PureState one = vv_state(mag, VVKind::azimuthal);
  if (m.pi_encoded()) {
    const OpticalElement flip = waveplate(ElementKind::hwp, 0.0, zero.basis());
    zero = apply_element(flip, zero);   // |pi+>
    one = apply_element(flip, one);     // -|pi->
  }
  return {std::move(zero), std::move(one)};
}

PureState lift_qubit(VVOrder m, const Eigen::Vector2cd& coeffs) {
  const auto basis = vv_qubit_basis(m);
  return PureState::normalized(
      basis[0].basis(), coeffs[0] * basis[0].amp() + coeffs[1] * basis[1].amp());
}

PureState bell_vv(VVOrder m1, VVOrder m2, BellLabel which) {
  // Polarization qubit frame (|H>, i|V>): the exact q-plate preimages of
  // (|r>, |theta>), so labeled polarization Bell states map onto the
  // same-labeled VV Bell family with no residual local phases.
  const ModeBasis pol = ModeBasis::polarization();
  Eigen::Vector2cd zero_pol, one_pol;
  zero_pol << kSqrt2Inv, kSqrt2Inv;     // |H>
  one_pol << -kSqrt2Inv, kSqrt2Inv;     // i|V> = (|L>-|R>)/sqrt2

  ComplexVector pair = ComplexVector::Zero(4);
  const auto put = [&](int i, int j, double w) {
    Eigen::Vector2cd a = i == 0 ? zero_pol : one_pol;
    Eigen::Vector2cd b = j == 0 ? zero_pol : one_pol;
    for (int r = 0; r < 2; ++r)
      for (int c = 0; c < 2; ++c) pair[r * 2 + c] += w * a[r] * b[c];
  };
  switch (which) {
    case BellLabel::psi_minus: put(0, 1, kSqrt2Inv); put(1, 0, -kSqrt2Inv); break;
    case BellLabel::psi_plus:  put(0, 1, kSqrt2Inv); put(1, 0, kSqrt2Inv); break;
    case BellLabel::phi_minus: put(0, 0, kSqrt2Inv); put(1, 1, -kSqrt2Inv); break;
    case BellLabel::phi_plus:  put(0, 0, kSqrt2Inv); put(1, 1, kSqrt2Inv); break;
  }
  PureState pol_pair(ModeBasis::tensor(pol, pol), pair);

  // Push each photon through its generation q-plate (and the pi HWP).
  const OpticalElement qp1 = qplate_element(m1.magnitude() / 2.0);
  const OpticalElement qp2 = qplate_element(m2.magnitude() / 2.0);
  const ComplexMatrix joint = tensor(qp1.matrix, qp2.matrix);
  PureState out(ModeBasis::tensor(qp1.out_basis, qp2.out_basis),
                joint * pol_pair.amp());
  if (m1.pi_encoded())
    out = apply_to_photon(waveplate(ElementKind::hwp, 0.0, qp1.out_basis), out, 1);
  if (m2.pi_encoded())
    out = apply_to_photon(waveplate(ElementKind::hwp, 0.0, qp2.out_basis), out, 2);
  return out.phase_normalized();
}

ComplexMatrix intersystem_isometry(VVOrder m1, VVOrder m2) {
  const auto b1 = vv_qubit_basis(m1);
  const auto b2 = vv_qubit_basis(m2);
  ComplexMatrix iso(16, 4);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      iso.col(i * 2 + j) = tensor(b1[i].amp(), b2[j].amp());
  return iso;
}

DensityMatrix werner_vv(VVOrder m1, VVOrder m2, BellLabel which, double p) {
  if (p < 1.0 / 3.0 - 1e-12 || p > 1.0 + 1e-12)
    throw std::invalid_argument("werner_vv: p must lie in [1/3, 1]");
  const PureState bell = bell_vv(m1, m2, which);
  const ComplexMatrix iso = intersystem_isometry(m1, m2);
  ComplexMatrix rho = p * (bell.amp() * bell.amp().adjoint()) +
                      (1.0 - p) / 4.0 * (iso * iso.adjoint());
  rho = (rho + rho.adjoint().eval()) / 2.0;
  return DensityMatrix(bell.basis(), std::move(rho));
}

std::array<double, 3> hps_coords(const PureState& state) {
  if (state.dim() != 4 || state.basis().photons() != 1)
    throw std::invalid_argument("hps_coords: 4-dim single-photon state required");
  const ComplexVector& a = state.amp();
  const double outside = a.tail(2).squaredNorm();
  if (outside > 1e-9)
    throw std::invalid_argument("hps_coords: support outside the VV subspace");
  const Complex cross = std::conj(a[0]) * a[1];
  return {2.0 * cross.real(), 2.0 * cross.imag(),
          std::norm(a[0]) - std::norm(a[1])};
}

Eigen::Matrix4cd mode_to_pol_oam() {
  Eigen::Matrix4cd p = Eigen::Matrix4cd::Zero();
  p(0, 0) = 1.0;  // (R,+m)
  p(3, 1) = 1.0;  // (L,-m)
  p(2, 2) = 1.0;  // (L,+m)
  p(1, 3) = 1.0;  // (R,-m)
  return p;
}

ComplexVector pol_oam_product(const Eigen::Vector2cd& pol,
                              const Eigen::Vector2cd& oam) {
  ComplexVector out(4);
  out[0] = pol[0] * oam[0];  // (R,+m)
  out[1] = pol[1] * oam[1];  // (L,-m)
  out[2] = pol[1] * oam[0];  // (L,+m)
  out[3] = pol[0] * oam[1];  // (R,-m)
  return out;
}

}  // namespace vvsim
