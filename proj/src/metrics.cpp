#include "vvsim/metrics.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace vvsim {

namespace {

const Complex kI(0.0, 1.0);
constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Inv = 0.70710678118654752440;
constexpr double kNullProjectionTol = 1e-12;

Eigen::Matrix4cd sigma_yy() {
  Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
  m(0, 3) = -1.0;
  m(1, 2) = 1.0;
  m(2, 1) = 1.0;
  m(3, 0) = -1.0;
  return m;
}

void check_physical_4x4(const ComplexMatrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4)
    throw std::invalid_argument("concurrence: 4x4 matrix required");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("concurrence: matrix not Hermitian");
  if (std::abs(rho.trace().real() - 1.0) > 1e-8)
    throw std::invalid_argument("concurrence: trace != 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      ComplexMatrix((rho + rho.adjoint()) / 2.0), Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -1e-7)
    throw std::invalid_argument("concurrence: negative eigenvalue, state unphysical");
}

// Single-photon basis of one factor of a two-photon tensor basis.
ModeBasis photon_basis_of(const ModeBasis& basis16, int photon) {
  const int d = 4;
  std::vector<BasisLabel> labels;
  labels.reserve(d);
  for (int i = 0; i < d; ++i) {
    const BasisLabel& full = basis16.label(photon == 1 ? i * d : i);
    labels.push_back({full[photon - 1]});
  }
  return ModeBasis(std::move(labels));
}

void append_pol_oam_products(std::vector<ProjectorEntry>& out,
                             const ModeBasis& basis) {
  struct Pol2 { const char* id; Eigen::Vector2cd v; };
  struct Oam2 { const char* id; Eigen::Vector2cd v; };
  const std::vector<Pol2> circ = {
      {"R", {Complex(1, 0), Complex(0, 0)}},
      {"L", {Complex(0, 0), Complex(1, 0)}},
  };
  const std::vector<Pol2> lin = {
      {"H", {Complex(kSqrt2Inv, 0), Complex(kSqrt2Inv, 0)}},
      {"V", {Complex(0, kSqrt2Inv), Complex(0, -kSqrt2Inv)}},
      {"D", {Complex(0.5, 0.5), Complex(0.5, -0.5)}},
      {"A", {Complex(0.5, -0.5), Complex(0.5, 0.5)}},
  };
  const std::vector<Oam2> oam4 = {
      {"O+", {Complex(1, 0), Complex(0, 0)}},
      {"O-", {Complex(0, 0), Complex(1, 0)}},
      {"OD+", {Complex(kSqrt2Inv, 0), Complex(kSqrt2Inv, 0)}},
      {"OD-", {Complex(kSqrt2Inv, 0), Complex(-kSqrt2Inv, 0)}},
  };
  const std::vector<Oam2> oam2 = {oam4[0], oam4[1]};

  for (const auto& p : circ)
    for (const auto& o : oam4)
      out.push_back({std::string(p.id) + "." + o.id,
                     PureState::normalized(basis, pol_oam_product(p.v, o.v))});
  for (const auto& p : lin)
    for (const auto& o : oam2)
      out.push_back({std::string(p.id) + "." + o.id,
                     PureState::normalized(basis, pol_oam_product(p.v, o.v))});
}

}  // namespace

ConcurrenceReport concurrence(const ComplexMatrix& rho4) {
  check_physical_4x4(rho4);
  const Eigen::Matrix4cd yy = sigma_yy();
  const ComplexMatrix rho_tilde = yy * rho4.conjugate() * yy;
  // The lambdas are the square roots of the eigenvalues of rho *
  // rho_tilde. That product is similar to the Hermitian PSD matrix
  // sqrt(rho) rho_tilde sqrt(rho), whose spectrum a self-adjoint solver
  // resolves without the O(eps^(1/3)) blowup the defective non-Hermitian
  // form suffers on pure states. Roundoff negatives clip to zero.
  const ComplexMatrix sr = matrix_sqrt(rho4);
  const EigenDecomposition eig = hermitian_eigen(sr * rho_tilde * sr);

  // Eigenvalues at the solver's noise floor are indistinguishable from
  // zero and would each leak sqrt(noise) into the lambda sum; cut them.
  const double floor_tol =
      64.0 * std::numeric_limits<double>::epsilon() * std::max(eig.values[0], 0.0);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i)
    lam[i] = eig.values[i] > floor_tol ? std::sqrt(eig.values[i]) : 0.0;
  std::sort(lam.begin(), lam.end(), std::greater<double>());

  ConcurrenceReport report;
  report.wootters_lambdas = lam;
  report.value = std::clamp(lam[0] - lam[1] - lam[2] - lam[3], 0.0, 1.0);
  return report;
}

ConcurrenceReport intrasystem_concurrence(const ComplexMatrix& rho4) {
  const Eigen::Matrix4cd p = mode_to_pol_oam();
  return concurrence(p * rho4 * p.adjoint());
}

double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("fidelity: dimension mismatch");
  const ComplexMatrix sr = matrix_sqrt(rho);
  const double f = matrix_sqrt(sr * sigma * sr).trace().real();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma) {
  return fidelity(rho.matrix(), sigma.matrix());
}

double purity(const DensityMatrix& rho) {
  return (rho.matrix() * rho.matrix()).trace().real();
}

ConditionalState conditional_state(const DensityMatrix& rho16, int projected_photon,
                                   const PureState& chi) {
  if (projected_photon != 1 && projected_photon != 2)
    throw std::invalid_argument("conditional_state: photon must be 1 or 2");
  if (rho16.dim() != 16 || chi.dim() != 4)
    throw std::invalid_argument("conditional_state: 16-dim state and 4-dim projector required");

  // K = <chi| on the projected factor, identity on the kept one.
  ComplexMatrix k = ComplexMatrix::Zero(4, 16);
  for (int i = 0; i < 4; ++i)
    for (int c = 0; c < 4; ++c) {
      const int col = projected_photon == 2 ? i * 4 + c : c * 4 + i;
      k(i, col) = std::conj(chi.amp()[c]);
    }
  ComplexMatrix m = k * rho16.matrix() * k.adjoint();
  const double prob = m.trace().real();
  if (prob < kNullProjectionTol)
    throw std::domain_error("conditional_state: projection onto a null outcome");
  m /= prob;
  m = (m + m.adjoint().eval()) / 2.0;
  const ModeBasis kept =
      photon_basis_of(rho16.basis(), projected_photon == 1 ? 2 : 1);
  return {DensityMatrix(kept, std::move(m), Tolerances{1e-7}), prob};
}

ConcurrenceDistribution concurrence_distribution(
    const DensityMatrix& rho16, const std::vector<ProjectorEntry>& projectors,
    int projected_photon) {
  ConcurrenceDistribution dist;
  dist.entries.reserve(projectors.size());
  for (const auto& proj : projectors) {
    DistributionEntry entry;
    entry.label = proj.label;

    // Probability first: null outcomes observe nothing and count as
    // separable instead of propagating the conditional-state error.
    const ComplexVector& chi = proj.state.amp();
    ComplexMatrix k = ComplexMatrix::Zero(4, 16);
    for (int i = 0; i < 4; ++i)
      for (int c = 0; c < 4; ++c) {
        const int col = projected_photon == 2 ? i * 4 + c : c * 4 + i;
        k(i, col) = std::conj(chi[c]);
      }
    entry.probability = (k * rho16.matrix() * k.adjoint()).trace().real();
    if (entry.probability >= kNullProjectionTol) {
      const ConditionalState cond =
          conditional_state(rho16, projected_photon, proj.state);
      entry.concurrence = intrasystem_concurrence(cond.rho.matrix()).value;
    }
    entry.entangled_region = entry.concurrence > kEntangledThreshold;
    (entry.entangled_region ? dist.entangled_labels : dist.separable_labels)
        .push_back(entry.label);
    dist.entries.push_back(std::move(entry));
  }
  return dist;
}

IntersystemConcurrence intersystem_concurrence(const DensityMatrix& rho16,
                                               VVOrder m1, VVOrder m2) {
  const ModeBasis expected = ModeBasis::tensor(ModeBasis::vv_order(m1.magnitude()),
                                               ModeBasis::vv_order(m2.magnitude()));
  if (!(rho16.basis() == expected))
    throw std::invalid_argument("intersystem_concurrence: basis does not match orders");

  const ComplexMatrix iso = intersystem_isometry(m1, m2);
  ComplexMatrix sub = iso.adjoint() * rho16.matrix() * iso;
  const double weight = sub.trace().real();
  if (weight < kNullProjectionTol)
    throw std::domain_error("intersystem_concurrence: no weight in the VV subspace");
  sub /= weight;
  sub = (sub + sub.adjoint().eval()) / 2.0;
  return {concurrence(sub), weight};
}

std::vector<ProjectorEntry> default_projector_set(const ModeBasis& photon_basis) {
  if (photon_basis.dim() != 4 || photon_basis.photons() != 1)
    throw std::invalid_argument("default_projector_set: 4-dim single-photon basis required");
  std::vector<ProjectorEntry> out;
  out.reserve(34);
  append_pol_oam_products(out, photon_basis);

  const auto vv_vec = [](double a0, double a1) {
    ComplexVector v = ComplexVector::Zero(4);
    v[0] = a0;
    v[1] = a1;
    return v;
  };
  out.push_back({"rad", PureState::normalized(photon_basis, vv_vec(kSqrt2Inv, kSqrt2Inv))});
  out.push_back({"azi", PureState::normalized(photon_basis, vv_vec(kSqrt2Inv, -kSqrt2Inv))});
  ComplexVector pip = ComplexVector::Zero(4), pim = ComplexVector::Zero(4);
  pip[2] = kSqrt2Inv;
  pip[3] = kSqrt2Inv;
  pim[2] = -kSqrt2Inv;
  pim[3] = kSqrt2Inv;
  out.push_back({"pi+", PureState::normalized(photon_basis, pip)});
  out.push_back({"pi-", PureState::normalized(photon_basis, pim)});

  // cos(k pi/14)|rad> + i sin(k pi/14)|azi>, k = 1..14. The quarter
  // relative phase keeps every member maximally pol-OAM entangled, so
  // ideal-state outcomes stay in {0, 1}.
  const ComplexVector rad = vv_vec(kSqrt2Inv, kSqrt2Inv);
  const ComplexVector azi = vv_vec(kSqrt2Inv, -kSqrt2Inv);
  for (int k = 1; k <= 14; ++k) {
    const double theta = k * kPi / 14.0;
    ComplexVector v = std::cos(theta) * rad + kI * std::sin(theta) * azi;
    char label[16];
    std::snprintf(label, sizeof(label), "sup%02d", k);
    out.push_back({label, PureState::normalized(photon_basis, v)});
  }
  return out;
}

std::vector<ProjectorEntry> load_projector_set(std::istream& in,
                                               const ModeBasis& photon_basis) {
  std::vector<ProjectorEntry> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string label;
    if (!(fields >> label)) continue;  // blank line
    ComplexVector amp(4);
    for (int i = 0; i < 4; ++i) {
      std::string pair;
      double re = 0.0, im = 0.0;
      if (!(fields >> pair) ||
          std::sscanf(pair.c_str(), "%lf,%lf", &re, &im) != 2)
        throw std::invalid_argument("projector set: malformed amplitude on line " +
                                    std::to_string(lineno));
      amp[i] = Complex(re, im);
    }
    std::string extra;
    if (fields >> extra)
      throw std::invalid_argument("projector set: trailing tokens on line " +
                                  std::to_string(lineno));
    if (std::abs(amp.norm() - 1.0) > 1e-9)
      throw std::invalid_argument("projector set: state on line " +
                                  std::to_string(lineno) + " is not normalized");
    out.push_back({std::move(label), PureState::normalized(photon_basis, amp)});
  }
  if (out.empty())
    throw std::invalid_argument("projector set: no states found");
  return out;
}

std::vector<ProjectorEntry> load_projector_set_file(const std::string& path,
                                                    const ModeBasis& photon_basis) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("projector set: cannot open " + path);
  return load_projector_set(in, photon_basis);
}

void save_projector_set(std::ostream& out, const std::vector<ProjectorEntry>& set) {
  out << "# label re,im re,im re,im re,im  (amplitudes on the order basis)\n";
  for (const auto& entry : set) {
    out << entry.label;
    for (int i = 0; i < 4; ++i) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), " %.17g,%.17g", entry.state.amp()[i].real(),
                    entry.state.amp()[i].imag());
      out << buf;
    }
    out << "\n";
  }
}

}  // namespace vvsim
