#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "vvsim/optics.hpp"
#include "vvsim/qcore.hpp"

// Entanglement and state-quality measures.
namespace vvsim {

struct ConcurrenceReport {
  double value = 0.0;                       // max(0, l1-l2-l3-l4), clipped to [0,1]
  std::array<double, 4> wootters_lambdas{};  // descending
};

// Wootters concurrence of a two-qubit state given in 2x2 tensor order
// (indices q1*2+q2). The qubit split is the matrix ordering itself.
ConcurrenceReport concurrence(const ComplexMatrix& rho4);

// Concurrence between polarization and OAM of one photon; rho4 is on the
// order basis ((R,+m),(L,-m),(L,+m),(R,-m)) and gets reordered to the
// pol (x) OAM split internally.
ConcurrenceReport intrasystem_concurrence(const ComplexMatrix& rho4);

// Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho)).
double fidelity(const DensityMatrix& rho, const DensityMatrix& sigma);
double fidelity(const ComplexMatrix& rho, const ComplexMatrix& sigma);

// Tr(rho^2).
double purity(const DensityMatrix& rho);

struct ConditionalState {
  DensityMatrix rho;   // remaining photon, on its order basis
  double probability;  // trace before renormalization
};

// Projects one photon of a two-photon state onto |chi> and renormalizes
// what is left of the other. Rejects projections with probability below
// 1e-12.
ConditionalState conditional_state(const DensityMatrix& rho16, int projected_photon,
                                   const PureState& chi);

struct ProjectorEntry {
  std::string label;
  PureState state;
};

struct DistributionEntry {
  std::string label;
  double concurrence = 0.0;
  double probability = 0.0;
  bool entangled_region = false;  // concurrence > 0.5
};

struct ConcurrenceDistribution {
  std::vector<DistributionEntry> entries;
  std::vector<std::string> entangled_labels;
  std::vector<std::string> separable_labels;
};

// Region separator between the nominal C=1 and C=0 populations.
inline constexpr double kEntangledThreshold = 0.5;

// Intrasystem concurrence of the remaining photon after projecting the
// other onto each listed state. Projections with probability below 1e-12
// observe nothing and are recorded as concurrence 0 (separable region).
ConcurrenceDistribution concurrence_distribution(
    const DensityMatrix& rho16, const std::vector<ProjectorEntry>& projectors,
    int projected_photon);

struct IntersystemConcurrence {
  ConcurrenceReport report;
  double subspace_weight = 0.0;  // trace captured by the qubit-pair subspace
};

// Projects onto the four-dimensional intersystem subspace (VV pair per
// photon, pi pair for negative orders), renormalizes, and evaluates the
// two-qubit concurrence across the photon cut.
IntersystemConcurrence intersystem_concurrence(const DensityMatrix& rho16,
                                               VVOrder m1, VVOrder m2);

// The built-in 34-state projector set on a photon's 4-dim order basis:
// 16 polarization (x) OAM product states and 18 states inside the
// VV/pi mode family. Overridable through the plain-text file format
// below.
std::vector<ProjectorEntry> default_projector_set(const ModeBasis& photon_basis);

// One state per line: <label> <re,im> <re,im> <re,im> <re,im>, amplitudes
// on the order basis; '#' starts a comment.
std::vector<ProjectorEntry> load_projector_set(std::istream& in,
                                               const ModeBasis& photon_basis);
std::vector<ProjectorEntry> load_projector_set_file(const std::string& path,
                                                    const ModeBasis& photon_basis);
void save_projector_set(std::ostream& out, const std::vector<ProjectorEntry>& set);

}  // namespace vvsim
