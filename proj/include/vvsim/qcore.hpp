#pragma once

#include <complex>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

// Core linear-algebra and quantum-state primitives on labeled
// finite-dimensional mode spaces. Everything here is a pure value type;
// nothing mutates after construction.
namespace vvsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

// Single global numerical knob for physicality checks (eigenvalue floors
// and the like). Tighter tolerances that are part of a contract (e.g.
// Hermiticity within 1e-10) stay as literals at the check site.
struct Tolerances {
  double eps = 1e-9;
};

enum class Pol { R, L };

inline char pol_char(Pol p) { return p == Pol::R ? 'R' : 'L'; }

// One photon's mode: polarization handedness and OAM in units of hbar.
struct ModeLabel {
  Pol pol;
  int oam;

  friend bool operator==(const ModeLabel&, const ModeLabel&) = default;
};

// A basis element of a possibly multi-photon space: one ModeLabel per photon.
using BasisLabel = std::vector<ModeLabel>;

std::string label_text(const BasisLabel& label);

// Ordered list of distinct basis labels defining a Hilbert space.
class ModeBasis {
 public:
  explicit ModeBasis(std::vector<BasisLabel> labels);

  // Polarization qubit at zero OAM: ((R,0),(L,0)).
  static ModeBasis polarization();

  // Four-dimensional order-m space ((R,+m),(L,-m),(L,+m),(R,-m)), m != 0.
  // The VV pair |R,m>,|L,-m> occupies the leading 2x2 block.
  static ModeBasis vv_order(int m);

  // Labels concatenated pairwise, left factor outermost (Kronecker order).
  static ModeBasis tensor(const ModeBasis& a, const ModeBasis& b);

  int dim() const { return static_cast<int>(labels_.size()); }
  int photons() const { return static_cast<int>(labels_.front().size()); }
  const BasisLabel& label(int i) const { return labels_.at(i); }
  const std::vector<BasisLabel>& labels() const { return labels_; }
  std::string label_text(int i) const { return vvsim::label_text(labels_.at(i)); }
  // Index of a label, -1 if absent.
  int index_of(const BasisLabel& label) const;

  friend bool operator==(const ModeBasis&, const ModeBasis&) = default;

 private:
  std::vector<BasisLabel> labels_;
};

// Normalized complex amplitude vector over a ModeBasis.
class PureState {
 public:
  // Requires |amp| = 1 within 1e-12 and amp.size() == basis.dim().
  PureState(ModeBasis basis, ComplexVector amp);

  // Scales the input to unit norm; rejects (near-)zero vectors.
  static PureState normalized(ModeBasis basis, const ComplexVector& amp);

  const ModeBasis& basis() const { return basis_; }
  const ComplexVector& amp() const { return amp_; }
  int dim() const { return basis_.dim(); }

  // Global phase fixed so the first nonzero amplitude is real-positive.
  PureState phase_normalized() const;

 private:
  ModeBasis basis_;
  ComplexVector amp_;
};

// <a|b>; bases must match.
Complex overlap(const PureState& a, const PureState& b);

// Hermitian, trace-one, positive-semidefinite matrix over a ModeBasis.
class DensityMatrix {
 public:
  // Validates Hermiticity within 1e-10, unit trace within 1e-10 and
  // eigenvalues >= -tol.eps.
  DensityMatrix(ModeBasis basis, ComplexMatrix m, Tolerances tol = {});

  const ModeBasis& basis() const { return basis_; }
  const ComplexMatrix& matrix() const { return mat_; }
  int dim() const { return basis_.dim(); }

 private:
  ModeBasis basis_;
  ComplexMatrix mat_;
};

// Kronecker product, dims (a.rows*b.rows, a.cols*b.cols).
ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b);
ComplexVector tensor(const ComplexVector& a, const ComplexVector& b);

PureState tensor(const PureState& a, const PureState& b);

// Tensor-factor index for tracing out, dims = (dA, dB).
enum class Subsystem { A, B };

// Reduced state of a bipartite density matrix; dims.first * dims.second
// must equal rho's dimension. keep_basis labels the surviving factor.
DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep,
                            std::pair<int, int> dims, const ModeBasis& keep_basis);

// Raw-matrix variant used internally and by tests.
ComplexMatrix partial_trace(const ComplexMatrix& rho, Subsystem keep,
                            std::pair<int, int> dims);

struct EigenDecomposition {
  Eigen::VectorXd values;   // descending
  ComplexMatrix vectors;    // columns, phase-fixed (first nonzero entry real-positive)
};

// Eigendecomposition of a Hermitian matrix. Inputs with asymmetry up to
// 1e-8 (max-abs norm) are symmetrized as (M + M^dag)/2; larger asymmetry
// is rejected.
EigenDecomposition hermitian_eigen(const ComplexMatrix& m);

// Principal square root of a Hermitian PSD matrix. Eigenvalues in
// [-1e-6, 0) are clipped to zero; anything below -1e-6 is rejected as
// unphysical.
ComplexMatrix matrix_sqrt(const ComplexMatrix& rho);

// Rank-one projector |psi><psi| as a DensityMatrix.
DensityMatrix projector(const PureState& psi);

}  // namespace vvsim
