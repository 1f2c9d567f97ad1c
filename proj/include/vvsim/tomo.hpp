#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vvsim/measure.hpp"
#include "vvsim/qcore.hpp"

// Density-matrix reconstruction from count records.
namespace vvsim {

enum class TomoMethod { linear, mle };

struct TomographyResult {
  DensityMatrix rho;
  TomoMethod method = TomoMethod::mle;
  std::vector<double> likelihood_trace;  // one entry per accepted iteration
  int iterations = 0;
  bool converged = false;
  double final_likelihood = 0.0;
};

// Least-squares solution of Tr(rho P_k) = f_k over Hermitian matrices,
// with f_k = counts / integration (dark-corrected counts when flagged).
// Hermitian by construction and trace-normalized, but possibly
// unphysical; rejects settings sets of deficient rank.
ComplexMatrix linear_inversion(const std::vector<CountRecord>& records);

// Clips negative eigenvalues to zero and renormalizes the trace.
DensityMatrix project_physical(const ComplexMatrix& m, const ModeBasis& basis);

// sum_k N_k ln p_k(rho) with probabilities clamped below at 1e-12.
double log_likelihood(const ComplexMatrix& rho, const std::vector<CountRecord>& records);

// Diluted R rho R fixed-point iteration from the maximally mixed state:
// rho <- N[(I + eps R) rho (I + eps R)], R = sum_k (N_k / p_k) P_k
// normalized by the total count. eps starts at 1 and halves whenever a
// step would decrease the likelihood; it grows back (capped at 1) after
// accepted steps. Stops when the accepted gain drops below tol, when no
// step length improves the likelihood (floating-point fixed point), or at
// max_iter (flagged converged = false, never thrown).
TomographyResult mle_reconstruct(const std::vector<CountRecord>& records,
                                 const ModeBasis& basis, double tol = 1e-10,
                                 int max_iter = 10000);

// JSON document with basis labels, re/im matrix arrays, method,
// iterations, final likelihood and (when a target is given) the fidelity
// against it.
std::string tomography_result_json(const TomographyResult& result,
                                   const std::optional<DensityMatrix>& target);

}  // namespace vvsim
