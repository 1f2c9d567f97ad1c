#include "vvsim/tomo.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "vvsim/metrics.hpp"

namespace vvsim {

namespace {

constexpr double kProbClamp = 1e-12;

// Projector vectors as columns of a d x K matrix.
ComplexMatrix projector_columns(const std::vector<CountRecord>& records, int dim) {
  ComplexMatrix v(dim, static_cast<Eigen::Index>(records.size()));
  for (size_t k = 0; k < records.size(); ++k) {
    const auto& s = records[k].setting;
    if (s.projector_1.dim() * s.projector_2.dim() != dim)
      throw std::invalid_argument("tomo: record dimension mismatch");
    v.col(static_cast<Eigen::Index>(k)) =
        tensor(s.projector_1.amp(), s.projector_2.amp());
  }
  return v;
}

Eigen::VectorXd setting_probabilities(const ComplexMatrix& rho,
                                      const ComplexMatrix& v) {
  // p_k = v_k^dag rho v_k.
  const ComplexMatrix m = rho * v;
  Eigen::VectorXd p(v.cols());
  for (Eigen::Index k = 0; k < v.cols(); ++k)
    p[k] = std::max(v.col(k).dot(m.col(k)).real(), 0.0);
  return p;
}

Eigen::VectorXd record_counts(const std::vector<CountRecord>& records) {
  Eigen::VectorXd n(records.size());
  for (size_t k = 0; k < records.size(); ++k)
    n[static_cast<Eigen::Index>(k)] = static_cast<double>(records[k].coincidences);
  return n;
}

double likelihood_of(const Eigen::VectorXd& counts, const Eigen::VectorXd& probs) {
  double l = 0.0;
  for (Eigen::Index k = 0; k < counts.size(); ++k)
    l += counts[k] * std::log(std::max(probs[k], kProbClamp));
  return l;
}

}  // namespace

ComplexMatrix linear_inversion(const std::vector<CountRecord>& records) {
  if (records.empty()) throw std::invalid_argument("linear_inversion: no records");
  const int d = records.front().setting.projector_1.dim() *
                records.front().setting.projector_2.dim();
  const ComplexMatrix v = projector_columns(records, d);
  const Eigen::Index n_settings = v.cols();
  const int n_params = d * d;

  // Real parametrization over an orthonormal Hermitian basis: diagonal
  // units, then symmetric and antisymmetric pairs scaled by 1/sqrt2.
  Eigen::MatrixXd a(n_settings, n_params);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Eigen::Index k = 0; k < n_settings; ++k) {
    const ComplexVector& vk = v.col(k);
    int col = 0;
    for (int i = 0; i < d; ++i) a(k, col++) = std::norm(vk[i]);
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j) {
        const Complex cross = std::conj(vk[i]) * vk[j];
        a(k, col++) = 2.0 * inv_sqrt2 * cross.real();
        a(k, col++) = -2.0 * inv_sqrt2 * cross.imag();
      }
  }

  Eigen::VectorXd f(n_settings);
  for (size_t k = 0; k < records.size(); ++k) {
    const auto& r = records[k];
    if (r.integration <= 0.0)
      throw std::invalid_argument("linear_inversion: nonpositive integration");
    f[static_cast<Eigen::Index>(k)] =
        static_cast<double>(r.coincidences) / r.integration;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < n_params)
    throw std::invalid_argument("linear_inversion: settings not informationally complete");
  const Eigen::VectorXd theta = qr.solve(f);

  ComplexMatrix rho = ComplexMatrix::Zero(d, d);
  int col = 0;
  for (int i = 0; i < d; ++i) rho(i, i) = theta[col++];
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double re = theta[col++] * inv_sqrt2;
      const double im = theta[col++] * inv_sqrt2;
      rho(i, j) = Complex(re, im);
      rho(j, i) = Complex(re, -im);
    }
  rho = (rho + rho.adjoint().eval()) / 2.0;
  const double tr = rho.trace().real();
  if (std::abs(tr) < 1e-12)
    throw std::runtime_error("linear_inversion: zero-trace solution");
  return rho / tr;
}

DensityMatrix project_physical(const ComplexMatrix& m, const ModeBasis& basis) {
  const EigenDecomposition eig = hermitian_eigen(m);
  Eigen::VectorXd lam = eig.values.cwiseMax(0.0);
  const double total = lam.sum();
  if (total < 1e-14)
    throw std::domain_error("project_physical: no positive eigenvalues");
  lam /= total;
  ComplexMatrix rho = eig.vectors * lam.asDiagonal() * eig.vectors.adjoint();
  rho = (rho + rho.adjoint().eval()) / 2.0;
  return DensityMatrix(basis, std::move(rho));
}

double log_likelihood(const ComplexMatrix& rho, const std::vector<CountRecord>& records) {
  const ComplexMatrix v = projector_columns(records, static_cast<int>(rho.rows()));
  return likelihood_of(record_counts(records), setting_probabilities(rho, v));
}

TomographyResult mle_reconstruct(const std::vector<CountRecord>& records,
                                 const ModeBasis& basis, double tol, int max_iter) {
  if (records.empty()) throw std::invalid_argument("mle_reconstruct: no records");
  const int d = basis.dim();
  const ComplexMatrix v = projector_columns(records, d);
  const Eigen::VectorXd counts = record_counts(records);
  const double total_counts = counts.sum();
  if (total_counts <= 0.0)
    throw std::invalid_argument("mle_reconstruct: no counts at all");

  ComplexMatrix rho = ComplexMatrix::Identity(d, d) / static_cast<double>(d);
  double likelihood = likelihood_of(counts, setting_probabilities(rho, v));

  std::vector<double> trace;
  trace.reserve(256);
  double eps = 1.0;
  bool converged = false;
  int iterations = 0;

  while (iterations < max_iter) {
    const Eigen::VectorXd probs = setting_probabilities(rho, v);
    Eigen::VectorXd weights(probs.size());
    for (Eigen::Index k = 0; k < probs.size(); ++k)
      weights[k] = counts[k] / std::max(probs[k], kProbClamp);
    ComplexMatrix r = (v * weights.asDiagonal()) * v.adjoint();
    r /= total_counts;
    r = (r + r.adjoint().eval()) / 2.0;

    // Shrink the step until it no longer hurts the likelihood.
    bool accepted = false;
    double gain = 0.0;
    for (int halving = 0; halving < 60; ++halving) {
      const ComplexMatrix t =
          ComplexMatrix::Identity(d, d) + eps * r;
      ComplexMatrix cand = t * rho * t.adjoint();
      cand = (cand + cand.adjoint().eval()) / 2.0;
      cand /= cand.trace().real();
      const double cand_likelihood =
          likelihood_of(counts, setting_probabilities(cand, v));
      if (cand_likelihood >= likelihood) {
        gain = cand_likelihood - likelihood;
        rho = std::move(cand);
        likelihood = cand_likelihood;
        accepted = true;
        break;
      }
      eps /= 2.0;
    }
    if (!accepted) {
      // No step length improves the likelihood: fixed point within
      // floating-point resolution.
      converged = true;
      break;
    }
    ++iterations;
    trace.push_back(likelihood);
    if (gain < tol) {
      converged = true;
      break;
    }
    eps = std::min(1.0, 2.0 * eps);
  }

  TomographyResult out{project_physical(rho, basis), TomoMethod::mle,
                       std::move(trace), iterations, converged, likelihood};
  return out;
}

std::string tomography_result_json(const TomographyResult& result,
                                   const std::optional<DensityMatrix>& target) {
  nlohmann::json doc;
  const DensityMatrix& rho = result.rho;
  std::vector<std::string> labels;
  for (int i = 0; i < rho.dim(); ++i) labels.push_back(rho.basis().label_text(i));
  doc["basis"] = labels;
  std::vector<std::vector<double>> re(rho.dim()), im(rho.dim());
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j) {
      re[i].push_back(rho.matrix()(i, j).real());
      im[i].push_back(rho.matrix()(i, j).imag());
    }
  doc["matrix"]["re"] = re;
  doc["matrix"]["im"] = im;
  doc["method"] = result.method == TomoMethod::mle ? "mle" : "linear";
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  doc["final_likelihood"] = result.final_likelihood;
  doc["likelihood_trace"] = result.likelihood_trace;
  doc["purity"] = purity(rho);
  if (target) doc["fidelity_vs_target"] = fidelity(rho, *target);
  return doc.dump(2);
}

}  // namespace vvsim
