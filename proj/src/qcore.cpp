#include "vvsim/qcore.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace vvsim {

namespace {

constexpr double kHermitianTol = 1e-10;
constexpr double kTraceTol = 1e-10;
constexpr double kNormTol = 1e-12;
constexpr double kSymmetrizeTol = 1e-8;

double max_abs(const ComplexMatrix& m) {
  return m.cwiseAbs().maxCoeff();
}

}  // namespace

std::string label_text(const BasisLabel& label) {
  std::string out;
  for (size_t i = 0; i < label.size(); ++i) {
    if (i > 0) out += "x";
    out += "(";
    out += pol_char(label[i].pol);
    out += ",";
    out += std::to_string(label[i].oam);
    out += ")";
  }
  return out;
}

ModeBasis::ModeBasis(std::vector<BasisLabel> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) throw std::invalid_argument("ModeBasis: empty label list");
  const size_t arity = labels_.front().size();
  if (arity == 0) throw std::invalid_argument("ModeBasis: empty label");
  for (const auto& l : labels_) {
    if (l.size() != arity)
      throw std::invalid_argument("ModeBasis: labels of mixed photon count");
  }
  for (size_t i = 0; i < labels_.size(); ++i) {
    for (size_t j = i + 1; j < labels_.size(); ++j) {
      if (labels_[i] == labels_[j])
        throw std::invalid_argument("ModeBasis: duplicate label " +
                                    vvsim::label_text(labels_[i]));
    }
  }
}

ModeBasis ModeBasis::polarization() {
  return ModeBasis({{{Pol::R, 0}}, {{Pol::L, 0}}});
}

ModeBasis ModeBasis::vv_order(int m) {
  if (m == 0) throw std::invalid_argument("vv_order: order must be nonzero");
  return ModeBasis({{{Pol::R, m}}, {{Pol::L, -m}}, {{Pol::L, m}}, {{Pol::R, -m}}});
}

ModeBasis ModeBasis::tensor(const ModeBasis& a, const ModeBasis& b) {
  std::vector<BasisLabel> labels;
  labels.reserve(static_cast<size_t>(a.dim()) * b.dim());
  for (const auto& la : a.labels_) {
    for (const auto& lb : b.labels_) {
      BasisLabel l = la;
      l.insert(l.end(), lb.begin(), lb.end());
      labels.push_back(std::move(l));
    }
  }
  return ModeBasis(std::move(labels));
}

int ModeBasis::index_of(const BasisLabel& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  return it == labels_.end() ? -1 : static_cast<int>(it - labels_.begin());
}

PureState::PureState(ModeBasis basis, ComplexVector amp)
    : basis_(std::move(basis)), amp_(std::move(amp)) {
  if (amp_.size() != basis_.dim())
    throw std::invalid_argument("PureState: amplitude count != basis dimension");
  if (std::abs(amp_.norm() - 1.0) > kNormTol)
    throw std::invalid_argument("PureState: amplitudes not normalized");
}

PureState PureState::normalized(ModeBasis basis, const ComplexVector& amp) {
  const double n = amp.norm();
  if (n < 1e-14) throw std::invalid_argument("PureState: zero vector");
  return PureState(std::move(basis), amp / n);
}

PureState PureState::phase_normalized() const {
  for (Eigen::Index i = 0; i < amp_.size(); ++i) {
    const double a = std::abs(amp_[i]);
    if (a > 1e-14) {
      return PureState(basis_, amp_ * (std::conj(amp_[i]) / a));
    }
  }
  return *this;
}

Complex overlap(const PureState& a, const PureState& b) {
  if (!(a.basis() == b.basis()))
    throw std::invalid_argument("overlap: mismatched bases");
  return a.amp().dot(b.amp());  // Eigen's dot conjugates the left argument
}

DensityMatrix::DensityMatrix(ModeBasis basis, ComplexMatrix m, Tolerances tol)
    : basis_(std::move(basis)), mat_(std::move(m)) {
  const int d = basis_.dim();
  if (mat_.rows() != d || mat_.cols() != d)
    throw std::invalid_argument("DensityMatrix: matrix dimension != basis dimension");
  if (max_abs(mat_ - mat_.adjoint()) > kHermitianTol)
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  if (std::abs(mat_.trace().real() - 1.0) > kTraceTol ||
      std::abs(mat_.trace().imag()) > kTraceTol)
    throw std::invalid_argument("DensityMatrix: trace != 1");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(
      ComplexMatrix((mat_ + mat_.adjoint()) / 2.0),
      Eigen::EigenvaluesOnly);
  if (solver.eigenvalues().minCoeff() < -tol.eps)
    throw std::invalid_argument("DensityMatrix: negative eigenvalue");
}

ComplexMatrix tensor(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

ComplexVector tensor(const ComplexVector& a, const ComplexVector& b) {
  ComplexVector out(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i)
    out.segment(i * b.size(), b.size()) = a[i] * b;
  return out;
}

PureState tensor(const PureState& a, const PureState& b) {
  return PureState(ModeBasis::tensor(a.basis(), b.basis()),
                   tensor(a.amp(), b.amp()));
}

ComplexMatrix partial_trace(const ComplexMatrix& rho, Subsystem keep,
                            std::pair<int, int> dims) {
  const auto [da, db] = dims;
  if (da <= 0 || db <= 0 || static_cast<Eigen::Index>(da) * db != rho.rows() ||
      rho.rows() != rho.cols())
    throw std::invalid_argument("partial_trace: dimension mismatch");
  if (keep == Subsystem::A) {
    ComplexMatrix out = ComplexMatrix::Zero(da, da);
    for (int i = 0; i < da; ++i)
      for (int j = 0; j < da; ++j)
        for (int k = 0; k < db; ++k)
          out(i, j) += rho(i * db + k, j * db + k);
    return out;
  }
  ComplexMatrix out = ComplexMatrix::Zero(db, db);
  for (int i = 0; i < db; ++i)
    for (int j = 0; j < db; ++j)
      for (int k = 0; k < da; ++k)
        out(i, j) += rho(k * db + i, k * db + j);
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, Subsystem keep,
                            std::pair<int, int> dims, const ModeBasis& keep_basis) {
  ComplexMatrix out = partial_trace(rho.matrix(), keep, dims);
  const int d = keep == Subsystem::A ? dims.first : dims.second;
  if (keep_basis.dim() != d)
    throw std::invalid_argument("partial_trace: keep_basis dimension mismatch");
  out = (out + out.adjoint().eval()) / 2.0;
  return DensityMatrix(keep_basis, out);
}

EigenDecomposition hermitian_eigen(const ComplexMatrix& m) {
  if (m.rows() != m.cols())
    throw std::invalid_argument("hermitian_eigen: matrix not square");
  if (max_abs(m - m.adjoint()) > kSymmetrizeTol)
    throw std::invalid_argument("hermitian_eigen: matrix not Hermitian");
  const ComplexMatrix sym = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("hermitian_eigen: eigensolver failed");

  const Eigen::Index d = m.rows();
  EigenDecomposition out;
  out.values.resize(d);
  out.vectors.resize(d, d);
  // Eigen returns ascending order; flip to descending and fix each
  // eigenvector's phase so its first nonzero component is real-positive.
  for (Eigen::Index i = 0; i < d; ++i) {
    out.values[i] = solver.eigenvalues()[d - 1 - i];
    ComplexVector v = solver.eigenvectors().col(d - 1 - i);
    for (Eigen::Index k = 0; k < d; ++k) {
      const double a = std::abs(v[k]);
      if (a > 1e-12) {
        v *= std::conj(v[k]) / a;
        break;
      }
    }
    out.vectors.col(i) = v;
  }
  return out;
}

ComplexMatrix matrix_sqrt(const ComplexMatrix& rho) {
  EigenDecomposition eig = hermitian_eigen(rho);
  Eigen::VectorXd lam = eig.values;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam[i] < -1e-6)
      throw std::domain_error("matrix_sqrt: eigenvalue below -1e-6, input unphysical");
    lam[i] = std::sqrt(std::max(0.0, lam[i]));
  }
  ComplexMatrix out = eig.vectors * lam.asDiagonal() * eig.vectors.adjoint();
  return (out + out.adjoint().eval()) / 2.0;
}

DensityMatrix projector(const PureState& psi) {
  ComplexMatrix p = psi.amp() * psi.amp().adjoint();
  return DensityMatrix(psi.basis(), (p + p.adjoint().eval()) / 2.0);
}

}  // namespace vvsim
