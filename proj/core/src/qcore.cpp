#include "svet/qcore.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace svet {

namespace {

bool valid_dim(Eigen::Index n) { return n == 2 || n == 4 || n == 8; }

// tr(rho * M(phi_0) (x) ... (x) M(phi_{n-1})). Each M is off-diagonal, so the
// product operator has a single entry per row at column r ^ (2^n - 1).
double equatorial_correlation(const CMatrix& rho, std::span<const double> phases) {
  const auto n = static_cast<int>(phases.size());
  const Eigen::Index dim = Eigen::Index{1} << n;
  const Eigen::Index flip = dim - 1;
  Complex acc{0.0, 0.0};
  for (Eigen::Index r = 0; r < dim; ++r) {
    double angle = 0.0;
    for (int q = 0; q < n; ++q) {
      const bool bit = (r >> (n - 1 - q)) & 1;
      angle += bit ? -phases[q] : phases[q];
    }
    acc += rho(r, r ^ flip) * std::polar(1.0, angle);
  }
  return acc.real();
}

}  // namespace

double wrap_phase(double phi) {
  if (!std::isfinite(phi)) throw std::invalid_argument("phase must be finite");
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

StateVector::StateVector(CVector amps) : amps_(std::move(amps)) {
  if (!valid_dim(amps_.size())) {
    throw std::invalid_argument("state dimension must be 2, 4 or 8, got " +
                                std::to_string(amps_.size()));
  }
}

StateVector StateVector::basis(std::size_t dim, std::size_t index) {
  if (index >= dim) throw std::invalid_argument("basis index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(dim));
  v(static_cast<Eigen::Index>(index)) = 1.0;
  return StateVector(std::move(v));
}

StateVector StateVector::normalized() const {
  const double n = norm();
  if (n == 0.0) throw std::invalid_argument("cannot normalize the zero vector");
  return StateVector(amps_ / n);
}

Complex StateVector::inner(const StateVector& other) const {
  if (dim() != other.dim()) throw std::invalid_argument("dimension mismatch in inner product");
  return amps_.dot(other.amps_);
}

DensityMatrix::DensityMatrix(CMatrix entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() || !valid_dim(entries_.rows())) {
    throw std::invalid_argument("density matrix must be square with dim 2, 4 or 8");
  }
  const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > kHermitianTol) {
    throw std::invalid_argument("density matrix is not Hermitian (deviation " +
                                std::to_string(herm) + ")");
  }
  const double tr = entries_.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    throw std::invalid_argument("density matrix trace is " + std::to_string(tr));
  }
  if (eigenvalues()(0) < kEigenTol) {
    throw std::invalid_argument("density matrix is not positive semidefinite");
  }
}

DensityMatrix DensityMatrix::pure(const StateVector& psi) {
  const CVector v = psi.normalized().amps();
  return DensityMatrix(v * v.adjoint());
}

DensityMatrix DensityMatrix::maximally_mixed(std::size_t dim) {
  const auto n = static_cast<Eigen::Index>(dim);
  return DensityMatrix(CMatrix::Identity(n, n) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::mix(const DensityMatrix& first, const DensityMatrix& second,
                                 double alpha) {
  if (first.dim() != second.dim()) throw std::invalid_argument("dimension mismatch in mix");
  if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("mixing weight outside [0, 1]");
  return DensityMatrix(alpha * first.entries_ + (1.0 - alpha) * second.entries_);
}

Eigen::VectorXd DensityMatrix::eigenvalues() const {
  const CMatrix herm = 0.5 * (entries_ + entries_.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(herm, Eigen::EigenvaluesOnly);
  return solver.eigenvalues();
}

AnalyzerSetting AnalyzerSetting::equatorial(double phase, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("outcome sign must be +1 or -1");
  AnalyzerSetting s;
  s.kind = Kind::Equatorial;
  s.phase = wrap_phase(phase);
  s.sign = sign;
  return s;
}

AnalyzerSetting AnalyzerSetting::computational(Polarization p) {
  AnalyzerSetting s;
  s.kind = Kind::Computational;
  s.basis_state = p;
  return s;
}

StateVector ghz_state() {
  CVector v = CVector::Zero(8);
  v(1) = v(6) = 1.0 / std::sqrt(2.0);
  return StateVector(std::move(v));
}

StateVector analyzer_ket(const AnalyzerSetting& s) {
  CVector v(2);
  if (s.kind == AnalyzerSetting::Kind::Computational) {
    v << (s.basis_state == Polarization::H ? 1.0 : 0.0), (s.basis_state == Polarization::V ? 1.0 : 0.0);
  } else {
    const double r = 1.0 / std::sqrt(2.0);
    v << r, static_cast<double>(s.sign) * r * std::polar(1.0, s.phase);
  }
  return StateVector(std::move(v));
}

StateVector tensor(const StateVector& left, const StateVector& right) {
  const auto nl = static_cast<Eigen::Index>(left.dim());
  const auto nr = static_cast<Eigen::Index>(right.dim());
  if (nl * nr > 8) throw std::invalid_argument("tensor product exceeds dimension 8");
  CVector v(nl * nr);
  for (Eigen::Index i = 0; i < nl; ++i) v.segment(i * nr, nr) = left.amps()(i) * right.amps();
  return StateVector(std::move(v));
}

StateVector tensor3(const StateVector& sa, const StateVector& sb, const StateVector& sc) {
  if (sa.dim() != 2 || sb.dim() != 2 || sc.dim() != 2) {
    throw std::invalid_argument("tensor3 factors must be single qubits");
  }
  return tensor(tensor(sa, sb), sc);
}

CMatrix kron(const CMatrix& left, const CMatrix& right) {
  CMatrix out(left.rows() * right.rows(), left.cols() * right.cols());
  for (Eigen::Index i = 0; i < left.rows(); ++i) {
    for (Eigen::Index j = 0; j < left.cols(); ++j) {
      out.block(i * right.rows(), j * right.cols(), right.rows(), right.cols()) = left(i, j) * right;
    }
  }
  return out;
}

double fidelity(const DensityMatrix& rho, const StateVector& psi) {
  if (rho.dim() != psi.dim()) throw std::invalid_argument("dimension mismatch in fidelity");
  return projector_probability(rho.entries(), psi.amps());
}

double projector_probability(const CMatrix& rho, const CVector& psi) {
  return psi.dot(rho * psi).real();
}

CMatrix equatorial_observable(double phi) {
  CMatrix m(2, 2);
  m << 0.0, std::polar(1.0, -phi), std::polar(1.0, phi), 0.0;
  return m;
}

double expectation3(const DensityMatrix& rho, double phi_a, double phi_b, double phi_c) {
  if (rho.dim() != 8) throw std::invalid_argument("expectation3 needs a three-qubit state");
  const double phases[3] = {phi_a, phi_b, phi_c};
  return equatorial_correlation(rho.entries(), phases);
}

double expectation2(const DensityMatrix& rho, double phi_a, double phi_b) {
  if (rho.dim() != 4) throw std::invalid_argument("expectation2 needs a two-qubit state");
  const double phases[2] = {phi_a, phi_b};
  return equatorial_correlation(rho.entries(), phases);
}

double trace_distance(const DensityMatrix& first, const DensityMatrix& second) {
  if (first.dim() != second.dim()) throw std::invalid_argument("dimension mismatch in trace distance");
  const CMatrix diff = first.entries() - second.entries();
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(0.5 * (diff + diff.adjoint()), Eigen::EigenvaluesOnly);
  return 0.5 * solver.eigenvalues().cwiseAbs().sum();
}

}  // namespace svet
