#pragma once

// Three-qubit polarization states and the handful of operations the rest of
// the library needs on them.
//
// Basis convention: qubits are ordered (a, b, c) left to right, the leftmost
// qubit is the most significant bit of the basis index, and H = 0, V = 1.
// So |HHV> is index 1 and |VVH> is index 6.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace svet {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Wraps an angle into [0, 2pi).
double wrap_phase(double phi);

enum class Polarization { H = 0, V = 1 };

class StateVector {
 public:
  /// Takes amplitudes as given; dim must be 2, 4 or 8. Does not normalize.
  explicit StateVector(CVector amps);

  static StateVector basis(std::size_t dim, std::size_t index);

  std::size_t dim() const { return static_cast<std::size_t>(amps_.size()); }
  const CVector& amps() const { return amps_; }
  Complex operator[](std::size_t i) const { return amps_(static_cast<Eigen::Index>(i)); }

  double norm() const { return amps_.norm(); }
  StateVector normalized() const;

  Complex inner(const StateVector& other) const;  // <this|other>

 private:
  CVector amps_;
};

/// A validated density matrix: Hermitian, unit trace, positive semidefinite.
class DensityMatrix {
 public:
  static constexpr double kHermitianTol = 1e-10;
  static constexpr double kTraceTol = 1e-10;
  static constexpr double kEigenTol = -1e-9;

  /// Throws std::invalid_argument if any invariant fails.
  explicit DensityMatrix(CMatrix entries);

  static DensityMatrix pure(const StateVector& psi);
  static DensityMatrix maximally_mixed(std::size_t dim);
  /// alpha * first + (1 - alpha) * second, alpha in [0, 1].
  static DensityMatrix mix(const DensityMatrix& first, const DensityMatrix& second,
                           double alpha);

  std::size_t dim() const { return static_cast<std::size_t>(entries_.rows()); }
  const CMatrix& entries() const { return entries_; }
  Complex operator()(std::size_t r, std::size_t c) const {
    return entries_(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  }

  /// Ascending eigenvalues of the Hermitian part.
  Eigen::VectorXd eigenvalues() const;

 private:
  CMatrix entries_;
};

/// One party's projective analyzer: an equatorial ket (|H> + s e^{i phi}|V>)/sqrt2
/// with outcome sign s, or a computational H/V projector.
struct AnalyzerSetting {
  enum class Kind { Equatorial, Computational };

  Kind kind = Kind::Equatorial;
  double phase = 0.0;  // radians in [0, 2pi); Equatorial only
  int sign = +1;       // +1 / -1; Equatorial only
  Polarization basis_state = Polarization::H;  // Computational only

  static AnalyzerSetting equatorial(double phase, int sign);
  static AnalyzerSetting computational(Polarization p);
};

StateVector ghz_state();
StateVector analyzer_ket(const AnalyzerSetting& s);

StateVector tensor(const StateVector& left, const StateVector& right);
/// Product state with amplitude sa_i * sb_j * sc_k at index 4i + 2j + k.
StateVector tensor3(const StateVector& sa, const StateVector& sb, const StateVector& sc);

CMatrix kron(const CMatrix& left, const CMatrix& right);

/// real(<psi|rho|psi>).
double fidelity(const DensityMatrix& rho, const StateVector& psi);

/// real(<psi|rho|psi>) without dimension checks; hot path for tomography.
double projector_probability(const CMatrix& rho, const CVector& psi);

/// Equatorial observable |+phi><+phi| - |-phi><-phi|.
CMatrix equatorial_observable(double phi);

/// tr(rho M(phi_a) (x) M(phi_b) (x) M(phi_c)) for a dim-8 state.
double expectation3(const DensityMatrix& rho, double phi_a, double phi_b, double phi_c);

/// tr(rho M(phi_a) (x) M(phi_b)) for a dim-4 state.
double expectation2(const DensityMatrix& rho, double phi_a, double phi_b);

double trace_distance(const DensityMatrix& first, const DensityMatrix& second);

}  // namespace svet
