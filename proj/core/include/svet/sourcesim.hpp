#pragma once

// Creation-operator algebra for the double-pair GHZ interferometer.
//
// A state is a polynomial in commuting creation operators acting on the
// vacuum. The monomial prod_k (a_k^dag)^{n_k} with coefficient c contributes
// amplitude c * sqrt(prod_k n_k!) to the Fock state |n>.

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "svet/qcore.hpp"

namespace svet {

/// Spatial modes of the interferometer: inputs 1 and 2, the transmitted arm
/// 1' after the first PBS, the trigger T, the BS transmitted arm t, and the
/// outputs a, b, c.
enum class Spatial : std::uint8_t { In1, In2, In1Prime, Trigger, BsTransmitted, A, B, C };

std::string spatial_name(Spatial s);

struct Mode {
  Spatial spatial;
  Polarization pol;

  auto operator<=>(const Mode&) const = default;
};

std::string mode_name(const Mode& m);  // e.g. "1'H", "TV"

class ModeMonomial {
 public:
  ModeMonomial() = default;
  ModeMonomial(std::initializer_list<std::pair<const Mode, int>> occupations);

  int occupation(const Mode& m) const;
  int photon_number() const;
  /// Photons in a spatial mode, both polarizations.
  int photons_in(Spatial s) const;
  /// prod_k n_k!
  double factorial_weight() const;

  ModeMonomial with_photon(const Mode& m) const;
  const std::map<Mode, int>& occupations() const { return occupations_; }
  std::string str() const;

  auto operator<=>(const ModeMonomial&) const = default;

 private:
  std::map<Mode, int> occupations_;  // only n >= 1 stored
};

class FockPolynomial {
 public:
  static constexpr double kPruneTolerance = 1e-14;

  void add(const ModeMonomial& m, Complex coeff);
  Complex coefficient(const ModeMonomial& m) const;
  const std::map<ModeMonomial, Complex>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  /// sum_m |c_m|^2 prod n!, the squared norm of the Fock state.
  double norm_squared() const;
  FockPolynomial normalized() const;
  FockPolynomial operator*(const FockPolynomial& other) const;
  FockPolynomial scaled(Complex factor) const;

  /// Drops terms with |c| <= kPruneTolerance.
  void prune();

  static FockPolynomial vacuum();
  /// Single creation operator a_m^dag.
  static FockPolynomial creation(const Mode& m);

 private:
  std::map<ModeMonomial, Complex> terms_;
};

/// A linear-optical element: each input mode maps to a superposition of
/// output modes. Modes the element does not declare pass through unchanged.
class OpticalElement {
 public:
  enum class Kind { PBS, BS50, HWP, PhaseShift };

  /// H transmits (in1 -> out1, in2 -> out2), V reflects (in1 -> out2, in2 -> out1).
  static OpticalElement pbs(Spatial in1, std::optional<Spatial> in2, Spatial out1, Spatial out2);
  /// Transmission 1/sqrt2, reflection i/sqrt2, polarization independent.
  static OpticalElement bs50(Spatial in1, std::optional<Spatial> in2, Spatial out1, Spatial out2);
  /// Half-wave plate at angle theta: H -> cos2t H + sin2t V, V -> sin2t H - cos2t V.
  static OpticalElement hwp(Spatial mode, double theta);
  /// Tilted quarter-wave plate used as a phase shifter: V -> e^{i delta} V.
  static OpticalElement phase_shift(Spatial mode, double delta);

  Kind kind() const { return kind_; }
  const std::map<Mode, std::vector<std::pair<Mode, Complex>>>& transfer() const { return transfer_; }

  /// Columns of the transfer matrix are orthonormal within tol.
  bool is_isometry(double tol = 1e-12) const;

 private:
  OpticalElement(Kind kind) : kind_(kind) {}
  Kind kind_;
  std::map<Mode, std::vector<std::pair<Mode, Complex>>> transfer_;
};

/// Normalized (A^dag)^2 |0> with A^dag = (a1H^dag a2V^dag + e^{i theta} a1V^dag a2H^dag)/sqrt2,
/// i.e. a double-pair emission after the H <-> V flip in mode 2.
FockPolynomial double_pair_state(double theta);

/// Substitutes every creation operator of a declared input mode by its
/// output superposition. Throws std::invalid_argument if the polynomial
/// already occupies an output mode the element writes to but does not read.
FockPolynomial apply_element(const FockPolynomial& p, const OpticalElement& e);

/// Element sequence of the interferometer: PBS on mode 1 (V to the trigger),
/// half-wave plate on 1', BS on mode 2, phase compensation on the reflected
/// arm c, and the overlapping PBS of 1' and t into outputs a, b.
std::vector<OpticalElement> interferometer(double hwp_angle = kPi / 8, double bs_compensation = 0.0);

FockPolynomial run_interferometer(const FockPolynomial& input, const std::vector<OpticalElement>& elements);

struct PostSelection {
  StateVector state;   // normalized three-qubit state on (a, b, c)
  double probability;  // weight of the kept detection patterns
};

/// Keeps patterns with one photon in each of T, a, b, c and a V photon in T,
/// applies V -> e^{i output_phase} V on output a, and returns the conditional
/// polarization state. Throws std::domain_error when nothing survives.
PostSelection postselect_ghz(const FockPolynomial& p, double output_phase);

/// Output phase that makes the HHV and VVH amplitudes of the kept state equal.
double compensating_phase(const FockPolynomial& p);

/// v |ghz><ghz| + (1 - v)(|HHV><HHV| + |VVH><VVH|)/2; fidelity (1 + v)/2.
DensityMatrix noisy_ghz(double v);

}  // namespace svet
