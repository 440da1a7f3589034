#pragma once

// Quantum-side values of the CHSH, Mermin and Svetlichny combinations for
// equatorial (xy-plane) analyzers.

#include <array>
#include <cstdint>

#include "svet/qcore.hpp"

namespace svet {

enum class Party { A = 0, B = 1, C = 2 };

/// Unprimed and primed analyzer phases for the three parties, wrapped into [0, 2pi).
class AngleSet {
 public:
  AngleSet() = default;
  AngleSet(double phi_a, double phi_a_prime, double phi_b, double phi_b_prime, double phi_c,
           double phi_c_prime);

  /// phi_a = 3pi/4, phi_a' = pi/4, phi_b = pi/2, phi_b' = 0, phi_c = 0, phi_c' = pi/2.
  static AngleSet optimal();

  double phase(Party p, bool primed) const { return phases_[2 * static_cast<int>(p) + (primed ? 1 : 0)]; }
  double phi_a() const { return phases_[0]; }
  double phi_a_prime() const { return phases_[1]; }
  double phi_b() const { return phases_[2]; }
  double phi_b_prime() const { return phases_[3]; }
  double phi_c() const { return phases_[4]; }
  double phi_c_prime() const { return phases_[5]; }

  /// In the constructor's argument order.
  const std::array<double, 6>& as_array() const { return phases_; }

 private:
  std::array<double, 6> phases_{};
};

/// Prime bits (a', b', c') and sign of the eight Svetlichny terms, in the
/// order E(abc), E(abc'), E(ab'c), E(ab'c'), E(a'bc), E(a'bc'), E(a'b'c), E(a'b'c').
struct CorrelationTerm {
  bool a_primed, b_primed, c_primed;
  int sign;
};
inline constexpr std::array<CorrelationTerm, 8> kSvetlichnyTerms{{
    {false, false, false, +1},
    {false, false, true, +1},
    {false, true, false, +1},
    {false, true, true, -1},
    {true, false, false, +1},
    {true, false, true, -1},
    {true, true, false, -1},
    {true, true, true, -1},
}};
/// E(a'bc) + E(ab'c) + E(abc') - E(a'b'c').
inline constexpr std::array<CorrelationTerm, 4> kMerminTerms{{
    {true, false, false, +1},
    {false, true, false, +1},
    {false, false, true, +1},
    {true, true, true, -1},
}};

double svetlichny_qm_signed(const DensityMatrix& rho, const AngleSet& ang);
double svetlichny_qm(const DensityMatrix& rho, const AngleSet& ang);

/// The eight-cosine closed form for the ideal GHZ state (signed / absolute).
double svetlichny_prediction_signed(const AngleSet& ang);
double svetlichny_prediction(const AngleSet& ang);

double mermin_qm_signed(const DensityMatrix& rho, const AngleSet& ang);
double mermin_qm(const DensityMatrix& rho, const AngleSet& ang);

struct ChshAngles {
  double phi_a = 0.0, phi_a_prime = 0.0, phi_b = 0.0, phi_b_prime = 0.0;
};

/// |E(a,b) + E(a,b') + E(a',b) - E(a',b')| on a two-qubit state.
double chsh_qm(const DensityMatrix& rho, const ChshAngles& ang);

struct AngleSearchResult {
  AngleSet angles;
  double value = 0.0;
};

/// Multi-start Nelder-Mead over the six phases. Restart k starts from phases
/// drawn uniformly from a generator seeded with (seed, k), so the result does
/// not depend on evaluation order.
AngleSearchResult maximize_svetlichny(const DensityMatrix& rho, int restarts, std::uint64_t seed);

struct ChshSearchResult {
  ChshAngles angles;
  double value = 0.0;
};
ChshSearchResult maximize_chsh(const DensityMatrix& rho, int restarts, std::uint64_t seed);

}  // namespace svet
