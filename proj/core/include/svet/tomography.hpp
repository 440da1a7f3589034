#pragma once

// Maximum-likelihood reconstruction of a three-qubit density matrix from
// product-projector coincidence counts.
//
// The state is parameterized as rho = T^dag T / tr(T^dag T) with T lower
// triangular (8 real diagonal + 28 complex off-diagonal entries = 64 reals),
// plus ln(I) for the intensity I (expected counts per unit probability). The
// fit maximizes the Poisson log-likelihood sum_i n_i ln(I p_i) - I p_i.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "svet/counts.hpp"
#include "svet/qcore.hpp"

namespace svet {

struct Projector {
  SettingTriple setting;
  CVector ket;  // unit-norm dim-8 product ket
};

struct ProjectorSet {
  AngleSet phases;
  std::vector<Projector> items;

  std::size_t size() const { return items.size(); }
};

/// All 6 x 6 x 6 product projectors in triple_index order.
ProjectorSet build_projectors(const AngleSet& phases);
/// The 64 all-equatorial projectors used by the Svetlichny parameter.
ProjectorSet svetlichny_projectors(const AngleSet& phases);
/// The 64 projectors {H, V, U+, P+}^3: a minimal complete subset, valid
/// whenever each party's U and P phases differ modulo pi.
ProjectorSet complete_subset(const AngleSet& phases);

/// Born probabilities <psi_i|rho|psi_i> for every projector.
std::vector<double> expected_probabilities(const DensityMatrix& rho, const ProjectorSet& p);

/// Counts rounded from intensity * p_i (no noise).
CountsTable expected_counts(const DensityMatrix& rho, const ProjectorSet& p, double intensity);
/// Poisson counts with mean intensity * p_i, deterministic in seed.
CountsTable sample_counts(const DensityMatrix& rho, const ProjectorSet& p, double intensity, std::uint64_t seed);

/// Negative Poisson log-likelihood in the T / ln(I) parameterization.
class LikelihoodModel {
 public:
  static constexpr int kParameters = 65;

  LikelihoodModel(std::vector<double> counts, std::vector<CVector> kets, double probability_floor = 1e-12);

  /// Returns -log L and writes d(-log L)/dx into grad.
  double negative_log_likelihood(std::span<const double> x, std::span<double> grad) const;
  double negative_log_likelihood(std::span<const double> x) const;

  static CMatrix lower_triangular(std::span<const double> x);
  static CMatrix density(std::span<const double> x);
  /// Parameters for rho = I/8 with the given intensity.
  static std::vector<double> maximally_mixed_start(double intensity);

  std::size_t size() const { return counts_.size(); }

 private:
  std::vector<double> counts_;
  std::vector<CVector> kets_;
  double floor_;
};

struct TomographyOptions {
  int max_iterations = 20000;
  double improvement_tolerance = 1e-9;
  int patience = 10;
  int restarts = 5;
  std::uint64_t seed = 1;
  double probability_floor = 1e-12;
};

struct TomographyResult {
  DensityMatrix rho;
  double intensity = 0.0;
  double log_likelihood = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Log-likelihood after each accepted iteration of the winning restart.
  std::vector<double> likelihood_trace;
};

/// Throws ValidationError if a projector's setting has no count.
TomographyResult reconstruct(const CountsTable& t, const ProjectorSet& p, const TomographyOptions& opts = {});

struct DerivedQuantities {
  double fidelity = 0.0;
  double svetlichny = 0.0;
  double mermin = 0.0;
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd real_part;
  Eigen::MatrixXd imag_part;
};

/// Fidelity with the GHZ target and the Svetlichny / Mermin values at `ang`.
DerivedQuantities derived_quantities(const DensityMatrix& rho, const AngleSet& ang);
DerivedQuantities derived_quantities(const TomographyResult& r, const AngleSet& ang);

/// Key-value header followed by the 8x8 real and imaginary parts, row-major,
/// 12 significant digits.
void write_density_matrix(std::ostream& out, const TomographyResult& r);
/// Reads back the real / imaginary blocks written by write_density_matrix.
DensityMatrix read_density_matrix(std::istream& in);

}  // namespace svet
