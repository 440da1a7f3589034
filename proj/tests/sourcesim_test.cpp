#include "svet/sourcesim.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "svet/inequalities.hpp"

namespace svet {
namespace {

using P = Polarization;
using S = Spatial;

Mode m(S s, P p) { return {s, p}; }

FockPolynomial ideal_output(double theta = 0.0) { return run_interferometer(double_pair_state(theta), interferometer()); }

TEST(ModeMonomial, OccupationBookkeeping) {
  const ModeMonomial x{{m(S::In1, P::H), 2}, {m(S::In2, P::V), 1}};
  EXPECT_EQ(x.occupation(m(S::In1, P::H)), 2);
  EXPECT_EQ(x.occupation(m(S::In1, P::V)), 0);
  EXPECT_EQ(x.photon_number(), 3);
  EXPECT_EQ(x.photons_in(S::In1), 2);
  EXPECT_DOUBLE_EQ(x.factorial_weight(), 2.0);
  EXPECT_EQ(x.with_photon(m(S::In2, P::V)).occupation(m(S::In2, P::V)), 2);
  EXPECT_EQ(mode_name(m(S::In1Prime, P::H)), "1'H");
  EXPECT_EQ(mode_name(m(S::Trigger, P::V)), "TV");
}

TEST(DoublePair, MonomialsAndCoefficients) {
  const auto p = double_pair_state(0.0);
  ASSERT_EQ(p.size(), 3u);
  const ModeMonomial outer1{{m(S::In1, P::H), 2}, {m(S::In2, P::V), 2}};
  const ModeMonomial outer2{{m(S::In1, P::V), 2}, {m(S::In2, P::H), 2}};
  const ModeMonomial middle{{m(S::In1, P::H), 1}, {m(S::In1, P::V), 1}, {m(S::In2, P::H), 1}, {m(S::In2, P::V), 1}};
  const double outer = 1 / (2 * std::sqrt(3.0));
  EXPECT_NEAR(std::abs(p.coefficient(outer1) - outer), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.coefficient(outer2) - outer), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(p.coefficient(middle) - 1 / std::sqrt(3.0)), 0.0, 1e-15);
  EXPECT_NEAR(p.norm_squared(), 1.0, 1e-15);
  // every Fock component carries amplitude 1/sqrt3
  for (const auto& [mono, c] : p.terms()) EXPECT_NEAR(std::abs(c) * std::sqrt(mono.factorial_weight()), 1 / std::sqrt(3.0), 1e-15);
}

TEST(DoublePair, ThetaPiFlipsCrossTerm) {
  const auto p0 = double_pair_state(0.0);
  const auto p1 = double_pair_state(kPi);
  for (const auto& [mono, c] : p0.terms()) {
    const bool cross = mono.occupation(m(S::In1, P::V)) == 1;
    EXPECT_NEAR(std::abs(p1.coefficient(mono) - (cross ? -c : c)), 0.0, 1e-15);
  }
}

TEST(OpticalElement, PbsRoutesSinglePhotons) {
  const auto pbs = OpticalElement::pbs(S::In1, std::nullopt, S::In1Prime, S::Trigger);
  const auto h = apply_element(FockPolynomial::creation(m(S::In1, P::H)), pbs);
  const auto v = apply_element(FockPolynomial::creation(m(S::In1, P::V)), pbs);
  EXPECT_NEAR(std::abs(h.coefficient(ModeMonomial{{m(S::In1Prime, P::H), 1}})), 1.0, 1e-15);
  EXPECT_NEAR(std::abs(v.coefficient(ModeMonomial{{m(S::Trigger, P::V), 1}})), 1.0, 1e-15);
  EXPECT_EQ(h.size(), 1u);
  EXPECT_EQ(v.size(), 1u);
}

TEST(OpticalElement, BeamSplitterSplitsEvenly) {
  const auto bs = OpticalElement::bs50(S::In2, std::nullopt, S::BsTransmitted, S::C);
  const auto out = apply_element(FockPolynomial::creation(m(S::In2, P::H)), bs);
  EXPECT_NEAR(std::norm(out.coefficient(ModeMonomial{{m(S::BsTransmitted, P::H), 1}})), 0.5, 1e-15);
  const Complex r = out.coefficient(ModeMonomial{{m(S::C, P::H), 1}});
  EXPECT_NEAR(std::norm(r), 0.5, 1e-15);
  EXPECT_NEAR(r.real(), 0.0, 1e-15);
}

TEST(OpticalElement, HongOuMandelCoincidenceVanishes) {
  const auto bs = OpticalElement::bs50(S::In1, S::In2, S::A, S::B);
  const auto in = FockPolynomial::creation(m(S::In1, P::H)) * FockPolynomial::creation(m(S::In2, P::H));
  const auto out = apply_element(in, bs);
  EXPECT_EQ(out.coefficient(ModeMonomial{{m(S::A, P::H), 1}, {m(S::B, P::H), 1}}), Complex(0.0, 0.0));
  EXPECT_NEAR(out.norm_squared(), 1.0, 1e-15);
}

TEST(OpticalElement, AllElementsAreIsometries) {
  std::vector<OpticalElement> all = interferometer();
  all.push_back(OpticalElement::bs50(S::In1, S::In2, S::A, S::B));
  all.push_back(OpticalElement::hwp(S::A, 0.3));
  for (const auto& e : all) EXPECT_TRUE(e.is_isometry());
}

TEST(OpticalElement, OccupiedOutputIsRejected) {
  const auto pbs = OpticalElement::pbs(S::In1, std::nullopt, S::In1Prime, S::Trigger);
  const auto p = FockPolynomial::creation(m(S::In1, P::H)) * FockPolynomial::creation(m(S::Trigger, P::V));
  EXPECT_THROW(apply_element(p, pbs), std::invalid_argument);
}

TEST(Interferometer, PreservesNorm) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int trial = 0; trial < 5; ++trial) {
    EXPECT_NEAR(run_interferometer(double_pair_state(u(rng)), interferometer(u(rng), u(rng))).norm_squared(), 1.0,
                1e-12);
  }
}

TEST(Interferometer, IdealPostSelectionGivesGhz) {
  const auto out = ideal_output();
  const auto ps = postselect_ghz(out, compensating_phase(out));
  EXPECT_NEAR(fidelity(DensityMatrix::pure(ps.state), ghz_state()), 1.0, 1e-10);
  EXPECT_NEAR(ps.probability, 1.0 / 12.0, 1e-12);
  for (Eigen::Index i = 0; i < 8; ++i) {
    if (i != 1 && i != 6) EXPECT_NEAR(std::abs(ps.state.amps()(i)), 0.0, 1e-15) << i;
  }
  EXPECT_NEAR(svetlichny_qm(DensityMatrix::pure(ps.state), AngleSet::optimal()), 4 * std::sqrt(2.0), 1e-10);
}

TEST(Interferometer, WrongOutputPhaseLowersFidelity) {
  const auto out = ideal_output();
  const double phi = compensating_phase(out);
  const auto ps = postselect_ghz(out, phi + kPi);
  EXPECT_NEAR(fidelity(DensityMatrix::pure(ps.state), ghz_state()), 0.0, 1e-12);
  EXPECT_NEAR(ps.probability, 1.0 / 12.0, 1e-12);
}

TEST(Interferometer, SourcePhaseIsGlobal) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  const auto reference = postselect_ghz(ideal_output(), compensating_phase(ideal_output()));
  for (int trial = 0; trial < 10; ++trial) {
    const auto out = ideal_output(u(rng));
    const auto ps = postselect_ghz(out, compensating_phase(out));
    EXPECT_NEAR(fidelity(DensityMatrix::pure(ps.state), ghz_state()), 1.0, 1e-10);
    EXPECT_NEAR(ps.probability, reference.probability, 1e-12);
    EXPECT_NEAR(std::norm(ps.state.inner(reference.state)), 1.0, 1e-10);
  }
}

TEST(Interferometer, NothingKeptThrows) {
  EXPECT_THROW(postselect_ghz(FockPolynomial::vacuum(), 0.0), std::domain_error);
}

// Brute-force oracle: single-photon transfer matrix plus permanents over the
// four input modes, independent of the polynomial substitution.
Complex permanent(const std::vector<std::vector<Complex>>& a) {
  const std::size_t n = a.size();
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Complex total{};
  do {
    Complex prod = 1.0;
    for (std::size_t i = 0; i < n; ++i) prod *= a[i][perm[i]];
    total += prod;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return total;
}

TEST(Interferometer, ProbabilityMatchesPermanentOracle) {
  const auto elements = interferometer();
  const std::vector<Mode> inputs = {m(S::In1, P::H), m(S::In1, P::V), m(S::In2, P::H), m(S::In2, P::V)};
  std::map<Mode, std::map<Mode, Complex>> u;
  for (const auto& in : inputs) {
    const auto out = run_interferometer(FockPolynomial::creation(in), elements);
    for (const auto& [mono, c] : out.terms()) {
      ASSERT_EQ(mono.photon_number(), 1);
      u[in][mono.occupations().begin()->first] += c;
    }
  }

  const auto source = double_pair_state(0.0);
  double probability = 0.0;
  for (int bits = 0; bits < 8; ++bits) {
    const std::vector<Mode> outputs = {m(S::Trigger, P::V), m(S::A, (bits & 4) ? P::V : P::H),
                                       m(S::B, (bits & 2) ? P::V : P::H), m(S::C, (bits & 1) ? P::V : P::H)};
    Complex amp{};
    for (const auto& [mono, c] : source.terms()) {
      std::vector<Mode> photons;
      for (const auto& [mode, n] : mono.occupations()) photons.insert(photons.end(), static_cast<std::size_t>(n), mode);
      std::vector<std::vector<Complex>> sub(4, std::vector<Complex>(4));
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) sub[i][j] = u[photons[i]][outputs[j]];
      // c * sqrt(prod n!) is the Fock amplitude; the transition carries 1/sqrt(prod n!)
      amp += c * permanent(sub);
    }
    probability += std::norm(amp);
  }
  EXPECT_NEAR(probability, 1.0 / 12.0, 1e-12);
  EXPECT_NEAR(postselect_ghz(ideal_output(), 0.0).probability, probability, 1e-12);
}

TEST(NoisyGhz, FidelityAndSvetlichny) {
  for (double v : {0.0, 0.25, 0.5, 0.797, 1.0}) {
    const auto rho = noisy_ghz(v);
    EXPECT_NEAR(fidelity(rho, ghz_state()), (1 + v) / 2, 1e-14);
    EXPECT_NEAR(svetlichny_qm(rho, AngleSet::optimal()), v * 4 * std::sqrt(2.0), 1e-12);
  }
  EXPECT_NEAR(svetlichny_qm(noisy_ghz(0.797), AngleSet::optimal()), 4.51, 0.005);
  EXPECT_THROW(noisy_ghz(-0.1), std::invalid_argument);
  EXPECT_THROW(noisy_ghz(1.5), std::invalid_argument);
}

}  // namespace
}  // namespace svet
