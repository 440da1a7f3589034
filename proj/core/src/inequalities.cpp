#include "svet/inequalities.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <vector>

#include "svet/optimize.hpp"

namespace svet {

namespace {

template <std::size_t N, typename Correlation>
double combine(const std::array<CorrelationTerm, N>& terms, Correlation&& corr) {
  double s = 0.0;
  for (const auto& t : terms) s += t.sign * corr(t);
  return s;
}

std::mt19937_64 restart_engine(std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  return std::mt19937_64(seq);
}

// Runs Nelder-Mead, then restarts it from its own optimum until the value
// stops improving; a collapsed simplex otherwise stalls short of the peak.
optim::MinimizeResult polished_nelder_mead(const optim::Objective& f, std::vector<double> x0) {
  optim::NelderMeadOptions opts;
  auto best = optim::nelder_mead(f, std::move(x0), opts);
  for (int round = 0; round < 8; ++round) {
    opts.initial_step = 0.1;
    auto next = optim::nelder_mead(f, best.x, opts);
    const bool improved = next.value < best.value - 1e-15;
    if (next.value < best.value) best = std::move(next);
    if (!improved) break;
  }
  return best;
}

}  // namespace

AngleSet::AngleSet(double phi_a, double phi_a_prime, double phi_b, double phi_b_prime, double phi_c,
                   double phi_c_prime)
    : phases_{wrap_phase(phi_a), wrap_phase(phi_a_prime), wrap_phase(phi_b),
              wrap_phase(phi_b_prime), wrap_phase(phi_c), wrap_phase(phi_c_prime)} {}

AngleSet AngleSet::optimal() { return AngleSet(3 * kPi / 4, kPi / 4, kPi / 2, 0.0, 0.0, kPi / 2); }

double svetlichny_qm_signed(const DensityMatrix& rho, const AngleSet& ang) {
  if (rho.dim() != 8) throw std::invalid_argument("Svetlichny parameter needs a three-qubit state");
  return combine(kSvetlichnyTerms, [&](const CorrelationTerm& t) {
    return expectation3(rho, ang.phase(Party::A, t.a_primed), ang.phase(Party::B, t.b_primed),
                        ang.phase(Party::C, t.c_primed));
  });
}

double svetlichny_qm(const DensityMatrix& rho, const AngleSet& ang) {
  return std::abs(svetlichny_qm_signed(rho, ang));
}

double svetlichny_prediction_signed(const AngleSet& ang) {
  return combine(kSvetlichnyTerms, [&](const CorrelationTerm& t) {
    return std::cos(ang.phase(Party::A, t.a_primed) + ang.phase(Party::B, t.b_primed) -
                    ang.phase(Party::C, t.c_primed));
  });
}

double svetlichny_prediction(const AngleSet& ang) { return std::abs(svetlichny_prediction_signed(ang)); }

double mermin_qm_signed(const DensityMatrix& rho, const AngleSet& ang) {
  if (rho.dim() != 8) throw std::invalid_argument("Mermin parameter needs a three-qubit state");
  return combine(kMerminTerms, [&](const CorrelationTerm& t) {
    return expectation3(rho, ang.phase(Party::A, t.a_primed), ang.phase(Party::B, t.b_primed),
                        ang.phase(Party::C, t.c_primed));
  });
}

double mermin_qm(const DensityMatrix& rho, const AngleSet& ang) { return std::abs(mermin_qm_signed(rho, ang)); }

double chsh_qm(const DensityMatrix& rho, const ChshAngles& ang) {
  return std::abs(expectation2(rho, ang.phi_a, ang.phi_b) + expectation2(rho, ang.phi_a, ang.phi_b_prime) +
                  expectation2(rho, ang.phi_a_prime, ang.phi_b) -
                  expectation2(rho, ang.phi_a_prime, ang.phi_b_prime));
}

AngleSearchResult maximize_svetlichny(const DensityMatrix& rho, int restarts, std::uint64_t seed) {
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  auto objective = [&](std::span<const double> x) {
    return -svetlichny_qm(rho, AngleSet(x[0], x[1], x[2], x[3], x[4], x[5]));
  };

  AngleSearchResult best;
  best.value = -1.0;
  for (int k = 0; k < restarts; ++k) {
    auto engine = restart_engine(seed, k);
    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
    std::vector<double> x0(6);
    for (auto& v : x0) v = uniform(engine);
    const auto run = polished_nelder_mead(objective, std::move(x0));
    if (-run.value > best.value) {
      best.value = -run.value;
      best.angles = AngleSet(run.x[0], run.x[1], run.x[2], run.x[3], run.x[4], run.x[5]);
    }
  }
  return best;
}

ChshSearchResult maximize_chsh(const DensityMatrix& rho, int restarts, std::uint64_t seed) {
  if (restarts < 1) throw std::invalid_argument("restarts must be at least 1");
  if (rho.dim() != 4) throw std::invalid_argument("CHSH needs a two-qubit state");
  auto objective = [&](std::span<const double> x) { return -chsh_qm(rho, {x[0], x[1], x[2], x[3]}); };

  ChshSearchResult best;
  best.value = -1.0;
  for (int k = 0; k < restarts; ++k) {
    auto engine = restart_engine(seed, k);
    std::uniform_real_distribution<double> uniform(0.0, kTwoPi);
    std::vector<double> x0(4);
    for (auto& v : x0) v = uniform(engine);
    const auto run = polished_nelder_mead(objective, std::move(x0));
    if (-run.value > best.value) {
      best.value = -run.value;
      best.angles = {wrap_phase(run.x[0]), wrap_phase(run.x[1]), wrap_phase(run.x[2]), wrap_phase(run.x[3])};
    }
  }
  return best;
}

}  // namespace svet
