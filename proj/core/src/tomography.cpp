#include "svet/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "svet/optimize.hpp"

namespace svet {

namespace {

constexpr int kDim = 8;
constexpr int kOffDiagonalStart = kDim;
constexpr int kIntensityIndex = 64;

CVector product_ket(const SettingTriple& s, const AngleSet& phases) {
  return tensor3(analyzer_ket(analyzer_for(Party::A, s[0], phases)),
                 analyzer_ket(analyzer_for(Party::B, s[1], phases)),
                 analyzer_ket(analyzer_for(Party::C, s[2], phases)))
      .amps();
}

template <typename Keep>
ProjectorSet projectors_where(const AngleSet& phases, Keep&& keep) {
  ProjectorSet set{phases, {}};
  for (std::size_t i = 0; i < CountsTable::kSize; ++i) {
    const auto s = triple_from_index(i);
    if (keep(s)) set.items.push_back({s, product_ket(s, phases)});
  }
  return set;
}

CMatrix hermitian_part(const CMatrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace

ProjectorSet build_projectors(const AngleSet& phases) {
  return projectors_where(phases, [](const SettingTriple&) { return true; });
}

ProjectorSet svetlichny_projectors(const AngleSet& phases) {
  return projectors_where(phases, [](const SettingTriple& s) {
    return is_equatorial(s[0]) && is_equatorial(s[1]) && is_equatorial(s[2]);
  });
}

ProjectorSet complete_subset(const AngleSet& phases) {
  auto keep_token = [](Token t) { return t == Token::H || t == Token::V || t == Token::UPlus || t == Token::PPlus; };
  return projectors_where(phases, [&](const SettingTriple& s) {
    return keep_token(s[0]) && keep_token(s[1]) && keep_token(s[2]);
  });
}

std::vector<double> expected_probabilities(const DensityMatrix& rho, const ProjectorSet& p) {
  if (rho.dim() != kDim) throw std::invalid_argument("projector probabilities need a three-qubit state");
  std::vector<double> out;
  out.reserve(p.size());
  for (const auto& item : p.items) out.push_back(std::max(0.0, projector_probability(rho.entries(), item.ket)));
  return out;
}

CountsTable expected_counts(const DensityMatrix& rho, const ProjectorSet& p, double intensity) {
  if (!(intensity > 0.0)) throw std::invalid_argument("intensity must be positive");
  CountsTable t(p.phases);
  const auto probs = expected_probabilities(rho, p);
  for (std::size_t i = 0; i < p.size(); ++i) {
    t.set(p.items[i].setting, static_cast<std::int64_t>(std::llround(intensity * probs[i])));
  }
  return t;
}

CountsTable sample_counts(const DensityMatrix& rho, const ProjectorSet& p, double intensity, std::uint64_t seed) {
  if (!(intensity > 0.0)) throw std::invalid_argument("intensity must be positive");
  CountsTable t(p.phases);
  const auto probs = expected_probabilities(rho, p);
  std::mt19937_64 engine = replicate_engine(seed, 0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double mean = intensity * probs[i];
    std::int64_t n = 0;
    if (mean > 0.0) n = std::poisson_distribution<std::int64_t>(mean)(engine);
    t.set(p.items[i].setting, n);
  }
  return t;
}

// LikelihoodModel ------------------------------------------------------------

LikelihoodModel::LikelihoodModel(std::vector<double> counts, std::vector<CVector> kets, double probability_floor)
    : counts_(std::move(counts)), kets_(std::move(kets)), floor_(probability_floor) {
  if (counts_.size() != kets_.size()) throw std::invalid_argument("counts and projectors differ in length");
  if (counts_.empty()) throw std::invalid_argument("likelihood needs at least one projector");
}

CMatrix LikelihoodModel::lower_triangular(std::span<const double> x) {
  CMatrix t = CMatrix::Zero(kDim, kDim);
  for (int i = 0; i < kDim; ++i) t(i, i) = x[static_cast<std::size_t>(i)];
  std::size_t k = kOffDiagonalStart;
  for (int i = 1; i < kDim; ++i) {
    for (int j = 0; j < i; ++j, k += 2) t(i, j) = Complex(x[k], x[k + 1]);
  }
  return t;
}

CMatrix LikelihoodModel::density(std::span<const double> x) {
  const CMatrix t = lower_triangular(x);
  const CMatrix gram = t.adjoint() * t;
  return hermitian_part(gram / gram.trace().real());
}

std::vector<double> LikelihoodModel::maximally_mixed_start(double intensity) {
  std::vector<double> x(kParameters, 0.0);
  std::fill(x.begin(), x.begin() + kDim, 1.0);
  x[kIntensityIndex] = std::log(intensity);
  return x;
}

double LikelihoodModel::negative_log_likelihood(std::span<const double> x) const {
  std::vector<double> scratch(kParameters);
  return negative_log_likelihood(x, scratch);
}

double LikelihoodModel::negative_log_likelihood(std::span<const double> x, std::span<double> grad) const {
  const CMatrix t = lower_triangular(x);
  const double tau = t.squaredNorm();
  const double intensity = std::exp(x[kIntensityIndex]);

  double log_likelihood = 0.0;
  double d_log_intensity = 0.0;
  double weighted_q = 0.0;  // sum_i c_i q_i
  Eigen::Matrix<Complex, kDim, kDim> accum = Eigen::Matrix<Complex, kDim, kDim>::Zero();  // sum_i c_i psi psi^dag

  for (std::size_t i = 0; i < counts_.size(); ++i) {
    const CVector& psi = kets_[i];
    const double q = (t * psi).squaredNorm();
    const double p = q / tau;
    const double n = counts_[i];
    const bool clipped = p < floor_;
    const double pc = clipped ? floor_ : p;
    const double mu = intensity * pc;
    log_likelihood += (n > 0.0 ? n * std::log(mu) : 0.0) - mu;
    d_log_intensity += n - mu;
    if (clipped) continue;
    const double c = n / p - intensity;  // dL/dp_i
    weighted_q += c * q;
    accum.noalias() += c * (psi * psi.adjoint());
  }

  // dL/dT in complex form (d/du + i d/dv for T_jk = u + i v).
  const CMatrix g = (2.0 / tau) * (t * accum) - (2.0 * weighted_q / (tau * tau)) * t;
  for (int i = 0; i < kDim; ++i) grad[static_cast<std::size_t>(i)] = -g(i, i).real();
  std::size_t k = kOffDiagonalStart;
  for (int i = 1; i < kDim; ++i) {
    for (int j = 0; j < i; ++j, k += 2) {
      grad[k] = -g(i, j).real();
      grad[k + 1] = -g(i, j).imag();
    }
  }
  grad[kIntensityIndex] = -d_log_intensity;
  return -log_likelihood;
}

// reconstruct ----------------------------------------------------------------

TomographyResult reconstruct(const CountsTable& t, const ProjectorSet& p, const TomographyOptions& opts) {
  if (opts.restarts < 1) throw std::invalid_argument("tomography needs at least one restart");
  std::vector<double> counts;
  std::vector<CVector> kets;
  counts.reserve(p.size());
  kets.reserve(p.size());
  double total = 0.0;
  for (const auto& item : p.items) {
    const auto n = t.find(item.setting);
    if (!n) throw ValidationError("tomography: missing count for " + triple_name(item.setting));
    counts.push_back(static_cast<double>(*n));
    kets.push_back(item.ket);
    total += static_cast<double>(*n);
  }
  if (total <= 0.0) throw ValidationError("tomography: all counts are zero");

  const LikelihoodModel model(counts, kets, opts.probability_floor);
  const optim::GradientObjective objective = [&](std::span<const double> x, std::span<double> grad) {
    return model.negative_log_likelihood(x, grad);
  };
  const optim::Objective value_only = [&](std::span<const double> x) { return model.negative_log_likelihood(x); };

  optim::BfgsOptions bopts;
  bopts.max_iterations = opts.max_iterations;
  bopts.improvement_tolerance = opts.improvement_tolerance;
  bopts.patience = opts.patience;

  const double mean_count = total / static_cast<double>(p.size());
  const auto start = LikelihoodModel::maximally_mixed_start(mean_count * kDim);

  optim::BfgsResult best;
  best.value = std::numeric_limits<double>::infinity();
  int total_iterations = 0;
  for (int restart = 0; restart < opts.restarts; ++restart) {
    auto x0 = start;
    if (restart > 0) {
      auto engine = replicate_engine(opts.seed, static_cast<std::uint64_t>(restart));
      std::normal_distribution<double> jitter(0.0, 0.3);
      for (int k = 0; k < kIntensityIndex; ++k) x0[static_cast<std::size_t>(k)] += jitter(engine);
    }
    auto run = optim::bfgs(objective, std::move(x0), bopts);
    if (run.line_search_failed && !run.converged) {
      // Gradient path stalled: polish with the simplex, then resume.
      optim::NelderMeadOptions nm;
      nm.initial_step = 0.01;
      nm.max_evaluations = 20000;
      const auto polished = optim::nelder_mead(value_only, run.x, nm);
      auto resumed = optim::bfgs(objective, polished.x, bopts);
      resumed.iterations += run.iterations;
      resumed.trace.insert(resumed.trace.begin(), run.trace.begin(), run.trace.end());
      run = std::move(resumed);
    }
    total_iterations += run.iterations;
    if (run.value < best.value) best = std::move(run);
  }

  std::vector<double> trace(best.trace.size());
  std::transform(best.trace.begin(), best.trace.end(), trace.begin(), [](double v) { return -v; });
  return TomographyResult{DensityMatrix(LikelihoodModel::density(best.x)),
                          std::exp(best.x[kIntensityIndex]),
                          -best.value,
                          total_iterations,
                          best.converged,
                          std::move(trace)};
}

DerivedQuantities derived_quantities(const DensityMatrix& rho, const AngleSet& ang) {
  DerivedQuantities d;
  d.fidelity = fidelity(rho, ghz_state());
  d.svetlichny = svetlichny_qm(rho, ang);
  d.mermin = mermin_qm(rho, ang);
  d.eigenvalues = rho.eigenvalues();
  d.real_part = rho.entries().real();
  d.imag_part = rho.entries().imag();
  return d;
}

DerivedQuantities derived_quantities(const TomographyResult& r, const AngleSet& ang) {
  return derived_quantities(r.rho, ang);
}

void write_density_matrix(std::ostream& out, const TomographyResult& r) {
  const auto old_flags = out.flags();
  const auto old_precision = out.precision();
  out << std::setprecision(12);
  out << "# three-qubit density matrix; basis index 4a+2b+c with H=0, V=1\n";
  out << "dim=" << kDim << '\n';
  out << "intensity=" << r.intensity << '\n';
  out << "log_likelihood=" << r.log_likelihood << '\n';
  out << "iterations=" << r.iterations << '\n';
  out << "converged=" << (r.converged ? "true" : "false") << '\n';
  out << "fidelity_ghz=" << fidelity(r.rho, ghz_state()) << '\n';
  auto block = [&](const char* name, auto part) {
    out << name << '\n';
    for (int i = 0; i < kDim; ++i) {
      for (int j = 0; j < kDim; ++j) out << (j ? " " : "") << part(r.rho(static_cast<std::size_t>(i), static_cast<std::size_t>(j)));
      out << '\n';
    }
  };
  block("[real]", [](Complex z) { return z.real(); });
  block("[imag]", [](Complex z) { return z.imag(); });
  out.flags(old_flags);
  out.precision(old_precision);
}

DensityMatrix read_density_matrix(std::istream& in) {
  CMatrix m = CMatrix::Zero(kDim, kDim);
  bool seen_real = false, seen_imag = false;
  std::string line;
  while (std::getline(in, line)) {
    const bool is_real = line.starts_with("[real]");
    const bool is_imag = line.starts_with("[imag]");
    if (!is_real && !is_imag) continue;
    for (int i = 0; i < kDim; ++i) {
      if (!std::getline(in, line)) throw ParseError("density matrix: truncated block");
      std::istringstream row(line);
      for (int j = 0; j < kDim; ++j) {
        double v = 0.0;
        if (!(row >> v)) throw ParseError("density matrix: bad row " + std::to_string(i));
        if (is_real) m(i, j) += Complex(v, 0.0);
        else m(i, j) += Complex(0.0, v);
      }
    }
    (is_real ? seen_real : seen_imag) = true;
  }
  if (!seen_real || !seen_imag) throw ParseError("density matrix: missing [real] or [imag] block");
  return DensityMatrix(m);
}

}  // namespace svet
