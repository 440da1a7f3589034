#include "svet/sourcesim.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace svet {

namespace {

const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double factorial(int n) {
  double f = 1.0;
  for (int k = 2; k <= n; ++k) f *= k;
  return f;
}

Mode mode(Spatial s, Polarization p) { return {s, p}; }

}  // namespace

std::string spatial_name(Spatial s) {
  switch (s) {
    case Spatial::In1: return "1";
    case Spatial::In2: return "2";
    case Spatial::In1Prime: return "1'";
    case Spatial::Trigger: return "T";
    case Spatial::BsTransmitted: return "t";
    case Spatial::A: return "a";
    case Spatial::B: return "b";
    case Spatial::C: return "c";
  }
  return "?";
}

std::string mode_name(const Mode& m) { return spatial_name(m.spatial) + (m.pol == Polarization::H ? "H" : "V"); }

// ModeMonomial ---------------------------------------------------------------

ModeMonomial::ModeMonomial(std::initializer_list<std::pair<const Mode, int>> occupations) {
  for (const auto& [m, n] : occupations) {
    if (n < 0) throw std::invalid_argument("negative occupation");
    if (n > 0) occupations_[m] += n;
  }
}

int ModeMonomial::occupation(const Mode& m) const {
  const auto it = occupations_.find(m);
  return it == occupations_.end() ? 0 : it->second;
}

int ModeMonomial::photon_number() const {
  int n = 0;
  for (const auto& [m, k] : occupations_) n += k;
  return n;
}

int ModeMonomial::photons_in(Spatial s) const {
  return occupation(mode(s, Polarization::H)) + occupation(mode(s, Polarization::V));
}

double ModeMonomial::factorial_weight() const {
  double w = 1.0;
  for (const auto& [m, k] : occupations_) w *= factorial(k);
  return w;
}

ModeMonomial ModeMonomial::with_photon(const Mode& m) const {
  ModeMonomial out = *this;
  ++out.occupations_[m];
  return out;
}

std::string ModeMonomial::str() const {
  std::string s;
  for (const auto& [m, k] : occupations_) {
    if (!s.empty()) s += ' ';
    s += mode_name(m) + ":" + std::to_string(k);
  }
  return s.empty() ? "vac" : s;
}

// FockPolynomial -------------------------------------------------------------

void FockPolynomial::add(const ModeMonomial& m, Complex coeff) { terms_[m] += coeff; }

Complex FockPolynomial::coefficient(const ModeMonomial& m) const {
  const auto it = terms_.find(m);
  return it == terms_.end() ? Complex{} : it->second;
}

double FockPolynomial::norm_squared() const {
  double s = 0.0;
  for (const auto& [m, c] : terms_) s += std::norm(c) * m.factorial_weight();
  return s;
}

FockPolynomial FockPolynomial::normalized() const {
  const double n = std::sqrt(norm_squared());
  if (n == 0.0) throw std::domain_error("cannot normalize an empty Fock polynomial");
  return scaled(1.0 / n);
}

FockPolynomial FockPolynomial::scaled(Complex factor) const {
  FockPolynomial out;
  for (const auto& [m, c] : terms_) out.terms_.emplace(m, c * factor);
  out.prune();
  return out;
}

FockPolynomial FockPolynomial::operator*(const FockPolynomial& other) const {
  FockPolynomial out;
  for (const auto& [ml, cl] : terms_) {
    for (const auto& [mr, cr] : other.terms_) {
      ModeMonomial m = ml;
      for (const auto& [mode, k] : mr.occupations()) {
        for (int i = 0; i < k; ++i) m = m.with_photon(mode);
      }
      out.add(m, cl * cr);
    }
  }
  out.prune();
  return out;
}

void FockPolynomial::prune() {
  std::erase_if(terms_, [](const auto& kv) { return std::abs(kv.second) <= kPruneTolerance; });
}

FockPolynomial FockPolynomial::vacuum() {
  FockPolynomial p;
  p.add(ModeMonomial{}, 1.0);
  return p;
}

FockPolynomial FockPolynomial::creation(const Mode& m) {
  FockPolynomial p;
  p.add(ModeMonomial{}.with_photon(m), 1.0);
  return p;
}

// OpticalElement -------------------------------------------------------------

OpticalElement OpticalElement::pbs(Spatial in1, std::optional<Spatial> in2, Spatial out1, Spatial out2) {
  OpticalElement e(Kind::PBS);
  e.transfer_[mode(in1, Polarization::H)] = {{mode(out1, Polarization::H), 1.0}};
  e.transfer_[mode(in1, Polarization::V)] = {{mode(out2, Polarization::V), 1.0}};
  if (in2) {
    e.transfer_[mode(*in2, Polarization::H)] = {{mode(out2, Polarization::H), 1.0}};
    e.transfer_[mode(*in2, Polarization::V)] = {{mode(out1, Polarization::V), 1.0}};
  }
  return e;
}

OpticalElement OpticalElement::bs50(Spatial in1, std::optional<Spatial> in2, Spatial out1, Spatial out2) {
  OpticalElement e(Kind::BS50);
  const Complex t = kInvSqrt2;
  const Complex r = Complex(0.0, kInvSqrt2);
  for (Polarization p : {Polarization::H, Polarization::V}) {
    e.transfer_[mode(in1, p)] = {{mode(out1, p), t}, {mode(out2, p), r}};
    if (in2) e.transfer_[mode(*in2, p)] = {{mode(out1, p), r}, {mode(out2, p), t}};
  }
  return e;
}

OpticalElement OpticalElement::hwp(Spatial m, double theta) {
  OpticalElement e(Kind::HWP);
  const double c = std::cos(2 * theta), s = std::sin(2 * theta);
  e.transfer_[mode(m, Polarization::H)] = {{mode(m, Polarization::H), c}, {mode(m, Polarization::V), s}};
  e.transfer_[mode(m, Polarization::V)] = {{mode(m, Polarization::H), s}, {mode(m, Polarization::V), -c}};
  return e;
}

OpticalElement OpticalElement::phase_shift(Spatial m, double delta) {
  OpticalElement e(Kind::PhaseShift);
  e.transfer_[mode(m, Polarization::H)] = {{mode(m, Polarization::H), 1.0}};
  e.transfer_[mode(m, Polarization::V)] = {{mode(m, Polarization::V), std::polar(1.0, delta)}};
  return e;
}

bool OpticalElement::is_isometry(double tol) const {
  for (const auto& [in_i, out_i] : transfer_) {
    for (const auto& [in_j, out_j] : transfer_) {
      Complex dot{};
      for (const auto& [mi, ci] : out_i) {
        for (const auto& [mj, cj] : out_j) {
          if (mi == mj) dot += std::conj(ci) * cj;
        }
      }
      const Complex expected = in_i == in_j ? 1.0 : 0.0;
      if (std::abs(dot - expected) > tol) return false;
    }
  }
  return true;
}

// Pipeline -------------------------------------------------------------------

FockPolynomial double_pair_state(double theta) {
  const auto pair = (FockPolynomial::creation(mode(Spatial::In1, Polarization::H)) *
                     FockPolynomial::creation(mode(Spatial::In2, Polarization::V)));
  auto cross = (FockPolynomial::creation(mode(Spatial::In1, Polarization::V)) *
                FockPolynomial::creation(mode(Spatial::In2, Polarization::H)))
                   .scaled(std::polar(1.0, theta));
  FockPolynomial a_dag;
  for (const auto& [m, c] : pair.terms()) a_dag.add(m, c * kInvSqrt2);
  for (const auto& [m, c] : cross.terms()) a_dag.add(m, c * kInvSqrt2);
  return (a_dag * a_dag).normalized();
}

FockPolynomial apply_element(const FockPolynomial& p, const OpticalElement& e) {
  std::set<Mode> written;
  for (const auto& [in, outs] : e.transfer()) {
    for (const auto& [out, c] : outs) {
      if (!e.transfer().contains(out)) written.insert(out);
    }
  }

  FockPolynomial result;
  for (const auto& [monomial, coeff] : p.terms()) {
    FockPolynomial expanded;
    expanded.add(ModeMonomial{}, coeff);
    for (const auto& [m, n] : monomial.occupations()) {
      if (written.contains(m)) {
        throw std::invalid_argument("mode " + mode_name(m) + " is occupied and also an element output");
      }
      const auto it = e.transfer().find(m);
      FockPolynomial factor;
      if (it == e.transfer().end()) {
        factor = FockPolynomial::creation(m);
      } else {
        for (const auto& [out, c] : it->second) factor.add(ModeMonomial{}.with_photon(out), c);
      }
      for (int k = 0; k < n; ++k) expanded = expanded * factor;
    }
    for (const auto& [m, c] : expanded.terms()) result.add(m, c);
  }
  result.prune();
  return result;
}

std::vector<OpticalElement> interferometer(double hwp_angle, double bs_compensation) {
  return {
      OpticalElement::pbs(Spatial::In1, std::nullopt, Spatial::In1Prime, Spatial::Trigger),
      OpticalElement::hwp(Spatial::In1Prime, hwp_angle),
      OpticalElement::bs50(Spatial::In2, std::nullopt, Spatial::BsTransmitted, Spatial::C),
      OpticalElement::phase_shift(Spatial::C, bs_compensation),
      OpticalElement::pbs(Spatial::In1Prime, Spatial::BsTransmitted, Spatial::A, Spatial::B),
  };
}

FockPolynomial run_interferometer(const FockPolynomial& input, const std::vector<OpticalElement>& elements) {
  FockPolynomial p = input;
  for (const auto& e : elements) p = apply_element(p, e);
  return p;
}

namespace {

bool kept_pattern(const ModeMonomial& m) {
  return m.photon_number() == 4 && m.occupation(mode(Spatial::Trigger, Polarization::V)) == 1 &&
         m.photons_in(Spatial::A) == 1 && m.photons_in(Spatial::B) == 1 && m.photons_in(Spatial::C) == 1;
}

std::size_t qubit_index(const ModeMonomial& m) {
  auto bit = [&](Spatial s) { return m.occupation(mode(s, Polarization::V)) == 1 ? std::size_t{1} : std::size_t{0}; };
  return 4 * bit(Spatial::A) + 2 * bit(Spatial::B) + bit(Spatial::C);
}

CVector kept_amplitudes(const FockPolynomial& p) {
  CVector amps = CVector::Zero(8);
  for (const auto& [m, c] : p.terms()) {
    if (kept_pattern(m)) amps(static_cast<Eigen::Index>(qubit_index(m))) += c * std::sqrt(m.factorial_weight());
  }
  return amps;
}

}  // namespace

PostSelection postselect_ghz(const FockPolynomial& p, double output_phase) {
  const auto shifted = apply_element(p, OpticalElement::phase_shift(Spatial::A, output_phase));
  const CVector amps = kept_amplitudes(shifted);
  const double probability = amps.squaredNorm();
  if (probability == 0.0) throw std::domain_error("post-selection kept no detection pattern");
  return {StateVector(amps / std::sqrt(probability)), probability};
}

double compensating_phase(const FockPolynomial& p) {
  const CVector amps = kept_amplitudes(p);
  if (std::abs(amps(1)) == 0.0 || std::abs(amps(6)) == 0.0) {
    throw std::domain_error("post-selected state lacks an HHV or VVH component");
  }
  return wrap_phase(std::arg(amps(1)) - std::arg(amps(6)));
}

DensityMatrix noisy_ghz(double v) {
  if (!(v >= 0.0 && v <= 1.0)) throw std::invalid_argument("visibility must lie in [0, 1]");
  const CVector g = ghz_state().amps();
  CMatrix populations = CMatrix::Zero(8, 8);
  populations(1, 1) = populations(6, 6) = 0.5;
  return DensityMatrix(v * (g * g.adjoint()) + (1.0 - v) * populations);
}

}  // namespace svet
