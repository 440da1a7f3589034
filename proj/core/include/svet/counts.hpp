#pragma once

// Four-fold coincidence counts keyed by the analyzer setting of each party,
// plus the correlation estimators and Poissonian resampling built on them.

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "svet/inequalities.hpp"

namespace svet {

/// Analyzer token: U = unprimed equatorial, P = primed equatorial, with the
/// outcome sign; H / V are the computational projectors.
enum class Token : std::uint8_t { UPlus = 0, UMinus, PPlus, PMinus, H, V };
inline constexpr std::array<Token, 6> kAllTokens{Token::UPlus, Token::UMinus, Token::PPlus,
                                                 Token::PMinus, Token::H, Token::V};

std::string_view token_name(Token t);
std::optional<Token> parse_token(std::string_view s);
bool is_equatorial(Token t);

struct SettingLabel {
  Party party;
  Token token;
};

/// Settings for parties (a, b, c) in that order.
using SettingTriple = std::array<Token, 3>;

std::size_t triple_index(const SettingTriple& s);  // 36a + 6b + c
SettingTriple triple_from_index(std::size_t i);
std::string triple_name(const SettingTriple& s);  // "U+,U-,H"

/// The projector a token stands for at the given phases.
AnalyzerSetting analyzer_for(Party p, Token t, const AngleSet& phases);

enum class Scheme {
  Svetlichny,  // the 64 all-equatorial triples
  Tomography,  // all 216 triples
};

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class CountsTable {
 public:
  static constexpr std::size_t kSize = 216;

  CountsTable() : CountsTable(AngleSet::optimal()) {}
  explicit CountsTable(AngleSet phases);

  /// Throws ValidationError on a negative count or a triple already present.
  void insert(const SettingTriple& s, std::int64_t count);
  /// Overwrites; throws ValidationError on a negative count.
  void set(const SettingTriple& s, std::int64_t count);

  bool contains(const SettingTriple& s) const { return counts_[triple_index(s)] >= 0; }
  std::optional<std::int64_t> find(const SettingTriple& s) const;
  /// Throws std::out_of_range when missing.
  std::int64_t at(const SettingTriple& s) const;

  std::size_t size() const;
  std::vector<SettingTriple> missing(Scheme scheme) const;
  bool complete(Scheme scheme) const { return missing(scheme).empty(); }

  const AngleSet& phases() const { return phases_; }
  void set_phases(const AngleSet& phases) { phases_ = phases; }

  /// Present entries in index order.
  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (std::size_t i = 0; i < kSize; ++i) {
      if (counts_[i] >= 0) fn(triple_from_index(i), counts_[i]);
    }
  }

 private:
  std::array<std::int64_t, kSize> counts_;
  AngleSet phases_;
};

struct LoadedCounts {
  CountsTable table;
  /// Tomography-scheme triples absent from the file.
  std::vector<SettingTriple> missing;
};

/// Reads the counts CSV (header party_a,party_b,party_c,count). Throws
/// ParseError on malformed rows and ValidationError on duplicates, unknown
/// tokens or negative counts.
LoadedCounts parse_counts(std::istream& in, const AngleSet& phases = AngleSet::optimal());
LoadedCounts load_counts(const std::filesystem::path& path, const AngleSet& phases = AngleSet::optimal());

void write_counts(std::ostream& out, const CountsTable& t);

/// Phases sidecar: a JSON object with any of phi_a, phi_a_prime, phi_b,
/// phi_b_prime, phi_c, phi_c_prime (radians). Missing keys take the optimal
/// angles; unknown keys are a ParseError.
AngleSet parse_phases(std::istream& in);
AngleSet load_phases(const std::filesystem::path& path);
void write_phases(std::ostream& out, const AngleSet& phases);

enum class Basis { U, P };

struct CorrelationEstimate {
  double value = 0.0;
  std::int64_t numerator = 0;
  std::int64_t total = 0;
  std::array<std::pair<SettingTriple, std::int64_t>, 8> block{};
};

/// Parity-weighted block average over the eight sign combinations of the
/// chosen bases. Throws ValidationError on missing counts or a zero total.
CorrelationEstimate correlation(const CountsTable& t, Basis a, Basis b, Basis c);

/// Eight correlations in kSvetlichnyTerms order.
std::array<CorrelationEstimate, 8> svetlichny_correlations(const CountsTable& t);

double svetlichny_from_counts_signed(const CountsTable& t);
double svetlichny_from_counts(const CountsTable& t);
double mermin_from_counts(const CountsTable& t);

/// Label such as "E(a,b',c)" for a term.
std::string term_label(const CorrelationTerm& term);

// Poissonian resampling ------------------------------------------------------

/// A statistic of a counts table; may return several values at once.
using Statistic = std::function<std::vector<double>(const CountsTable&)>;

struct McSummary {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
  int replicates = 0;
};

/// Replaces every count with a Poisson draw whose mean is that count. A zero
/// count stays zero.
CountsTable poisson_resample(const CountsTable& t, std::mt19937_64& engine);

/// Generator for replicate `index` under `seed`; independent of thread layout.
std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t index);

struct MonteCarloOptions {
  int replicates = 400;
  std::uint64_t seed = 1;
  /// 0 means hardware concurrency.
  unsigned threads = 0;
};

/// Per-replicate statistic values, indexed [replicate][component].
std::vector<std::vector<double>> resample_values(const CountsTable& t, const Statistic& stat,
                                                 const MonteCarloOptions& opts);

/// Mean and sample stddev for each component of the statistic.
std::vector<McSummary> monte_carlo(const CountsTable& t, const Statistic& stat, const MonteCarloOptions& opts);

McSummary summarize(std::span<const double> values);

}  // namespace svet
