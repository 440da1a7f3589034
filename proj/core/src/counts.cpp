#include "svet/counts.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <iomanip>
#include <istream>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

namespace svet {

namespace {

constexpr std::array<std::string_view, 6> kTokenNames{"U+", "U-", "P+", "P-", "H", "V"};
constexpr std::array<std::string_view, 6> kPhaseKeys{"phi_a", "phi_a_prime", "phi_b",
                                                     "phi_b_prime", "phi_c", "phi_c_prime"};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

Token signed_token(Basis basis, int sign) {
  if (basis == Basis::U) return sign > 0 ? Token::UPlus : Token::UMinus;
  return sign > 0 ? Token::PPlus : Token::PMinus;
}

Basis basis_of(bool primed) { return primed ? Basis::P : Basis::U; }

}  // namespace

std::string_view token_name(Token t) { return kTokenNames[static_cast<std::size_t>(t)]; }

std::optional<Token> parse_token(std::string_view s) {
  for (std::size_t i = 0; i < kTokenNames.size(); ++i) {
    if (kTokenNames[i] == s) return static_cast<Token>(i);
  }
  return std::nullopt;
}

bool is_equatorial(Token t) { return t != Token::H && t != Token::V; }

std::size_t triple_index(const SettingTriple& s) {
  return 36 * static_cast<std::size_t>(s[0]) + 6 * static_cast<std::size_t>(s[1]) + static_cast<std::size_t>(s[2]);
}

SettingTriple triple_from_index(std::size_t i) {
  return {static_cast<Token>(i / 36), static_cast<Token>((i / 6) % 6), static_cast<Token>(i % 6)};
}

std::string triple_name(const SettingTriple& s) {
  std::string out;
  for (std::size_t k = 0; k < 3; ++k) {
    if (k) out += ',';
    out += token_name(s[k]);
  }
  return out;
}

AnalyzerSetting analyzer_for(Party p, Token t, const AngleSet& phases) {
  switch (t) {
    case Token::UPlus: return AnalyzerSetting::equatorial(phases.phase(p, false), +1);
    case Token::UMinus: return AnalyzerSetting::equatorial(phases.phase(p, false), -1);
    case Token::PPlus: return AnalyzerSetting::equatorial(phases.phase(p, true), +1);
    case Token::PMinus: return AnalyzerSetting::equatorial(phases.phase(p, true), -1);
    case Token::H: return AnalyzerSetting::computational(Polarization::H);
    case Token::V: return AnalyzerSetting::computational(Polarization::V);
  }
  throw std::invalid_argument("unknown token");
}

CountsTable::CountsTable(AngleSet phases) : phases_(phases) { counts_.fill(-1); }

void CountsTable::insert(const SettingTriple& s, std::int64_t count) {
  if (contains(s)) throw ValidationError("duplicate setting triple " + triple_name(s));
  set(s, count);
}

void CountsTable::set(const SettingTriple& s, std::int64_t count) {
  if (count < 0) {
    throw ValidationError("negative count " + std::to_string(count) + " for " + triple_name(s));
  }
  counts_[triple_index(s)] = count;
}

std::optional<std::int64_t> CountsTable::find(const SettingTriple& s) const {
  const auto v = counts_[triple_index(s)];
  if (v < 0) return std::nullopt;
  return v;
}

std::int64_t CountsTable::at(const SettingTriple& s) const {
  const auto v = counts_[triple_index(s)];
  if (v < 0) throw std::out_of_range("no count for " + triple_name(s));
  return v;
}

std::size_t CountsTable::size() const {
  return static_cast<std::size_t>(std::count_if(counts_.begin(), counts_.end(), [](auto v) { return v >= 0; }));
}

std::vector<SettingTriple> CountsTable::missing(Scheme scheme) const {
  std::vector<SettingTriple> out;
  for (std::size_t i = 0; i < kSize; ++i) {
    const auto s = triple_from_index(i);
    if (scheme == Scheme::Svetlichny && !(is_equatorial(s[0]) && is_equatorial(s[1]) && is_equatorial(s[2]))) {
      continue;
    }
    if (counts_[i] < 0) out.push_back(s);
  }
  return out;
}

LoadedCounts parse_counts(std::istream& in, const AngleSet& phases) {
  LoadedCounts loaded{CountsTable(phases), {}};
  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = line;
    if (line_no == 1 && view.starts_with("\xEF\xBB\xBF")) view.remove_prefix(3);
    view = trim(view);
    if (view.empty()) continue;

    const auto fields = split_fields(view);
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (!header_seen) {
      if (fields.size() != 4 || fields[0] != "party_a" || fields[1] != "party_b" || fields[2] != "party_c" ||
          fields[3] != "count") {
        throw ParseError(where + "expected header party_a,party_b,party_c,count");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) {
      throw ParseError(where + "expected 4 fields, got " + std::to_string(fields.size()));
    }
    SettingTriple triple{};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto tok = parse_token(fields[k]);
      if (!tok) throw ValidationError(where + "unknown setting token '" + std::string(fields[k]) + "'");
      triple[k] = *tok;
    }
    std::int64_t count = 0;
    const auto* first = fields[3].data();
    const auto* last = first + fields[3].size();
    const auto [ptr, ec] = std::from_chars(first, last, count);
    if (ec != std::errc{} || ptr != last) {
      throw ParseError(where + "count '" + std::string(fields[3]) + "' is not an integer");
    }
    try {
      loaded.table.insert(triple, count);
    } catch (const ValidationError& e) {
      throw ValidationError(where + e.what());
    }
  }
  if (!header_seen) throw ParseError("empty counts file");
  loaded.missing = loaded.table.missing(Scheme::Tomography);
  return loaded;
}

LoadedCounts load_counts(const std::filesystem::path& path, const AngleSet& phases) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open counts file " + path.string());
  return parse_counts(in, phases);
}

void write_counts(std::ostream& out, const CountsTable& t) {
  out << "party_a,party_b,party_c,count\n";
  t.for_each([&](const SettingTriple& s, std::int64_t n) { out << triple_name(s) << ',' << n << '\n'; });
}

AngleSet parse_phases(std::istream& in) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("phases file: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("phases file must hold a JSON object");
  std::array<double, 6> values = AngleSet::optimal().as_array();
  for (const auto& [key, value] : doc.items()) {
    const auto it = std::find(kPhaseKeys.begin(), kPhaseKeys.end(), key);
    if (it == kPhaseKeys.end()) throw ParseError("phases file: unknown key '" + key + "'");
    if (!value.is_number()) throw ParseError("phases file: '" + key + "' must be a number");
    values[static_cast<std::size_t>(it - kPhaseKeys.begin())] = value.get<double>();
  }
  try {
    return AngleSet(values[0], values[1], values[2], values[3], values[4], values[5]);
  } catch (const std::invalid_argument& e) {
    throw ParseError(std::string("phases file: ") + e.what());
  }
}

AngleSet load_phases(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open phases file " + path.string());
  return parse_phases(in);
}

void write_phases(std::ostream& out, const AngleSet& phases) {
  nlohmann::ordered_json doc;
  for (std::size_t i = 0; i < kPhaseKeys.size(); ++i) doc[std::string(kPhaseKeys[i])] = phases.as_array()[i];
  out << doc.dump(2) << '\n';
}

CorrelationEstimate correlation(const CountsTable& t, Basis a, Basis b, Basis c) {
  CorrelationEstimate est;
  std::size_t k = 0;
  for (int sa : {+1, -1}) {
    for (int sb : {+1, -1}) {
      for (int sc : {+1, -1}) {
        const SettingTriple s{signed_token(a, sa), signed_token(b, sb), signed_token(c, sc)};
        const auto n = t.find(s);
        if (!n) throw ValidationError("missing count for " + triple_name(s));
        est.block[k++] = {s, *n};
        est.numerator += sa * sb * sc * *n;
        est.total += *n;
      }
    }
  }
  if (est.total == 0) throw ValidationError("zero total counts in correlation block");
  est.value = static_cast<double>(est.numerator) / static_cast<double>(est.total);
  return est;
}

std::array<CorrelationEstimate, 8> svetlichny_correlations(const CountsTable& t) {
  std::array<CorrelationEstimate, 8> out;
  for (std::size_t i = 0; i < kSvetlichnyTerms.size(); ++i) {
    const auto& term = kSvetlichnyTerms[i];
    out[i] = correlation(t, basis_of(term.a_primed), basis_of(term.b_primed), basis_of(term.c_primed));
  }
  return out;
}

double svetlichny_from_counts_signed(const CountsTable& t) {
  const auto corr = svetlichny_correlations(t);
  double s = 0.0;
  for (std::size_t i = 0; i < corr.size(); ++i) s += kSvetlichnyTerms[i].sign * corr[i].value;
  return s;
}

double svetlichny_from_counts(const CountsTable& t) { return std::abs(svetlichny_from_counts_signed(t)); }

double mermin_from_counts(const CountsTable& t) {
  double s = 0.0;
  for (const auto& term : kMerminTerms) {
    s += term.sign *
         correlation(t, basis_of(term.a_primed), basis_of(term.b_primed), basis_of(term.c_primed)).value;
  }
  return std::abs(s);
}

std::string term_label(const CorrelationTerm& term) {
  std::string out = "E(a";
  if (term.a_primed) out += '\'';
  out += ",b";
  if (term.b_primed) out += '\'';
  out += ",c";
  if (term.c_primed) out += '\'';
  out += ')';
  return out;
}

CountsTable poisson_resample(const CountsTable& t, std::mt19937_64& engine) {
  CountsTable out(t.phases());
  t.for_each([&](const SettingTriple& s, std::int64_t n) {
    if (n == 0) {
      out.set(s, 0);
      return;
    }
    std::poisson_distribution<std::int64_t> draw(static_cast<double>(n));
    out.set(s, draw(engine));
  });
  return out;
}

std::mt19937_64 replicate_engine(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

std::vector<std::vector<double>> resample_values(const CountsTable& t, const Statistic& stat,
                                                 const MonteCarloOptions& opts) {
  if (opts.replicates < 2) throw std::invalid_argument("Monte Carlo needs at least 2 replicates");
  const auto n = static_cast<std::size_t>(opts.replicates);
  std::vector<std::vector<double>> values(n);

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));

  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](unsigned worker) {
    try {
      for (std::size_t i = worker; i < n; i += threads) {
        auto engine = replicate_engine(opts.seed, i);
        values[i] = stat(poisson_resample(t, engine));
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
    }
  };

  if (threads == 1) {
    work(0);
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(work, w);
  }
  if (failure) std::rethrow_exception(failure);
  return values;
}

McSummary summarize(std::span<const double> values) {
  McSummary s;
  s.replicates = static_cast<int>(values.size());
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.stddev = std::sqrt(ss / static_cast<double>(values.size() - 1));
  return s;
}

std::vector<McSummary> monte_carlo(const CountsTable& t, const Statistic& stat, const MonteCarloOptions& opts) {
  const auto values = resample_values(t, stat, opts);
  const std::size_t width = values.front().size();
  std::vector<McSummary> out(width);
  std::vector<double> column(values.size());
  for (std::size_t k = 0; k < width; ++k) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (values[i].size() != width) throw std::logic_error("statistic returned a varying number of values");
      column[i] = values[i][k];
    }
    out[k] = summarize(column);
  }
  return out;
}

}  // namespace svet
