#include "svet/statistics.hpp"

#include <stdexcept>

namespace svet {

namespace {

constexpr std::string_view kCorrelationPrefix = "correlation:";

Basis parse_basis(char c) {
  if (c == 'U') return Basis::U;
  if (c == 'P') return Basis::P;
  throw std::invalid_argument(std::string("unknown basis letter '") + c + "'");
}

}  // namespace

Statistic named_statistic(std::string_view name, const TomographyOptions& tomo) {
  if (name == "svetlichny") {
    return [](const CountsTable& t) { return std::vector<double>{svetlichny_from_counts(t)}; };
  }
  if (name == "mermin") {
    return [](const CountsTable& t) { return std::vector<double>{mermin_from_counts(t)}; };
  }
  if (name.starts_with(kCorrelationPrefix)) {
    const auto bases = name.substr(kCorrelationPrefix.size());
    if (bases.size() != 3) throw std::invalid_argument("correlation statistic needs three bases, e.g. correlation:UUP");
    const Basis a = parse_basis(bases[0]), b = parse_basis(bases[1]), c = parse_basis(bases[2]);
    return [a, b, c](const CountsTable& t) { return std::vector<double>{correlation(t, a, b, c).value}; };
  }
  if (name == "fidelity" || name == "svetlichny-qm") {
    const bool want_fidelity = name == "fidelity";
    return [tomo, want_fidelity](const CountsTable& t) {
      const auto result = reconstruct(t, build_projectors(t.phases()), tomo);
      const auto d = derived_quantities(result, t.phases());
      return std::vector<double>{want_fidelity ? d.fidelity : d.svetlichny};
    };
  }
  throw std::invalid_argument("unknown statistic '" + std::string(name) + "'");
}

std::vector<std::string> statistic_names() {
  std::vector<std::string> names{"svetlichny", "mermin"};
  for (const char* b : {"UUU", "UUP", "UPU", "UPP", "PUU", "PUP", "PPU", "PPP"}) {
    names.push_back(std::string(kCorrelationPrefix) + b);
  }
  names.emplace_back("fidelity");
  names.emplace_back("svetlichny-qm");
  return names;
}

McSummary monte_carlo(const CountsTable& t, std::string_view statistic, const MonteCarloOptions& opts,
                      const TomographyOptions& tomo) {
  return monte_carlo(t, named_statistic(statistic, tomo), opts).front();
}

}  // namespace svet
