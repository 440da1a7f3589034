#pragma once

// Named statistics for Poissonian Monte Carlo over a counts table.
//
//   svetlichny            |S_v| from the 64 equatorial counts
//   mermin                Mermin value from the counts
//   correlation:XYZ       one correlation, X/Y/Z in {U, P}, e.g. correlation:UPU
//   fidelity              GHZ fidelity of the ML reconstruction
//   svetlichny-qm         S_v of the ML reconstruction at the table's phases

#include <string>
#include <string_view>
#include <vector>

#include "svet/counts.hpp"
#include "svet/tomography.hpp"

namespace svet {

/// Throws std::invalid_argument for an unknown name. Tomography-backed
/// statistics use `tomo` for every replicate.
Statistic named_statistic(std::string_view name, const TomographyOptions& tomo = {});

std::vector<std::string> statistic_names();

McSummary monte_carlo(const CountsTable& t, std::string_view statistic, const MonteCarloOptions& opts,
                      const TomographyOptions& tomo = {});

}  // namespace svet
