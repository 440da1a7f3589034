#pragma once

// Deterministic hidden-variable models enumerated exhaustively. Everything
// here is integer arithmetic, so the bounds are exact.

#include <array>
#include <set>
#include <vector>

namespace svet {

/// Predetermined +-1 outcomes for both settings of each of the three parties.
struct LocalAssignment {
  int a = 1, a_prime = 1;
  int b = 1, b_prime = 1;
  int c = 1, c_prime = 1;
};

/// Which pair of parties may share arbitrary nonlocal outcomes.
enum class Partition { AB_C, BC_A, AC_B };

/// Outcomes of a model where one pair is treated as a single nonlocal unit.
/// The four pair quantities are free signs; the remaining party is local.
/// For partition AB_C: pair = (ab, ab', a'b, a'b'), local = (c, c').
/// For BC_A: pair = (bc, bc', b'c, b'c'), local = (a, a').
/// For AC_B: pair = (ac, ac', a'c, a'c'), local = (b, b').
struct BipartiteAssignment {
  std::array<int, 4> pair{1, 1, 1, 1};
  int local = 1, local_prime = 1;
  Partition partition = Partition::AB_C;
};

enum class Expression { CHSH, Mermin, Svetlichny };
enum class Model { Local, Bipartite };

/// a(b + b') + a'(b - b'); always +-2.
int s2_value(const LocalAssignment& x);
/// a'(b' + b) + a(b' - b); always +-2.
int s2_prime_value(const LocalAssignment& x);
/// 2(a'bc + ab'c + abc' - a'b'c'); always +-4.
int s3_value(const LocalAssignment& x);

/// The eight-term Svetlichny combination evaluated on a local assignment.
int svetlichny_local_value(const LocalAssignment& x);

/// The eight-term Svetlichny combination with the partition's pair quantities
/// substituted for the products they stand in for. Value in {0, +-2, +-4}.
int svetlichny_identity_value(const BipartiteAssignment& x);

/// Mermin combination (after the division by two) on a bipartite model.
int mermin_bipartite_value(const BipartiteAssignment& x);

std::vector<LocalAssignment> all_local_assignments();
std::vector<BipartiteAssignment> all_bipartite_assignments(Partition p);

/// Exact maximum |value| over all deterministic assignments of the model.
/// The Bipartite model takes the maximum over all three partitions.
/// Throws std::invalid_argument for (CHSH, Bipartite).
int model_bound(Expression expr, Model model);

/// Maximum over the assignments of a single partition.
int bipartite_bound(Expression expr, Partition p);

/// Set of values svetlichny_identity_value takes over one partition.
std::set<int> svetlichny_identity_values(Partition p);

}  // namespace svet
