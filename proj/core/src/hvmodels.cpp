#include "svet/hvmodels.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>

namespace svet {

namespace {

// Sign of each correlation term indexed by (a', b', c') prime bits.
constexpr int kSvetlichnySigns[2][2][2] = {{{+1, +1}, {+1, -1}}, {{+1, -1}, {-1, -1}}};

struct MerminTerm {
  int pa, pb, pc, sign;
};
constexpr MerminTerm kMerminTerms[4] = {{1, 0, 0, +1}, {0, 1, 0, +1}, {0, 0, 1, +1}, {1, 1, 1, -1}};

int pick(int unprimed, int primed, int bit) { return bit ? primed : unprimed; }

int local_outcome(const LocalAssignment& x, int pa, int pb, int pc) {
  return pick(x.a, x.a_prime, pa) * pick(x.b, x.b_prime, pb) * pick(x.c, x.c_prime, pc);
}

int bipartite_outcome(const BipartiteAssignment& x, int pa, int pb, int pc) {
  switch (x.partition) {
    case Partition::AB_C:
      return x.pair[2 * pa + pb] * pick(x.local, x.local_prime, pc);
    case Partition::BC_A:
      return x.pair[2 * pb + pc] * pick(x.local, x.local_prime, pa);
    case Partition::AC_B:
      return x.pair[2 * pa + pc] * pick(x.local, x.local_prime, pb);
  }
  return 0;
}

template <typename Outcome>
int svetlichny_sum(Outcome&& outcome) {
  int s = 0;
  for (int pa = 0; pa < 2; ++pa)
    for (int pb = 0; pb < 2; ++pb)
      for (int pc = 0; pc < 2; ++pc) s += kSvetlichnySigns[pa][pb][pc] * outcome(pa, pb, pc);
  return s;
}

template <typename Outcome>
int mermin_sum(Outcome&& outcome) {
  int s = 0;
  for (const auto& t : kMerminTerms) s += t.sign * outcome(t.pa, t.pb, t.pc);
  return s;
}

int sign_bit(unsigned bits, int k) { return (bits >> k) & 1u ? -1 : 1; }

}  // namespace

int s2_value(const LocalAssignment& x) { return x.a * (x.b + x.b_prime) + x.a_prime * (x.b - x.b_prime); }

int s2_prime_value(const LocalAssignment& x) {
  return x.a_prime * (x.b_prime + x.b) + x.a * (x.b_prime - x.b);
}

int s3_value(const LocalAssignment& x) {
  return 2 * (x.a_prime * x.b * x.c + x.a * x.b_prime * x.c + x.a * x.b * x.c_prime -
              x.a_prime * x.b_prime * x.c_prime);
}

int svetlichny_local_value(const LocalAssignment& x) {
  return svetlichny_sum([&](int pa, int pb, int pc) { return local_outcome(x, pa, pb, pc); });
}

int svetlichny_identity_value(const BipartiteAssignment& x) {
  return svetlichny_sum([&](int pa, int pb, int pc) { return bipartite_outcome(x, pa, pb, pc); });
}

int mermin_bipartite_value(const BipartiteAssignment& x) {
  return mermin_sum([&](int pa, int pb, int pc) { return bipartite_outcome(x, pa, pb, pc); });
}

std::vector<LocalAssignment> all_local_assignments() {
  std::vector<LocalAssignment> out;
  out.reserve(64);
  for (unsigned bits = 0; bits < 64; ++bits) {
    out.push_back({sign_bit(bits, 0), sign_bit(bits, 1), sign_bit(bits, 2), sign_bit(bits, 3),
                   sign_bit(bits, 4), sign_bit(bits, 5)});
  }
  return out;
}

std::vector<BipartiteAssignment> all_bipartite_assignments(Partition p) {
  std::vector<BipartiteAssignment> out;
  out.reserve(64);
  for (unsigned bits = 0; bits < 64; ++bits) {
    BipartiteAssignment x;
    x.pair = {sign_bit(bits, 0), sign_bit(bits, 1), sign_bit(bits, 2), sign_bit(bits, 3)};
    x.local = sign_bit(bits, 4);
    x.local_prime = sign_bit(bits, 5);
    x.partition = p;
    out.push_back(x);
  }
  return out;
}

int bipartite_bound(Expression expr, Partition p) {
  int best = 0;
  for (const auto& x : all_bipartite_assignments(p)) {
    switch (expr) {
      case Expression::Svetlichny:
        best = std::max(best, std::abs(svetlichny_identity_value(x)));
        break;
      case Expression::Mermin:
        best = std::max(best, std::abs(mermin_bipartite_value(x)));
        break;
      case Expression::CHSH:
        throw std::invalid_argument("CHSH has no bipartite three-party model");
    }
  }
  return best;
}

int model_bound(Expression expr, Model model) {
  if (model == Model::Bipartite) {
    if (expr == Expression::CHSH) throw std::invalid_argument("CHSH has no bipartite three-party model");
    int best = 0;
    for (Partition p : {Partition::AB_C, Partition::BC_A, Partition::AC_B}) {
      best = std::max(best, bipartite_bound(expr, p));
    }
    return best;
  }

  int best = 0;
  if (expr == Expression::CHSH) {
    // Only a, a', b, b' matter; the c fields are iterated but inert.
    for (const auto& x : all_local_assignments()) best = std::max(best, std::abs(s2_value(x)));
    return best;
  }
  for (const auto& x : all_local_assignments()) {
    const int v = expr == Expression::Mermin ? s3_value(x) / 2 : svetlichny_local_value(x);
    best = std::max(best, std::abs(v));
  }
  return best;
}

std::set<int> svetlichny_identity_values(Partition p) {
  std::set<int> values;
  for (const auto& x : all_bipartite_assignments(p)) values.insert(svetlichny_identity_value(x));
  return values;
}

}  // namespace svet
