#pragma once

// Random instance generation, family transforms and structured fixtures.

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rsched/core.h"

namespace rsched {

enum class FamilyTag { kDenseBase, kSparseBase, kDenseLong, kSparseLong };

std::string to_string(FamilyTag family);
FamilyTag parse_family(const std::string& text);
inline constexpr FamilyTag kAllFamilies[] = {FamilyTag::kDenseBase, FamilyTag::kSparseBase,
                                             FamilyTag::kDenseLong, FamilyTag::kSparseLong};

// Per task: a = min, d = max of two uniform draws on [1, m]; b = min,
// c = max of two uniform draws on [a, d]; start uniform on [a, b], end
// uniform on [c, d]; weight k / 2^20 with k uniform on {0, ..., 2^20}.
// Exact probabilities throughout.
Instance generate_instance(int n, int m, std::uint64_t seed);

// Keeps tasks 1..floor(n/2).
Instance sparsify(const Instance& instance);

// Doubles the certain segment [b, c] about its midpoint and each uncertain
// segment away from it; shifts right when the task would start before slot
// 1 and extends m as needed. Start and end become uniform on the new ranges.
Instance double_lengths(const Instance& instance);

// dense-base = base, sparse-base = sparsify(base), dense-long =
// double_lengths(base), sparse-long = sparsify(double_lengths(base)).
Instance make_family(const Instance& base, FamilyTag family);

// Leaves 1..n and a center n+1 on [1, n] with weight w0. Leaf i occupies
// slot i with probability p_i and slot n+i otherwise. m = 2n.
Instance star_instance(std::span<const Rational> p, std::span<const Rational> w, const Rational& w0);
Instance star_instance(std::span<const double> p, std::span<const double> w, double w0);

struct StarParams {
  std::vector<double> p;
  std::vector<double> w;
  double w0 = 0.0;
};

// p_i = k/64 with k in 1..63, w_i = k/16 with k in 1..32, w0 = k/16 with k in 1..64.
StarParams random_star_params(int n, std::uint64_t seed);

// Every task deterministic: start a, end d, with 1 <= a <= d <= m.
Instance point_mass_instance(int n, int m, std::uint64_t seed);

// Every task occupies one slot (start = end) drawn from a random law over up
// to three slots; integer weights 1..6 so that ties occur.
Instance single_slot_instance(int n, int m, std::uint64_t seed);

}  // namespace rsched
