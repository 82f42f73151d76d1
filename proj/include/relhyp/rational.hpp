#pragma once

#include <gmpxx.h>

#include <string>

namespace relhyp {

/// Exact rational scalar. Every edge length, distance and measured constant
/// in the library is a Rat; there is no floating point anywhere in the
/// metric computations.
using Rat = mpq_class;

/// Builds a canonical rational from a num/den pair.
Rat make_rat(long long num, long long den = 1);

/// Parses "3", "-3", "3/4", "-3/4". Throws std::invalid_argument on
/// malformed input or a zero denominator.
Rat rat_from_string(const std::string& s);

/// Canonical form: "3" when the denominator is 1, else "3/4".
std::string rat_to_string(const Rat& q);

/// Smallest k >= 0 with 2^k >= q. Requires q > 0.
int ceil_log2(const Rat& q);

/// 2^k as a rational, k in [0, 62].
Rat pow2_rat(int k);

/// q as long long; requires q integral and within range.
long long rat_to_ll(const Rat& q);

}  // namespace relhyp
