#pragma once

#include "nlv/numeric/interval.hpp"

namespace nlv::numeric {

// Point enclosures at `prec`. Each is computed with interval arithmetic at a
// few guard digits above `prec` (series partial sums plus a rigorous bound on
// the truncation error) and then rounded outward.

/// Enclosure of atan(x): reduction by atan x = pi/2 - atan(1/x) for x > 1,
/// argument halving down to |t| <= 1/4, then the alternating Taylor series.
Interval atan_enclosure(const PreciseFloat& x, const Precision& prec);
/// Enclosure of acos(u) for u in [-1, 1], via acos u = 2 atan(sqrt((1-u)/(1+u))).
Interval acos_enclosure(const PreciseFloat& u, const Precision& prec);
/// Enclosure of pi by Machin's formula, cached per precision.
Interval pi_enclosure(const Precision& prec);

}  // namespace nlv::numeric
