#pragma once

#include "skl/domain.hpp"

namespace skl {

// Which remainder regime a point pair falls in, with the scale thresholds
// that were compared against. Exactly one case applies.
struct RegimeTag {
    enum class Case { a, b, c, gap, interior, d_ge_3 };

    Case regime_case = Case::interior;
    double delta = 0.0;
    double threshold_small = 0.0;  // h^{1/3+delta}, the case (a) cap
    double threshold_large = 0.0;  // h^{1/3-delta}, the case (b) floor
    double threshold_nu = 0.0;     // h^{2/3-2delta}, the case (c) scale
};

// First matching case in order (a) l <= h^{1/3+delta}, (b) l >= h^{1/3-delta},
// (c) nu(x)+nu(y) >= C0 (l^2 + h^{2/3-2delta}); otherwise gap. Full-space
// pairs are interior; dimension >= 3 is tagged d_ge_3. Requires 0 < delta < 1/6.
RegimeTag regime_classify(const PointPair& pair, double h, double delta,
                          const DomainGeometry& geom, double C0 = 1.0);

const char* regime_name(RegimeTag::Case c);

}  // namespace skl
