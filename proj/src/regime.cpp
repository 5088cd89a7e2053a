#include "skl/regime.hpp"

#include <cmath>

#include "skl/error.hpp"

namespace skl {

RegimeTag regime_classify(const PointPair& pair, double h, double delta,
                          const DomainGeometry& geom, double C0) {
    if (!(delta > 0.0 && delta < 1.0 / 6.0)) {
        throw OutOfRangeError("regime_classify: delta must lie in (0, 1/6)");
    }
    if (h <= 0.0) throw OutOfRangeError("regime_classify: h must be positive");

    RegimeTag tag;
    tag.delta = delta;
    tag.threshold_small = std::pow(h, 1.0 / 3.0 + delta);
    tag.threshold_large = std::pow(h, 1.0 / 3.0 - delta);
    tag.threshold_nu = std::pow(h, 2.0 / 3.0 - 2.0 * delta);

    if (pair.x.size() >= 3) {
        tag.regime_case = RegimeTag::Case::d_ge_3;
        return tag;
    }
    if (!geom.has_boundary()) {
        tag.regime_case = RegimeTag::Case::interior;
        return tag;
    }

    const Distances dist = distances(pair, geom);
    if (dist.l <= tag.threshold_small) {
        tag.regime_case = RegimeTag::Case::a;
    } else if (dist.l >= tag.threshold_large) {
        tag.regime_case = RegimeTag::Case::b;
    } else if (dist.nu_x + dist.nu_y >= C0 * (dist.l * dist.l + tag.threshold_nu)) {
        tag.regime_case = RegimeTag::Case::c;
    } else {
        tag.regime_case = RegimeTag::Case::gap;
    }
    return tag;
}

const char* regime_name(RegimeTag::Case c) {
    switch (c) {
        case RegimeTag::Case::a: return "a";
        case RegimeTag::Case::b: return "b";
        case RegimeTag::Case::c: return "c";
        case RegimeTag::Case::gap: return "gap";
        case RegimeTag::Case::interior: return "interior";
        case RegimeTag::Case::d_ge_3: return "d_ge_3";
    }
    return "?";
}

}  // namespace skl
