#include "skl/domain.hpp"

#include <algorithm>
#include <cmath>

namespace skl {

DomainGeometry DomainGeometry::full_space() {
    return {DomainKind::full_space, BoundaryCondition::none, {}};
}

DomainGeometry DomainGeometry::half_space(BoundaryCondition bc) {
    return {DomainKind::half_space, bc, {}};
}

DomainGeometry DomainGeometry::interval(double L, BoundaryCondition bc) {
    if (L <= 0.0) throw Error("interval length must be positive");
    return {DomainKind::interval, bc, {L}};
}

DomainGeometry DomainGeometry::box(std::vector<double> lengths, BoundaryCondition bc) {
    for (double L : lengths) {
        if (L <= 0.0) throw Error("box lengths must be positive");
    }
    return {DomainKind::box, bc, std::move(lengths)};
}

double DomainGeometry::nu(const Point& x) const {
    switch (kind) {
        case DomainKind::full_space:
            return std::numeric_limits<double>::infinity();
        case DomainKind::half_space:
            return x[0];
        case DomainKind::interval:
            return std::min(x[0], lengths[0] - x[0]);
        case DomainKind::box: {
            double m = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k < lengths.size(); ++k) {
                m = std::min({m, x[k], lengths[k] - x[k]});
            }
            return m;
        }
    }
    return 0.0;
}

bool DomainGeometry::contains(const Point& x) const {
    if (kind == DomainKind::full_space) return true;
    return nu(x) >= 0.0;
}

Distances distances(const PointPair& pair, const DomainGeometry& geom) {
    double s = 0.0;
    for (std::size_t k = 0; k < pair.x.size(); ++k) {
        double dk = pair.x[k] - pair.y[k];
        s += dk * dk;
    }
    Distances out;
    out.l0 = std::sqrt(s);
    out.nu_x = geom.nu(pair.x);
    out.nu_y = geom.nu(pair.y);
    out.l = geom.has_boundary() ? out.l0 + out.nu_x + out.nu_y : out.l0;
    return out;
}

Point reflect_point(const Point& y, const DomainGeometry& geom) {
    if (!geom.has_boundary()) throw Error("reflect_point: domain has no boundary");
    Point out = y;
    out[0] = -out[0];
    return out;
}

}  // namespace skl
