#pragma once

#include <limits>
#include <vector>

#include "skl/coefficient_field.hpp"
#include "skl/error.hpp"

namespace skl {

enum class DomainKind { full_space, half_space, interval, box };
enum class BoundaryCondition { dirichlet, neumann, none };

// Model domain. half_space is {x : x_1 > 0}; interval is (0, L); box is
// (0, L_1) x ... x (0, L_d). Wall distance nu(x) is the minimum distance to
// any wall, +infinity for full space.
struct DomainGeometry {
    DomainKind kind = DomainKind::full_space;
    BoundaryCondition bc = BoundaryCondition::none;
    std::vector<double> lengths;  // interval: {L}; box: {L_1..L_d}

    bool has_boundary() const { return kind != DomainKind::full_space; }

    static DomainGeometry full_space();
    static DomainGeometry half_space(BoundaryCondition bc);
    static DomainGeometry interval(double L, BoundaryCondition bc);
    static DomainGeometry box(std::vector<double> lengths, BoundaryCondition bc);

    double nu(const Point& x) const;
    bool contains(const Point& x) const;
};

struct PointPair {
    Point x;
    Point y;
};

struct Distances {
    double l0;    // |x - y|
    double l;     // l0 + nu(x) + nu(y); equals l0 for full space
    double nu_x;
    double nu_y;
};

Distances distances(const PointPair& pair, const DomainGeometry& geom);

// Mirror image across the flattened wall x_1 = 0: (y_1, y') -> (-y_1, y').
Point reflect_point(const Point& y, const DomainGeometry& geom);

}  // namespace skl
