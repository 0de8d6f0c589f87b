#pragma once
// Nonexpansive self-maps of a geodesic space, built from a small combinator
// grammar and validated by sampling.

#include "hiter/geometry.hpp"

#include <functional>
#include <string>

namespace hiter {

struct NonexpansiveMap {
  std::string descriptor;
  std::function<Point(const Point&)> fn;
  Point operator()(const Point& p) const { return fn(p); }
};

NonexpansiveMap identity_map();
// T(x) = c; c must lie in the space.
NonexpansiveMap constant_map(const SpacePtr& space, const Point& c);
// Rotation about the center by 2*pi*p/q radians (spaces without rotations
// throw).
NonexpansiveMap rotation_map(const SpacePtr& space, const Int& p, const Int& q);
// Geodesic projection onto the closed ball of the given radius about the
// center: points further than `radius` move to distance exactly `radius`.
NonexpansiveMap projection_map(const SpacePtr& space, const Rat& radius);
// T(x) = W(a(x), b(x), lam); nonexpansive by (W4).
NonexpansiveMap blend_map(const SpacePtr& space, const Rat& lam,
                          NonexpansiveMap a, NonexpansiveMap b);
// T(x) = outer(inner(x)).
NonexpansiveMap compose_map(NonexpansiveMap outer, NonexpansiveMap inner);

// Grammar (whitespace-free):
//   identity | constant | rotation:P:Q | project:R |
//   blend:L(EXPR,EXPR) | compose(EXPR,EXPR)
// The result is checked to be a nonexpansive self-map by sampling; a
// violation raises std::domain_error.
NonexpansiveMap make_map(const SpacePtr& space, const std::string& descriptor);

struct MapCheck {
  double max_lipschitz_excess = 0;  // max of d(Tx,Ty) - d(x,y) over samples
  bool self_map = true;
  bool pass = true;
};

MapCheck check_nonexpansive(const GeodesicSpace& space,
                            const NonexpansiveMap& map, int sample_count,
                            std::uint64_t seed);

}  // namespace hiter
