#pragma once
// W-hyperbolic / CAT(0) model spaces: Euclidean closed balls, finite metric
// trees, and the Poincaré disk, behind one geodesic-space interface
// (dist + combine), plus sampled axiom checkers.

#include "hiter/util/numeric.hpp"
#include "hiter/util/rng.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace hiter {

// Euclidean ball and Poincaré disk points carry coordinates in `x`; metric
// tree points carry (edge id, offset along the edge from its tail vertex).
struct Point {
  std::vector<double> x;
  int edge = -1;
  double offset = 0;
};

std::string point_string(const Point& p);

class GeodesicSpace {
 public:
  virtual ~GeodesicSpace() = default;

  virtual std::string descriptor() const = 0;
  // Declared integer bound M >= diameter of the domain (validated by
  // sampling, never inferred).
  virtual int diameter_bound() const = 0;
  virtual double dist(const Point& a, const Point& b) const = 0;
  // combine(x, y, lam) = W(x, y, lam) = (1-lam)x (+) lam y, so
  // dist(x, result) = lam * dist(x, y).
  virtual Point combine(const Point& a, const Point& b, double lam) const = 0;
  virtual bool contains(const Point& p) const = 0;
  virtual Point center() const = 0;
  virtual Point random_point(Rng& rng) const = 0;
  // Isometry fixing center(): rotation by `angle` radians in the first two
  // coordinates. Euclidean balls (dim >= 2) and the disk support it; others
  // throw std::invalid_argument.
  virtual Point rotate(const Point& p, double angle) const;

 protected:
  void require_inside(const Point& p, const char* what) const;
  static void require_lambda(double lam);
};

using SpacePtr = std::shared_ptr<const GeodesicSpace>;

// Descriptors:
//   euclidean:ball:DIM:RADIUS   closed ball of the given radius about 0
//   tree:tripod                 three legs of lengths 1, 2, 3 from a center
//   tree:tripod:A:B:C           tripod with rational leg lengths
//   tree:random:EDGES:SEED      random tree, dyadic edge weights in {1,2,3}/16
//   disk:R                      Poincaré disk, hyperbolic ball of radius R
SpacePtr make_space(const std::string& descriptor);

struct AxiomCheck {
  std::string name;
  double max_violation = 0;  // signed; positive means the axiom failed by this
  double tolerance = 0;
  bool pass = true;
};

struct AxiomReport {
  std::string space;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<AxiomCheck> checks;
  bool pass = true;
};

// Evaluates (W1)-(W4), the two geodesic identities d(x,W(x,y,lam)) =
// lam*d(x,y) / d(y,W(x,y,lam)) = (1-lam)*d(x,y), and the CN-with-parameter
// inequality on sampled tuples. Violations are relative: a check fails when
// LHS - RHS > 1e-9 * (1 + |RHS|) (equalities use |LHS - RHS|).
AxiomReport check_w_axioms(const GeodesicSpace& space, int sample_count,
                           std::uint64_t seed);

// RHS - LHS of d^2((1-lam)x (+) lam y, z) <= (1-lam)d^2(x,z) + lam d^2(y,z)
// - lam(1-lam)d^2(x,y); nonnegative (within slack) on CAT(0) models.
double check_cn(const GeodesicSpace& space, const Point& x, const Point& y,
                const Point& z, double lam);

}  // namespace hiter
