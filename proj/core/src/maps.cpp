#include "hiter/maps.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace hiter {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// splits "A,B" at the top-level comma (ignoring commas inside parentheses)
std::pair<std::string, std::string> split_pair(const std::string& s,
                                               const std::string& ctx) {
  int depth = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '(') ++depth;
    else if (s[i] == ')') --depth;
    else if (s[i] == ',' && depth == 0)
      return {trim(s.substr(0, i)), trim(s.substr(i + 1))};
  }
  throw std::invalid_argument("expected two comma-separated maps in: " + ctx);
}

// contents of the (...) suffix of s starting at `open`
std::string paren_body(const std::string& s, std::size_t open) {
  if (open == std::string::npos || s.back() != ')')
    throw std::invalid_argument("malformed map descriptor: " + s);
  return s.substr(open + 1, s.size() - open - 2);
}

NonexpansiveMap parse_map(const SpacePtr& space, const std::string& raw);

NonexpansiveMap parse_blend(const SpacePtr& space, const std::string& s) {
  auto open = s.find('(');
  std::string lam_str = s.substr(std::string("blend:").size(),
                                 open - std::string("blend:").size());
  Rat lam = parse_rational(lam_str);
  std::string body = paren_body(s, open);
  auto [ls, rs] = split_pair(body, s);
  return blend_map(space, lam, parse_map(space, ls), parse_map(space, rs));
}

NonexpansiveMap parse_compose(const SpacePtr& space, const std::string& s) {
  std::string body = paren_body(s, s.find('('));
  auto [ls, rs] = split_pair(body, s);
  return compose_map(parse_map(space, ls), parse_map(space, rs));
}

NonexpansiveMap parse_map(const SpacePtr& space, const std::string& raw) {
  std::string s = trim(raw);
  if (s == "identity") return identity_map();
  if (s == "constant") return constant_map(space, space->center());
  if (s.rfind("rotation:", 0) == 0) {
    auto rest = s.substr(std::string("rotation:").size());
    auto sep = rest.find(':');
    if (sep == std::string::npos)
      throw std::invalid_argument("rotation needs P:Q, got: " + s);
    Rat p = parse_rational(rest.substr(0, sep));
    Rat q = parse_rational(rest.substr(sep + 1));
    if (denominator(p) != 1 || denominator(q) != 1)
      throw std::invalid_argument("rotation P and Q must be integers in: " + s);
    return rotation_map(space, numerator(p), numerator(q));
  }
  if (s.rfind("project:", 0) == 0)
    return projection_map(space,
                          parse_rational(s.substr(std::string("project:").size())));
  if (s.rfind("blend:", 0) == 0) return parse_blend(space, s);
  if (s.rfind("compose(", 0) == 0) return parse_compose(space, s);
  throw std::invalid_argument("unknown map descriptor: " + s);
}

}  // namespace

NonexpansiveMap identity_map() {
  return {"identity", [](const Point& p) { return p; }};
}

NonexpansiveMap constant_map(const SpacePtr& space, const Point& c) {
  if (!space->contains(c))
    throw std::invalid_argument(space->descriptor() +
                                ": constant_map center " + point_string(c) +
                                " outside the domain");
  return {"constant", [c](const Point&) { return c; }};
}

NonexpansiveMap rotation_map(const SpacePtr& space, const Int& p,
                             const Int& q) {
  if (q < 1) throw std::invalid_argument("rotation: Q must be >= 1");
  double angle = 2 * M_PI * rat_double(Rat(p, q));
  std::string desc = "rotation:" + int_string(p) + ":" + int_string(q);
  // probe once so unsupported spaces fail at construction, not first use
  (void)space->rotate(space->center(), angle);
  return {desc, [space, angle](const Point& x) {
            return space->rotate(x, angle);
          }};
}

NonexpansiveMap projection_map(const SpacePtr& space, const Rat& radius) {
  if (radius <= 0) throw std::invalid_argument("project: radius must be positive");
  double r = rat_double(radius);
  Point c = space->center();
  std::string desc = "project:" + rat_string(radius);
  return {desc, [space, c, r](const Point& x) {
            double d = space->dist(c, x);
            if (d <= r) return x;
            return space->combine(c, x, r / d);
          }};
}

NonexpansiveMap blend_map(const SpacePtr& space, const Rat& lam,
                          NonexpansiveMap a, NonexpansiveMap b) {
  if (lam < 0 || lam > 1)
    throw std::invalid_argument("blend: weight must be in [0,1], got " +
                                rat_string(lam));
  double l = rat_double(lam);
  std::string desc =
      "blend:" + rat_string(lam) + "(" + a.descriptor + "," + b.descriptor + ")";
  auto af = std::move(a.fn);
  auto bf = std::move(b.fn);
  return {desc, [space, l, af, bf](const Point& x) {
            return space->combine(af(x), bf(x), l);
          }};
}

NonexpansiveMap compose_map(NonexpansiveMap outer, NonexpansiveMap inner) {
  std::string desc =
      "compose(" + outer.descriptor + "," + inner.descriptor + ")";
  auto of = std::move(outer.fn);
  auto inf = std::move(inner.fn);
  return {desc, [of, inf](const Point& x) { return of(inf(x)); }};
}

NonexpansiveMap make_map(const SpacePtr& space, const std::string& descriptor) {
  NonexpansiveMap map = parse_map(space, descriptor);
  MapCheck check = check_nonexpansive(*space, map, 128, 0x6d61707321ULL);
  if (!check.pass) {
    throw std::domain_error(
        map.descriptor + " on " + space->descriptor() +
        (check.self_map ? ": sampled expansiveness, excess = " +
                              std::to_string(check.max_lipschitz_excess)
                        : ": not a self-map of the domain"));
  }
  return map;
}

MapCheck check_nonexpansive(const GeodesicSpace& space,
                            const NonexpansiveMap& map, int sample_count,
                            std::uint64_t seed) {
  if (sample_count < 1)
    throw std::invalid_argument("check_nonexpansive: sample_count must be >= 1");
  MapCheck out;
  Rng rng(seed);
  const double tol = 1e-9;
  bool expansive = false;
  for (int i = 0; i < sample_count; ++i) {
    Point x = space.random_point(rng);
    Point y = space.random_point(rng);
    Point tx = map(x);
    Point ty = map(y);
    if (!space.contains(tx) || !space.contains(ty)) {
      out.self_map = false;
      break;
    }
    double dxy = space.dist(x, y);
    double excess = space.dist(tx, ty) - dxy;
    out.max_lipschitz_excess = std::max(out.max_lipschitz_excess, excess);
    expansive = expansive || excess > tol * (1 + dxy);
  }
  out.pass = out.self_map && !expansive;
  return out;
}

}  // namespace hiter
