#include "hiter/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hiter {

namespace {

constexpr double kSnap = 1e-12;       // tree offsets this close to a vertex snap
constexpr double kDomainSlack = 1e-9; // membership slack for computed points

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    auto next = s.find(sep, pos);
    out.push_back(s.substr(pos, next - pos));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

double positive_double(const std::string& s, const char* what) {
  Rat r = parse_rational(s);
  if (r <= 0) {
    throw std::invalid_argument(std::string(what) + " must be positive, got " +
                                s);
  }
  return rat_double(r);
}

}  // namespace

std::string point_string(const Point& p) {
  std::ostringstream os;
  if (p.edge >= 0) {
    os << "(edge " << p.edge << ", offset " << p.offset << ")";
    return os.str();
  }
  os << "(";
  for (std::size_t i = 0; i < p.x.size(); ++i) {
    if (i) os << ", ";
    os << p.x[i];
  }
  os << ")";
  return os.str();
}

void GeodesicSpace::require_inside(const Point& p, const char* what) const {
  if (!contains(p)) {
    throw std::domain_error(descriptor() + ": " + what + " point " +
                            point_string(p) + " outside the domain");
  }
}

void GeodesicSpace::require_lambda(double lam) {
  if (!(lam >= 0.0 && lam <= 1.0)) {
    throw std::invalid_argument("combine: lambda = " + std::to_string(lam) +
                                " outside [0,1]");
  }
}

Point GeodesicSpace::rotate(const Point&, double) const {
  throw std::invalid_argument(descriptor() + ": rotation unsupported");
}

namespace {

// ---------------------------------------------------------------------------
// Euclidean closed ball about the origin. combine is affine interpolation.

class EuclideanBall final : public GeodesicSpace {
 public:
  EuclideanBall(int dim, const Rat& radius)
      : dim_(dim), radius_(rat_double(radius)) {
    if (dim < 1) throw std::invalid_argument("euclidean ball: dim must be >= 1");
    if (radius <= 0)
      throw std::invalid_argument("euclidean ball: radius must be positive");
    desc_ = "euclidean:ball:" + std::to_string(dim) + ":" + rat_string(radius);
    M_ = static_cast<int>(iceil(2 * radius));
  }

  std::string descriptor() const override { return desc_; }
  int diameter_bound() const override { return M_; }

  double dist(const Point& a, const Point& b) const override {
    check(a, "dist");
    check(b, "dist");
    double s = 0;
    for (int i = 0; i < dim_; ++i) {
      double d = a.x[i] - b.x[i];
      s += d * d;
    }
    return std::sqrt(s);
  }

  Point combine(const Point& a, const Point& b, double lam) const override {
    require_lambda(lam);
    check(a, "combine");
    check(b, "combine");
    Point r;
    r.x.resize(dim_);
    for (int i = 0; i < dim_; ++i) r.x[i] = (1 - lam) * a.x[i] + lam * b.x[i];
    return r;
  }

  bool contains(const Point& p) const override {
    if (p.edge >= 0 || static_cast<int>(p.x.size()) != dim_) return false;
    double s = 0;
    for (double c : p.x) s += c * c;
    return std::sqrt(s) <= radius_ + kDomainSlack;
  }

  Point center() const override {
    Point p;
    p.x.assign(dim_, 0.0);
    return p;
  }

  Point random_point(Rng& rng) const override {
    // isotropic direction, radius r*u^(1/dim): uniform in the ball
    Point p;
    p.x.resize(dim_);
    double norm2 = 0;
    for (int i = 0; i < dim_; ++i) {
      double u1 = 1.0 - rng.uniform01();
      double u2 = rng.uniform01();
      p.x[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2 * M_PI * u2);
      norm2 += p.x[i] * p.x[i];
    }
    double norm = std::sqrt(norm2);
    if (norm < 1e-300) return center();
    double r = radius_ * std::pow(rng.uniform01(), 1.0 / dim_);
    for (double& c : p.x) c *= r / norm;
    return p;
  }

  Point rotate(const Point& p, double angle) const override {
    if (dim_ < 2)
      throw std::invalid_argument(desc_ + ": rotation needs dimension >= 2");
    check(p, "rotate");
    Point r = p;
    double c = std::cos(angle), s = std::sin(angle);
    r.x[0] = c * p.x[0] - s * p.x[1];
    r.x[1] = s * p.x[0] + c * p.x[1];
    return r;
  }

 private:
  void check(const Point& p, const char* what) const {
    require_inside(p, what);
  }

  int dim_;
  double radius_;
  std::string desc_;
  int M_;
};

// ---------------------------------------------------------------------------
// Finite metric tree (an R-tree): points live on weighted edges of a tree
// graph, geodesics follow the unique simple path.

class MetricTree final : public GeodesicSpace {
 public:
  struct Edge {
    int u, v;
    Rat len_exact;
    double len;
  };

  MetricTree(std::vector<Edge> edges, std::string desc)
      : edges_(std::move(edges)), desc_(std::move(desc)) {
    nv_ = 0;
    for (const Edge& e : edges_) nv_ = std::max({nv_, e.u + 1, e.v + 1});
    if (nv_ < 2 || edges_.size() != static_cast<std::size_t>(nv_) - 1)
      throw std::invalid_argument(desc_ + ": not a tree");
    if (nv_ > 16) throw std::invalid_argument(desc_ + ": too many vertices");
    for (const Edge& e : edges_) {
      if (e.len_exact <= 0)
        throw std::invalid_argument(desc_ + ": edge lengths must be positive");
    }

    const Rat inf = Rat(Int(1) << 62);
    std::vector<std::vector<Rat>> d(nv_, std::vector<Rat>(nv_, inf));
    nxt_.assign(nv_, std::vector<int>(nv_, -1));
    edge_at_.assign(nv_, std::vector<int>(nv_, -1));
    vertex_edge_.assign(nv_, -1);
    for (int i = 0; i < nv_; ++i) {
      d[i][i] = 0;
      nxt_[i][i] = i;
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      d[e.u][e.v] = d[e.v][e.u] = e.len_exact;
      nxt_[e.u][e.v] = e.v;
      nxt_[e.v][e.u] = e.u;
      edge_at_[e.u][e.v] = edge_at_[e.v][e.u] = static_cast<int>(i);
      if (vertex_edge_[e.u] < 0) vertex_edge_[e.u] = static_cast<int>(i);
      if (vertex_edge_[e.v] < 0) vertex_edge_[e.v] = static_cast<int>(i);
    }
    for (int k = 0; k < nv_; ++k)
      for (int i = 0; i < nv_; ++i)
        for (int j = 0; j < nv_; ++j)
          if (d[i][k] + d[k][j] < d[i][j]) {
            d[i][j] = d[i][k] + d[k][j];
            nxt_[i][j] = nxt_[i][k];
          }
    Rat diam = 0;
    for (int i = 0; i < nv_; ++i)
      for (int j = 0; j < nv_; ++j) {
        if (d[i][j] >= inf)
          throw std::invalid_argument(desc_ + ": graph is disconnected");
        diam = std::max(diam, d[i][j]);
      }
    vd_.assign(nv_, std::vector<double>(nv_, 0));
    for (int i = 0; i < nv_; ++i)
      for (int j = 0; j < nv_; ++j) vd_[i][j] = rat_double(d[i][j]);
    Int m = iceil(diam);
    M_ = static_cast<int>(std::max<Int>(m, 1).convert_to<int>());
  }

  std::string descriptor() const override { return desc_; }
  int diameter_bound() const override { return M_; }

  double dist(const Point& a, const Point& b) const override {
    require_inside(a, "dist");
    require_inside(b, "dist");
    if (a.edge == b.edge) return std::abs(a.offset - b.offset);
    return route(a, b).total;
  }

  Point combine(const Point& a, const Point& b, double lam) const override {
    require_lambda(lam);
    require_inside(a, "combine");
    require_inside(b, "combine");
    if (a.edge == b.edge)
      return canonical(a.edge, a.offset + lam * (b.offset - a.offset));
    Route r = route(a, b);
    double t = lam * r.total;
    // leg 1: along a's edge toward the exit vertex
    if (t <= r.d_exit) {
      const Edge& e = edges_[a.edge];
      double off = r.exit == e.u ? a.offset - t : a.offset + t;
      return canonical(a.edge, off);
    }
    t -= r.d_exit;
    // middle legs: whole edges of the vertex path
    int cur = r.exit;
    while (cur != r.enter) {
      int nx = nxt_[cur][r.enter];
      int eid = edge_at_[cur][nx];
      const Edge& e = edges_[eid];
      if (t <= e.len) {
        double off = cur == e.u ? t : e.len - t;
        return canonical(eid, off);
      }
      t -= e.len;
      cur = nx;
    }
    // final leg: along b's edge from the entry vertex toward b
    const Edge& e = edges_[b.edge];
    double off = r.enter == e.u ? t : e.len - t;
    // floating residue may overshoot b slightly
    if (e.u == r.enter ? off > b.offset : off < b.offset) off = b.offset;
    return canonical(b.edge, off);
  }

  bool contains(const Point& p) const override {
    if (p.edge < 0 || p.edge >= static_cast<int>(edges_.size()) || !p.x.empty())
      return false;
    return p.offset >= -kDomainSlack &&
           p.offset <= edges_[p.edge].len + kDomainSlack;
  }

  Point center() const override { return vertex_point(0); }

  Point random_point(Rng& rng) const override {
    int e = static_cast<int>(rng.below(edges_.size()));
    return canonical(e, rng.uniform01() * edges_[e].len);
  }

 private:
  struct Route {
    int exit;    // vertex where the geodesic leaves a's edge
    int enter;   // vertex where it enters b's edge
    double d_exit;   // distance from a to exit
    double d_enter;  // distance from enter to b
    double total;
  };

  // The geodesic between points on distinct edges: best of the four
  // endpoint-to-endpoint routes (unique in a tree up to degenerate ties).
  Route route(const Point& a, const Point& b) const {
    const Edge& ea = edges_[a.edge];
    const Edge& eb = edges_[b.edge];
    const int aends[2] = {ea.u, ea.v};
    const int bends[2] = {eb.u, eb.v};
    Route best{};
    best.total = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double da = aends[i] == ea.u ? a.offset : ea.len - a.offset;
        double db = bends[j] == eb.u ? b.offset : eb.len - b.offset;
        double tot = da + vd_[aends[i]][bends[j]] + db;
        if (tot < best.total) {
          best = Route{aends[i], bends[j], da, db, tot};
        }
      }
    return best;
  }

  Point vertex_point(int v) const {
    const int eid = vertex_edge_[v];
    const Edge& e = edges_[eid];
    Point p;
    p.edge = eid;
    p.offset = e.u == v ? 0.0 : e.len;
    return p;
  }

  Point canonical(int eid, double off) const {
    const Edge& e = edges_[eid];
    off = std::clamp(off, 0.0, e.len);
    if (off <= kSnap) return vertex_point(e.u);
    if (off >= e.len - kSnap) return vertex_point(e.v);
    Point p;
    p.edge = eid;
    p.offset = off;
    return p;
  }

  std::vector<Edge> edges_;
  std::string desc_;
  int nv_ = 0;
  std::vector<std::vector<double>> vd_;
  std::vector<std::vector<int>> nxt_;
  std::vector<std::vector<int>> edge_at_;
  std::vector<int> vertex_edge_;
  int M_ = 1;
};

// ---------------------------------------------------------------------------
// Poincaré disk: the hyperbolic ball of radius R about the origin, i.e. the
// Euclidean disk of radius tanh(R/2). Geodesic interpolation via the Möbius
// translation taking the first point to the origin.

class PoincareDisk final : public GeodesicSpace {
  using C = std::complex<double>;

 public:
  explicit PoincareDisk(const Rat& radius) {
    if (radius <= 0 || radius > 2)
      throw std::invalid_argument("disk: radius must be in (0, 2]");
    R_ = rat_double(radius);
    rho_ = std::tanh(R_ / 2);
    desc_ = "disk:" + rat_string(radius);
    M_ = static_cast<int>(iceil(2 * radius));
  }

  std::string descriptor() const override { return desc_; }
  int diameter_bound() const override { return M_; }

  double dist(const Point& a, const Point& b) const override {
    require_inside(a, "dist");
    require_inside(b, "dist");
    return hdist(cpoint(a), cpoint(b));
  }

  Point combine(const Point& a, const Point& b, double lam) const override {
    require_lambda(lam);
    require_inside(a, "combine");
    require_inside(b, "combine");
    C p = cpoint(a), q = cpoint(b);
    C w = (q - p) / (1.0 - std::conj(p) * q);
    double aw = std::abs(w);
    if (aw < 1e-300) return a;
    double t = lam * 2 * std::atanh(std::min(aw, 1 - 1e-16));
    C z = std::tanh(t / 2) * (w / aw);
    C back = (z + p) / (1.0 + std::conj(p) * z);
    return mk(back);
  }

  bool contains(const Point& p) const override {
    if (p.edge >= 0 || p.x.size() != 2) return false;
    return std::hypot(p.x[0], p.x[1]) <= rho_ + kDomainSlack;
  }

  Point center() const override {
    Point p;
    p.x = {0.0, 0.0};
    return p;
  }

  Point random_point(Rng& rng) const override {
    double theta = 2 * M_PI * rng.uniform01();
    double s = rng.uniform01() * R_;  // hyperbolic radius
    double er = std::tanh(s / 2);
    Point p;
    p.x = {er * std::cos(theta), er * std::sin(theta)};
    return p;
  }

  Point rotate(const Point& p, double angle) const override {
    require_inside(p, "rotate");
    C z = cpoint(p) * std::polar(1.0, angle);
    return mk(z);
  }

 private:
  static C cpoint(const Point& p) { return C(p.x[0], p.x[1]); }
  static Point mk(C z) {
    Point p;
    p.x = {z.real(), z.imag()};
    return p;
  }
  static double hdist(C p, C q) {
    double r = std::abs((q - p) / (1.0 - std::conj(p) * q));
    return 2 * std::atanh(std::min(r, 1 - 1e-16));
  }

  double R_ = 0, rho_ = 0;
  std::string desc_;
  int M_ = 1;
};

MetricTree::Edge tree_edge(int u, int v, const Rat& len) {
  return MetricTree::Edge{u, v, len, rat_double(len)};
}

SpacePtr make_tripod(const Rat& a, const Rat& b, const Rat& c,
                     const std::string& desc) {
  std::vector<MetricTree::Edge> edges = {tree_edge(0, 1, a), tree_edge(0, 2, b),
                                         tree_edge(0, 3, c)};
  return std::make_shared<MetricTree>(std::move(edges), desc);
}

SpacePtr make_random_tree(int nedges, std::uint64_t seed,
                          const std::string& desc) {
  if (nedges < 1 || nedges > 15)
    throw std::invalid_argument("tree:random: edge count must be in [1, 15]");
  Rng rng(seed);
  std::vector<MetricTree::Edge> edges;
  for (int i = 1; i <= nedges; ++i) {
    int parent = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
    Rat len(1 + static_cast<int>(rng.below(3)), 16);
    edges.push_back(tree_edge(parent, i, len));
  }
  return std::make_shared<MetricTree>(std::move(edges), desc);
}

}  // namespace

SpacePtr make_space(const std::string& descriptor) {
  auto parts = split(descriptor, ':');
  if (parts.size() == 4 && parts[0] == "euclidean" && parts[1] == "ball") {
    int dim = 0;
    try {
      dim = std::stoi(parts[2]);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad dimension in: " + descriptor);
    }
    return std::make_shared<EuclideanBall>(dim, parse_rational(parts[3]));
  }
  if (parts.size() >= 2 && parts[0] == "tree") {
    if (parts[1] == "tripod" && parts.size() == 2)
      return make_tripod(Rat(1), Rat(2), Rat(3), descriptor);
    if (parts[1] == "tripod" && parts.size() == 5)
      return make_tripod(parse_rational(parts[2]), parse_rational(parts[3]),
                         parse_rational(parts[4]), descriptor);
    if (parts[1] == "random" && parts.size() == 4) {
      int ne = 0;
      std::uint64_t seed = 0;
      try {
        ne = std::stoi(parts[2]);
        seed = std::stoull(parts[3]);
      } catch (const std::exception&) {
        throw std::invalid_argument("bad tree:random parameters in: " +
                                    descriptor);
      }
      return make_random_tree(ne, seed, descriptor);
    }
  }
  if (parts.size() == 2 && parts[0] == "disk")
    return std::make_shared<PoincareDisk>(parse_rational(parts[1]));
  throw std::invalid_argument("unknown space descriptor: " + descriptor);
}

namespace {

void track(AxiomCheck& c, double violation) {
  c.max_violation = std::max(c.max_violation, violation);
}

}  // namespace

double check_cn(const GeodesicSpace& space, const Point& x, const Point& y,
                const Point& z, double lam) {
  double dxz = space.dist(x, z), dyz = space.dist(y, z),
         dxy = space.dist(x, y);
  double lhs = space.dist(space.combine(x, y, lam), z);
  double rhs2 = (1 - lam) * dxz * dxz + lam * dyz * dyz -
                lam * (1 - lam) * dxy * dxy;
  return rhs2 - lhs * lhs;
}

AxiomReport check_w_axioms(const GeodesicSpace& space, int sample_count,
                           std::uint64_t seed) {
  if (sample_count < 1)
    throw std::invalid_argument("check_w_axioms: sample_count must be >= 1");
  AxiomReport rep;
  rep.space = space.descriptor();
  rep.samples = sample_count;
  rep.seed = seed;
  const double tol = 1e-9;
  rep.checks = {
      {"W1", 0, tol, true},      {"W2", 0, tol, true},
      {"W3", 0, tol, true},      {"W4", 0, tol, true},
      {"geodesic_left", 0, tol, true},
      {"geodesic_right", 0, tol, true},
      {"cn_inequality", 0, tol, true},
  };
  AxiomCheck& w1 = rep.checks[0];
  AxiomCheck& w2 = rep.checks[1];
  AxiomCheck& w3 = rep.checks[2];
  AxiomCheck& w4 = rep.checks[3];
  AxiomCheck& gl = rep.checks[4];
  AxiomCheck& gr = rep.checks[5];
  AxiomCheck& cn = rep.checks[6];

  Rng rng(seed);
  auto pick_lambda = [&rng](int k) {
    switch (k % 8) {
      case 0: return 0.0;
      case 1: return 1.0;
      case 2: return 0.5;
      default: return rng.uniform01();
    }
  };

  for (int i = 0; i < sample_count; ++i) {
    Point x = space.random_point(rng);
    Point y = space.random_point(rng);
    Point z = space.random_point(rng);
    Point w = space.random_point(rng);
    double lam = pick_lambda(i);
    double lam2 = pick_lambda(i + 3);

    Point cxy = space.combine(x, y, lam);
    double dxy = space.dist(x, y);

    {  // (W1) d(z, W(x,y,lam)) <= (1-lam)d(z,x) + lam d(z,y)
      double rhs = (1 - lam) * space.dist(z, x) + lam * space.dist(z, y);
      track(w1, (space.dist(z, cxy) - rhs) / (1 + std::abs(rhs)));
    }
    {  // (W2) d(W(x,y,lam), W(x,y,lam2)) = |lam-lam2| d(x,y)
      double lhs = space.dist(cxy, space.combine(x, y, lam2));
      double rhs = std::abs(lam - lam2) * dxy;
      track(w2, std::abs(lhs - rhs) / (1 + std::abs(rhs)));
    }
    {  // (W3) W(x,y,lam) = W(y,x,1-lam)
      track(w3, space.dist(cxy, space.combine(y, x, 1 - lam)));
    }
    {  // (W4) d(W(x,z,lam), W(y,w,lam)) <= (1-lam)d(x,y) + lam d(z,w)
      double lhs = space.dist(space.combine(x, z, lam), space.combine(y, w, lam));
      double rhs = (1 - lam) * space.dist(x, y) + lam * space.dist(z, w);
      track(w4, (lhs - rhs) / (1 + std::abs(rhs)));
    }
    {  // d(x, W(x,y,lam)) = lam d(x,y) and d(y, W(x,y,lam)) = (1-lam) d(x,y)
      track(gl, std::abs(space.dist(x, cxy) - lam * dxy) / (1 + dxy));
      track(gr, std::abs(space.dist(y, cxy) - (1 - lam) * dxy) / (1 + dxy));
    }
    {  // d^2(W(x,y,lam), z) <= (1-lam)d^2(x,z) + lam d^2(y,z) - lam(1-lam)d^2(x,y)
      double dxz = space.dist(x, z), dyz = space.dist(y, z);
      double lhs = space.dist(cxy, z);
      double rhs2 = (1 - lam) * dxz * dxz + lam * dyz * dyz -
                    lam * (1 - lam) * dxy * dxy;
      track(cn, (lhs * lhs - rhs2) / (1 + std::abs(rhs2)));
    }
  }

  rep.pass = true;
  for (AxiomCheck& c : rep.checks) {
    c.pass = c.max_violation <= c.tolerance;
    rep.pass = rep.pass && c.pass;
  }
  return rep;
}

}  // namespace hiter
