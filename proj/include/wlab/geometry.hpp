#pragma once

#include "wlab/core.hpp"

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace wlab {

struct Box {
    Point lo, hi;

    int dim() const { return static_cast<int>(lo.size()); }
    Point center() const { return 0.5 * (lo + hi); }
    Point extent() const { return hi - lo; }
    double volume() const;
    double max_extent() const { return (hi - lo).maxCoeff(); }
    bool empty() const { return ((hi - lo).array() < 0).any(); }
    bool contains(const Point& x, double slack = 0) const;
    bool intersects(const Box& o) const;
    static Box hull(const Box& a, const Box& b);
    static Box meet(const Box& a, const Box& b);
};

// x -> M x + shift
struct AffineMap {
    Mat M;
    Point shift;
    Mat Minv;
    double det = 1;

    static AffineMap make(const Mat& M, const Point& shift);
    static AffineMap identity(int d);
    static AffineMap scaling(int d, double s);
    int dim() const { return static_cast<int>(M.rows()); }
    Point apply(const Point& x) const;
    Point inverse(const Point& y) const;
    Point linear(const Point& v) const;
    Point linear_inverse(const Point& v) const;
    AffineMap inverse_map() const;
    AffineMap then(const AffineMap& outer) const;  // outer o this
    double condition_number() const;
};

enum class DomainKind { polytope, ball, cone_body, union_of, intersection, affine_image, sweep };
const char* to_string(DomainKind k);

class Domain;

struct PolytopeRep {
    Mat A;
    Vec b;
    Vec row_norm;
};
struct BallRep {
    Point center;
    double radius = 0;
};
// {x : |x|(1 - eps) <= x.xi <= 1}
struct ConeBodyRep {
    Point xi;
    double eps = 0;
};
struct SetListRep {
    std::vector<Domain> members;
};
struct AffineRep {
    std::shared_ptr<const Domain> base;
    AffineMap map;
};
// {x + t dir : x in base, t in [t0, t1]}
struct SweepRep {
    std::shared_ptr<const Domain> base;
    Point dir;
    double t0 = 0, t1 = 0;
};

struct Interval {
    double lo = 0, hi = -1;
    bool empty() const { return lo > hi; }
};

class Domain {
public:
    Domain() = default;
    bool valid() const { return node_ != nullptr; }

    static Domain polytope(const Mat& A, const Vec& b);
    static Domain box(const Point& lo, const Point& hi);
    static Domain convex_polygon(const std::vector<Point>& vertices);
    static Domain ball(const Point& center, double radius);
    static Domain cone_body(const Point& xi, double eps);
    static Domain union_of(std::vector<Domain> members);
    static Domain intersection(std::vector<Domain> members);
    static Domain affine_image(const Domain& base, const AffineMap& map);
    static Domain sweep(const Domain& base, const Point& dir, double t0, double t1);

    int dim() const;
    DomainKind kind() const;
    const Box& bbox() const;
    bool contains(const Point& x) const;
    bool convex() const;

    const PolytopeRep& as_polytope() const;
    const BallRep& as_ball() const;
    const ConeBodyRep& as_cone_body() const;
    const SetListRep& as_set_list() const;
    const AffineRep& as_affine() const;
    const SweepRep& as_sweep() const;

    // Exact volume where a closed form exists.
    std::optional<double> exact_volume() const;

private:
    struct Node;
    explicit Domain(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;
};

bool membership(const Domain& dom, const Point& x);

// {t : x + t e in dom} for convex representations; nullopt when no exact form is available.
std::optional<Interval> line_interval(const Domain& dom, const Point& x, const Point& e);

// Affine images of polytopes and balls collapse to native representations.
Domain image(const Domain& dom, const AffineMap& map);
Domain dilate(const Domain& dom, double lambda);

std::vector<Point> polytope_vertices(const Domain& poly);

// nullopt when the polytope is empty or flat
std::optional<Domain> try_polytope(const Mat& A, const Vec& b);

// Radius of the smallest ball containing pts (Welzl).
double enclosing_radius(std::vector<Point> pts, Point* center = nullptr);

struct DirectionSet {
    std::vector<Point> dirs;
    double spread = 0;
    int rank = 0;

    DirectionSet() = default;
    explicit DirectionSet(std::vector<Point> raw);
    static DirectionSet axes(int d);

    int dim() const { return dirs.empty() ? 0 : static_cast<int>(dirs[0].size()); }
    int size() const { return static_cast<int>(dirs.size()); }
    bool spans() const { return spread > 0; }
    DirectionSet symmetrized() const;
    DirectionSet with(const Point& extra) const;
    // true when v/|v| equals some +xi (or +-xi when allow_negation) within tol
    bool contains(const Point& v, double tol = 1e-12, bool allow_negation = false) const;
};

// min over unit x of max_i |xi_i . x|; 0 if the directions do not span.
double direction_spread(const std::vector<Point>& dirs);

struct SamplePlan {
    int dim = 0;
    std::vector<Point> points;
    std::vector<double> weights;
    std::uint64_t seed = 0;
    double density = 0;  // points per unit volume
    double volume = 0;
    bool volume_exact = false;

    std::size_t size() const { return points.size(); }
    void add_point(const Point& x, double w) {
        points.push_back(x);
        weights.push_back(w);
    }
};

// Rejection sampling from the bounding box; weights are vol/N.
SamplePlan make_plan(const Domain& dom, int n_points, std::uint64_t seed);
// Regular lattice with per_axis points per coordinate (endpoints included) filtered by membership.
SamplePlan grid_plan(const Domain& dom, int per_axis);
SamplePlan transform_plan(const SamplePlan& plan, const AffineMap& map);
std::vector<Point> sample_points(const Domain& dom, int n, Rng& rng, long max_attempts = 0);

struct DiameterResult {
    double value = 0;
    bool approximate = false;
    Point a, b;
};
DiameterResult diameter(const Domain& dom, const SamplePlan& plan);
DiameterResult diameter(const Domain& dom);

struct InscribedBall {
    Point center;
    double radius = 0;
};
InscribedBall inscribed_ball(const Domain& poly);

struct Normalization {
    AffineMap map;
    double R = 1;         // smallest enclosing ball of the image
    double R_origin = 1;  // max vertex norm of the image, so the image lies in B_R[0]
    Domain normalized;
};
Normalization normalize(const Domain& poly);

// Negative inside, zero on the boundary (polytopes, balls and their affine images).
double signed_distance(const Domain& dom, const Point& x);

bool on_boundary(const Domain& dom, const Point& x);
bool illuminated(const Domain& dom, const Point& x, const Point& e);

struct XrayResult {
    bool ok = false;
    std::vector<Point> witnesses;
};
XrayResult xray_verifies(const Domain& dom, const DirectionSet& E, const std::vector<Point>& boundary_sample);

// Vertices for polytopes plus ray-cast points from an interior point.
std::vector<Point> boundary_sample(const Domain& dom, int n, std::uint64_t seed);

// Polytopes only: every pair of active unit normals at a vertex has u_i.u_j >= (d-2)/(d-1).
bool almost_smooth(const Domain& poly);

struct HexagonResult {
    std::array<Point, 6> vertices;
    AffineMap map;
    double residual = 0;  // max |signed distance| over the vertices
    double area = 0;
    bool converged = false;
    int evaluations = 0;
};
// Template vertices (0,2),(-1,1),(-1,-1),(0,-2),(1,-1),(1,1) under an affine map.
HexagonResult inscribed_affine_hexagon(const Domain& dom, std::uint64_t seed = 1);
std::array<Point, 6> hexagon_template();

double polygon_area(const std::vector<Point>& ccw);
std::vector<Point> convex_hull_2d(std::vector<Point> pts);

}  // namespace wlab
