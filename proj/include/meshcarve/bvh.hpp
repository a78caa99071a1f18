#pragma once

#include "meshcarve/geometry.hpp"

#include <vector>

namespace mc {

struct Mesh;

// Exact closest point on triangle abc to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Median-split AABB tree over mesh triangles. Read-only after construction,
// safe to query concurrently.
class TriangleBvh {
public:
    explicit TriangleBvh(const Mesh& mesh);

    struct Closest {
        double distance_sq = 0.0;
        Vec3 point = Vec3::Zero();
        int triangle = -1;
    };
    Closest closest_point(const Vec3& query) const;

    // Collects the positions (along `axis`) where the surface crosses the
    // line {coord[u]=u, coord[v]=v} with (u, v) the axes after `axis` in
    // cyclic order. Exact edge hits are resolved by a symbolic (+eps, +eps^2)
    // perturbation of the line, so each transversal crossing counts once.
    void line_crossings(int axis, double u, double v, std::vector<double>& out) const;

    std::size_t triangle_count() const { return tri_a_.size(); }

private:
    struct Node {
        Vec3 lo, hi;
        int left = -1;    // internal: child pair at (left, left+1)
        int begin = 0;    // leaf: triangle range [begin, end)
        int end = 0;
        bool leaf() const { return left < 0; }
    };

    void build(int slot, int begin, int end, std::vector<Vec3>& centroids, std::vector<int>& order);
    std::vector<Node> nodes_;
    std::vector<Vec3> tri_a_, tri_b_, tri_c_;  // reordered triangle vertices
};

}  // namespace mc
