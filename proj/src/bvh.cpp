#include "meshcarve/bvh.hpp"

#include "meshcarve/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mc {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson, Real-Time Collision Detection, 5.1.5.
    const Vec3 ab = b - a, ac = c - a, ap = p - a;
    const double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

    const Vec3 cp = p - c;
    const double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0)
        return b + ((d4 - d3) / ((d4 - d3) + (d5 - d6))) * (c - b);

    const double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

namespace {

double aabb_distance_sq(const Vec3& lo, const Vec3& hi, const Vec3& p) {
    double d = 0.0;
    for (int k = 0; k < 3; ++k) {
        double v = p[k];
        if (v < lo[k]) d += (lo[k] - v) * (lo[k] - v);
        else if (v > hi[k]) d += (v - hi[k]) * (v - hi[k]);
    }
    return d;
}

// Sign of e + a*eps + b*eps^2 for infinitesimal eps > 0.
int perturbed_sign(double e, double a, double b) {
    if (e != 0.0) return e > 0.0 ? 1 : -1;
    if (a != 0.0) return a > 0.0 ? 1 : -1;
    if (b != 0.0) return b > 0.0 ? 1 : -1;
    return 0;
}

}  // namespace

TriangleBvh::TriangleBvh(const Mesh& mesh) {
    const std::size_t n = mesh.faces.size();
    if (n == 0) throw std::invalid_argument("cannot build a BVH over an empty mesh");
    std::vector<Vec3> centroids(n);
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);

    std::vector<Vec3> a(n), b(n), c(n);
    for (std::size_t f = 0; f < n; ++f) {
        const Tri& t = mesh.faces[f];
        a[f] = mesh.vertices[t[0]];
        b[f] = mesh.vertices[t[1]];
        c[f] = mesh.vertices[t[2]];
        centroids[f] = (a[f] + b[f] + c[f]) / 3.0;
    }
    nodes_.reserve(2 * n);
    // build() permutes `order`; triangles are stored in that order afterwards
    tri_a_ = a;  // temporary originals, reordered below
    tri_b_ = b;
    tri_c_ = c;
    nodes_.emplace_back();
    build(0, 0, static_cast<int>(n), centroids, order);
    std::vector<Vec3> ra(n), rb(n), rc(n);
    for (std::size_t i = 0; i < n; ++i) {
        ra[i] = a[order[i]];
        rb[i] = b[order[i]];
        rc[i] = c[order[i]];
    }
    tri_a_ = std::move(ra);
    tri_b_ = std::move(rb);
    tri_c_ = std::move(rc);
}

void TriangleBvh::build(int slot, int begin, int end, std::vector<Vec3>& centroids,
                        std::vector<int>& order) {
    Vec3 lo = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 hi = -lo;
    for (int i = begin; i < end; ++i) {
        int f = order[i];
        lo = lo.cwiseMin(tri_a_[f]).cwiseMin(tri_b_[f]).cwiseMin(tri_c_[f]);
        hi = hi.cwiseMax(tri_a_[f]).cwiseMax(tri_b_[f]).cwiseMax(tri_c_[f]);
    }
    nodes_[slot].lo = lo;
    nodes_[slot].hi = hi;

    constexpr int kLeafSize = 4;
    if (end - begin <= kLeafSize) {
        nodes_[slot].begin = begin;
        nodes_[slot].end = end;
        return;
    }

    const Vec3 extent = hi - lo;
    int axis = 0;
    if (extent[1] > extent[axis]) axis = 1;
    if (extent[2] > extent[axis]) axis = 2;
    const int mid = (begin + end) / 2;
    std::nth_element(order.begin() + begin, order.begin() + mid, order.begin() + end,
                     [&](int x, int y) { return centroids[x][axis] < centroids[y][axis]; });

    const int left = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    nodes_.emplace_back();
    nodes_[slot].left = left;
    build(left, begin, mid, centroids, order);
    build(left + 1, mid, end, centroids, order);
}

TriangleBvh::Closest TriangleBvh::closest_point(const Vec3& query) const {
    Closest best;
    best.distance_sq = std::numeric_limits<double>::infinity();

    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (aabb_distance_sq(node.lo, node.hi, query) >= best.distance_sq) continue;
        if (node.leaf()) {
            for (int i = node.begin; i < node.end; ++i) {
                const Vec3 cp = closest_point_on_triangle(query, tri_a_[i], tri_b_[i], tri_c_[i]);
                const double d = (cp - query).squaredNorm();
                if (d < best.distance_sq) {
                    best.distance_sq = d;
                    best.point = cp;
                    best.triangle = i;
                }
            }
        } else {
            // nearer child first
            const int l = node.left, r = node.left + 1;
            const double dl = aabb_distance_sq(nodes_[l].lo, nodes_[l].hi, query);
            const double dr = aabb_distance_sq(nodes_[r].lo, nodes_[r].hi, query);
            if (dl < dr) {
                stack[top++] = r;
                stack[top++] = l;
            } else {
                stack[top++] = l;
                stack[top++] = r;
            }
        }
    }
    return best;
}

void TriangleBvh::line_crossings(int axis, double u, double v, std::vector<double>& out) const {
    out.clear();
    const int ua = (axis + 1) % 3, va = (axis + 2) % 3;

    int stack[64];
    int top = 0;
    stack[top++] = 0;
    while (top > 0) {
        const Node& node = nodes_[stack[--top]];
        if (u < node.lo[ua] || u > node.hi[ua] || v < node.lo[va] || v > node.hi[va]) continue;
        if (!node.leaf()) {
            stack[top++] = node.left;
            stack[top++] = node.left + 1;
            continue;
        }
        for (int i = node.begin; i < node.end; ++i) {
            const Vec3& A = tri_a_[i];
            const Vec3& B = tri_b_[i];
            const Vec3& C = tri_c_[i];
            const double pu[3] = {A[ua], B[ua], C[ua]};
            const double pv[3] = {A[va], B[va], C[va]};

            // 2D point-in-triangle with the line symbolically moved by
            // (+eps, +eps^2). Edge e(q) = (p2-p1) x (q-p1); perturbation adds
            // -(p2v-p1v)*eps + (p2u-p1u)*eps^2.
            int signs[3];
            for (int k = 0; k < 3; ++k) {
                const int k1 = (k + 1) % 3;
                const double ex = pu[k1] - pu[k], ey = pv[k1] - pv[k];
                const double e = ex * (v - pv[k]) - ey * (u - pu[k]);
                signs[k] = perturbed_sign(e, -ey, ex);
            }
            if (signs[0] == 0 || signs[0] != signs[1] || signs[1] != signs[2]) continue;

            // Intersection along the axis from the supporting plane.
            const Vec3 n = (B - A).cross(C - A);
            if (n[axis] == 0.0) continue;  // edge-on to this axis
            const double t = A[axis] - (n[ua] * (u - A[ua]) + n[va] * (v - A[va])) / n[axis];
            out.push_back(t);
        }
    }
    std::sort(out.begin(), out.end());
}

}  // namespace mc
