#pragma once

#include "meshcarve/geometry.hpp"

#include <string>
#include <utility>
#include <vector>

namespace mc {

// Indexed triangle surface. Faces wind counter-clockwise seen from outside.
// Vertex normals are optional and recomputed rather than trusted from file.
struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Tri> faces;
    std::vector<Vec3> vertex_normals;  // empty until computed

    bool has_normals() const { return vertex_normals.size() == vertices.size(); }
    // Throws if a face index is out of range or a face repeats a vertex.
    void validate() const;
};

// Neighbor lists per vertex plus incident-face pairs per edge.
struct AdjacencyIndex {
    struct EdgeFaces {
        int v0, v1;  // v0 < v1
        int f0, f1;  // f1 = -1 on boundary edges
    };
    std::vector<std::vector<int>> neighbors;  // sorted, symmetric
    std::vector<EdgeFaces> edge_faces;        // sorted by (v0, v1)

    static AdjacencyIndex build(const Mesh& mesh);
};

// Maps v -> (v - center) * scale. Returned by normalize_to_unit_sphere so
// results can be carried back to the input frame.
struct SimilarityTransform {
    double scale = 1.0;
    Vec3 center = Vec3::Zero();

    Vec3 apply(const Vec3& v) const { return (v - center) * scale; }
    Vec3 invert(const Vec3& v) const { return v / scale + center; }
};

// OBJ text I/O. Loader accepts v/f records, fan-triangulates polygons and
// takes the position index from f-entries of the form a, a/b, a/b/c.
// Writer emits coordinates with 9 significant digits, 1-based indices.
Mesh load_mesh(const std::string& path);
void save_mesh(const Mesh& mesh, const std::string& path);

// Centers the bounding box at the origin and scales so the farthest vertex
// sits at target_radius. Throws on zero-extent input.
std::pair<Mesh, SimilarityTransform> normalize_to_unit_sphere(const Mesh& mesh,
                                                              double target_radius = 0.9);

// Area-weighted vertex normals (normalized sum of incident face cross
// products). Vertices with no incident area get +Z. Returns how many were
// flagged that way.
int compute_vertex_normals(Mesh& mesh);

// Alternating lambda/mu umbrella steps. Positions move, topology never does.
Mesh taubin_smooth(const Mesh& mesh, int iterations, double lambda = 0.5, double mu = -0.53);

struct EnergyResult {
    double value = 0.0;
    std::vector<Vec3> gradient;  // w.r.t. vertex positions
    int flagged = 0;             // skipped degenerate contributions
};

// Sum over vertices of the squared umbrella vector norm, where the umbrella
// is the offset of a vertex from its neighbor mean.
EnergyResult laplacian_energy(const Mesh& mesh, const AdjacencyIndex& adjacency);

// Sum over edge-adjacent face pairs of 1 - cos(angle between face normals).
EnergyResult normal_consistency_energy(const Mesh& mesh, const AdjacencyIndex& adjacency);

// Test-fixture helper: (taubin_smooth(fine, iterations), fine). The fine mesh
// is expected to be normalized already; topology is shared.
std::pair<Mesh, Mesh> make_coarse_pair(const Mesh& fine, int smoothing_iterations);

}  // namespace mc
