#pragma once

#include "meshcarve/geometry.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace mc {

struct Mesh;

// Uniform lattice over [-1,1]^3 with per-point signed distances X and
// learnable offsets O. Distances are computed once and then treated as
// fixed; detail comes from moving the lattice points within a tanh bound
// of tau cell widths.
struct SdfGrid {
    int resolution = 0;
    double tau = 0.5;                // offset bound, in cell-size units
    std::vector<double> distances;   // r^3, k-fastest; empty until computed
    std::vector<Vec3> offsets;       // r^3 unbounded parameters, zero-init

    double cell_size() const { return 2.0 / (resolution - 1); }
    std::size_t point_count() const {
        return static_cast<std::size_t>(resolution) * resolution * resolution;
    }
    int point_id(int i, int j, int k) const { return (i * resolution + j) * resolution + k; }
    Vec3 lattice_position(int i, int j, int k) const {
        const double cs = cell_size();
        return Vec3(-1.0 + i * cs, -1.0 + j * cs, -1.0 + k * cs);
    }
    Vec3 lattice_position(int id) const {
        const int r = resolution;
        return lattice_position(id / (r * r), (id / r) % r, id % r);
    }
    bool has_distances() const { return distances.size() == point_count(); }

    int cells_per_axis() const { return resolution - 1; }
    int cell_id(int i, int j, int k) const {
        const int c = cells_per_axis();
        return (i * c + j) * c + k;
    }
    // Corner b of cell (i,j,k): bit 2 -> +i, bit 1 -> +j, bit 0 -> +k.
    int cell_corner_point(int i, int j, int k, int b) const {
        return point_id(i + ((b >> 2) & 1), j + ((b >> 1) & 1), k + (b & 1));
    }
};

SdfGrid build_grid(int resolution, double tau = 0.5);

struct SignStats {
    std::size_t disagreements = 0;  // points where the 3 axis parities differ
    std::size_t total = 0;
};

// Fills grid.distances with exact point-to-surface distances, signed by
// ray parity along the three axes with majority vote. Negative inside.
// Warns on stderr when more than 0.1% of points have split votes.
SignStats compute_signed_distances(const Mesh& mesh, SdfGrid& grid);

// Brute-force variant (all triangles per point). Test oracle for small r.
SignStats compute_signed_distances_brute(const Mesh& mesh, SdfGrid& grid);

// G^u = G + tau * cell_size * tanh(O), componentwise.
std::vector<Vec3> deform_grid(const SdfGrid& grid);

// Cells whose 8 corner distances carry mixed signs (x >= 0 counts positive),
// in lexicographic (i,j,k) order.
std::vector<int> active_cells(const SdfGrid& grid);

// Grid checkpoint: magic "SDFG", resolution as 32-bit unsigned LE, tau as
// float32 LE, then X and O as little-endian float32 in k-fastest order.
void save_grid(const SdfGrid& grid, const std::string& path);
SdfGrid load_grid(const std::string& path);

}  // namespace mc
