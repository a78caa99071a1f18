#include "meshcarve/sdf_grid.hpp"

#include "meshcarve/bvh.hpp"
#include "meshcarve/mesh.hpp"
#include "meshcarve/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace mc {

SdfGrid build_grid(int resolution, double tau) {
    if (resolution < 2) throw std::invalid_argument("grid resolution must be >= 2");
    if (!(tau > 0.0)) throw std::invalid_argument("tau must be positive");
    SdfGrid grid;
    grid.resolution = resolution;
    grid.tau = tau;
    grid.offsets.assign(grid.point_count(), Vec3::Zero());
    return grid;
}

namespace {

// Accumulates inside votes for all lattice points along one axis by sweeping
// each lattice line once: parity of crossings strictly beyond the point.
void sweep_axis_votes(const TriangleBvh& bvh, const SdfGrid& grid, int axis,
                      std::vector<std::uint8_t>& votes) {
    const int r = grid.resolution;
    const double cs = grid.cell_size();
    const int ua = (axis + 1) % 3, va = (axis + 2) % 3;

    parallel_for_chunks(static_cast<std::size_t>(r) * r, [&](std::size_t begin, std::size_t end) {
        std::vector<double> crossings;
        for (std::size_t line = begin; line < end; ++line) {
            const int ju = static_cast<int>(line) / r;
            const int jv = static_cast<int>(line) % r;
            const double u = -1.0 + ju * cs;
            const double v = -1.0 + jv * cs;
            bvh.line_crossings(axis, u, v, crossings);

            std::size_t pos = 0;
            for (int s = 0; s < r; ++s) {
                const double x = -1.0 + s * cs;
                while (pos < crossings.size() && crossings[pos] <= x) ++pos;
                if ((crossings.size() - pos) % 2 == 1) {
                    int idx[3];
                    idx[axis] = s;
                    idx[ua] = ju;
                    idx[va] = jv;
                    votes[grid.point_id(idx[0], idx[1], idx[2])] += 1;
                }
            }
        }
    });
}

SignStats fill_distances(const Mesh& mesh, SdfGrid& grid, bool brute) {
    if (mesh.faces.empty()) throw std::invalid_argument("cannot compute distances for an empty mesh");
    const int r = grid.resolution;
    if (r < 2) throw std::invalid_argument("grid has no lattice");

    const TriangleBvh bvh(mesh);
    std::vector<std::uint8_t> votes(grid.point_count(), 0);
    for (int axis = 0; axis < 3; ++axis) sweep_axis_votes(bvh, grid, axis, votes);

    grid.distances.assign(grid.point_count(), 0.0);
    parallel_for_chunks(grid.point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t id = begin; id < end; ++id) {
            const Vec3 p = grid.lattice_position(static_cast<int>(id));
            double dist;
            if (brute) {
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
                    const Tri& t = mesh.faces[f];
                    const Vec3 cp = closest_point_on_triangle(p, mesh.vertices[t[0]], mesh.vertices[t[1]],
                                                              mesh.vertices[t[2]]);
                    best = std::min(best, (cp - p).squaredNorm());
                }
                dist = std::sqrt(best);
            } else {
                dist = std::sqrt(bvh.closest_point(p).distance_sq);
            }
            grid.distances[id] = (votes[id] >= 2) ? -dist : dist;
        }
    });

    SignStats stats;
    stats.total = grid.point_count();
    for (std::uint8_t v : votes)
        if (v == 1 || v == 2) ++stats.disagreements;
    if (stats.total > 0 && stats.disagreements * 1000 > stats.total)
        std::fprintf(stderr,
                     "warning: sign parity votes disagree at %zu of %zu grid points; "
                     "mesh may not be cleanly closed\n",
                     stats.disagreements, stats.total);
    return stats;
}

}  // namespace

SignStats compute_signed_distances(const Mesh& mesh, SdfGrid& grid) {
    return fill_distances(mesh, grid, false);
}

SignStats compute_signed_distances_brute(const Mesh& mesh, SdfGrid& grid) {
    return fill_distances(mesh, grid, true);
}

std::vector<Vec3> deform_grid(const SdfGrid& grid) {
    const double bound = grid.tau * grid.cell_size();
    std::vector<Vec3> deformed(grid.point_count());
    parallel_for_chunks(grid.point_count(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t id = begin; id < end; ++id) {
            const Vec3& o = grid.offsets[id];
            deformed[id] = grid.lattice_position(static_cast<int>(id)) +
                           bound * Vec3(std::tanh(o.x()), std::tanh(o.y()), std::tanh(o.z()));
        }
    });
    return deformed;
}

std::vector<int> active_cells(const SdfGrid& grid) {
    if (!grid.has_distances()) throw std::logic_error("grid distances not computed");
    const int c = grid.cells_per_axis();
    std::vector<int> cells;
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j)
            for (int k = 0; k < c; ++k) {
                bool any_neg = false, any_pos = false;
                for (int b = 0; b < 8; ++b) {
                    const double x = grid.distances[grid.cell_corner_point(i, j, k, b)];
                    (x < 0.0 ? any_neg : any_pos) = true;
                }
                if (any_neg && any_pos) cells.push_back(grid.cell_id(i, j, k));
            }
    return cells;
}

namespace {

void write_u32_le(std::ofstream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

void write_f32_le(std::ofstream& out, float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    write_u32_le(out, bits);
}

std::uint32_t read_u32_le(std::ifstream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float read_f32_le(std::ifstream& in) {
    std::uint32_t bits = read_u32_le(in);
    float f;
    std::memcpy(&f, &bits, 4);
    return f;
}

}  // namespace

void save_grid(const SdfGrid& grid, const std::string& path) {
    if (!grid.has_distances()) throw std::logic_error("grid distances not computed");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write("SDFG", 4);
    write_u32_le(out, static_cast<std::uint32_t>(grid.resolution));
    write_f32_le(out, static_cast<float>(grid.tau));
    for (double x : grid.distances) write_f32_le(out, static_cast<float>(x));
    for (const Vec3& o : grid.offsets)
        for (int c = 0; c < 3; ++c) write_f32_le(out, static_cast<float>(o[c]));
    if (!out) throw std::runtime_error("write failed: " + path);
}

SdfGrid load_grid(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "SDFG", 4) != 0) throw std::runtime_error("not an SDFG file: " + path);
    const std::uint32_t r = read_u32_le(in);
    const float tau = read_f32_le(in);
    if (!in || r < 2) throw std::runtime_error("corrupt SDFG header: " + path);
    SdfGrid grid = build_grid(static_cast<int>(r), static_cast<double>(tau));
    grid.distances.resize(grid.point_count());
    for (double& x : grid.distances) x = static_cast<double>(read_f32_le(in));
    for (Vec3& o : grid.offsets)
        for (int c = 0; c < 3; ++c) o[c] = static_cast<double>(read_f32_le(in));
    if (!in) throw std::runtime_error("truncated SDFG file: " + path);
    return grid;
}

}  // namespace mc
