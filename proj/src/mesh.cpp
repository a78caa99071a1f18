#include "meshcarve/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

namespace mc {

void Mesh::validate() const {
    const int n = static_cast<int>(vertices.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Tri& t = faces[f];
        for (int k = 0; k < 3; ++k) {
            if (t[k] < 0 || t[k] >= n)
                throw std::runtime_error("face " + std::to_string(f) + " references vertex " +
                                         std::to_string(t[k]) + " of " + std::to_string(n));
        }
        if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
            throw std::runtime_error("face " + std::to_string(f) + " repeats a vertex index");
    }
}

AdjacencyIndex AdjacencyIndex::build(const Mesh& mesh) {
    AdjacencyIndex adj;
    adj.neighbors.assign(mesh.vertices.size(), {});

    std::map<std::pair<int, int>, std::pair<int, int>> edges;  // (v0,v1) -> (f0,f1)
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Tri& t = mesh.faces[f];
        for (int k = 0; k < 3; ++k) {
            int a = t[k], b = t[(k + 1) % 3];
            auto key = std::minmax(a, b);
            auto [it, inserted] = edges.try_emplace(key, static_cast<int>(f), -1);
            if (!inserted && it->second.second < 0) it->second.second = static_cast<int>(f);
        }
    }
    adj.edge_faces.reserve(edges.size());
    for (const auto& [key, fs] : edges) {
        adj.edge_faces.push_back({key.first, key.second, fs.first, fs.second});
        adj.neighbors[key.first].push_back(key.second);
        adj.neighbors[key.second].push_back(key.first);
    }
    for (auto& nb : adj.neighbors) std::sort(nb.begin(), nb.end());
    return adj;
}

Mesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);

    Mesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 p;
            if (!(ls >> p.x() >> p.y() >> p.z()))
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed vertex");
            mesh.vertices.push_back(p);
        } else if (tag == "f") {
            std::vector<int> poly;
            std::string item;
            while (ls >> item) {
                // index forms: a, a/b, a//c, a/b/c; only the position index matters
                std::size_t slash = item.find('/');
                std::string head = (slash == std::string::npos) ? item : item.substr(0, slash);
                int idx = 0;
                try {
                    idx = std::stoi(head);
                } catch (const std::exception&) {
                    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": malformed face index '" +
                                             item + "'");
                }
                if (idx < 0) idx = static_cast<int>(mesh.vertices.size()) + idx + 1;  // relative indexing
                if (idx < 1 || idx > static_cast<int>(mesh.vertices.size()))
                    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": vertex index " +
                                             std::to_string(idx) + " out of range");
                poly.push_back(idx - 1);
            }
            if (poly.size() < 3)
                throw std::runtime_error(path + ":" + std::to_string(line_no) + ": face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
                Tri t{poly[0], poly[k], poly[k + 1]};
                if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
                    throw std::runtime_error(path + ":" + std::to_string(line_no) + ": degenerate face record");
                mesh.faces.push_back(t);
            }
        }
        // all other records (vn, vt, usemtl, ...) are ignored
    }
    mesh.validate();
    return mesh;
}

void save_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    char buf[128];
    for (const Vec3& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "v %.9g %.9g %.9g\n", v.x(), v.y(), v.z());
        out << buf;
    }
    for (const Tri& f : mesh.faces) out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::pair<Mesh, SimilarityTransform> normalize_to_unit_sphere(const Mesh& mesh, double target_radius) {
    if (mesh.vertices.empty()) throw std::invalid_argument("cannot normalize an empty mesh");

    Vec3 lo = mesh.vertices.front(), hi = mesh.vertices.front();
    for (const Vec3& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    SimilarityTransform xf;
    xf.center = 0.5 * (lo + hi);

    double max_norm = 0.0;
    for (const Vec3& v : mesh.vertices) max_norm = std::max(max_norm, (v - xf.center).norm());
    if (max_norm <= 0.0) throw std::invalid_argument("degenerate mesh with zero extent");
    xf.scale = target_radius / max_norm;

    Mesh out = mesh;
    out.vertex_normals.clear();
    for (Vec3& v : out.vertices) v = xf.apply(v);
    return {std::move(out), xf};
}

int compute_vertex_normals(Mesh& mesh) {
    mesh.validate();
    std::vector<Vec3> accum(mesh.vertices.size(), Vec3::Zero());
    for (const Tri& f : mesh.faces) {
        const Vec3 n = (mesh.vertices[f[1]] - mesh.vertices[f[0]])
                           .cross(mesh.vertices[f[2]] - mesh.vertices[f[0]]);
        accum[f[0]] += n;
        accum[f[1]] += n;
        accum[f[2]] += n;
    }
    int flagged = 0;
    mesh.vertex_normals.resize(mesh.vertices.size());
    for (std::size_t i = 0; i < accum.size(); ++i) {
        double len = accum[i].norm();
        if (len < 1e-20) {
            mesh.vertex_normals[i] = Vec3(0, 0, 1);
            ++flagged;
        } else {
            mesh.vertex_normals[i] = accum[i] / len;
        }
    }
    return flagged;
}

Mesh taubin_smooth(const Mesh& mesh, int iterations, double lambda, double mu) {
    if (iterations < 0) throw std::invalid_argument("iterations must be >= 0");
    if (!(lambda > 0.0) || !(mu < 0.0) || !(std::abs(mu) > lambda))
        throw std::invalid_argument("taubin parameters require lambda > 0, mu < 0, |mu| > lambda");

    Mesh out = mesh;
    out.vertex_normals.clear();
    if (iterations == 0) return out;

    const AdjacencyIndex adj = AdjacencyIndex::build(mesh);
    std::vector<Vec3> next(out.vertices.size());
    auto step = [&](double coeff) {
        for (std::size_t i = 0; i < out.vertices.size(); ++i) {
            const auto& nb = adj.neighbors[i];
            if (nb.empty()) {
                next[i] = out.vertices[i];
                continue;
            }
            Vec3 mean = Vec3::Zero();
            for (int j : nb) mean += out.vertices[j];
            mean /= static_cast<double>(nb.size());
            next[i] = out.vertices[i] + coeff * (mean - out.vertices[i]);
        }
        out.vertices.swap(next);
    };
    for (int it = 0; it < iterations; ++it) {
        step(lambda);
        step(mu);
    }
    return out;
}

EnergyResult laplacian_energy(const Mesh& mesh, const AdjacencyIndex& adjacency) {
    EnergyResult res;
    res.gradient.assign(mesh.vertices.size(), Vec3::Zero());

    std::vector<Vec3> umbrella(mesh.vertices.size(), Vec3::Zero());
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& nb = adjacency.neighbors[i];
        if (nb.empty()) {
            ++res.flagged;
            continue;
        }
        Vec3 mean = Vec3::Zero();
        for (int j : nb) mean += mesh.vertices[j];
        mean /= static_cast<double>(nb.size());
        umbrella[i] = mesh.vertices[i] - mean;
        res.value += umbrella[i].squaredNorm();
    }
    for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
        const auto& nb = adjacency.neighbors[i];
        if (nb.empty()) continue;
        res.gradient[i] += 2.0 * umbrella[i];
        const double w = 2.0 / static_cast<double>(nb.size());
        for (int j : nb) res.gradient[j] -= w * umbrella[i];
    }
    return res;
}

EnergyResult normal_consistency_energy(const Mesh& mesh, const AdjacencyIndex& adjacency) {
    EnergyResult res;
    res.gradient.assign(mesh.vertices.size(), Vec3::Zero());

    // Unnormalized face normals and per-face gradient accumulators.
    std::vector<Vec3> fn(mesh.faces.size());
    std::vector<Vec3> dfn(mesh.faces.size(), Vec3::Zero());
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Tri& t = mesh.faces[f];
        fn[f] = (mesh.vertices[t[1]] - mesh.vertices[t[0]]).cross(mesh.vertices[t[2]] - mesh.vertices[t[0]]);
    }

    constexpr double kDegenerate = 1e-18;
    for (const auto& ef : adjacency.edge_faces) {
        if (ef.f1 < 0) continue;  // boundary edge, no pair
        const Vec3& a = fn[ef.f0];
        const Vec3& b = fn[ef.f1];
        const double la = a.norm(), lb = b.norm();
        if (la < kDegenerate || lb < kDegenerate) {
            ++res.flagged;
            continue;
        }
        const double inv = 1.0 / (la * lb);
        const double cosv = a.dot(b) * inv;
        res.value += 1.0 - cosv;
        // d(1 - cos)/da = -(b/(|a||b|) - cos * a/|a|^2)
        dfn[ef.f0] += -(b * inv - cosv * a / (la * la));
        dfn[ef.f1] += -(a * inv - cosv * b / (lb * lb));
    }

    // Chain through n = (p1-p0) x (p2-p0): for s = w.n,
    // ds/dp0 = (p1-p2) x w, ds/dp1 = (p2-p0) x w, ds/dp2 = (p0-p1) x w.
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
        const Vec3& w = dfn[f];
        if (w.isZero(0.0)) continue;
        const Tri& t = mesh.faces[f];
        const Vec3 &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
        res.gradient[t[0]] += (p1 - p2).cross(w);
        res.gradient[t[1]] += (p2 - p0).cross(w);
        res.gradient[t[2]] += (p0 - p1).cross(w);
    }
    return res;
}

std::pair<Mesh, Mesh> make_coarse_pair(const Mesh& fine, int smoothing_iterations) {
    return {taubin_smooth(fine, smoothing_iterations), fine};
}

}  // namespace mc
