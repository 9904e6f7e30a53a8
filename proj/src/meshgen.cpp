#include "spectral/meshgen.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <utility>

#include "spectral/error.hpp"

namespace spectral {

namespace {

constexpr double kPi = 3.14159265358979323846;

void normalize(Vec3& v) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    v[0] /= n;
    v[1] /= n;
    v[2] /= n;
}

}  // namespace

TriangleMesh make_single_triangle() {
    TriangleMesh m;
    m.vertices = {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}};
    m.triangles = {{0, 1, 2}};
    return m;
}

TriangleMesh make_icosahedron() {
    TriangleMesh m;
    const double z = 1.0 / std::sqrt(5.0);
    const double r = 2.0 / std::sqrt(5.0);
    m.vertices.push_back({0.0, 0.0, 1.0});
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * kPi * k / 5.0;
        m.vertices.push_back({r * std::cos(a), r * std::sin(a), z});
    }
    for (int k = 0; k < 5; ++k) {
        const double a = 2.0 * kPi * (k + 0.5) / 5.0;
        m.vertices.push_back({r * std::cos(a), r * std::sin(a), -z});
    }
    m.vertices.push_back({0.0, 0.0, -1.0});
    for (int k = 0; k < 5; ++k) {
        const int u0 = 1 + k, u1 = 1 + (k + 1) % 5;
        const int l0 = 6 + k, l1 = 6 + (k + 1) % 5;
        m.triangles.push_back({0, u0, u1});
        m.triangles.push_back({u0, l0, u1});
        m.triangles.push_back({u1, l0, l1});
        m.triangles.push_back({11, l1, l0});
    }
    return m;
}

TriangleMesh make_icosphere(int subdivisions) {
    if (subdivisions < 0) throw InputError("make_icosphere: negative subdivision count");
    TriangleMesh m = make_icosahedron();
    for (int s = 0; s < subdivisions; ++s) {
        std::map<std::pair<int, int>, int> midpoint;
        auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            Vec3 v = {0.5 * (m.vertices[a][0] + m.vertices[b][0]),
                      0.5 * (m.vertices[a][1] + m.vertices[b][1]),
                      0.5 * (m.vertices[a][2] + m.vertices[b][2])};
            normalize(v);
            const int idx = m.num_vertices();
            m.vertices.push_back(v);
            midpoint.emplace(key, idx);
            return idx;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(m.triangles.size() * 4);
        for (const auto& t : m.triangles) {
            const int ab = mid(t[0], t[1]), bc = mid(t[1], t[2]), ca = mid(t[2], t[0]);
            next.push_back({t[0], ab, ca});
            next.push_back({t[1], bc, ab});
            next.push_back({t[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        m.triangles = std::move(next);
    }
    return m;
}

TriangleMesh make_uv_sphere(int n_lat, int n_lon) {
    if (n_lat < 2 || n_lon < 3) throw InputError("make_uv_sphere: grid too small");
    TriangleMesh m;
    m.vertices.push_back({0.0, 0.0, 1.0});
    for (int i = 1; i < n_lat; ++i) {
        const double theta = kPi * i / n_lat;
        for (int j = 0; j < n_lon; ++j) {
            const double phi = 2.0 * kPi * j / n_lon;
            m.vertices.push_back({std::sin(theta) * std::cos(phi),
                                  std::sin(theta) * std::sin(phi), std::cos(theta)});
        }
    }
    const int south = m.num_vertices();
    m.vertices.push_back({0.0, 0.0, -1.0});
    auto ring = [&](int i, int j) { return 1 + (i - 1) * n_lon + (j % n_lon); };
    for (int j = 0; j < n_lon; ++j) m.triangles.push_back({0, ring(1, j), ring(1, j + 1)});
    for (int i = 1; i + 1 < n_lat; ++i)
        for (int j = 0; j < n_lon; ++j) {
            m.triangles.push_back({ring(i, j), ring(i + 1, j), ring(i, j + 1)});
            m.triangles.push_back({ring(i, j + 1), ring(i + 1, j), ring(i + 1, j + 1)});
        }
    for (int j = 0; j < n_lon; ++j)
        m.triangles.push_back({south, ring(n_lat - 1, j + 1), ring(n_lat - 1, j)});
    return m;
}

TriangleMesh make_geodesic_sphere(int frequency) {
    if (frequency < 1) throw InputError("make_geodesic_sphere: frequency must be >= 1");
    const TriangleMesh ico = make_icosahedron();
    TriangleMesh m;
    const int nu = frequency;
    std::map<std::array<long long, 3>, int> seen;
    auto vertex = [&](double x, double y, double z) {
        const double r = std::sqrt(x * x + y * y + z * z);
        x /= r;
        y /= r;
        z /= r;
        const std::array<long long, 3> key = {std::llround(x * 1e9), std::llround(y * 1e9),
                                              std::llround(z * 1e9)};
        const auto it = seen.find(key);
        if (it != seen.end()) return it->second;
        const int idx = m.num_vertices();
        m.vertices.push_back({x, y, z});
        seen.emplace(key, idx);
        return idx;
    };
    for (const auto& face : ico.triangles) {
        const Vec3& a = ico.vertices[static_cast<std::size_t>(face[0])];
        const Vec3& b = ico.vertices[static_cast<std::size_t>(face[1])];
        const Vec3& c = ico.vertices[static_cast<std::size_t>(face[2])];
        // barycentric grid: row i has nu-i+1 points
        std::vector<int> grid;
        for (int i = 0; i <= nu; ++i)
            for (int j = 0; j <= nu - i; ++j) {
                const double wa = static_cast<double>(nu - i - j) / nu;
                const double wb = static_cast<double>(j) / nu;
                const double wc = static_cast<double>(i) / nu;
                grid.push_back(vertex(wa * a[0] + wb * b[0] + wc * c[0],
                                      wa * a[1] + wb * b[1] + wc * c[1],
                                      wa * a[2] + wb * b[2] + wc * c[2]));
            }
        auto at = [&](int i, int j) {
            // offset of row i: sum_{r<i} (nu-r+1)
            const int off = i * (nu + 1) - i * (i - 1) / 2;
            return grid[static_cast<std::size_t>(off + j)];
        };
        for (int i = 0; i < nu; ++i)
            for (int j = 0; j < nu - i; ++j) {
                m.triangles.push_back({at(i, j), at(i, j + 1), at(i + 1, j)});
                if (j + 1 <= nu - i - 1)
                    m.triangles.push_back({at(i, j + 1), at(i + 1, j + 1), at(i + 1, j)});
            }
    }
    return m;
}

TriangleMesh make_blob(int resolution, double amplitude) {
    // geodesic-sphere base: near-equilateral triangles stay non-obtuse under
    // the warp, so cotangent weights keep their sign and the discrete heat
    // kernel keeps the maximum principle
    TriangleMesh m = make_geodesic_sphere(resolution);
    for (auto& v : m.vertices) {
        const double theta = std::acos(std::clamp(v[2], -1.0, 1.0));
        const double phi = std::atan2(v[1], v[0]);
        const double bump = std::sin(theta) * (std::sin(3.0 * theta) * std::cos(2.0 * phi) +
                                               0.5 * std::cos(2.0 * theta) * std::sin(3.0 * phi));
        const double r = 1.0 + amplitude * bump;
        v[0] *= r;
        v[1] *= r;
        v[2] *= r;
    }
    return m;
}

HoleResult punch_hole(const TriangleMesh& mesh, int center, double radius) {
    if (center < 0 || center >= mesh.num_vertices())
        throw InputError("punch_hole: center out of range");
    const Vec3& c = mesh.vertices[center];
    HoleResult res;
    res.old_to_new.assign(mesh.vertices.size(), -1);
    std::vector<std::array<int, 3>> kept;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        Vec3 g = {0.0, 0.0, 0.0};
        for (int k = 0; k < 3; ++k)
            for (int d = 0; d < 3; ++d) g[d] += mesh.vertices[tri[k]][d] / 3.0;
        const double dx = g[0] - c[0], dy = g[1] - c[1], dz = g[2] - c[2];
        if (dx * dx + dy * dy + dz * dz <= radius * radius) {
            res.removed_area += triangle_area(mesh, t);
            continue;
        }
        kept.push_back(tri);
    }
    for (auto& tri : kept)
        for (int k = 0; k < 3; ++k) {
            int& v = tri[k];
            if (res.old_to_new[v] < 0) {
                res.old_to_new[v] = res.mesh.num_vertices();
                res.mesh.vertices.push_back(mesh.vertices[v]);
            }
            v = res.old_to_new[v];
        }
    res.mesh.triangles = std::move(kept);
    return res;
}

TriangleMesh jitter_vertices(const TriangleMesh& mesh, double relative_amplitude,
                             std::uint64_t seed) {
    TriangleMesh out = mesh;
    const double amp = relative_amplitude * mean_edge_length(mesh);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    for (auto& v : out.vertices)
        for (int d = 0; d < 3; ++d) v[d] += u(rng);
    return out;
}

}  // namespace spectral
