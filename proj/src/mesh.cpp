#include "spectral/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "spectral/error.hpp"

namespace spectral {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) { return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]); }

}  // namespace

double triangle_area(const TriangleMesh& mesh, int t) {
    const auto& tri = mesh.triangles[t];
    const Vec3 u = sub(mesh.vertices[tri[1]], mesh.vertices[tri[0]]);
    const Vec3 v = sub(mesh.vertices[tri[2]], mesh.vertices[tri[0]]);
    return 0.5 * norm(cross(u, v));
}

double total_area(const TriangleMesh& mesh) {
    double a = 0.0;
    for (int t = 0; t < mesh.num_triangles(); ++t) a += triangle_area(mesh, t);
    return a;
}

double bounding_box_diag_sq(const TriangleMesh& mesh) {
    Vec3 lo = {std::numeric_limits<double>::max(), std::numeric_limits<double>::max(),
               std::numeric_limits<double>::max()};
    Vec3 hi = {std::numeric_limits<double>::lowest(), std::numeric_limits<double>::lowest(),
               std::numeric_limits<double>::lowest()};
    for (const auto& v : mesh.vertices) {
        for (int k = 0; k < 3; ++k) {
            lo[k] = std::min(lo[k], v[k]);
            hi[k] = std::max(hi[k], v[k]);
        }
    }
    const Vec3 d = sub(hi, lo);
    return d[0] * d[0] + d[1] * d[1] + d[2] * d[2];
}

double mean_edge_length(const TriangleMesh& mesh) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& tri : mesh.triangles) {
        for (int k = 0; k < 3; ++k) {
            sum += norm(sub(mesh.vertices[tri[k]], mesh.vertices[tri[(k + 1) % 3]]));
            ++count;
        }
    }
    return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

void validate_mesh(const TriangleMesh& mesh) {
    const int n = mesh.num_vertices();
    for (const auto& v : mesh.vertices)
        for (double c : v)
            if (!std::isfinite(c)) throw ValidationError("mesh has a non-finite vertex coordinate");

    std::ostringstream bad;
    int bad_count = 0;
    const double area_floor = 1e-12 * bounding_box_diag_sq(mesh);
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        for (int k = 0; k < 3; ++k) {
            if (tri[k] < 0 || tri[k] >= n) {
                std::ostringstream msg;
                msg << "triangle " << t << " references vertex " << tri[k]
                    << " outside [0, " << n << ")";
                throw ValidationError(msg.str());
            }
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) {
            std::ostringstream msg;
            msg << "triangle " << t << " repeats a vertex index";
            throw ValidationError(msg.str());
        }
        if (triangle_area(mesh, t) <= area_floor) {
            if (bad_count > 0) bad << ", ";
            bad << t;
            ++bad_count;
        }
    }
    if (bad_count > 0) {
        std::ostringstream msg;
        msg << bad_count << " degenerate triangle(s) below the area floor: " << bad.str();
        throw ValidationError(msg.str());
    }
}

ScalarField indicator(const TriangleMesh& mesh, int i) {
    if (i < 0 || i >= mesh.num_vertices())
        throw ValidationError("indicator: vertex index out of range");
    ScalarField f(mesh.num_vertices(), 0.0);
    f[i] = 1.0;
    return f;
}

bool all_finite(const ScalarField& f) {
    for (double v : f)
        if (!std::isfinite(v)) return false;
    return true;
}

}  // namespace spectral
