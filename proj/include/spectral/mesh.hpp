#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace spectral {

using Vec3 = std::array<double, 3>;

// Per-vertex real values; length always equals the vertex count of the mesh
// it was built for.
using ScalarField = std::vector<double>;

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    int num_vertices() const { return static_cast<int>(vertices.size()); }
    int num_triangles() const { return static_cast<int>(triangles.size()); }
};

double triangle_area(const TriangleMesh& mesh, int t);
double total_area(const TriangleMesh& mesh);
double bounding_box_diag_sq(const TriangleMesh& mesh);
double mean_edge_length(const TriangleMesh& mesh);

// Checks index bounds, repeated indices within a triangle, and degenerate
// (near zero area) triangles. Throws ValidationError with a diagnostic that
// lists the offending triangles.
void validate_mesh(const TriangleMesh& mesh);

// Field that is 1 at vertex i and 0 elsewhere.
ScalarField indicator(const TriangleMesh& mesh, int i);

bool all_finite(const ScalarField& f);

}  // namespace spectral
