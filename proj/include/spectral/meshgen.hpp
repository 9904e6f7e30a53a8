#pragma once

#include <cstdint>
#include <vector>

#include "spectral/mesh.hpp"

namespace spectral {

// Canonical unit-area right triangle in the z=0 plane.
TriangleMesh make_single_triangle();

// Regular icosahedron inscribed in the unit sphere, vertex 0 at the north
// pole (the seed vertex of the radial-profile tests).
TriangleMesh make_icosahedron();

// Icosahedron refined `subdivisions` times by edge midpoint splitting, with
// vertices projected back onto the unit sphere. n = 10*4^s + 2.
TriangleMesh make_icosphere(int subdivisions);

// Latitude/longitude sphere triangulation: 2 poles + (n_lat-1) rings of
// n_lon vertices; vertex 0 at the north pole.
TriangleMesh make_uv_sphere(int n_lat, int n_lon);

// Class-I geodesic sphere: each icosahedron face triangulated at the given
// frequency and projected to the unit sphere. n = 10*frequency^2 + 2.
TriangleMesh make_geodesic_sphere(int frequency);

// Geodesic sphere warped by a smooth radial bump field (a deterministic
// "blob"); triangles stay non-obtuse for moderate amplitudes.
TriangleMesh make_blob(int resolution, double amplitude = 0.15);

struct HoleResult {
    TriangleMesh mesh;
    std::vector<int> old_to_new;  // -1 for removed vertices
    double removed_area = 0.0;
};

// Remove every triangle whose centroid lies within `radius` (Euclidean) of
// vertex `center`; unreferenced vertices are dropped and the index map kept.
HoleResult punch_hole(const TriangleMesh& mesh, int center, double radius);

// Each vertex displaced by a uniform random offset of magnitude up to
// relative_amplitude * mean edge length. Deterministic in `seed`.
TriangleMesh jitter_vertices(const TriangleMesh& mesh, double relative_amplitude,
                             std::uint64_t seed);

}  // namespace spectral
