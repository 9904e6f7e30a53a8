#pragma once

#include <string>

#include "spectral/mesh.hpp"

namespace spectral {

enum class FieldFormat { ply_scalar, csv };

// ASCII OFF / OBJ (v and f records) / PLY. The mesh is validated before it
// is returned.
TriangleMesh load_mesh(const std::string& path);

void save_mesh_off(const TriangleMesh& mesh, const std::string& path);

// PLY: per-vertex "property float quality". CSV: one "index,value" row per
// vertex, '.' decimal separator, '\n' line endings.
void export_field(const TriangleMesh& mesh, const ScalarField& field, const std::string& path,
                  FieldFormat format);

ScalarField read_csv_field(const std::string& path);
ScalarField read_ply_quality(const std::string& path);

}  // namespace spectral
