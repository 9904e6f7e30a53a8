#include "spectral/mesh_io.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "spectral/error.hpp"

namespace spectral {

namespace {

std::string lower_ext(const std::string& path) {
    const auto pos = path.rfind('.');
    if (pos == std::string::npos) return "";
    std::string ext = path.substr(pos + 1);
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext;
}

// Next non-empty, non-comment line of an OFF file.
bool next_off_line(std::istream& in, std::string& line) {
    while (std::getline(in, line)) {
        const auto pos = line.find_first_not_of(" \t\r");
        if (pos == std::string::npos) continue;
        if (line[pos] == '#') continue;
        return true;
    }
    return false;
}

TriangleMesh parse_off(std::istream& in, const std::string& path) {
    std::string line;
    if (!next_off_line(in, line)) throw ParseError(path + ": empty OFF file");
    {
        std::istringstream hs(line);
        std::string magic;
        hs >> magic;
        if (magic != "OFF") throw ParseError(path + ": missing OFF header");
    }
    if (!next_off_line(in, line)) throw ParseError(path + ": missing OFF counts");
    long nv = 0, nf = 0, ne = 0;
    {
        std::istringstream cs(line);
        if (!(cs >> nv >> nf >> ne)) throw ParseError(path + ": malformed OFF counts");
    }
    if (nv < 0 || nf < 0) throw ParseError(path + ": negative OFF counts");

    TriangleMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        if (!next_off_line(in, line)) throw ParseError(path + ": truncated vertex list");
        std::istringstream vs(line);
        Vec3 v;
        if (!(vs >> v[0] >> v[1] >> v[2]))
            throw ParseError(path + ": malformed vertex record");
        mesh.vertices.push_back(v);
    }
    mesh.triangles.reserve(static_cast<std::size_t>(nf));
    for (long i = 0; i < nf; ++i) {
        if (!next_off_line(in, line)) throw ParseError(path + ": truncated face list");
        std::istringstream fs(line);
        int k = 0;
        if (!(fs >> k)) throw ParseError(path + ": malformed face record");
        if (k != 3) throw ParseError(path + ": only triangular faces are supported");
        std::array<int, 3> tri;
        if (!(fs >> tri[0] >> tri[1] >> tri[2]))
            throw ParseError(path + ": malformed face record");
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

TriangleMesh parse_obj(std::istream& in, const std::string& path) {
    TriangleMesh mesh;
    std::string line;
    auto parse_index = [&](const std::string& tok) {
        // "i", "i/t", "i/t/n", "i//n"
        const auto slash = tok.find('/');
        const std::string head = slash == std::string::npos ? tok : tok.substr(0, slash);
        long idx = 0;
        try {
            idx = std::stol(head);
        } catch (...) {
            throw ParseError(path + ": malformed face index '" + tok + "'");
        }
        if (idx < 0) idx = static_cast<long>(mesh.vertices.size()) + idx + 1;
        return static_cast<int>(idx - 1);  // OBJ is 1-based
    };
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag)) continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v[0] >> v[1] >> v[2]))
                throw ParseError(path + ": malformed vertex record");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string tok;
            while (ls >> tok) idx.push_back(parse_index(tok));
            if (idx.size() != 3)
                throw ParseError(path + ": only triangular faces are supported");
            mesh.triangles.push_back({idx[0], idx[1], idx[2]});
        }
    }
    return mesh;
}

TriangleMesh parse_ply(std::istream& in, const std::string& path) {
    std::string line;
    if (!std::getline(in, line) || line.substr(0, 3) != "ply")
        throw ParseError(path + ": missing ply header");
    long nv = -1, nf = -1;
    bool ascii = false;
    std::string element;
    // per-vertex property names, in declaration order
    std::vector<std::string> vprops;
    while (std::getline(in, line)) {
        std::istringstream hs(line);
        std::string tag;
        hs >> tag;
        if (tag == "format") {
            std::string kind;
            hs >> kind;
            ascii = kind == "ascii";
        } else if (tag == "element") {
            std::string name;
            long count = 0;
            hs >> name >> count;
            element = name;
            if (name == "vertex") nv = count;
            if (name == "face") nf = count;
        } else if (tag == "property" && element == "vertex") {
            std::string type, name;
            hs >> type;
            if (type == "list") throw ParseError(path + ": list property on vertices");
            hs >> name;
            vprops.push_back(name);
        } else if (tag == "end_header") {
            break;
        }
    }
    if (!ascii) throw ParseError(path + ": only ASCII PLY is supported");
    if (nv < 0 || nf < 0) throw ParseError(path + ": missing vertex/face elements");
    int ix = -1, iy = -1, iz = -1;
    for (std::size_t i = 0; i < vprops.size(); ++i) {
        if (vprops[i] == "x") ix = static_cast<int>(i);
        if (vprops[i] == "y") iy = static_cast<int>(i);
        if (vprops[i] == "z") iz = static_cast<int>(i);
    }
    if (ix < 0 || iy < 0 || iz < 0) throw ParseError(path + ": missing x/y/z properties");

    TriangleMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        if (!std::getline(in, line)) throw ParseError(path + ": truncated vertex list");
        std::istringstream vs(line);
        std::vector<double> vals(vprops.size());
        for (double& v : vals)
            if (!(vs >> v)) throw ParseError(path + ": malformed vertex record");
        mesh.vertices.push_back({vals[ix], vals[iy], vals[iz]});
    }
    for (long i = 0; i < nf; ++i) {
        if (!std::getline(in, line)) throw ParseError(path + ": truncated face list");
        std::istringstream fs(line);
        int k = 0;
        if (!(fs >> k)) throw ParseError(path + ": malformed face record");
        if (k != 3) throw ParseError(path + ": only triangular faces are supported");
        std::array<int, 3> tri;
        if (!(fs >> tri[0] >> tri[1] >> tri[2]))
            throw ParseError(path + ": malformed face record");
        mesh.triangles.push_back(tri);
    }
    return mesh;
}

}  // namespace

TriangleMesh load_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open mesh file: " + path);
    const std::string ext = lower_ext(path);
    TriangleMesh mesh;
    if (ext == "off")
        mesh = parse_off(in, path);
    else if (ext == "obj")
        mesh = parse_obj(in, path);
    else if (ext == "ply")
        mesh = parse_ply(in, path);
    else
        throw InputError("unsupported mesh extension ." + ext + " (expected .off/.obj/.ply): " +
                         path);
    validate_mesh(mesh);
    return mesh;
}

void save_mesh_off(const TriangleMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot write mesh file: " + path);
    out << "OFF\n" << mesh.num_vertices() << " " << mesh.num_triangles() << " 0\n";
    char buf[128];
    for (const auto& v : mesh.vertices) {
        std::snprintf(buf, sizeof(buf), "%.17g %.17g %.17g\n", v[0], v[1], v[2]);
        out << buf;
    }
    for (const auto& t : mesh.triangles) out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    if (!out) throw InputError("I/O failure writing " + path);
}

void export_field(const TriangleMesh& mesh, const ScalarField& field, const std::string& path,
                  FieldFormat format) {
    if (static_cast<int>(field.size()) != mesh.num_vertices())
        throw ValidationError("export_field: field length does not match vertex count");
    std::ofstream out(path);
    if (!out) throw InputError("cannot write field file: " + path);
    char buf[64];
    if (format == FieldFormat::csv) {
        for (std::size_t i = 0; i < field.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%zu,%.17g\n", i, field[i]);
            out << buf;
        }
    } else {
        out << "ply\nformat ascii 1.0\n";
        out << "element vertex " << mesh.num_vertices() << "\n";
        out << "property float x\nproperty float y\nproperty float z\n";
        out << "property float quality\n";
        out << "element face " << mesh.num_triangles() << "\n";
        out << "property list uchar int vertex_indices\nend_header\n";
        for (int i = 0; i < mesh.num_vertices(); ++i) {
            const auto& v = mesh.vertices[i];
            std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %.9g\n", v[0], v[1], v[2], field[i]);
            out << buf;
        }
        for (const auto& t : mesh.triangles)
            out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
    }
    if (!out) throw InputError("I/O failure writing " + path);
}

ScalarField read_csv_field(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open field file: " + path);
    ScalarField f;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError(path + ": malformed CSV row");
        f.push_back(std::stod(line.substr(comma + 1)));
    }
    return f;
}

ScalarField read_ply_quality(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open field file: " + path);
    std::string line;
    long nv = -1;
    int qcol = -1, ncols = 0;
    std::string element;
    while (std::getline(in, line)) {
        std::istringstream hs(line);
        std::string tag;
        hs >> tag;
        if (tag == "element") {
            std::string name;
            long count;
            hs >> name >> count;
            element = name;
            if (name == "vertex") nv = count;
        } else if (tag == "property" && element == "vertex") {
            std::string type, name;
            hs >> type >> name;
            if (name == "quality") qcol = ncols;
            ++ncols;
        } else if (tag == "end_header") {
            break;
        }
    }
    if (nv < 0 || qcol < 0) throw ParseError(path + ": no per-vertex quality property");
    ScalarField f;
    f.reserve(static_cast<std::size_t>(nv));
    for (long i = 0; i < nv; ++i) {
        if (!std::getline(in, line)) throw ParseError(path + ": truncated vertex list");
        std::istringstream vs(line);
        double v = 0.0;
        for (int c = 0; c <= qcol; ++c)
            if (!(vs >> v)) throw ParseError(path + ": malformed vertex record");
        f.push_back(v);
    }
    return f;
}

}  // namespace spectral
