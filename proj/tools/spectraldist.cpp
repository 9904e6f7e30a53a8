// Command-line surface: distance fields, kernel columns, backend comparison,
// and scaling benchmarks, with JSON run reports.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "spectral/error.hpp"
#include "spectral/filters.hpp"
#include "spectral/laplacian.hpp"
#include "spectral/mesh_io.hpp"
#include "spectral/meshgen.hpp"
#include "spectral/spectrum.hpp"
#include "spectral/spectrum_free.hpp"

using nlohmann::json;

namespace {

struct RunConfig {
    std::vector<std::string> meshes;
    std::string filter_name = "commute-time";
    double t = 0.1;
    double p = 1.0;
    std::vector<int> degree{5, 5};
    int degree_l() const { return degree[0]; }
    int degree_r() const { return degree[1]; }
    std::string backend = "spectrum-free";
    int seed = 0;
    std::string out_path;
    std::string out_format = "csv";
    std::string report_path;
    double tol = 1e-10;
};

double now_seconds() {
    using clock = std::chrono::steady_clock;
    static const auto t0 = clock::now();
    return std::chrono::duration<double>(clock::now() - t0).count();
}

// "truncated:50" -> 50; plain names -> nullopt
std::optional<int> truncated_k(const std::string& backend) {
    if (backend.rfind("truncated", 0) != 0) return std::nullopt;
    const auto colon = backend.find(':');
    if (colon == std::string::npos) return 100;
    return std::stoi(backend.substr(colon + 1));
}

void write_report(const RunConfig& cfg, const json& body) {
    if (cfg.report_path.empty()) return;
    std::ofstream out(cfg.report_path);
    if (!out) throw spectral::InputError("cannot write report: " + cfg.report_path);
    out << body.dump(2) << "\n";
}

void write_field(const RunConfig& cfg, const spectral::TriangleMesh& mesh,
                 const spectral::ScalarField& field) {
    if (cfg.out_path.empty()) return;
    const auto fmt = cfg.out_format == "ply" ? spectral::FieldFormat::ply_scalar
                                             : spectral::FieldFormat::csv;
    spectral::export_field(mesh, field, cfg.out_path, fmt);
}

json base_report(const RunConfig& cfg, const std::string& command,
                 const spectral::TriangleMesh& mesh, const spectral::LaplacianPair& pair) {
    json rep;
    rep["command"] = command;
    rep["mesh"] = cfg.meshes.front();
    rep["n_vertices"] = mesh.num_vertices();
    rep["n_triangles"] = mesh.num_triangles();
    rep["filter"] = {{"kind", cfg.filter_name}, {"t", cfg.t}, {"p", cfg.p}};
    rep["degree"] = {cfg.degree_l(), cfg.degree_r()};
    rep["backend"] = cfg.backend;
    rep["seed"] = cfg.seed;
    rep["lambda_max_bound"] = spectral::lambda_max_bound(pair);
    rep["lambda_max_estimate"] = spectral::lambda_max_estimate(pair).value;
    if (const char* threads = std::getenv("SPECTRAL_DIST_THREADS"))
        rep["threads"] = std::atoi(threads);
    else
        rep["threads"] = 1;
    return rep;
}

spectral::Spectrum truncated_spectrum(const spectral::LaplacianPair& pair, int k) {
    return spectral::eigendecompose(pair, std::min(k, pair.stiffness.dim()));
}

int cmd_distance(const RunConfig& cfg) {
    const double t0 = now_seconds();
    const spectral::TriangleMesh mesh = spectral::load_mesh(cfg.meshes.front());
    if (cfg.seed < 0 || cfg.seed >= mesh.num_vertices())
        throw spectral::InputError("seed vertex out of range");
    const spectral::LaplacianPair pair = spectral::build_laplacian(mesh);
    const spectral::Filter filter = spectral::Filter::parse(cfg.filter_name, cfg.t, cfg.p);
    json rep = base_report(cfg, "distance", mesh, pair);

    spectral::ScalarField field;
    const auto k = truncated_k(cfg.backend);
    if (cfg.backend == "spectrum-free" || cfg.backend == "both") {
        spectral::SolveOptions opts;
        opts.tol = cfg.tol;
        spectral::SpectralEvaluator eval(pair, filter, {cfg.degree_l(), cfg.degree_r()}, opts);
        rep["sigma"] = eval.sigma();
        field = eval.distance_field(cfg.seed);
        if (cfg.backend == "both") {
            const spectral::Spectrum spec = truncated_spectrum(pair, pair.stiffness.dim());
            double disc = 0.0;
            for (int j = 0; j < mesh.num_vertices(); ++j)
                disc = std::max(disc, std::abs(field[static_cast<std::size_t>(j)] -
                                               spectral::truncated_distance(spec, pair, filter,
                                                                            cfg.seed, j)));
            rep["backend_discrepancy"] = disc;
        }
    } else if (k) {
        const spectral::Spectrum spec = truncated_spectrum(pair, *k);
        field.resize(mesh.vertices.size());
        for (int j = 0; j < mesh.num_vertices(); ++j)
            field[static_cast<std::size_t>(j)] =
                spectral::truncated_distance(spec, pair, filter, cfg.seed, j);
    } else {
        throw spectral::InputError("unknown backend: " + cfg.backend);
    }
    write_field(cfg, mesh, field);
    rep["wall_time_s"] = now_seconds() - t0;
    if (!cfg.out_path.empty()) rep["output"] = cfg.out_path;
    write_report(cfg, rep);
    return 0;
}

int cmd_kernel(const RunConfig& cfg) {
    const double t0 = now_seconds();
    const spectral::TriangleMesh mesh = spectral::load_mesh(cfg.meshes.front());
    if (cfg.seed < 0 || cfg.seed >= mesh.num_vertices())
        throw spectral::InputError("seed vertex out of range");
    const spectral::LaplacianPair pair = spectral::build_laplacian(mesh);
    const spectral::Filter filter = spectral::Filter::parse(cfg.filter_name, cfg.t, cfg.p);
    json rep = base_report(cfg, "kernel", mesh, pair);

    spectral::ScalarField field;
    const auto k = truncated_k(cfg.backend);
    if (cfg.backend == "spectrum-free" || cfg.backend == "both") {
        spectral::SolveOptions opts;
        opts.tol = cfg.tol;
        spectral::SpectralEvaluator eval(pair, filter, {cfg.degree_l(), cfg.degree_r()}, opts);
        rep["sigma"] = eval.sigma();
        field = eval.kernel_column(cfg.seed);
        if (cfg.backend == "both") {
            const spectral::Spectrum spec = truncated_spectrum(pair, pair.stiffness.dim());
            const spectral::ScalarField ref =
                spectral::truncated_kernel_column(spec, pair, filter, cfg.seed);
            double disc = 0.0;
            for (std::size_t j = 0; j < field.size(); ++j)
                disc = std::max(disc, std::abs(field[j] - ref[j]));
            rep["backend_discrepancy"] = disc;
        }
    } else if (k) {
        const spectral::Spectrum spec = truncated_spectrum(pair, *k);
        field = spectral::truncated_kernel_column(spec, pair, filter, cfg.seed);
    } else {
        throw spectral::InputError("unknown backend: " + cfg.backend);
    }
    double mn = field.empty() ? 0.0 : field.front();
    for (double v : field) mn = std::min(mn, v);
    rep["min_value"] = mn;
    write_field(cfg, mesh, field);
    rep["wall_time_s"] = now_seconds() - t0;
    if (!cfg.out_path.empty()) rep["output"] = cfg.out_path;
    write_report(cfg, rep);
    return 0;
}

int cmd_bench(const RunConfig& cfg) {
    const spectral::Filter filter = spectral::Filter::parse(cfg.filter_name, cfg.t, cfg.p);
    json rep;
    rep["command"] = "bench";
    rep["backend"] = cfg.backend;
    rep["filter"] = {{"kind", cfg.filter_name}, {"t", cfg.t}, {"p", cfg.p}};
    json table = json::array();
    std::vector<double> logn, logt;
    const auto k = truncated_k(cfg.backend);
    for (const std::string& path : cfg.meshes) {
        const spectral::TriangleMesh mesh = spectral::load_mesh(path);
        const spectral::LaplacianPair pair = spectral::build_laplacian(mesh);
        const int seed = std::min(cfg.seed, mesh.num_vertices() - 1);
        const double t0 = now_seconds();
        if (k) {
            const spectral::Spectrum spec = truncated_spectrum(pair, *k);
            spectral::ScalarField field(mesh.vertices.size());
            for (int j = 0; j < mesh.num_vertices(); ++j)
                field[static_cast<std::size_t>(j)] =
                    spectral::truncated_distance(spec, pair, filter, seed, j);
        } else {
            spectral::SolveOptions opts;
            opts.tol = cfg.tol;
            spectral::SpectralEvaluator eval(pair, filter, {cfg.degree_l(), cfg.degree_r()}, opts);
            eval.distance_field(seed);
        }
        const double dt = now_seconds() - t0;
        table.push_back({{"mesh", path},
                         {"n_vertices", mesh.num_vertices()},
                         {"wall_time_s", dt}});
        logn.push_back(std::log(static_cast<double>(mesh.num_vertices())));
        logt.push_back(std::log(std::max(dt, 1e-9)));
    }
    rep["runs"] = table;
    if (logn.size() >= 2) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < logn.size(); ++i) {
            mx += logn[i];
            my += logt[i];
        }
        mx /= static_cast<double>(logn.size());
        my /= static_cast<double>(logn.size());
        double sxx = 0.0, sxy = 0.0;
        for (std::size_t i = 0; i < logn.size(); ++i) {
            sxx += (logn[i] - mx) * (logn[i] - mx);
            sxy += (logn[i] - mx) * (logt[i] - my);
        }
        rep["loglog_slope"] = sxy / sxx;
    }
    write_report(cfg, rep);
    if (cfg.report_path.empty()) std::cout << rep.dump(2) << "\n";
    return 0;
}

int cmd_gen(const std::string& shape, int a, int b, const std::string& out) {
    spectral::TriangleMesh mesh;
    if (shape == "triangle")
        mesh = spectral::make_single_triangle();
    else if (shape == "icosahedron")
        mesh = spectral::make_icosahedron();
    else if (shape == "icosphere")
        mesh = spectral::make_icosphere(a);
    else if (shape == "uvsphere")
        mesh = spectral::make_uv_sphere(a, b);
    else if (shape == "blob")
        mesh = spectral::make_blob(a);
    else
        throw spectral::InputError("unknown shape: " + shape);
    spectral::save_mesh_off(mesh, out);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Spectral kernel and distance computation on triangle meshes"};
    app.require_subcommand(1);
    RunConfig cfg;

    auto add_common = [&](CLI::App* sub, bool multi_mesh) {
        if (multi_mesh)
            sub->add_option("--mesh", cfg.meshes, "input mesh path(s)")->required();
        else
            sub->add_option("--mesh", cfg.meshes, "input mesh path")->required()
                ->expected(1);
        sub->add_option("--filter", cfg.filter_name,
                        "commute-time|biharmonic|power|diffusion|log-composite");
        sub->add_option("--t", cfg.t, "diffusion scale");
        sub->add_option("--p", cfg.p, "power exponent");
        sub->add_option("--degree", cfg.degree, "rational degrees l r")->expected(2);
        sub->add_option("--backend", cfg.backend, "spectrum-free|truncated:k|both");
        sub->add_option("--seed", cfg.seed, "seed vertex index");
        sub->add_option("--out", cfg.out_path, "output field path");
        sub->add_option("--format", cfg.out_format, "csv|ply")
            ->check(CLI::IsMember({"csv", "ply"}));
        sub->add_option("--report", cfg.report_path, "JSON report path");
        sub->add_option("--tol", cfg.tol, "solver tolerance");
    };

    CLI::App* dist = app.add_subcommand("distance", "one-to-all spectral distance field");
    add_common(dist, false);
    CLI::App* kern = app.add_subcommand("kernel", "kernel column at a seed vertex");
    add_common(kern, false);
    CLI::App* bench = app.add_subcommand("bench", "wall-time scaling over a mesh series");
    add_common(bench, true);

    std::string gen_shape = "icosahedron", gen_out;
    int gen_a = 3, gen_b = 32;
    CLI::App* gen = app.add_subcommand("gen", "write a synthetic golden mesh");
    gen->add_option("--shape", gen_shape, "triangle|icosahedron|icosphere|uvsphere|blob");
    gen->add_option("--a", gen_a, "subdivisions / latitude count");
    gen->add_option("--b", gen_b, "longitude count");
    gen->add_option("--out", gen_out, "output OFF path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dist->parsed()) return cmd_distance(cfg);
        if (kern->parsed()) return cmd_kernel(cfg);
        if (bench->parsed()) return cmd_bench(cfg);
        if (gen->parsed()) return cmd_gen(gen_shape, gen_a, gen_b, gen_out);
    } catch (const spectral::InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const spectral::NumericError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
