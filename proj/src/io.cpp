#include "idemkit/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

#include "idemkit/errors.hpp"

namespace idemkit::io {

double jnum(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", x);
    return std::strtod(buf, nullptr);
}

namespace {

json complex_to_json(const Complex& z) { return json::array({jnum(z.real()), jnum(z.imag())}); }

Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw errors::BadParam("io: complex entry must be [re,im]");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

} // namespace

json matrix_to_json(const Matrix& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(complex_to_json(M(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw errors::BadParam("io: matrix must be a non-empty array");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j[0].size());
    Matrix M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        if (static_cast<Eigen::Index>(j[i].size()) != cols)
            throw errors::BadParam("io: ragged matrix rows");
        for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = complex_from_json(j[i][k]);
    }
    if (!linalg::all_finite(M)) throw errors::BadParam("io: non-finite matrix entries");
    return M;
}

json to_json(const idem::Idempotent& Q) {
    return json{{"schema", 1},
                {"kind", "idempotent"},
                {"matrix", matrix_to_json(Q.Q)},
                {"defect", jnum(Q.defect)},
                {"norm", jnum(Q.norm)},
                {"projection", Q.projection}};
}

idem::Idempotent idempotent_from_json(const json& j, double idem_tol) {
    const json& m = j.contains("matrix") ? j.at("matrix") : j;
    return idem::validate(matrix_from_json(m), idem_tol);
}

json to_json(const grid::GridOperator& F) {
    json mesh = json::array();
    for (double t : F.mesh) mesh.push_back(jnum(t));
    json blocks = json::array();
    for (const auto& f : F.blocks) blocks.push_back(matrix_to_json(Matrix(f)));
    return json{{"schema", 1},       {"kind", "grid"},
                {"d", jnum(F.d)},    {"mesh", std::move(mesh)},
                {"scalar_slot", complex_to_json(F.scalar_slot)},
                {"blocks", std::move(blocks)},
                {"continuum", F.continuum}};
}

grid::GridOperator grid_from_json(const json& j) {
    grid::GridOperator F;
    F.d = j.at("d").get<double>();
    F.mesh = j.at("mesh").get<std::vector<double>>();
    F.scalar_slot = complex_from_json(j.at("scalar_slot"));
    F.continuum = j.value("continuum", true);
    for (const auto& b : j.at("blocks")) {
        Matrix M = matrix_from_json(b);
        if (M.rows() != 2 || M.cols() != 2) throw errors::BadParam("io: grid blocks must be 2x2");
        F.blocks.push_back(Matrix2(M));
    }
    if (F.blocks.size() != F.mesh.size())
        throw errors::BadParam("io: mesh/blocks size mismatch");
    return F;
}

json to_json(const canon::CanonicalForm& cf) {
    return json{{"schema", 1},
                {"kind", "canonical"},
                {"V", matrix_to_json(cf.V)},
                {"dims", {{"h1", cf.h1}, {"h4", cf.h4}, {"h5", cf.h5}}},
                {"D", matrix_to_json(cf.D)}};
}

canon::CanonicalForm canonical_from_json(const json& j) {
    canon::CanonicalForm cf;
    cf.V = matrix_from_json(j.at("V"));
    cf.h1 = j.at("dims").at("h1").get<Eigen::Index>();
    cf.h4 = j.at("dims").at("h4").get<Eigen::Index>();
    cf.h5 = j.at("dims").at("h5").get<Eigen::Index>();
    cf.D = matrix_from_json(j.at("D"));
    return cf;
}

json to_json(const dist::DistanceReport& r) {
    return json{{"min_dist", jnum(r.min_dist)},
                {"max_dist", jnum(r.max_dist)},
                {"lambda", jnum(r.lambda)},
                {"mu", jnum(r.mu)},
                {"witness_min", matrix_to_json(r.witness_min)},
                {"witness_max", matrix_to_json(r.witness_max)}};
}

json to_json(const nr::EllipseParams& e) {
    return json{{"x0", jnum(e.x0)},
                {"y0", jnum(e.y0)},
                {"a", jnum(e.a)},
                {"b", jnum(e.b)},
                {"degenerate", e.degenerate}};
}

json to_json(const nr::SupportProfile& p) {
    json angles = json::array(), values = json::array(), boundary = json::array();
    for (double a : p.angles) angles.push_back(jnum(a));
    for (double v : p.values) values.push_back(jnum(v));
    for (const auto& z : p.boundary) boundary.push_back(complex_to_json(z));
    return json{{"angles", std::move(angles)},
                {"values", std::move(values)},
                {"boundary", std::move(boundary)}};
}

json to_json(const grid::UniversalReport& r) {
    const char* verdict = r.verdict == grid::Universality::UniversalWithinMesh
                              ? "universal-within-mesh"
                              : (r.verdict == grid::Universality::NotUniversal ? "not-universal"
                                                                               : "inconclusive");
    json spectrum = json::array();
    for (double v : r.spectrum) spectrum.push_back(jnum(v));
    return json{{"verdict", verdict},
                {"d", jnum(r.d)},
                {"max_gap", jnum(r.max_gap)},
                {"mesh_h", jnum(r.mesh_h)},
                {"evidence", r.evidence},
                {"spectrum", std::move(spectrum)}};
}

json to_json(const nr::SrDiagnostics& d) {
    return json{{"d", jnum(d.d)},
                {"alpha1", jnum(d.alpha1)},
                {"alpha2", jnum(d.alpha2)},
                {"regime_a_err", jnum(d.regime_a_err)},
                {"regime_b_err", jnum(d.regime_b_err)},
                {"grid_vs_exact", jnum(d.grid_vs_exact)},
                {"mesh_h", jnum(d.mesh_h)},
                {"fit", to_json(d.fit)},
                {"fit_residual", jnum(d.fit_residual)},
                {"nonellipse_floor", jnum(d.nonellipse_floor)},
                {"floor_exceeded", d.floor_exceeded},
                {"s", jnum(d.s)},
                {"s_gap", jnum(d.s_gap)},
                {"s_prime", jnum(d.s_prime)},
                {"h_pi", jnum(d.h_pi)},
                {"h_pi_err", jnum(d.h_pi_err)}};
}

void write_csv_profile(std::ostream& os, const nr::SupportProfile& p) {
    os << "alpha,h,re,im\n";
    char buf[160];
    for (std::size_t i = 0; i < p.angles.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.15g\n", p.angles[i], p.values[i],
                      p.boundary[i].real(), p.boundary[i].imag());
        os << buf;
    }
}

json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw errors::BadParam("io: cannot open " + path);
    json j;
    in >> j;
    return j;
}

void save_json_file(const std::string& path, const json& j) {
    std::ofstream out(path);
    if (!out) throw errors::BadParam("io: cannot write " + path);
    out << j.dump(2) << "\n";
}

} // namespace idemkit::io
