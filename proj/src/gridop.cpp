#include "idemkit/gridop.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "idemkit/errors.hpp"
#include "idemkit/parallel.hpp"

namespace idemkit::grid {

namespace {

double ell(double t) { return std::sqrt(std::max(t * (t - 1.0), 0.0)); }

double block_norm(const Matrix2& M) {
    Eigen::Matrix2cd G = M.adjoint() * M;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(G);
    double top = es.eigenvalues()(1);
    return top > 0 ? std::sqrt(top) : 0.0;
}

void check_params(double r, int N) {
    if (!(r > 1.0)) throw errors::BadParam("grid: r > 1 required");
    if (N < 2) throw errors::BadParam("grid: mesh size N >= 2 required");
}

} // namespace

double GridOperator::mesh_h() const {
    double gap = mesh.empty() ? d - 1.0 : mesh.front() - 1.0;
    for (std::size_t i = 1; i < mesh.size(); ++i) gap = std::max(gap, mesh[i] - mesh[i - 1]);
    if (!mesh.empty()) gap = std::max(gap, d - mesh.back());
    return gap;
}

double GridOperator::grid_norm() const {
    double n = std::abs(scalar_slot);
    for (const auto& f : blocks) n = std::max(n, block_norm(f));
    return n;
}

std::vector<double> make_mesh(double lo, double hi, int N, MeshKind kind) {
    std::vector<double> t(static_cast<std::size_t>(N) + 1);
    for (int i = 0; i <= N; ++i) {
        double u = static_cast<double>(i) / N;
        if (kind == MeshKind::Chebyshev) u = 0.5 * (1.0 - std::cos(M_PI * u));
        t[static_cast<std::size_t>(i)] = lo + (hi - lo) * u;
    }
    t.front() = lo;
    t.back() = hi;
    return t;
}

namespace {

template <class BlockFn>
GridOperator build(double r, int N, MeshKind kind, Complex scalar, BlockFn&& fn, bool continuum) {
    check_params(r, N);
    GridOperator g;
    g.d = 0.5 * (r + 1.0);
    g.mesh = make_mesh(1.0, g.d, N, kind);
    g.scalar_slot = scalar;
    g.continuum = continuum;
    g.blocks.resize(g.mesh.size());
    const auto& mesh = g.mesh;
    auto& blocks = g.blocks;
    par::parallel_for(static_cast<std::ptrdiff_t>(mesh.size()),
                      [&](std::ptrdiff_t i) { blocks[i] = fn(mesh[i]); });
    return g;
}

} // namespace

GridOperator make_qr(double r, int N, MeshKind kind) {
    return build(r, N, kind, Complex(1, 0),
                 [](double t) {
                     Matrix2 f;
                     f << t, -ell(t), ell(t), 1.0 - t;
                     return f;
                 },
                 true);
}

GridOperator make_sr(double r, int N, MeshKind kind) {
    const double d = 0.5 * (r + 1.0);
    return build(r, N, kind, Complex(2.0 * (1.0 - d), 0),
                 [d](double t) {
                     Matrix2 f;
                     f << t - (2.0 * d - 1.0), std::sqrt(std::max((t - 1.0) * (d - t), 0.0)), 0.0,
                         (2.0 * d - 1.0) * (t - 1.0);
                     return f;
                 },
                 true);
}

GridOperator make_qr_alt(double r, int N, MeshKind kind) {
    const double d = 0.5 * (r + 1.0);
    return build(r, N, kind, Complex(1, 0),
                 [d](double t) {
                     const double v = (t <= 0.5 * (d + 1.0)) ? 1.0 : 2.0 * t - d;
                     Matrix2 f;
                     f << v, -ell(v), ell(v), 1.0 - v;
                     return f;
                 },
                 true);
}

GridOperator make_tq_grid(double r, int N, MeshKind kind) {
    return build(r, N, kind, Complex(2, 0),
                 [](double t) {
                     Matrix2 f;
                     f << t + 1.0, -ell(t), 0.0, 0.0;
                     return f;
                 },
                 true);
}

Matrix assemble_dense(const GridOperator& F) {
    const Eigen::Index n = 2 + 2 * static_cast<Eigen::Index>(F.blocks.size());
    Matrix M = Matrix::Zero(n, n);
    M(0, 0) = F.scalar_slot;
    for (std::size_t i = 0; i < F.blocks.size(); ++i)
        M.block(2 + 2 * static_cast<Eigen::Index>(i), 2 + 2 * static_cast<Eigen::Index>(i), 2, 2) =
            F.blocks[i];
    return M;
}

bool in_cstar_qr(const GridOperator& F, double tol) {
    constexpr double kNodeEps = 1e-12;
    bool ok = true;
    for (std::size_t i = 0; i < F.mesh.size(); ++i) {
        if (std::abs(F.mesh[i] - 1.0) > kNodeEps) continue;
        const Matrix2& f = F.blocks[i];
        ok = ok && std::abs(f(0, 1)) <= tol && std::abs(f(1, 0)) <= tol &&
             std::abs(f(1, 1)) <= tol && std::abs(F.scalar_slot - f(0, 0)) <= tol;
    }
    return ok;
}

namespace {

std::vector<Matrix2> matched_blocks_impl(const GridOperator& F, bool parallel) {
    std::vector<Matrix2> out(F.blocks.size());
    auto body = [&](std::ptrdiff_t i) {
        idem::Idempotent q = idem::validate(Matrix(F.blocks[static_cast<std::size_t>(i)]));
        out[static_cast<std::size_t>(i)] = idem::matched_projection(q);
    };
    if (parallel)
        par::parallel_for(static_cast<std::ptrdiff_t>(F.blocks.size()), body);
    else
        par::serial_for(static_cast<std::ptrdiff_t>(F.blocks.size()), body);
    return out;
}

// Eigenvalues of the per-node criterion operator A_t = m f m + I - m for a
// 2x2 idempotent block; together with the slots' contribution {1} they sample
// sigma(A).
std::vector<double> criterion_values(const Matrix2& f, bool complemented) {
    Matrix F = complemented ? Matrix(Matrix::Identity(2, 2) - f) : Matrix(f);
    idem::Idempotent q = idem::validate(F);
    Matrix m = idem::matched_projection(q);
    Matrix A = m * F * m + Matrix::Identity(2, 2) - m;
    linalg::HermEig eg = linalg::herm_eig((A + A.adjoint()) / 2.0);
    return {eg.values(0), eg.values(1)};
}

UniversalReport gap_report(std::vector<double> spectrum, double d, double mesh_h, bool continuum) {
    UniversalReport rep;
    rep.d = d;
    rep.mesh_h = mesh_h;
    spectrum.push_back(1.0);
    std::sort(spectrum.begin(), spectrum.end());
    double gap = spectrum.front() - 1.0;
    for (std::size_t i = 1; i < spectrum.size(); ++i)
        gap = std::max(gap, spectrum[i] - spectrum[i - 1]);
    gap = std::max(gap, d - spectrum.back());
    rep.max_gap = std::max(gap, 0.0);
    rep.spectrum = std::move(spectrum);

    if (!continuum) {
        rep.verdict = Universality::NotUniversal;
        rep.evidence = "finite spectrum cannot fill an interval; largest gap " +
                       std::to_string(rep.max_gap);
        return rep;
    }
    if (rep.max_gap <= 2.5 * mesh_h) {
        rep.verdict = Universality::UniversalWithinMesh;
        rep.evidence = "sampled spectrum covers [1,d] with gap " + std::to_string(rep.max_gap);
    } else if (rep.max_gap >= std::max(10.0 * mesh_h, 0.05 * (d - 1.0))) {
        rep.verdict = Universality::NotUniversal;
        rep.evidence = "spectral hole of width " + std::to_string(rep.max_gap);
    } else {
        rep.verdict = Universality::Inconclusive;
        rep.evidence = "gap " + std::to_string(rep.max_gap) + " between mesh_h and threshold";
    }
    return rep;
}

} // namespace

std::vector<Matrix2> matched_blocks(const GridOperator& F) { return matched_blocks_impl(F, true); }

std::vector<Matrix2> matched_blocks_serial(const GridOperator& F) {
    return matched_blocks_impl(F, false);
}

UniversalReport universal_check(const GridOperator& F) {
    const double d = 0.5 * (F.grid_norm() + 1.0);
    std::vector<double> vals;
    vals.reserve(2 * F.blocks.size() + 1);
    for (const auto& f : F.blocks) {
        auto v = criterion_values(f, false);
        vals.insert(vals.end(), v.begin(), v.end());
    }
    return gap_report(std::move(vals), d, F.mesh_h(), F.continuum);
}

UniversalReport universal_check(const idem::Idempotent& Q) {
    if (Q.projection) throw errors::BadParam("universal_check: non-projection input required");
    const Matrix I = Matrix::Identity(Q.dim(), Q.dim());
    Matrix m = idem::matched_projection(Q);
    Matrix A = m * Q.Q * m + I - m;
    linalg::HermEig eg = linalg::herm_eig((A + A.adjoint()) / 2.0);
    std::vector<double> vals(eg.values.data(), eg.values.data() + eg.values.size());
    const double d = 0.5 * (Q.norm + 1.0);
    return gap_report(std::move(vals), d, 0.0, false);
}

DistinguishReport distinguish(const GridOperator& a, const GridOperator& b, double tol) {
    DistinguishReport rep;
    rep.tol = tol;
    auto count = [tol](const GridOperator& g) {
        int c = 0;
        for (const auto& f : g.blocks)
            if (std::abs(f(1, 0)) <= tol) ++c;
        return c;
    };
    rep.kernel_count_a = count(a);
    rep.kernel_count_b = count(b);
    const int n = std::min(a.nodes(), b.nodes());
    rep.distinct = std::abs(rep.kernel_count_a - rep.kernel_count_b) >= n / 4;
    return rep;
}

bool complement_check(const GridOperator& F) {
    const double d = 0.5 * (F.grid_norm() + 1.0);
    std::vector<double> va, vb;
    for (const auto& f : F.blocks) {
        auto a = criterion_values(f, false);
        auto b = criterion_values(f, true);
        va.insert(va.end(), a.begin(), a.end());
        vb.insert(vb.end(), b.begin(), b.end());
    }
    UniversalReport ra = gap_report(std::move(va), d, F.mesh_h(), F.continuum);
    UniversalReport rb = gap_report(std::move(vb), d, F.mesh_h(), F.continuum);
    return ra.verdict == rb.verdict;
}

bool complement_check(const idem::Idempotent& Q) {
    const Matrix I = Matrix::Identity(Q.dim(), Q.dim());
    UniversalReport ra = universal_check(Q);
    idem::Idempotent Qc = idem::validate(I - Q.Q);
    UniversalReport rb = universal_check(Qc);
    if (ra.verdict != rb.verdict) return false;
    // sigma(B) = sigma(A) entry-for-entry in the matrix case.
    if (ra.spectrum.size() != rb.spectrum.size()) return false;
    for (std::size_t i = 0; i < ra.spectrum.size(); ++i)
        if (std::abs(ra.spectrum[i] - rb.spectrum[i]) > 1e-8 * (1.0 + Q.norm)) return false;
    return true;
}

} // namespace idemkit::grid
