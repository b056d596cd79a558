#include "idemkit/nrange.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "idemkit/errors.hpp"
#include "idemkit/parallel.hpp"
#include "idemkit/rng.hpp"

namespace idemkit::nr {

using linalg::operator_norm;

namespace {

double ell(double t) { return std::sqrt(std::max(t * (t - 1.0), 0.0)); }

Matrix real_part_rotated(const Matrix& T, double alpha) {
    Complex phase = std::exp(Complex(0, -alpha));
    Matrix R = (phase * T + std::conj(phase) * T.adjoint()) / 2.0;
    return R;
}

// Top eigenvalue of a 2x2 Hermitian matrix, closed form.
double top_eig_2x2(const Matrix2& H) {
    const double m = 0.5 * std::real(H(0, 0) + H(1, 1));
    const double p = 0.5 * std::real(H(0, 0) - H(1, 1));
    const double q = std::abs(H(0, 1));
    return m + std::sqrt(p * p + q * q);
}

double block_support(const Matrix2& f, double alpha) {
    Complex phase = std::exp(Complex(0, -alpha));
    Matrix2 R = (phase * f + std::conj(phase) * f.adjoint()) / 2.0;
    return top_eig_2x2(R);
}

// Golden-section maximization of a smooth function on [lo, hi].
template <class F>
double golden_max(F&& f, double lo, double hi, double tol) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - gr * (b - a), d = a + gr * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - gr * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + gr * (b - a);
            fd = f(d);
        }
    }
    return std::max(fc, fd);
}

// Scan-then-refine maximization; robust against multimodality at scan scale.
template <class F>
double scan_max(F&& f, double lo, double hi, int samples, double tol) {
    double best = -std::numeric_limits<double>::infinity();
    int arg = 0;
    for (int i = 0; i <= samples; ++i) {
        const double t = lo + (hi - lo) * i / samples;
        const double v = f(t);
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    const double a = lo + (hi - lo) * std::max(arg - 1, 0) / samples;
    const double b = lo + (hi - lo) * std::min(arg + 1, samples) / samples;
    return std::max(best, golden_max(f, a, b, tol));
}

} // namespace

// ---------------------------------------------------------------- ellipses

double EllipseParams::support(double alpha) const {
    return x0 * std::cos(alpha) + y0 * std::sin(alpha) +
           std::sqrt(a * a * std::cos(alpha) * std::cos(alpha) +
                     b * b * std::sin(alpha) * std::sin(alpha));
}

Complex EllipseParams::boundary_point(double alpha) const {
    const double ca = std::cos(alpha), sa = std::sin(alpha);
    const double den = std::sqrt(a * a * ca * ca + b * b * sa * sa);
    if (den == 0.0) return Complex(x0, y0);
    return Complex(x0, y0) + Complex(a * a * ca, b * b * sa) / den;
}

double EllipseParams::quad_form(Complex z) const {
    const double dx = std::real(z) - x0;
    const double dy = std::imag(z) - y0;
    if (a == 0.0 || b == 0.0) return (dx == 0.0 && dy == 0.0) ? 0.0 : 2.0;
    return dx * dx / (a * a) + dy * dy / (b * b);
}

double FocalEllipse::semi_major() const {
    const double b = semi_minor(), c = semi_focal();
    return std::sqrt(b * b + c * c);
}

double FocalEllipse::support(double alpha) const {
    const Complex zc = center();
    const double c = semi_focal(), b = semi_minor(), a = semi_major();
    const double phi = (c > 0) ? std::arg(focus2 - focus1) : 0.0;
    const double rel = alpha - phi;
    return std::real(zc * std::exp(Complex(0, -alpha))) +
           std::sqrt(a * a * std::cos(rel) * std::cos(rel) +
                     b * b * std::sin(rel) * std::sin(rel));
}

Complex FocalEllipse::boundary_point(double alpha) const {
    const Complex zc = center();
    const double c = semi_focal(), b = semi_minor(), a = semi_major();
    const double phi = (c > 0) ? std::arg(focus2 - focus1) : 0.0;
    const double rel = alpha - phi;
    const double den =
        std::sqrt(a * a * std::cos(rel) * std::cos(rel) + b * b * std::sin(rel) * std::sin(rel));
    if (den == 0.0) return zc;
    return zc + std::exp(Complex(0, phi)) * Complex(a * a * std::cos(rel), b * b * std::sin(rel)) /
                    den;
}

bool FocalEllipse::contains(Complex z, double margin) const {
    return std::abs(z - focus1) + std::abs(z - focus2) <= 2.0 * semi_major() - margin;
}

FocalEllipse ellipse_2x2(const Matrix2& M) {
    const Complex tr = M(0, 0) + M(1, 1);
    const Complex det = M(0, 0) * M(1, 1) - M(0, 1) * M(1, 0);
    const Complex disc = std::sqrt(tr * tr - 4.0 * det);
    FocalEllipse e;
    e.focus1 = (tr - disc) / 2.0;
    e.focus2 = (tr + disc) / 2.0;
    const double gram = std::real((M.adjoint() * M).trace());
    const double rest = std::norm(e.focus1) + std::norm(e.focus2);
    e.minor_axis = std::sqrt(std::max(gram - rest, 0.0));
    return e;
}

// ------------------------------------------------------------- support

SupportPoint support_function(const Matrix& T, double alpha) {
    Matrix R = real_part_rotated(T, alpha);
    Eigen::SelfAdjointEigenSolver<Matrix> es(R);
    if (es.info() != Eigen::Success)
        throw errors::NoConvergence("support_function: eigensolver failed");
    const Eigen::Index last = es.eigenvalues().size() - 1;
    SupportPoint sp;
    sp.value = es.eigenvalues()(last);
    sp.witness = es.eigenvectors().col(last);
    sp.z = (sp.witness.adjoint() * T * sp.witness)(0, 0);
    return sp;
}

SupportPoint support_function(const GridOperator& F, double alpha) {
    const Complex phase = std::exp(Complex(0, -alpha));
    SupportPoint best;
    best.value = 0.0; // the fixed zero slot
    best.z = Complex(0, 0);
    const double sval = std::real(F.scalar_slot * phase);
    if (sval > best.value) {
        best.value = sval;
        best.z = F.scalar_slot;
    }
    for (const auto& f : F.blocks) {
        Matrix2 R = (phase * f + std::conj(phase) * f.adjoint()) / 2.0;
        Eigen::SelfAdjointEigenSolver<Matrix2> es(R);
        const double v = es.eigenvalues()(1);
        if (v > best.value) {
            best.value = v;
            Eigen::Vector2cd w = es.eigenvectors().col(1);
            best.z = (w.adjoint() * f * w)(0, 0);
            best.witness = w;
        }
    }
    return best;
}

double support_value(const Matrix& T, double alpha) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(real_part_rotated(T, alpha), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success)
        throw errors::NoConvergence("support_value: eigensolver failed");
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

double support_value(const GridOperator& F, double alpha) {
    const Complex phase = std::exp(Complex(0, -alpha));
    double h = std::max(0.0, std::real(F.scalar_slot * phase));
    for (const auto& f : F.blocks) h = std::max(h, block_support(f, alpha));
    return h;
}

namespace {

template <class Op>
std::vector<double> profile_impl(const Op& T, const std::vector<double>& angles, bool parallel) {
    std::vector<double> out(angles.size());
    auto body = [&](std::ptrdiff_t i) {
        out[static_cast<std::size_t>(i)] =
            support_value(T, angles[static_cast<std::size_t>(i)]);
    };
    if (parallel)
        par::parallel_for(static_cast<std::ptrdiff_t>(angles.size()), body);
    else
        par::serial_for(static_cast<std::ptrdiff_t>(angles.size()), body);
    return out;
}

} // namespace

std::vector<double> support_profile(const Matrix& T, const std::vector<double>& angles) {
    return profile_impl(T, angles, true);
}
std::vector<double> support_profile_serial(const Matrix& T, const std::vector<double>& angles) {
    return profile_impl(T, angles, false);
}
std::vector<double> support_profile(const GridOperator& F, const std::vector<double>& angles) {
    return profile_impl(F, angles, true);
}
std::vector<double> support_profile_serial(const GridOperator& F,
                                           const std::vector<double>& angles) {
    return profile_impl(F, angles, false);
}

namespace {

template <class Op>
SupportProfile boundary_impl(const Op& T, const std::vector<double>& angles) {
    if (angles.size() < 8) throw errors::BadParam("boundary_points: need >= 8 angles");
    SupportProfile p;
    p.angles = angles;
    p.values.resize(angles.size());
    p.boundary.resize(angles.size());
    par::parallel_for(static_cast<std::ptrdiff_t>(angles.size()), [&](std::ptrdiff_t i) {
        SupportPoint sp = support_function(T, angles[static_cast<std::size_t>(i)]);
        p.values[static_cast<std::size_t>(i)] = sp.value;
        p.boundary[static_cast<std::size_t>(i)] = sp.z;
    });
    return p;
}

} // namespace

SupportProfile boundary_points(const Matrix& T, const std::vector<double>& angles) {
    return boundary_impl(T, angles);
}
SupportProfile boundary_points(const GridOperator& F, const std::vector<double>& angles) {
    return boundary_impl(F, angles);
}

OperatorRangeResult operator_elliptical_range(const GridOperator& F,
                                              const std::vector<double>& angles) {
    OperatorRangeResult res;
    res.profile.angles = angles;
    res.profile.values.resize(angles.size());
    res.profile.boundary.resize(angles.size());

    std::vector<FocalEllipse> ellipses(F.blocks.size());
    for (std::size_t i = 0; i < F.blocks.size(); ++i) ellipses[i] = ellipse_2x2(F.blocks[i]);

    Matrix dense = grid::assemble_dense(F);
    std::vector<double> direct(angles.size());
    std::vector<double> mism(angles.size());
    par::parallel_for(static_cast<std::ptrdiff_t>(angles.size()), [&](std::ptrdiff_t idx) {
        const std::size_t i = static_cast<std::size_t>(idx);
        const double alpha = angles[i];
        double h = std::max(0.0, std::real(F.scalar_slot * std::exp(Complex(0, -alpha))));
        Complex z = std::abs(F.scalar_slot) > 0 && h > 0 ? F.scalar_slot : Complex(0, 0);
        for (const auto& e : ellipses) {
            const double he = e.support(alpha);
            if (he > h) {
                h = he;
                z = e.boundary_point(alpha);
            }
        }
        res.profile.values[i] = h;
        res.profile.boundary[i] = z;
        direct[i] = support_value(dense, alpha);
        mism[i] = std::abs(h - direct[i]);
    });
    res.max_mismatch = *std::max_element(mism.begin(), mism.end());
    return res;
}

// ------------------------------------------------------------------- T_Q

Matrix tq_operator(const Idempotent& Q) {
    if (Q.projection) throw errors::IsProjection("tq_operator: Q must be a non-projection");
    Matrix m = idem::matched_projection(Q);
    return m + m * Q.Q;
}

TqReport tq_ellipse(const Idempotent& Q) {
    TqReport rep;
    const double d = 0.5 * (Q.norm + 1.0);
    rep.d = d;
    rep.ellipse.x0 = 0.5 * (d + 1.0);
    rep.ellipse.y0 = 0.0;
    rep.ellipse.a = 0.5 * std::sqrt(2.0 * d * d + d + 1.0);
    rep.ellipse.b = 0.5 * ell(d);
    rep.ellipse.degenerate = rep.ellipse.b == 0.0;

    Matrix T = tq_operator(Q);
    rep.norm_T = operator_norm(T);
    rep.norm_err = std::abs(rep.norm_T - 2.0 * rep.ellipse.a);
    rep.radius = scan_max([&](double a) { return support_value(T, a); }, -M_PI, M_PI,
                          128, 1e-12);
    rep.radius_err = std::abs(rep.radius - (rep.ellipse.a + rep.ellipse.x0));

    // Quadratic probe over the forced eigenvalue candidates {0, 2} u (1 + sigma(A)),
    // A = m Q m + I - m. T_Q degenerates to a genuine quadratic exactly when
    // H1 = 0 and D is a scalar (every 2x2 instance).
    Matrix m = idem::matched_projection(Q);
    const Matrix I = Matrix::Identity(Q.dim(), Q.dim());
    Matrix A = m * Q.Q * m + I - m;
    linalg::HermEig eg = linalg::herm_eig((A + A.adjoint()) / 2.0);
    std::vector<double> cand = {0.0, 2.0};
    for (Eigen::Index i = 0; i < eg.values.size(); ++i) cand.push_back(1.0 + eg.values(i));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end(),
                           [](double x, double y) { return std::abs(x - y) < 1e-8; }),
               cand.end());
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < cand.size(); ++i)
        for (std::size_t j = i; j < cand.size(); ++j) {
            const double v = operator_norm((T - cand[i] * I) * (T - cand[j] * I));
            best = std::min(best, v);
        }
    rep.nonquadratic_min = best;
    rep.quadratic_degenerate = best <= 1e-6 * std::max(1.0, rep.norm_T * rep.norm_T);
    return rep;
}

// --------------------------------------------------- interior attainment

namespace {

// Unit vector in span{x, y} hitting z on the 2x2 compression, if z lies in
// its elliptical range with some margin. Grid scan plus Newton polish.
std::optional<Vector> attain_2x2(const Matrix& T, const Matrix& basis, Complex z, double tol) {
    Matrix M = basis.adjoint() * T * basis; // 2x2 compression
    FocalEllipse e = ellipse_2x2(M);
    if (!e.contains(z, 10.0 * tol)) return std::nullopt;

    auto value = [&](double u, double v) {
        Eigen::Vector2cd xi(std::cos(u), std::sin(u) * std::exp(Complex(0, v)));
        return Complex((xi.adjoint() * M * xi)(0, 0));
    };
    double bu = 0, bv = 0, bd = std::numeric_limits<double>::infinity();
    constexpr int kGrid = 48;
    for (int i = 0; i <= kGrid; ++i)
        for (int j = 0; j < kGrid; ++j) {
            const double u = M_PI_2 * i / kGrid;
            const double v = 2.0 * M_PI * j / kGrid;
            const double dist = std::abs(value(u, v) - z);
            if (dist < bd) {
                bd = dist;
                bu = u;
                bv = v;
            }
        }
    // Newton on (u, v) with finite differences.
    for (int it = 0; it < 80 && bd > tol / 4; ++it) {
        const double h = 1e-7;
        const Complex f0 = value(bu, bv) - z;
        const Complex fu = (value(bu + h, bv) - value(bu - h, bv)) / (2 * h);
        const Complex fv = (value(bu, bv + h) - value(bu, bv - h)) / (2 * h);
        Eigen::Matrix2d J;
        J << std::real(fu), std::real(fv), std::imag(fu), std::imag(fv);
        Eigen::Vector2d rhs(-std::real(f0), -std::imag(f0));
        if (std::abs(J.determinant()) < 1e-14) break;
        Eigen::Vector2d step = J.colPivHouseholderQr().solve(rhs);
        double damp = 1.0;
        for (int back = 0; back < 30; ++back) {
            const double nu = bu + damp * step(0), nv = bv + damp * step(1);
            const double nd = std::abs(value(nu, nv) - z);
            if (nd < bd) {
                bu = nu;
                bv = nv;
                bd = nd;
                break;
            }
            damp /= 2;
        }
    }
    if (bd > tol / 2) return std::nullopt;
    Eigen::Vector2cd xi(std::cos(bu), std::sin(bu) * std::exp(Complex(0, bv)));
    Vector x = basis * xi;
    return x / x.norm();
}

Matrix orthonormal_pair(const Vector& x, const Vector& y) {
    Matrix basis(x.size(), 2);
    basis.col(0) = x / x.norm();
    Vector r = y - basis.col(0) * (basis.col(0).adjoint() * y)(0, 0);
    if (r.norm() < 1e-12) return basis.leftCols(1);
    basis.col(1) = r / r.norm();
    return basis;
}

} // namespace

Vector attain_interior(const Matrix& T, Complex z, double tol, std::uint64_t seed) {
    const Eigen::Index n = T.rows();
    auto gen = rng::engine(seed);
    for (int restart = 0; restart < 4; ++restart) {
        Vector x = restart == 0 ? Vector(Vector::Ones(n) / std::sqrt(double(n)))
                                : rng::random_unit_vector(n, gen);
        Complex w = (x.adjoint() * T * x)(0, 0);
        for (int iter = 0; iter < 60; ++iter) {
            if (std::abs(w - z) <= tol) return x;
            const double beta = std::arg(z - w);
            SupportPoint sp = support_function(T, beta);
            // 2x2 compression of the current vector with the support witness.
            Matrix basis = orthonormal_pair(x, sp.witness);
            if (basis.cols() == 2) {
                auto hit = attain_2x2(T, basis, z, tol);
                if (hit) return *hit;
            }
            // March along the path toward the witness until the value lands on
            // the line through z orthogonal to beta.
            Complex phase = (x.adjoint() * sp.witness)(0, 0);
            Vector y = sp.witness;
            if (std::abs(phase) > 1e-12) y *= phase / std::abs(phase); // keep path nonvanishing
            const double target = std::real(z * std::exp(Complex(0, -beta)));
            double lo = 0.0, hi = 1.0;
            auto at = [&](double t) {
                Vector c = (1.0 - t) * x + t * y;
                c /= c.norm();
                return c;
            };
            auto re_dir = [&](const Vector& c) {
                return std::real(Complex((c.adjoint() * T * c)(0, 0)) * std::exp(Complex(0, -beta)));
            };
            for (int b = 0; b < 60; ++b) {
                const double mid = (lo + hi) / 2;
                if (re_dir(at(mid)) < target)
                    lo = mid;
                else
                    hi = mid;
            }
            x = at(hi);
            w = (x.adjoint() * T * x)(0, 0);
        }
    }
    throw errors::NoConvergence("attain_interior: target not reached");
}

// ------------------------------------------------------------ closedness

ClosednessReport closedness(const Idempotent& Q) {
    ClosednessReport rep;
    TqReport tq = tq_ellipse(Q);
    rep.ellipse = tq.ellipse;
    rep.closed = true;
    Matrix T = tq_operator(Q);
    SupportPoint sp = support_function(T, 0.0);
    rep.witness = sp.witness;
    rep.boundary_gap = std::abs(tq.ellipse.support(0.0) - std::real(sp.z));
    return rep;
}

double compressed_support(const GridOperator& F, double alpha) {
    const Complex phase = std::exp(Complex(0, -alpha));
    double h = std::max(0.0, std::real(F.scalar_slot * phase));
    for (std::size_t i = 0; i + 1 < F.blocks.size(); ++i) {
        Matrix2 avg = (F.blocks[i] + F.blocks[i + 1]) / 2.0;
        Matrix2 R = (phase * avg + std::conj(phase) * avg.adjoint()) / 2.0;
        h = std::max(h, top_eig_2x2(R));
    }
    return h;
}

ClosednessReport closedness_qr(double r, const std::vector<int>& mesh_sizes) {
    if (!(r > 1.0)) throw errors::BadParam("closedness_qr: r > 1");
    ClosednessReport rep;
    rep.closed = false;
    // Closed-form open disk, cross-checked against the generic T_Q parameters.
    rep.ellipse.x0 = (r + 3.0) / 4.0;
    rep.ellipse.y0 = 0.0;
    rep.ellipse.a = std::sqrt((r * r + 3.0 * r + 4.0) / 8.0);
    rep.ellipse.b = std::sqrt((r * r - 1.0) / 16.0);
    const double d = 0.5 * (r + 1.0);
    const double a_generic = 0.5 * std::sqrt(2.0 * d * d + d + 1.0);
    const double b_generic = 0.5 * ell(d);
    const double c_generic = 0.5 * (d + 1.0);
    if (std::abs(rep.ellipse.a - a_generic) > 1e-10 ||
        std::abs(rep.ellipse.b - b_generic) > 1e-10 ||
        std::abs(rep.ellipse.x0 - c_generic) > 1e-10)
        throw errors::Error("closedness_qr: closed forms disagree");
    for (int N : mesh_sizes) {
        GridOperator g = grid::make_tq_grid(r, N);
        rep.refinement_gaps.emplace_back(N, rep.ellipse.support(0.0) - compressed_support(g, 0.0));
    }
    if (!rep.refinement_gaps.empty()) rep.boundary_gap = rep.refinement_gaps.back().second;
    return rep;
}

// ------------------------------------------------------------------- S_r

namespace {

double sr_block_support(double d, double t, double ca) {
    const double xt = d * t - 2.0 * d + 1.0;
    const double inner = (t - 1.0) * (d - t) + 4.0 * (d - 1.0) * (d - 1.0) * t * t * ca * ca;
    return xt * ca + 0.5 * std::sqrt(std::max(inner, 0.0));
}

} // namespace

double sr_support_exact(double r, double alpha) {
    if (!(r > 1.0)) throw errors::BadParam("sr_support_exact: r > 1");
    const double d = 0.5 * (r + 1.0);
    const double ca = std::cos(alpha);
    return scan_max([&](double t) { return sr_block_support(d, t, ca); }, 1.0, d, 256, 1e-12);
}

SrDiagnostics sr_diagnostics(double r, int N) {
    if (!(r > 1.0)) throw errors::BadParam("sr_diagnostics: r > 1");
    if (N < 2) throw errors::BadParam("sr_diagnostics: N >= 2");
    SrDiagnostics diag;
    const double d = 0.5 * (r + 1.0);
    diag.d = d;
    diag.alpha1 = std::acos(std::sqrt(2.0) / (4.0 * std::sqrt(d * (2.0 * d - 1.0))));
    diag.alpha2 = std::acos(std::sqrt(2.0) / 4.0);
    diag.s = (2.0 * d - 1.0) * (d - 1.0);
    diag.s_prime = 2.0 * (1.0 - d);

    // (a) max attained at t = d on the front cone, (b) at t = 1 around pi.
    for (int i = 0; i <= 32; ++i) {
        const double a1 = diag.alpha1 * i / 32.0;
        diag.regime_a_err =
            std::max(diag.regime_a_err, std::abs(sr_support_exact(r, a1) - diag.s * std::cos(a1)));
        const double a2 = M_PI - diag.alpha2 + 2.0 * diag.alpha2 * i / 32.0;
        diag.regime_b_err = std::max(
            diag.regime_b_err, std::abs(sr_support_exact(r, a2) - diag.s_prime * std::cos(a2)));
    }

    GridOperator g = grid::make_sr(r, N);
    diag.mesh_h = g.mesh_h();
    std::vector<double> angles(256);
    for (int i = 0; i < 256; ++i) angles[i] = 2.0 * M_PI * i / 256;
    std::vector<double> exact(angles.size());
    par::parallel_for(static_cast<std::ptrdiff_t>(angles.size()), [&](std::ptrdiff_t i) {
        exact[static_cast<std::size_t>(i)] = sr_support_exact(r, angles[static_cast<std::size_t>(i)]);
    });
    std::vector<double> sampled = support_profile(g, angles);
    for (std::size_t i = 0; i < angles.size(); ++i)
        diag.grid_vs_exact = std::max(diag.grid_vs_exact, std::abs(sampled[i] - exact[i]));

    // Axis-aligned fit (y0 = 0) from 4 support samples, Gauss-Newton from the
    // closed-form 3-sample start; residual over 256 angles.
    const double h0 = sr_support_exact(r, 0.0);
    const double hpi = sr_support_exact(r, M_PI);
    const double hp2 = sr_support_exact(r, M_PI_2);
    const double h4s = sr_support_exact(r, diag.alpha1 / 2.0);
    double fx0 = (h0 - hpi) / 2.0, fa = (h0 + hpi) / 2.0, fb = hp2;
    const double fit_angles[4] = {0.0, M_PI_2, M_PI, diag.alpha1 / 2.0};
    const double fit_h[4] = {h0, hp2, hpi, h4s};
    for (int it = 0; it < 40; ++it) {
        Eigen::Matrix<double, 4, 3> J;
        Eigen::Vector4d rvec;
        for (int i = 0; i < 4; ++i) {
            const double ca = std::cos(fit_angles[i]), sa = std::sin(fit_angles[i]);
            const double root = std::sqrt(fa * fa * ca * ca + fb * fb * sa * sa);
            rvec(i) = fx0 * ca + root - fit_h[i];
            J(i, 0) = ca;
            J(i, 1) = root > 0 ? fa * ca * ca / root : 0.0;
            J(i, 2) = root > 0 ? fb * sa * sa / root : 0.0;
        }
        Eigen::Vector3d step = J.colPivHouseholderQr().solve(-rvec);
        fx0 += step(0);
        fa += step(1);
        fb += step(2);
        if (step.norm() < 1e-14) break;
    }
    diag.fit = EllipseParams{fx0, 0.0, std::abs(fa), std::abs(fb), false};
    for (std::size_t i = 0; i < angles.size(); ++i)
        diag.fit_residual =
            std::max(diag.fit_residual, std::abs(diag.fit.support(angles[i]) - exact[i]));
    diag.nonellipse_floor = 1e-3 * (d - 1.0);
    diag.floor_exceeded = diag.fit_residual > diag.nonellipse_floor;

    diag.s_gap = diag.s - compressed_support(g, 0.0);
    diag.h_pi = sr_support_exact(r, M_PI);
    diag.h_pi_err = std::abs(diag.h_pi - 2.0 * (d - 1.0));
    return diag;
}

} // namespace idemkit::nr
