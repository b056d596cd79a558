#include <doctest.h>

#include <cmath>

#include "idemkit/nrange.hpp"
#include "idemkit/rng.hpp"
#include "test_helpers.hpp"

using namespace idemkit;
using test::mat2;

namespace {
const double kSqrt2 = std::sqrt(2.0);

std::vector<double> angle_grid(int m) {
    std::vector<double> a(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) a[static_cast<std::size_t>(i)] = 2.0 * M_PI * i / m;
    return a;
}

// Brute-force oracle: random quadratic-form samples of W(T).
std::vector<Complex> sample_range(const Matrix& T, int count, std::uint64_t seed) {
    std::vector<Complex> zs;
    zs.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
        auto gen = rng::stream(seed, static_cast<std::uint64_t>(i));
        Vector x = rng::random_unit_vector(T.rows(), gen);
        zs.push_back((x.adjoint() * T * x)(0, 0));
    }
    return zs;
}
} // namespace

TEST_CASE("support_function basics") {
    CHECK(nr::support_function(Matrix::Identity(3, 3), 0.0).value == doctest::Approx(1.0));
    CHECK(nr::support_function(Matrix::Identity(3, 3), M_PI).value == doctest::Approx(-1.0));

    // Nilpotent [[0,1],[0,0]]: W is the disk of radius 1/2, so h = 1/2 at all angles.
    Matrix N = mat2(0, 1, 0, 0);
    for (double a : {0.0, 0.7, 2.0, 4.5})
        CHECK(nr::support_function(N, a).value == doctest::Approx(0.5).epsilon(1e-12));

    auto sp = nr::support_function(mat2(0, 0, 0, 1), 0.0);
    CHECK(sp.value == doctest::Approx(1.0));
    CHECK(std::abs(sp.z - Complex(1, 0)) <= 1e-12);
}

TEST_CASE("support witnesses dominate Monte-Carlo samples") {
    auto gen = rng::engine(500);
    Matrix T = rng::gaussian(6, 6, gen);
    auto zs = sample_range(T, 200, 7);
    for (double a : angle_grid(16)) {
        const double h = nr::support_function(T, a).value;
        for (const auto& z : zs) CHECK(std::real(z * std::exp(Complex(0, -a))) <= h + 1e-10);
    }
}

TEST_CASE("boundary_points: segment and circle") {
    auto prof = nr::boundary_points(Matrix(mat2(0, 0, 0, 1)), angle_grid(16));
    for (const auto& z : prof.boundary) {
        CHECK(std::abs(std::imag(z)) <= 1e-10);
        CHECK(std::real(z) >= -1e-10);
        CHECK(std::real(z) <= 1.0 + 1e-10);
    }
    // Each z_alpha touches its supporting line.
    for (std::size_t i = 0; i < prof.angles.size(); ++i)
        CHECK(std::real(prof.boundary[i] * std::exp(Complex(0, -prof.angles[i]))) ==
              doctest::Approx(prof.values[i]).epsilon(1e-10));

    auto circ = nr::boundary_points(Matrix(mat2(0, 1, 0, 0)), angle_grid(16));
    for (const auto& z : circ.boundary) CHECK(std::abs(z) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK_THROWS_AS(nr::boundary_points(Matrix(mat2(0, 1, 0, 0)), angle_grid(4)),
                    errors::BadParam);
}

TEST_CASE("ellipse_2x2: foci at the eigenvalues, hand-checked minor axes") {
    auto seg = nr::ellipse_2x2(Matrix2(mat2(0, 0, 0, 1)));
    CHECK(std::abs(seg.focus1) <= 1e-14);
    CHECK(std::abs(seg.focus2 - Complex(1, 0)) <= 1e-14);
    CHECK(seg.minor_axis <= 1e-14);

    auto disk = nr::ellipse_2x2(Matrix2(mat2(0, 1, 0, 0)));
    CHECK(std::abs(disk.focus1 - disk.focus2) <= 1e-14);
    CHECK(disk.minor_axis == doctest::Approx(1.0));
    CHECK(disk.semi_major() == doctest::Approx(0.5));

    // f_t = [[t+1, -l(t)], [0, 0]]: foci 0 and t+1, minor axis l(t).
    for (double t : {1.0, 1.3, 2.0}) {
        const double lt = std::sqrt(t * t - t);
        Matrix2 f;
        f << t + 1, -lt, 0, 0;
        auto e = nr::ellipse_2x2(f);
        CHECK(std::abs(e.focus1) <= 1e-12);
        CHECK(std::abs(e.focus2 - Complex(t + 1, 0)) <= 1e-12);
        CHECK(e.minor_axis == doctest::Approx(lt).epsilon(1e-10));
    }
}

TEST_CASE("ellipse_2x2 support equals the eigenvalue route") {
    auto gen = rng::engine(321);
    for (int trial = 0; trial < 60; ++trial) {
        Matrix M = rng::gaussian(2, 2, gen);
        auto e = nr::ellipse_2x2(Matrix2(M));
        for (double a : angle_grid(32))
            CHECK(e.support(a) ==
                  doctest::Approx(nr::support_function(M, a).value).epsilon(1e-9));
    }
}

TEST_CASE("axis-aligned params recovered from the boundary polyline") {
    // Real-entry f_t has an axis-aligned range: center ((t+1)/2, 0),
    // semi-axes (semi-major, l(t)/2). Least-squares fit from support samples.
    const double t = 1.7;
    const double lt = std::sqrt(t * t - t);
    Matrix f = mat2(t + 1, -lt, 0, 0);
    auto prof = nr::boundary_points(f, angle_grid(64));
    const double h0 = prof.values[0];
    const double hpi = prof.values[32];
    const double hp2 = prof.values[16];
    const double x0 = (h0 - hpi) / 2, a_fit = (h0 + hpi) / 2, b_fit = hp2;
    auto e = nr::ellipse_2x2(Matrix2(f));
    CHECK(x0 == doctest::Approx((t + 1) / 2).epsilon(1e-9));
    CHECK(a_fit == doctest::Approx(e.semi_major()).epsilon(1e-9));
    CHECK(b_fit == doctest::Approx(lt / 2).epsilon(1e-9));
}

TEST_CASE("union-of-ranges support is the pointwise max") {
    auto gen = rng::engine(77);
    std::vector<Matrix> parts;
    Matrix dense = Matrix::Zero(6, 6);
    for (int i = 0; i < 3; ++i) {
        Matrix M = rng::gaussian(2, 2, gen);
        parts.push_back(M);
        dense.block(2 * i, 2 * i, 2, 2) = M;
    }
    for (double a : angle_grid(24)) {
        double manual = -1e300;
        for (const auto& M : parts) manual = std::max(manual, nr::support_function(M, a).value);
        CHECK(nr::support_function(dense, a).value == doctest::Approx(manual).epsilon(1e-11));
    }
}

TEST_CASE("operator_elliptical_range: ellipse route equals dense route") {
    auto single = grid::make_qr(2.2, 2);
    single.mesh = {1.4};
    single.blocks = {single.blocks[1]};
    auto res = nr::operator_elliptical_range(single, angle_grid(32));
    CHECK(res.max_mismatch <= 1e-10);

    auto tq = grid::make_tq_grid(3.0, 64);
    auto res2 = nr::operator_elliptical_range(tq, angle_grid(64));
    CHECK(res2.max_mismatch <= 1e-9);
    // Monotone nesting puts the whole profile on the t = d ellipse.
    nr::EllipseParams E{1.5, 0.0, std::sqrt(2.75), std::sqrt(0.5), false};
    for (std::size_t i = 0; i < res2.profile.angles.size(); ++i)
        CHECK(res2.profile.values[i] ==
              doctest::Approx(E.support(res2.profile.angles[i])).epsilon(1e-10));
}

TEST_CASE("monotone nesting of the T_Q block family") {
    auto hts = [](double t, double a) {
        Matrix f = mat2(t + 1, -std::sqrt(t * t - t), 0, 0);
        return nr::support_function(f, a).value;
    };
    for (double a : angle_grid(16))
        for (double t1 : {1.0, 1.2, 1.6})
            CHECK(hts(t1, a) <= hts(t1 + 0.3, a) + 1e-12);
}

TEST_CASE("tq_ellipse: frozen parameters at |Q| = sqrt(2)") {
    auto Q = idem::validate(mat2(1, 1, 0, 0));
    auto rep = nr::tq_ellipse(Q);
    const double d = (1 + kSqrt2) / 2;
    CHECK(rep.d == doctest::Approx(d).epsilon(1e-12));
    CHECK(rep.ellipse.b == doctest::Approx(0.25).epsilon(1e-12)); // l(d) = 1/2 exactly
    CHECK(rep.ellipse.x0 == doctest::Approx((3 + kSqrt2) / 4).epsilon(1e-12));
    CHECK(rep.ellipse.a ==
          doctest::Approx(std::sqrt(2 * d * d + d + 1) / 2).epsilon(1e-12));
    CHECK(rep.norm_err <= 1e-9);
    CHECK(rep.radius_err <= 1e-9);
    // h(0) = c + a, chasing the substitution d = (1 + sqrt(2))/2 through.
    CHECK(nr::support_value(nr::tq_operator(Q), 0.0) ==
          doctest::Approx((d + 1) / 2 + std::sqrt(2 * d * d + d + 1) / 2).epsilon(1e-12));
    // Every 2x2 T_Q is quadratic by Cayley-Hamilton; the probe must say so.
    CHECK(rep.quadratic_degenerate);
}

TEST_CASE("tq_ellipse: non-quadratic beyond the scalar-D case") {
    auto Q = idem::random_idempotent(6, 3, 1.4, 11);
    auto rep = nr::tq_ellipse(Q);
    CHECK_FALSE(rep.quadratic_degenerate);
    CHECK(rep.nonquadratic_min > 1e-3 * (rep.d - 1.0));
    CHECK(rep.norm_err <= 1e-8 * (1 + rep.norm_T));
    CHECK(rep.radius_err <= 1e-8 * (1 + rep.norm_T));

    // Monte-Carlo membership in the closed ellipse.
    Matrix T = nr::tq_operator(Q);
    for (const auto& z : sample_range(T, 400, 3))
        CHECK(rep.ellipse.quad_form(z) <= 1.0 + 1e-9);
    CHECK_THROWS_AS(nr::tq_operator(idem::random_idempotent(4, 2, 0.0, 2)),
                    errors::IsProjection);
}

TEST_CASE("interior attainment on T_Q") {
    auto Q = idem::random_idempotent(7, 3, 1.1, 19);
    auto rep = nr::tq_ellipse(Q);
    Matrix T = nr::tq_operator(Q);
    auto gen = rng::engine(4);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    for (int i = 0; i < 6; ++i) {
        const double rho = 0.9 * std::sqrt(u01(gen));
        const double psi = 2 * M_PI * u01(gen);
        Complex z(rep.ellipse.x0 + rho * rep.ellipse.a * std::cos(psi),
                  rho * rep.ellipse.b * std::sin(psi));
        Vector x = nr::attain_interior(T, z, 1e-6);
        CHECK(std::abs(x.norm() - 1.0) <= 1e-12);
        CHECK(std::abs(Complex((x.adjoint() * T * x)(0, 0)) - z) <= 1e-6);
    }
}

TEST_CASE("closedness: matrices attain the boundary") {
    auto Q = idem::random_idempotent(8, 3, 1.9, 23);
    auto rep = nr::closedness(Q);
    CHECK(rep.closed);
    CHECK(rep.boundary_gap <= 1e-8);
    CHECK(rep.witness.size() == 8);
}

TEST_CASE("closedness_qr: open disk with shrinking compression gap") {
    auto rep = nr::closedness_qr(3.0, {100, 400, 1600});
    CHECK_FALSE(rep.closed);
    CHECK(rep.ellipse.x0 == doctest::Approx(1.5).epsilon(1e-12));
    CHECK(rep.ellipse.a * rep.ellipse.a == doctest::Approx(2.75).epsilon(1e-12));
    CHECK(rep.ellipse.b * rep.ellipse.b == doctest::Approx(0.5).epsilon(1e-12));
    REQUIRE(rep.refinement_gaps.size() == 3);
    double prev = 1e300;
    for (auto [N, gap] : rep.refinement_gaps) {
        CHECK(gap > 0.0);
        CHECK(gap < prev);
        prev = gap;
    }
}

TEST_CASE("sr_support_exact: frozen values at r = 3") {
    CHECK(nr::sr_support_exact(3.0, 0.0) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(nr::sr_support_exact(3.0, M_PI) == doctest::Approx(2.0).epsilon(1e-12));
    // max over t of (1/2) sqrt((t-1)(2-t)) = 1/4 at t = 3/2
    CHECK(nr::sr_support_exact(3.0, M_PI_2) == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("sr_diagnostics: regimes, fit floor, boundary behavior") {
    for (double r : {1.5, 2.0, 3.0}) {
        auto diag = nr::sr_diagnostics(r, 200);
        CHECK(diag.regime_a_err <= 1e-12);
        CHECK(diag.regime_b_err <= 1e-12);
        CHECK(diag.grid_vs_exact <= 5 * diag.mesh_h);
        CHECK(diag.floor_exceeded);
        CHECK(diag.fit_residual > diag.nonellipse_floor);
        CHECK(diag.s_gap > 0.0);
        CHECK(diag.h_pi_err <= 1e-10);
        CHECK(diag.h_pi == doctest::Approx(-diag.s_prime).epsilon(1e-12));
    }
    // s approached under refinement
    double g100 = nr::sr_diagnostics(3.0, 100).s_gap;
    double g400 = nr::sr_diagnostics(3.0, 400).s_gap;
    CHECK(g400 < g100);
}

TEST_CASE("ellipse boundary point attains the support value") {
    nr::EllipseParams E{0.7, -0.3, 1.9, 0.6, false};
    for (double a : angle_grid(32)) {
        Complex z = E.boundary_point(a);
        CHECK(std::real(z * std::exp(Complex(0, -a))) ==
              doctest::Approx(E.support(a)).epsilon(1e-12));
    }
}

TEST_CASE("grid support includes scalar and zero slots") {
    auto sr = grid::make_sr(3.0, 100);
    // At alpha = pi the block at t = 1 and the scalar slot agree: h = 2(d-1).
    CHECK(nr::support_function(sr, M_PI).value == doctest::Approx(2.0).epsilon(1e-12));
    // The zero slot keeps every profile nonnegative.
    for (double a : angle_grid(16)) CHECK(nr::support_function(sr, a).value >= 0.0);
}
