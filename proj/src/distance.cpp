#include "idemkit/distance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "idemkit/errors.hpp"
#include "idemkit/parallel.hpp"
#include "idemkit/rng.hpp"

namespace idemkit::dist {

using linalg::operator_norm;

namespace {

double skew_magnitude(const Idempotent& Q) {
    double t = Q.norm * Q.norm - 1.0;
    return t > 0 ? std::sqrt(t) : 0.0;
}

double closed_form_min(double norm) {
    return 0.5 * (norm - 1.0 + std::sqrt(std::max(norm * norm - 1.0, 0.0)));
}

constexpr double kCrossCheckTol = 1e-8;

} // namespace

double min_distance(const Idempotent& Q) {
    const double closed = closed_form_min(Q.norm);
    const double direct = operator_norm(idem::matched_projection(Q) - Q.Q);
    if (std::abs(closed - direct) > kCrossCheckTol * (1.0 + Q.norm))
        throw errors::Error("min_distance: closed form and |m(Q)-Q| disagree");
    return closed;
}

double max_distance(const Idempotent& Q) {
    const double closed = 1.0 + closed_form_min(Q.norm);
    const Matrix I = Matrix::Identity(Q.dim(), Q.dim());
    const double direct = operator_norm(I - idem::matched_projection(Q) - Q.Q);
    if (std::abs(closed - direct) > kCrossCheckTol * (1.0 + Q.norm))
        throw errors::Error("max_distance: closed form and |I-m(Q)-Q| disagree");
    return closed;
}

DistanceReport distance_report(const Idempotent& Q) {
    DistanceReport r;
    const Matrix I = Matrix::Identity(Q.dim(), Q.dim());
    Matrix m = idem::matched_projection(Q);
    r.witness_min = m;
    r.witness_max = I - m;
    r.min_dist = min_distance(Q);
    r.max_dist = max_distance(Q);
    Matrix P = idem::range_projection(Q);
    r.lambda = operator_norm(P - Q.Q);
    r.mu = operator_norm(I - P - Q.Q);
    return r;
}

Matrix sqp_invariant(const Idempotent& Q, std::uint64_t seed) {
    const Eigen::Index n = Q.dim();
    const Matrix I = Matrix::Identity(n, n);
    Matrix S = I - Q.Q - Q.Q.adjoint() + 2.0 * Q.Q.adjoint() * Q.Q;
    S = (S + S.adjoint()) / 2.0;

    auto gen = rng::engine(seed);
    for (int trial = 0; trial < 3; ++trial) {
        Matrix P = rng::random_projection(n, gen);
        Matrix direct =
            (P - Q.Q).adjoint() * (P - Q.Q) + (I - P - Q.Q).adjoint() * (I - P - Q.Q);
        if (operator_norm(direct - S) > 1e-9 * (1.0 + Q.norm * Q.norm))
            throw errors::Error("sqp_invariant: S_{Q,P} depends on P beyond tolerance");
    }

    const double a = skew_magnitude(Q);
    const double expected = 1.0 + a * a + a * std::sqrt(1.0 + a * a);
    if (std::abs(operator_norm(S) - expected) > 1e-8 * (1.0 + expected))
        throw errors::Error("sqp_invariant: |S| violates the closed form");
    return S;
}

namespace {

MonteCarloExtents mc_impl(const Idempotent& Q, int samples, std::uint64_t seed, double slack,
                          bool parallel) {
    if (samples < 1) throw errors::BadParam("mc_projection_distances: samples >= 1");
    const Eigen::Index n = Q.dim();
    std::vector<double> dists(static_cast<std::size_t>(samples));
    auto body = [&](std::ptrdiff_t i) {
        auto gen = rng::stream(seed, static_cast<std::uint64_t>(i));
        Matrix P = rng::random_projection(n, gen);
        dists[static_cast<std::size_t>(i)] = operator_norm(P - Q.Q);
    };
    if (parallel)
        par::parallel_for(samples, body);
    else
        par::serial_for(samples, body);

    MonteCarloExtents out;
    out.samples = samples;
    out.lowest = *std::min_element(dists.begin(), dists.end());
    out.highest = *std::max_element(dists.begin(), dists.end());
    const double lo = closed_form_min(Q.norm);
    out.within_bounds = out.lowest >= lo - slack && out.highest <= 1.0 + lo + slack;
    return out;
}

} // namespace

MonteCarloExtents mc_projection_distances(const Idempotent& Q, int samples, std::uint64_t seed,
                                          double slack) {
    return mc_impl(Q, samples, seed, slack, true);
}

MonteCarloExtents mc_projection_distances_serial(const Idempotent& Q, int samples,
                                                 std::uint64_t seed, double slack) {
    return mc_impl(Q, samples, seed, slack, false);
}

namespace {

// Scan a continuous leg at 64 samples for a bracket around the target, then
// bisect inside it. The distance along a leg need not be monotone; the scan
// finds the first sign change, which the intermediate value theorem supplies.
Matrix bisect_leg(const std::function<Matrix(double)>& proj_at,
                  const std::function<double(const Matrix&)>& dist, double alpha,
                  double dist_tol) {
    constexpr int kScan = 64;
    constexpr int kMaxIter = 200;
    double prev_t = 0.0;
    double prev_v = dist(proj_at(0.0)) - alpha;
    if (std::abs(prev_v) <= dist_tol) return proj_at(0.0);
    for (int i = 1; i <= kScan; ++i) {
        const double t = static_cast<double>(i) / kScan;
        const double v = dist(proj_at(t)) - alpha;
        if (std::abs(v) <= dist_tol) return proj_at(t);
        if (prev_v * v < 0) {
            double lo = prev_t, hi = t, vlo = prev_v;
            for (int iter = 0; iter < kMaxIter; ++iter) {
                const double mid = (lo + hi) / 2.0;
                Matrix P = proj_at(mid);
                const double vm = dist(P) - alpha;
                if (std::abs(vm) <= dist_tol) return P;
                if (vlo * vm < 0)
                    hi = mid;
                else {
                    lo = mid;
                    vlo = vm;
                }
            }
            throw errors::NoConvergence("projection_at_distance: bisection stalled");
        }
        prev_t = t;
        prev_v = v;
    }
    throw errors::NoConvergence("projection_at_distance: no bracket on leg");
}

// Rotation family of the middle leg, assembled in the [C1 | C2 | C3] frame
// where C2 is an arbitrary k-column pairing inside K2.
Matrix rotation_projection(const Matrix& C1, const Matrix& C2, const Matrix& C3, double t,
                           Eigen::Index fill) {
    const double c = std::cos(M_PI * t / 2.0);
    const double s = std::sin(M_PI * t / 2.0);
    Matrix P = c * c * (C1 * C1.adjoint()) + s * c * (C1 * C2.adjoint() + C2 * C1.adjoint()) +
               s * s * (C2 * C2.adjoint());
    if (fill > 0) {
        Matrix F = C3.leftCols(fill);
        P += F * F.adjoint();
    }
    return (P + P.adjoint()) / 2.0;
}

Matrix middle_leg(const Idempotent& Q, const idem::BlockForm& bf, double alpha, double dist_tol) {
    auto dist = [&](const Matrix& P) { return operator_norm(P - Q.Q); };
    const Matrix& C1 = bf.U1;
    const Eigen::Index k = C1.cols();
    Matrix C2 = bf.U2.leftCols(k);
    Matrix C3 = bf.U2.rightCols(bf.U2.cols() - k);
    // Chain of interval legs indexed by how much of K3 is filled; consecutive
    // intervals overlap, so the first one whose endpoints bracket alpha wins.
    for (Eigen::Index fill = 0; fill <= C3.cols(); ++fill) {
        const double f0 = dist(rotation_projection(C1, C2, C3, 0.0, fill));
        const double f1 = dist(rotation_projection(C1, C2, C3, 1.0, fill));
        if (alpha >= f0 - dist_tol && alpha <= f1 + dist_tol) {
            return bisect_leg(
                [&](double t) { return rotation_projection(C1, C2, C3, t, fill); }, dist, alpha,
                dist_tol);
        }
    }
    throw errors::NoConvergence("projection_at_distance: rotation chain missed the target");
}

} // namespace

Matrix projection_at_distance(const Idempotent& Q, double alpha, double dist_tol) {
    if (Q.projection)
        throw errors::BadParam("projection_at_distance: Q must be a non-projection idempotent");
    if (dist_tol <= 0) throw errors::BadParam("projection_at_distance: dist_tol > 0 required");
    const Eigen::Index n = Q.dim();
    const Matrix I = Matrix::Identity(n, n);
    const double lo = closed_form_min(Q.norm);
    const double hi = 1.0 + lo;
    if (alpha < lo - dist_tol || alpha > hi + dist_tol)
        throw errors::OutOfRange("projection_at_distance: alpha outside [min,max]");

    Matrix m = idem::matched_projection(Q);
    if (std::abs(alpha - lo) <= dist_tol) return m;
    if (std::abs(alpha - hi) <= dist_tol) return I - m;

    idem::BlockForm bf = block_form(Q);
    const double lambda = operator_norm(bf.U1 * bf.U1.adjoint() - Q.Q);
    const double mu = operator_norm(I - bf.U1 * bf.U1.adjoint() - Q.Q);
    auto dist = [&](const Matrix& P) { return operator_norm(P - Q.Q); };

    if (alpha <= lambda) {
        // L1: s=1 sits at min_Q, s=0 at lambda_Q.
        return bisect_leg([&](double t) { return idem::matched_projection_block(bf, 1.0 - t); },
                          dist, alpha, dist_tol);
    }
    if (alpha <= mu) {
        if (2 * bf.U1.cols() <= n) return middle_leg(Q, bf, alpha, dist_tol);
        // dim K1 > dim K2: run the leg on I - Q*, whose block dims swap, and
        // map the result back through P -> I - P (distance to Q is preserved).
        Idempotent Qc = idem::validate(I - Q.Q.adjoint());
        idem::BlockForm bfc = block_form(Qc);
        Matrix R = middle_leg(Qc, bfc, alpha, dist_tol);
        return I - R;
    }
    // L3: leg L1 for I - Q*, distances still measured against Q. Its s-family
    // runs from |P_{K2} - Q| = mu at s=0 to |m(I-Q*) - Q| = max_Q at s=1.
    Idempotent Qc = idem::validate(I - Q.Q.adjoint());
    idem::BlockForm bfc = block_form(Qc);
    return bisect_leg([&](double t) { return idem::matched_projection_block(bfc, t); }, dist,
                      alpha, dist_tol);
}

} // namespace idemkit::dist
