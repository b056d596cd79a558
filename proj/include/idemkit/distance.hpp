#pragma once

#include <cstdint>
#include <vector>

#include "idemkit/idempotent.hpp"

namespace idemkit::dist {

using idem::Idempotent;

/// min_Q = |m(Q)-Q| = (|Q|-1+sqrt(|Q|^2-1))/2, cross-checked against the
/// directly computed operator norm.
double min_distance(const Idempotent& Q);

/// max_Q = 1 + min_Q = |I - m(Q) - Q|, cross-checked likewise.
double max_distance(const Idempotent& Q);

struct DistanceReport {
    double min_dist = 0.0;
    double max_dist = 0.0;
    double lambda = 0.0; // |P_{R(Q)} - Q|
    double mu = 0.0;     // |I - P_{R(Q)} - Q|
    Matrix witness_min;  // m(Q)
    Matrix witness_max;  // I - m(Q)
};
DistanceReport distance_report(const Idempotent& Q);

/// S_{Q,P} = (P-Q)*(P-Q) + (I-P-Q)*(I-P-Q) = I - Q - Q* + 2 Q*Q. Verifies the
/// P-independence on a few random projections and the closed-form norm
/// 1 + a^2 + a sqrt(1+a^2) with a = sqrt(|Q|^2 - 1).
Matrix sqp_invariant(const Idempotent& Q, std::uint64_t seed = 2024);

struct MonteCarloExtents {
    double lowest = 0.0;   // min over sampled projections of |P - Q|
    double highest = 0.0;  // max over sampled projections
    bool within_bounds = false;
    int samples = 0;
};

/// Distances from `samples` random projections; parallel over samples with a
/// serial reference kept for testing.
MonteCarloExtents mc_projection_distances(const Idempotent& Q, int samples, std::uint64_t seed,
                                          double slack = 1e-9);
MonteCarloExtents mc_projection_distances_serial(const Idempotent& Q, int samples,
                                                 std::uint64_t seed, double slack = 1e-9);

/// A projection P with | |P-Q| - alpha | <= dist_tol for any alpha in
/// [min_Q, max_Q]. Three continuous legs stitched together:
///   (L1) s -> m(Q_s), Q_s the block form with A replaced by s*A       [min, lambda]
///   (L2) the rotation family P_{t,S} after padding K2 = K1 + K3        [lambda, mu]
///   (L3) leg L1 applied to I - Q*, distances still measured against Q  [mu, max]
/// Each leg gets a uniform scan for a bracket, then scalar bisection.
Matrix projection_at_distance(const Idempotent& Q, double alpha, double dist_tol = 1e-6);

} // namespace idemkit::dist
