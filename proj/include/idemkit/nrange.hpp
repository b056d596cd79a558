#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "idemkit/gridop.hpp"
#include "idemkit/idempotent.hpp"

namespace idemkit::nr {

using grid::GridOperator;
using idem::Idempotent;

/// Axis-aligned elliptical disk (x-x0)^2/a^2 + (y-y0)^2/b^2 <= 1; degenerate
/// when a*b = 0 (segment or point).
struct EllipseParams {
    double x0 = 0.0, y0 = 0.0;
    double a = 0.0, b = 0.0;
    bool degenerate = false;

    double support(double alpha) const;
    Complex boundary_point(double alpha) const;
    double quad_form(Complex z) const; // <= 1 inside (degenerate handled separately)
};

/// Ellipse in focal form, as the 2x2 elliptical range theorem delivers it:
/// foci at the eigenvalues, minor axis sqrt(tr(M*M) - |l1|^2 - |l2|^2).
struct FocalEllipse {
    Complex focus1, focus2;
    double minor_axis = 0.0; // full length

    Complex center() const { return (focus1 + focus2) / 2.0; }
    double semi_minor() const { return minor_axis / 2.0; }
    double semi_focal() const { return std::abs(focus1 - focus2) / 2.0; }
    double semi_major() const;
    double support(double alpha) const;
    Complex boundary_point(double alpha) const;
    bool contains(Complex z, double margin = 0.0) const; // focal-sum test
};

FocalEllipse ellipse_2x2(const Matrix2& M);

struct SupportPoint {
    double value = 0.0;  // top eigenvalue of Re(e^{-i alpha} T)
    Complex z;           // <T x, x> at the witness
    Vector witness;      // empty for grid slots
};

/// Support of W(T) at angle alpha: the top eigenvalue of Re(e^{-i alpha} T),
/// negative when W(T) misses the half-plane (sup semantics, not |.|_+).
SupportPoint support_function(const Matrix& T, double alpha);
/// Grid version: max over the 0-slot, the scalar slot and the per-node blocks.
SupportPoint support_function(const GridOperator& F, double alpha);

/// Value-only support (no witness); skips the eigenvector computation.
double support_value(const Matrix& T, double alpha);
double support_value(const GridOperator& F, double alpha);

/// Angle sweep kernels; parallel over angles with a serial reference.
std::vector<double> support_profile(const Matrix& T, const std::vector<double>& angles);
std::vector<double> support_profile_serial(const Matrix& T, const std::vector<double>& angles);
std::vector<double> support_profile(const GridOperator& F, const std::vector<double>& angles);
std::vector<double> support_profile_serial(const GridOperator& F,
                                           const std::vector<double>& angles);

struct SupportProfile {
    std::vector<double> angles;
    std::vector<double> values;
    std::vector<Complex> boundary; // z_alpha = <T w, w> per angle
};

SupportProfile boundary_points(const Matrix& T, const std::vector<double>& angles);
SupportProfile boundary_points(const GridOperator& F, const std::vector<double>& angles);

/// Support profile of a grid operator computed through per-node 2x2 ellipses
/// (max over t), checked against the dense block-diagonal assembly. The
/// returned max_mismatch is the desk-scale gap between the two routes.
struct OperatorRangeResult {
    SupportProfile profile;
    double max_mismatch = 0.0;
};
OperatorRangeResult operator_elliptical_range(const GridOperator& F,
                                              const std::vector<double>& angles);

/// T_Q = m(Q) + m(Q) Q.
Matrix tq_operator(const Idempotent& Q);

struct TqReport {
    EllipseParams ellipse; // center (c, 0), semi-axes (a, b)
    double d = 0.0;
    double norm_T = 0.0;          // computed |T_Q|, equal to 2a
    double radius = 0.0;          // computed w(T_Q), equal to a + c
    double norm_err = 0.0;        // | |T_Q| - 2a |
    double radius_err = 0.0;      // | w(T_Q) - (a + c) |
    double nonquadratic_min = 0.0;  // min over eigenvalue pairs of |(T-e1)(T-e2)|
    bool quadratic_degenerate = false; // h1 = 0 with scalar D: T_Q genuinely quadratic
};
TqReport tq_ellipse(const Idempotent& Q);

/// Unit vector x with |<T x, x> - z| <= tol for z strictly inside W(T).
/// Walks support-witness paths, landing each step on a line through z, and
/// closes via the 2x2 compression once z falls inside its ellipse.
Vector attain_interior(const Matrix& T, Complex z, double tol, std::uint64_t seed = 99);

struct ClosednessReport {
    bool closed = false;
    EllipseParams ellipse;
    double boundary_gap = 0.0; // matrix case: witness-to-boundary distance
    Vector witness;
    std::vector<std::pair<int, double>> refinement_gaps; // continuum case: (N, gap)
};

/// Matrix case: the top of the spectrum is an eigenvalue, so the boundary is
/// attained; returns the witness.
ClosednessReport closedness(const Idempotent& Q);
/// Continuum T_{Q_r}: open disk of the closed-form ellipse; the step-function
/// compression shows a positive boundary gap shrinking under mesh refinement.
ClosednessReport closedness_qr(double r, const std::vector<int>& mesh_sizes);

/// Step-function compression of a grid operator: cell-averaged blocks. Models
/// vectors the continuum actually has; the top of the range is approached but
/// never attained at a fixed mesh.
double compressed_support(const GridOperator& F, double alpha);

/// Exact support of W(S_r): max over t in [1,d] of the per-t ellipse support,
/// by scan plus golden-section refinement.
double sr_support_exact(double r, double alpha);

struct SrDiagnostics {
    double d = 0.0;
    double alpha1 = 0.0, alpha2 = 0.0; // regime thresholds
    double regime_a_err = 0.0;         // max |h - (2d-1)(d-1)cos a| on [0, alpha1]
    double regime_b_err = 0.0;         // max |h - 2(1-d)cos a| on [pi-alpha2, pi+alpha2]
    double grid_vs_exact = 0.0;        // node-sampled profile vs exact, 256 angles
    double mesh_h = 0.0;
    EllipseParams fit;       // best axis-aligned ellipse from 4 support samples, y0 = 0
    double fit_residual = 0.0;
    double nonellipse_floor = 0.0; // 1e-3 * (d-1)
    bool floor_exceeded = false;
    double s = 0.0;      // (2d-1)(d-1), in the closure, never attained at fixed mesh
    double s_gap = 0.0;  // s - compressed_support(., 0) > 0
    double s_prime = 0.0;   // 2(1-d), attained by the scalar slot
    double h_pi = 0.0;      // exact h(pi) = 2(d-1) = -s_prime
    double h_pi_err = 0.0;
};
SrDiagnostics sr_diagnostics(double r, int N);

} // namespace idemkit::nr
