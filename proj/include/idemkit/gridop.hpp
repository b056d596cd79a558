#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "idemkit/idempotent.hpp"
#include "idemkit/types.hpp"

namespace idemkit::grid {

/// Sampled element of C + 0 + M2(C[1,d]): one complex scalar slot, a fixed
/// zero slot, and a 2x2 block per mesh point. `continuum` records that the
/// sampled function models a multiplication operator on L^2[1,d], which has
/// no eigenvector at the top of its spectrum; honest finite matrices do.
struct GridOperator {
    double d = 2.0;
    std::vector<double> mesh; // ascending, inside [1, d]
    Complex scalar_slot = 0.0;
    std::vector<Matrix2> blocks; // one per mesh point
    bool continuum = true;

    int nodes() const { return static_cast<int>(mesh.size()); }
    double mesh_h() const; // widest gap of [1,d] left by the mesh
    double grid_norm() const;
};

enum class MeshKind { Uniform, Chebyshev };

std::vector<double> make_mesh(double lo, double hi, int N, MeshKind kind = MeshKind::Uniform);

/// Q_r = 1 + 0 + [[D0, -l(D0)], [l(D0), I0 - D0]] with D0(t) = t on [1, d],
/// d = (r+1)/2. Pointwise an exact idempotent of norm 2t-1.
GridOperator make_qr(double r, int N, MeshKind kind = MeshKind::Uniform);

/// S_r = 2(1-d) + 0 + [[D0-(2d-1)I0, (D0-I0)^{1/2}(dI0-D0)^{1/2}], [0, (2d-1)(D0-I0)]].
GridOperator make_sr(double r, int N, MeshKind kind = MeshKind::Uniform);

/// q_r: same block shape as Q_r but over the piecewise ramp
/// D1(t) = 1 on [1, (d+1)/2], 2t - d beyond. Same norm, same spectrum of D.
GridOperator make_qr_alt(double r, int N, MeshKind kind = MeshKind::Uniform);

/// T_{Q_r} = m(Q_r) + m(Q_r) Q_r sampled on the same mesh:
/// scalar slot 2, blocks [[t+1, -l(t)], [0, 0]].
GridOperator make_tq_grid(double r, int N, MeshKind kind = MeshKind::Uniform);

/// Dense assembly scalar + 0 + blkdiag(f_t), size 2*nodes+2. The honest
/// finite-matrix shadow of the grid operator.
Matrix assemble_dense(const GridOperator& F);

/// Membership in C*{Q_r}: at mesh points with t = 1 the off-corner entries
/// f12, f21, f22 must vanish and the scalar slot must equal f11(1). A mesh
/// that omits t = 1 imposes nothing (the spectrum misses 1, so the algebra
/// is the full  alpha + 0 + M2(C*{D})).
bool in_cstar_qr(const GridOperator& F, double tol);

/// Matched projection applied per block (plus slots); for Q_r-shaped inputs
/// this is pointwise [[1,0],[0,0]]. Parallel over mesh points, serial twin
/// kept for testing.
std::vector<Matrix2> matched_blocks(const GridOperator& F);
std::vector<Matrix2> matched_blocks_serial(const GridOperator& F);

enum class Universality { UniversalWithinMesh, NotUniversal, Inconclusive };

struct UniversalReport {
    Universality verdict = Universality::Inconclusive;
    double d = 0.0;          // (norm + 1) / 2
    double max_gap = 0.0;    // largest hole the sampled spectrum leaves in [1, d]
    double mesh_h = 0.0;     // 0 for matrix inputs
    std::vector<double> spectrum;
    std::string evidence;
};

/// Spectral criterion for universal r-idempotents: sigma of
/// A = m(Q) Q m(Q) + I - m(Q) must fill [1, d]. Finite matrices never do;
/// continuum grids are judged against their mesh resolution.
UniversalReport universal_check(const GridOperator& F);
UniversalReport universal_check(const idem::Idempotent& Q);

struct DistinguishReport {
    int kernel_count_a = 0; // mesh points where the l-entry of a vanishes
    int kernel_count_b = 0;
    bool distinct = false;
    double tol = 0.0;
};

/// Mesh-kernel sizes of the l(D) entries; Q_r gives 1 (only t = 1), the
/// D1-built q_r roughly half the mesh. Certifies non-equivalence at grid scale.
DistinguishReport distinguish(const GridOperator& a, const GridOperator& b, double tol = 1e-8);

/// universal_check agrees between the operator and its complement I - Q.
/// For matrices this also checks sigma(B) = sigma(A) for the complement's
/// criterion operator B.
bool complement_check(const GridOperator& F);
bool complement_check(const idem::Idempotent& Q);

} // namespace idemkit::grid
