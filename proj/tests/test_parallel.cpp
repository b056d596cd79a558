#include <doctest.h>

#include <cstdlib>

#include "idemkit/distance.hpp"
#include "idemkit/gridop.hpp"
#include "idemkit/nrange.hpp"
#include "idemkit/parallel.hpp"
#include "test_helpers.hpp"

using namespace idemkit;

TEST_CASE("parallel kernels match their serial references exactly") {
    auto Q = idem::random_idempotent(12, 5, 1.6, 3);
    auto s = dist::mc_projection_distances_serial(Q, 64, 17);
    auto p = dist::mc_projection_distances(Q, 64, 17);
    CHECK(s.lowest == p.lowest);
    CHECK(s.highest == p.highest);
    CHECK(s.within_bounds == p.within_bounds);

    auto g = grid::make_qr(2.0, 128);
    Matrix dense = grid::assemble_dense(g);
    std::vector<double> angles;
    for (int i = 0; i < 24; ++i) angles.push_back(2.0 * M_PI * i / 24);
    auto hs = nr::support_profile_serial(dense, angles);
    auto hp = nr::support_profile(dense, angles);
    REQUIRE(hs.size() == hp.size());
    for (std::size_t i = 0; i < hs.size(); ++i) CHECK(hs[i] == hp[i]);

    auto gs = nr::support_profile_serial(g, angles);
    auto gp = nr::support_profile(g, angles);
    for (std::size_t i = 0; i < gs.size(); ++i) CHECK(gs[i] == gp[i]);

    auto bs = grid::matched_blocks_serial(g);
    auto bp = grid::matched_blocks(g);
    REQUIRE(bs.size() == bp.size());
    for (std::size_t i = 0; i < bs.size(); ++i) CHECK((bs[i] - bp[i]).norm() == 0.0);
}

TEST_CASE("IDEMKIT_THREADS caps the thread budget") {
#ifdef _OPENMP
    setenv("IDEMKIT_THREADS", "1", 1);
    CHECK(par::max_threads() == 1);
    unsetenv("IDEMKIT_THREADS");
    CHECK(par::max_threads() >= 1);
#else
    CHECK(par::max_threads() == 1);
#endif
}
