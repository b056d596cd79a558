// Serial vs OpenMP timings for the three sweep kernels, with max deviation
// between the two paths (expected zero: identical per-item code).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "idemkit/distance.hpp"
#include "idemkit/gridop.hpp"
#include "idemkit/nrange.hpp"
#include "idemkit/parallel.hpp"

using namespace idemkit;

namespace {

template <class F>
double time_ms(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

void row(const char* name, double serial_ms, double parallel_ms, double max_dev) {
    std::printf("%-28s %10.1f %10.1f %8.2fx %10.2e\n", name, serial_ms, parallel_ms,
                serial_ms / parallel_ms, max_dev);
}

} // namespace

int main(int argc, char** argv) {
    int n = 40, samples = 800, angles = 64, mesh = 400;
    for (int i = 1; i + 1 < argc; i += 2) {
        std::string k = argv[i];
        int v = std::atoi(argv[i + 1]);
        if (k == "--n") n = v;
        if (k == "--samples") samples = v;
        if (k == "--angles") angles = v;
        if (k == "--mesh") mesh = v;
    }
    std::printf("threads: %d\n", par::max_threads());
    std::printf("%-28s %10s %10s %9s %10s\n", "kernel", "serial ms", "omp ms", "speedup",
                "max |diff|");

    idem::Idempotent Q = idem::random_idempotent(n, n / 2, 1.5, 7);
    dist::MonteCarloExtents ms{}, mp{};
    double t_s = time_ms([&] { ms = dist::mc_projection_distances_serial(Q, samples, 11); });
    double t_p = time_ms([&] { mp = dist::mc_projection_distances(Q, samples, 11); });
    row("mc_projection_distances", t_s, t_p,
        std::max(std::abs(ms.lowest - mp.lowest), std::abs(ms.highest - mp.highest)));

    grid::GridOperator g = grid::make_qr(3.0, mesh);
    Matrix dense = grid::assemble_dense(g);
    std::vector<double> alphas(static_cast<std::size_t>(angles));
    for (int i = 0; i < angles; ++i) alphas[static_cast<std::size_t>(i)] = 2.0 * M_PI * i / angles;
    std::vector<double> hs, hp;
    t_s = time_ms([&] { hs = nr::support_profile_serial(dense, alphas); });
    t_p = time_ms([&] { hp = nr::support_profile(dense, alphas); });
    double dev = 0;
    for (std::size_t i = 0; i < hs.size(); ++i) dev = std::max(dev, std::abs(hs[i] - hp[i]));
    row("support_profile (dense)", t_s, t_p, dev);

    grid::GridOperator big = grid::make_qr(3.0, 20000);
    std::vector<Matrix2> bs, bp;
    t_s = time_ms([&] { bs = grid::matched_blocks_serial(big); });
    t_p = time_ms([&] { bp = grid::matched_blocks(big); });
    dev = 0;
    for (std::size_t i = 0; i < bs.size(); ++i) dev = std::max(dev, (bs[i] - bp[i]).norm());
    row("matched_blocks (N=20000)", t_s, t_p, dev);
    return 0;
}
