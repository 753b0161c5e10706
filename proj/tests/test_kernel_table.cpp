#include "doctest.h"

#include "ellipsim/kernel_table.hpp"

#include <random>

using namespace ellipsim;

namespace {

struct Grid {
    std::size_t nx = 12, ny = 12, nt = 4;
    double h = 0.1;
    std::size_t size() const { return nx * ny * nt; }
    std::size_t idx(std::size_t i, std::size_t j, std::size_t t) const { return (t * ny + j) * nx + i; }
};

// sum over every source cell of the tabulated pair weight, straight from the potential
std::vector<double> direct(const Grid& g, const std::vector<double>& dens, const PotentialParams& p, double m,
                           double I_c, KernelConvolver::Component comp)
{
    double const k = kTwoPi / double(g.nt);
    double const w = g.h * g.h * k;
    std::vector<double> out(g.size(), 0.0);
    for (std::size_t t = 0; t < g.nt; ++t) {
        for (std::size_t j = 0; j < g.ny; ++j) {
            for (std::size_t i = 0; i < g.nx; ++i) {
                Vec2 const r{double(i) * g.h, double(j) * g.h};
                double acc = 0.0;
                for (std::size_t tb = 0; tb < g.nt; ++tb) {
                    for (std::size_t jb = 0; jb < g.ny; ++jb) {
                        for (std::size_t ib = 0; ib < g.nx; ++ib) {
                            Vec2 const rb{double(ib) * g.h, double(jb) * g.h};
                            double const th = (double(t) + 0.5) * k, thb = (double(tb) + 0.5) * k;
                            auto const e = potential_eval(r, rb, th, thb, p);
                            double v = 0.0;
                            switch (comp) {
                            case KernelConvolver::value: v = e.value / m; break;
                            case KernelConvolver::fx: v = e.grad.grad_r.x / m; break;
                            case KernelConvolver::fy: v = e.grad.grad_r.y / m; break;
                            case KernelConvolver::torque: v = e.grad.dtheta / I_c; break;
                            }
                            acc += v * w * dens[g.idx(ib, jb, tb)];
                        }
                    }
                }
                out[g.idx(i, j, t)] = acc;
            }
        }
    }
    return out;
}

} // namespace

TEST_SUITE("kernel_table") {

TEST_CASE("table entries") {
    auto const p = PotentialParams::make(0.1, 0.05, 1.0);
    double const h = 0.03, m = 1.5, I_c = 0.01;
    std::size_t const nt = 8;
    double const k = kTwoPi / double(nt);
    KernelTable const tab = build_kernel_table(h, nt, p, m, I_c, h * h * k);
    double const rc = cutoff_radius(p);
    CHECK(tab.s == std::size_t(std::ceil(rc / h)));
    CHECK(tab.size() == tab.value.size());

    long const s = long(tab.s);
    for (long dj = -s; dj <= s; ++dj) {
        for (long di = -s; di <= s; ++di) {
            bool const outside = std::hypot(double(di) * h, double(dj) * h) > rc;
            for (std::size_t t = 0; t < nt; ++t) {
                for (std::size_t tb = 0; tb < nt; ++tb) {
                    std::size_t const n = tab.index(di, dj, t, tb);
                    if (outside) {
                        CHECK(tab.value[n] == 0.0);
                        CHECK(tab.fx[n] == 0.0);
                        CHECK(tab.torque[n] == 0.0);
                    }
                    if (di == 0 && dj == 0) {
                        CHECK(tab.fx[n] == 0.0);
                        CHECK(tab.fy[n] == 0.0);
                    }
                }
            }
        }
    }

    std::mt19937_64 gen(12);
    std::uniform_int_distribution<long> ud(-s, s);
    std::uniform_int_distribution<std::size_t> ut(0, nt - 1);
    for (int trial = 0; trial < 200; ++trial) {
        long const di = ud(gen), dj = ud(gen);
        std::size_t const t = ut(gen), tb = ut(gen);
        auto const e = potential_eval({0, 0}, {double(di) * h, double(dj) * h}, tab.angle(t), tab.angle(tb), p);
        std::size_t const n = tab.index(di, dj, t, tb);
        double const w = h * h * k;
        CHECK(tab.value[n] == doctest::Approx(e.value * w / m).epsilon(1e-14));
        CHECK(tab.fx[n] == doctest::Approx(e.grad.grad_r.x * w / m).epsilon(1e-14));
        CHECK(tab.fy[n] == doctest::Approx(e.grad.grad_r.y * w / m).epsilon(1e-14));
        CHECK(tab.torque[n] == doctest::Approx(e.grad.dtheta * w / I_c).epsilon(1e-14));
    }
}

TEST_CASE("stencil smaller than a cell") {
    auto const p = PotentialParams::make(0.01, 0.005, 1.0);
    KernelTable const tab = build_kernel_table(0.5, 4, p, 1.0, 1.0, 1.0);
    CHECK(tab.s == 1);
    for (long di = -1; di <= 1; ++di) {
        for (long dj = -1; dj <= 1; ++dj) {
            if (di != 0 || dj != 0) {
                CHECK(tab.value[tab.index(di, dj, 0, 1)] == 0.0);
            }
        }
    }
}

TEST_CASE("convolution of zero and of a point mass") {
    Grid const g;
    auto const p = PotentialParams::make(0.1, 0.05, 1.0);
    double const k = kTwoPi / double(g.nt);
    KernelTable const tab = build_kernel_table(g.h, g.nt, p, 1.0, 0.01, g.h * g.h * k);
    KernelConvolver const conv(tab, g.nx, g.ny,
                               {KernelConvolver::value, KernelConvolver::fx, KernelConvolver::fy,
                                KernelConvolver::torque});
    std::vector<std::vector<double>> out;
    conv.apply(std::vector<double>(g.size(), 0.0), out);
    REQUIRE(out.size() == 4);
    for (const auto& o : out) {
        for (double v : o) {
            CHECK(std::abs(v) <= 1e-300);
        }
    }

    std::vector<double> dens(g.size(), 0.0);
    std::size_t const i0 = 5, j0 = 6, tb0 = 2;
    dens[g.idx(i0, j0, tb0)] = 1.0;
    conv.apply(dens, out);
    long const s = long(tab.s);
    for (std::size_t t = 0; t < g.nt; ++t) {
        for (std::size_t j = 0; j < g.ny; ++j) {
            for (std::size_t i = 0; i < g.nx; ++i) {
                long const di = long(i0) - long(i), dj = long(j0) - long(j);
                double want = 0.0;
                if (std::abs(di) <= s && std::abs(dj) <= s) {
                    want = tab.fx[tab.index(di, dj, t, tb0)];
                }
                CHECK(std::abs(out[1][g.idx(i, j, t)] - want) <= 1e-13);
            }
        }
    }
}

TEST_CASE("convolution equals direct summation") {
    Grid const g;
    auto const p = PotentialParams::make(0.1, 0.05, 1.0);
    double const k = kTwoPi / double(g.nt);
    double const m = 2.0, I_c = 0.05;
    KernelTable const tab = build_kernel_table(g.h, g.nt, p, m, I_c, g.h * g.h * k);
    std::vector<KernelConvolver::Component> const comps{KernelConvolver::value, KernelConvolver::fx,
                                                        KernelConvolver::fy, KernelConvolver::torque};
    KernelConvolver const conv(tab, g.nx, g.ny, comps);
    std::mt19937_64 gen(21);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> dens(g.size());
    for (double& d : dens) {
        d = u(gen);
    }
    std::vector<std::vector<double>> out;
    conv.apply(dens, out);
    for (std::size_t c = 0; c < comps.size(); ++c) {
        auto const want = direct(g, dens, p, m, I_c, comps[c]);
        double worst = 0.0;
        for (std::size_t n = 0; n < g.size(); ++n) {
            worst = std::max(worst, std::abs(out[c][n] - want[n]));
        }
        CHECK(worst <= 1e-12);
    }
}

TEST_CASE("odd angle counts take the unfolded path") {
    Grid g;
    g.nt = 3;
    g.nx = 7;
    g.ny = 5;
    auto const p = PotentialParams::make(0.1, 0.05, 1.0);
    double const k = kTwoPi / double(g.nt);
    KernelTable const tab = build_kernel_table(g.h, g.nt, p, 1.0, 1.0, g.h * g.h * k);
    KernelConvolver const conv(tab, g.nx, g.ny, {KernelConvolver::torque});
    std::mt19937_64 gen(22);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> dens(g.size());
    for (double& d : dens) {
        d = u(gen);
    }
    std::vector<std::vector<double>> out;
    conv.apply(dens, out);
    auto const want = direct(g, dens, p, 1.0, 1.0, KernelConvolver::torque);
    for (std::size_t n = 0; n < g.size(); ++n) {
        CHECK(std::abs(out[0][n] - want[n]) <= 1e-12);
    }
}

}
