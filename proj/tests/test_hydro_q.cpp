#include "doctest.h"

#include "ellipsim/hydro_q.hpp"

#include <random>
#include <sstream>

using namespace ellipsim;

namespace {

QProblem base_problem(Closure c)
{
    QProblem p;
    p.lattice = Lattice::make(Rect{0, 0.6, 0, 0.6}, 0.1, 4);
    p.closure = c;
    p.dyn = {1.0, 1.0, 1.0, 0.01, 0.0, 0.0};
    p.flow = FlowField::zero();
    p.interaction = false;
    p.bc = BoundarySpec::spatial(BoundaryKind::neumann);
    return p;
}

ConservedField uniform_state(const Lattice& lat, double q, Vec2 v, double w)
{
    ConservedField f = make_qgrid(lat);
    for (std::size_t c = 0; c < f.num_cells(); ++c) {
        f.at(c, 0) = q;
        f.at(c, 1) = q * v.x;
        f.at(c, 2) = q * v.y;
        f.at(c, 3) = q * w;
    }
    return f;
}

// worst |v - v_exact| on a spatially uniform state relaxing towards u_eff
double relaxation_error(double dt)
{
    QProblem p = base_problem(Closure::maxwellian);
    Vec2 const u{0.5, -0.2};
    p.flow = FlowField::uniform(u);
    p.dyn.A = 1.0;
    QSolver const solver(p);
    Vec2 const v0{-0.3, 0.4};
    ConservedField f = uniform_state(p.lattice, 0.7, v0, 0.0);
    double const rate = 1.0 + 0.5;
    Vec2 const ueff = (1.0 / rate) * u;
    double worst = 0.0;
    int const n = int(std::lround(1.0 / dt));
    for (int s = 1; s <= n; ++s) {
        solver.advance(f, dt);
        Vec2 const exact = ueff + std::exp(-rate * s * dt) * (v0 - ueff);
        for (std::size_t c = 0; c < f.num_cells(); ++c) {
            Vec2 const v{f.at(c, 1) / f.at(c, 0), f.at(c, 2) / f.at(c, 0)};
            worst = std::max(worst, norm(v - exact));
        }
    }
    return worst;
}

ConservedField random_q(const Lattice& lat, unsigned seed)
{
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> uq(0.0, 2.0), uv(-0.5, 0.5);
    ConservedField f = make_qgrid(lat);
    for (std::size_t c = 0; c < f.num_cells(); ++c) {
        double const q = uq(gen);
        f.at(c, 0) = q;
        f.at(c, 1) = q * uv(gen);
        f.at(c, 2) = q * uv(gen);
        f.at(c, 3) = q * uv(gen);
    }
    return f;
}

} // namespace

TEST_SUITE("hydro_q") {

TEST_CASE("fluxes") {
    std::array<double, 4> const rest{1.0, 0.0, 0.0, 0.0};
    std::array<double, 4> f{};
    q_flux(rest, 0, Closure::maxwellian, f);
    CHECK(f == std::array<double, 4>{0.0, 1.0, 0.0, 0.0});
    for (std::size_t axis : {0u, 1u, 2u}) {
        q_flux(rest, axis, Closure::monokinetic, f);
        CHECK(f == std::array<double, 4>{});
    }

    // hand evaluation: q = 2, v = (0.5, -1), w = 3
    std::array<double, 4> const s{2.0, 1.0, -2.0, 6.0};
    q_flux(s, 2, Closure::maxwellian, f);
    CHECK(f[0] == doctest::Approx(6.0));
    CHECK(f[1] == doctest::Approx(3.0));
    CHECK(f[2] == doctest::Approx(-6.0));
    CHECK(f[3] == doctest::Approx(18.0 + 2.0));
    q_flux(s, 0, Closure::maxwellian, f);
    CHECK(f[1] == doctest::Approx(0.5 + 2.0));
    CHECK(f[2] == doctest::Approx(-1.0));
}

TEST_CASE("closures differ exactly by the pressure entries") {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0), uq(0.1, 3.0);
    for (int i = 0; i < 100; ++i) {
        std::array<double, 4> const s{uq(gen), u(gen), u(gen), u(gen)};
        for (std::size_t axis : {0u, 1u, 2u}) {
            std::array<double, 4> fm{}, fk{};
            q_flux(s, axis, Closure::maxwellian, fm);
            q_flux(s, axis, Closure::monokinetic, fk);
            for (std::size_t c = 0; c < 4; ++c) {
                CHECK(std::abs(fm[c] - fk[c] - (c == axis + 1 ? s[0] : 0.0)) <= 1e-15 * (1.0 + std::abs(fm[c])));
            }
        }
    }
}

TEST_CASE("initial data") {
    Lattice const lat = Lattice::make(Rect{-1, 1, -1, 1}, 0.05, 8);
    ConservedField const q = q_initial(lat, Rect{-0.5, 0.5, -0.5, 0.5}, 0.0);
    CHECK(std::abs(q.total(0) - 1.0) <= 1e-12);
    auto const ang = q_angular(q);
    CHECK(ang[0] * lat.k() == doctest::Approx(1.0));
    for (std::size_t t = 1; t < 8; ++t) {
        CHECK(ang[t] < 1e-10);
    }
    auto const rho = q_marginal(q);
    double mass = 0.0;
    for (double r : rho) {
        mass += r * lat.h * lat.h;
    }
    CHECK(mass == doctest::Approx(1.0));
    CHECK_THROWS_AS(q_initial(lat, Rect{5, 6, 5, 6}, 0.0), std::invalid_argument);
}

TEST_CASE("uniform rest state is a fixed point") {
    for (Closure c : {Closure::maxwellian, Closure::monokinetic}) {
        QSolver const solver(base_problem(c));
        ConservedField f = uniform_state(solver.lattice(), 0.8, {}, 0.0);
        ConservedField const before = f;
        for (int s = 0; s < 10; ++s) {
            solver.advance(f, 0.01);
        }
        for (std::size_t i = 0; i < f.data().size(); ++i) {
            CHECK(std::abs(f.data()[i] - before.data()[i]) <= 1e-14);
        }
    }
}

TEST_CASE("velocity relaxation follows the linear ODE at first order") {
    double const e1 = relaxation_error(0.01);
    double const e2 = relaxation_error(0.005);
    CHECK(e1 < 0.01);
    CHECK(e1 / e2 == doctest::Approx(2.0).epsilon(0.15));
}

TEST_CASE("mass is conserved with reflective walls") {
    for (Closure c : {Closure::maxwellian, Closure::monokinetic}) {
        QProblem p = base_problem(c);
        p.lattice = Lattice::make(Rect{-0.6, 0.6, -0.6, 0.6}, 0.1, 4);
        p.flow = FlowField::top_bottom();
        p.interaction = true;
        p.potential = PotentialParams::make(0.1, 0.05, 1.0);
        p.dyn.A = 0.5;
        p.bc = BoundarySpec::spatial(BoundaryKind::reflective);
        QSolver const solver(p);
        ConservedField f = random_q(p.lattice, 3);
        double const m0 = f.total(0);
        for (int s = 0; s < 100; ++s) {
            solver.advance(f, solver.stable_dt(f, 0.01));
        }
        CHECK(std::abs(f.total(0) - m0) <= 1e-10);
    }
}

TEST_CASE("interaction operator matches a direct quadruple sum") {
    Lattice const lat = Lattice::make(Rect{0, 1.2, 0, 1.2}, 0.1, 4);
    auto const pot = PotentialParams::make(0.1, 0.05, 1.0);
    double const m = 1.0, I_c = 0.1;
    KernelTable const tab = build_kernel_table(lat, pot, m, I_c);
    ConservedField const q = random_q(lat, 4);
    QInteraction const got = q_interaction(lat, q, tab);
    double const w = lat.h * lat.h * lat.k();
    double worst = 0.0;
    for (std::size_t t = 0; t < lat.ntheta; ++t) {
        for (std::size_t j = 0; j < lat.ny; ++j) {
            for (std::size_t i = 0; i < lat.nx; ++i) {
                Vec2 a;
                double alpha = 0.0;
                for (std::size_t tb = 0; tb < lat.ntheta; ++tb) {
                    for (std::size_t jb = 0; jb < lat.ny; ++jb) {
                        for (std::size_t ib = 0; ib < lat.nx; ++ib) {
                            auto const g = potential_grad(lat.center(i, j), lat.center(ib, jb), lat.theta(t),
                                                          lat.theta(tb), pot);
                            double const qb = q.at(q.cell_index(ib, jb, tb), 0);
                            a -= (w * qb / m) * g.grad_r;
                            alpha -= w * qb * g.dtheta / I_c;
                        }
                    }
                }
                std::size_t const c = q.cell_index(i, j, t);
                worst = std::max({worst, std::abs(got.ax[c] - a.x), std::abs(got.ay[c] - a.y),
                                  std::abs(got.alpha[c] - alpha)});
            }
        }
    }
    CHECK(worst <= 1e-12);

    ConservedField const zero = make_qgrid(lat);
    QInteraction const z = q_interaction(lat, zero, tab);
    for (double v : z.alpha) {
        CHECK(std::abs(v) <= 1e-300);
    }
}

TEST_CASE("angular velocity relaxes to -1 in the rotational flow") {
    QProblem p = base_problem(Closure::monokinetic);
    p.lattice = Lattice::make(Rect{-0.5, 0.5, -0.5, 0.5}, 0.05, 8);
    p.flow = FlowField::rotational();
    QSolver const solver(p);
    ConservedField f = q_initial(p.lattice, Rect{0.1, 0.3, -0.1, 0.1}, 0.0);
    double t = 0.0;
    double prev = 1e300;
    for (int s = 0; s < 60; ++s) {
        solver.run_to(f, t, t + 0.05, 0.05);
        double worst = 0.0;
        for (std::size_t c = 0; c < f.num_cells(); ++c) {
            if (f.at(c, 0) > 1e-6) {
                worst = std::max(worst, std::abs(f.at(c, 3) / f.at(c, 0) + 1.0));
            }
        }
        if (t > 0.5) {
            CHECK(worst <= prev + 1e-12);
        }
        prev = worst;
    }
    CHECK(prev < 0.06);
}

TEST_CASE("csv output") {
    Lattice const lat = Lattice::make(Rect{0, 0.2, 0, 0.2}, 0.1, 2);
    ConservedField const q = q_initial(lat, Rect{0, 0.2, 0, 0.2}, 0.0);
    std::ostringstream grid, marg;
    write_q_grid_csv(grid, 0.5, q);
    write_q_marginal_csv(marg, 0.5, q);
    std::istringstream gi(grid.str()), mi(marg.str());
    std::string line;
    std::getline(gi, line);
    CHECK(line == "t,ix,iy,itheta,q,qv1,qv2,qw");
    std::size_t rows = 0;
    while (std::getline(gi, line)) {
        ++rows;
    }
    CHECK(rows == 8);
    std::getline(mi, line);
    CHECK(line == "t,ix,iy,rho");
    std::getline(mi, line);
    CHECK(line.rfind("0.5,0,0,", 0) == 0);
}

}
