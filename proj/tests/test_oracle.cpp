#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "islr/oracle.hpp"
#include "islr/stripes.hpp"

#include <cmath>
#include <complex>

using namespace islr;

namespace {

ModelParams params_at(double J) {
    ModelParams mp = make_params(5.0, 2, 0.0);
    mp.J = J;
    return mp;
}

bool is_uniform(const SpinConfig& c) {
    for (long y = 0; y < c.ny; ++y)
        for (long x = 0; x < c.nx; ++x)
            if (c.box_at(x, y) != c.box_at(0, 0)) return false;
    return true;
}

// widths of the alternating blocks of a 1D minimizer, empty if not blocks
long block_width(const SpinConfig& c) {
    long L = c.nx;
    long first = -1;
    for (long x = 0; x < L; ++x)
        if (c.box_at(x, 0) != c.box_at((x + L - 1) % L, 0)) {
            first = x;
            break;
        }
    if (first < 0) return 0;
    long w = 0, run = 0;
    for (long i = 0; i < L; ++i) {
        long x = (first + i) % L;
        ++run;
        if (c.box_at((x + 1) % L, 0) != c.box_at(x, 0)) {
            if (w == 0) w = run;
            if (run != w) return -1;
            run = 0;
        }
    }
    return run == 0 ? w : -1;
}

}  // namespace

TEST_CASE("1D enumeration: ferromagnetic regime picks the uniform state") {
    ModelParams mp = params_at(5.0);  // J far above J_c
    SearchReport r = exhaustive_1d(10, mp);
    REQUIRE(r.minimizers.size() == 1);
    CHECK(is_uniform(r.minimizers[0]));
    CHECK(r.min_energy.value == doctest::Approx(0.0));
    CHECK(r.enumerated == (1ull << 9));
    CHECK(r.represented == (1ull << 10));
    CHECK(r.sym_factor == 2);
}

TEST_CASE("1D enumeration: block minimizer matches the striped-energy argmin") {
    ModelParams mp = params_at(make_params(5.0, 2, 0.0).jc.value - 0.05);  // tau = -0.1
    SearchReport r = exhaustive_1d(20, mp);
    REQUIRE(!r.minimizers.empty());

    // the argmin of e_s over widths compatible with L = 20
    long hbest = 0;
    double ebest = 0.0;
    for (long h : {1L, 2L, 5L, 10L}) {
        double e = striped_energy_per_site(h, mp).value;
        if (hbest == 0 || e < ebest) {
            hbest = h;
            ebest = e;
        }
    }
    CHECK(hbest == 5);
    for (auto& c : r.minimizers) CHECK(block_width(c) == hbest);
    CHECK(r.min_energy.value ==
          doctest::Approx(20.0 * ebest).epsilon(1e-9));
    CHECK(r.striped);

    // minimizer energy is reproduced by the certified ring Hamiltonian
    std::vector<int> s;
    for (long x = 0; x < 20; ++x) s.push_back(r.minimizers[0].box_at(x, 0));
    SumResult e = ring_energy(s, mp);
    CHECK(std::abs(e.value - r.min_energy.value) <= e.tail + r.min_energy.tail + 1e-12);

    // spot-check symmetry invariance of the minimal energy
    std::vector<int> shifted(s.begin() + 3, s.end());
    shifted.insert(shifted.end(), s.begin(), s.begin() + 3);
    CHECK(ring_energy(shifted, mp).value == doctest::Approx(e.value).epsilon(1e-12));
    std::vector<int> flipped = s;
    for (auto& v : flipped) v = -v;
    CHECK(ring_energy(flipped, mp).value == doctest::Approx(e.value).epsilon(1e-12));
}

TEST_CASE("1D symmetry reduction is lossless") {
    ModelParams mp = params_at(make_params(5.0, 2, 0.0).jc.value - 0.05);
    for (long L : {8L, 12L, 16L}) {
        SearchReport a = exhaustive_1d(L, mp, true);
        SearchReport b = exhaustive_1d(L, mp, false);
        CHECK(a.min_energy.value == doctest::Approx(b.min_energy.value).epsilon(1e-12));
        CHECK(a.minimizers.size() == b.minimizers.size());
        CHECK(b.enumerated == 2 * a.enumerated);
    }
    CHECK_THROWS_AS(exhaustive_1d(30, mp), BudgetError);
}

TEST_CASE("2D enumeration around the finite-size crossing") {
    ModelParams mp = params_at(0.0);
    double jx = stripe_crossing_J(4, 4, mp);
    CHECK(jx < mp.jc.value);
    CHECK(jx > 0.5 * mp.jc.value);

    SearchReport lo = exhaustive_2d(4, 4, params_at(jx - 0.02));
    REQUIRE(!lo.minimizers.empty());
    CHECK(lo.striped);
    CHECK(lo.min_energy.value < -lo.min_energy.tail);
    // stripes are feasible candidates, so the optimum can only be lower
    SpinConfig cand = SpinConfig::filled(0, 0, 4, 4, 1, Boundary{BoundaryKind::Periodic});
    for (long y = 0; y < 4; ++y)
        for (long x = 0; x < 4; ++x)
            if (x % 4 < 2) cand.set(x, y, -1);
    CHECK(lo.min_energy.value <= periodic_energy(cand, params_at(jx - 0.02)).value + 1e-9);

    SearchReport hi = exhaustive_2d(4, 4, params_at(jx + 0.05));
    REQUIRE(hi.minimizers.size() == 1);
    CHECK(is_uniform(hi.minimizers[0]));
    CHECK(hi.min_energy.value == doctest::Approx(0.0));

    // minimal energy is invariant under the torus symmetries
    ModelParams below = params_at(jx - 0.02);
    SpinConfig m = lo.minimizers[0];
    SpinConfig t = m;
    for (long y = 0; y < 4; ++y)
        for (long x = 0; x < 4; ++x) t.set(x, y, m.box_at((x + 1) % 4, (y + 2) % 4));
    CHECK(periodic_energy(t, below).value ==
          doctest::Approx(lo.min_energy.value).epsilon(1e-9));

    CHECK_THROWS_AS(exhaustive_2d(5, 6, mp), BudgetError);
}

TEST_CASE("annealing reaches the exhaustive optimum") {
    ModelParams mp = params_at(stripe_crossing_J(4, 4, params_at(0.0)) - 0.02);
    double exact = exhaustive_2d(4, 4, mp).min_energy.value;
    int hits = 0;
    for (int s = 0; s < 20; ++s) {
        SearchReport a = anneal(4, 4, mp, AnnealSchedule{2.0, 0.02, 1500}, 100 + s);
        if (a.min_energy.value < exact + 1e-7) ++hits;
        REQUIRE(!a.best_trace.empty());
        for (size_t i = 1; i < a.best_trace.size(); ++i)
            CHECK(a.best_trace[i] <= a.best_trace[i - 1] + 1e-12);
    }
    CHECK(hits >= 19);
}

TEST_CASE("annealed medium torus develops a stripe-dominant structure factor") {
    ModelParams mp = params_at(make_params(5.0, 2, 0.0).jc.value - 0.05);
    SearchReport a = anneal(12, 12, mp, AnnealSchedule{6.0, 0.05, 50000}, 7);
    const SpinConfig& c = a.minimizers[0];

    double best_axis = 0.0, best_off = 0.0;
    for (long ky = 0; ky < 12; ++ky)
        for (long kx = 0; kx < 12; ++kx) {
            if (kx == 0 && ky == 0) continue;
            std::complex<double> f = 0.0;
            for (long y = 0; y < 12; ++y)
                for (long x = 0; x < 12; ++x)
                    f += double(c.box_at(x, y)) *
                         std::polar(1.0, -2.0 * M_PI * double(kx * x + ky * y) / 12.0);
            double s2 = std::norm(f);
            if (kx == 0 || ky == 0)
                best_axis = std::max(best_axis, s2);
            else
                best_off = std::max(best_off, s2);
        }
    CHECK(best_axis > 4.0 * best_off);
    CHECK(a.min_energy.value < 0.0);
}
