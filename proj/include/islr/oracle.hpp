#pragma once

// Ground-truth search: exhaustive enumeration of periodic ground states on
// small rings and tori, plus a seeded annealing heuristic for medium sizes.

#include "islr/config.hpp"

#include <cstdint>
#include <vector>

namespace islr {

struct SearchReport {
    std::vector<SpinConfig> minimizers;  // canonical orbit representatives
    SumResult min_energy;                // certified re-evaluation of the best
    std::uint64_t enumerated = 0;        // configurations actually evaluated
    std::uint64_t represented = 0;       // configurations covered (2^N)
    std::uint64_t sym_factor = 1;        // reduction factor applied up front
    double wall_seconds = 0.0;
    bool striped = false;  // some minimizer is constant along one axis
    std::vector<double> best_trace;  // anneal: best-so-far after each sweep
};

// All 2^L periodic 1D configurations under the ring Hamiltonian with the
// periodized chain kernel; reduce = true fixes the first spin by global-flip
// symmetry.  Minimizers are reported up to cyclic shift, reflection and flip.
SearchReport exhaustive_1d(long L, const ModelParams& mp, bool reduce = true);

// All 2^{Lx Ly} periodic torus configurations, Lx*Ly <= 26.  Minimizers are
// reported up to translation, axis mirrors, axis swap (square tori) and flip.
SearchReport exhaustive_2d(long Lx, long Ly, const ModelParams& mp);

struct AnnealSchedule {
    double t_start = 6.0;
    double t_end = 0.05;
    long sweeps = 4000;
};

// Metropolis single-spin-flip annealing on the torus with a geometric cooling
// schedule; deterministic for a fixed seed.  Reports the best visited state.
SearchReport anneal(long Lx, long Ly, const ModelParams& mp,
                    const AnnealSchedule& sched, std::uint64_t seed);

// Coupling at which the best striped candidate on the torus ties with the
// uniform state (whose periodic energy is zero); the energy is linear in J.
double stripe_crossing_J(long Lx, long Ly, const ModelParams& mp);

}  // namespace islr
