#pragma once

#include <limits>
#include <vector>

#include "islr/core.hpp"
#include "islr/kernel.hpp"

namespace islr {

// Sentinel for an infinite spacing.
constexpr long kInfSpacing = std::numeric_limits<long>::max();

// Alternating-sign block layout: widths h_1..h_n of minus blocks and
// spacings w_1..w_{n-1} of plus blocks between them.
struct StripeSequence {
    std::vector<long> widths;
    std::vector<long> spacings;

    long n() const { return long(widths.size()); }
    long span() const {
        long s = 0;
        for (long h : widths) s += h;
        for (long w : spacings) s += w;
        return s;
    }
    void validate() const;
};

// Energy per site of the infinite periodic striped configuration of
// width h (period 2h):  e_s(h) = 2J/h + sum_{m>=1} (c_h(m) - 1) g(m),
// where c_h is the square-wave autocorrelation (a triangle wave).
SumResult striped_energy_per_site(long h, const ModelParams& mp);

struct EnergyCurve {
    long hmax = 0;
    std::vector<SumResult> es;  // index h = 1..hmax
    long h_star = 0;
    bool tie = false;

    const SumResult& at(long h) const { return es.at(size_t(h)); }
};

EnergyCurve build_energy_curve(const ModelParams& mp, long hmax);

// argmin_h e_s(h); requires tau < 0.  On a tie within certified error
// the smaller width is reported and the flag is set.
std::pair<long, bool> optimal_width(const ModelParams& mp);

// Energy per unit vertical length of n infinite vertical stripes.
SumResult e_infinity(const StripeSequence& seq, const ModelParams& mp);

// Interaction of the half-infinite strip of width h with the two quarter
// spaces at horizontal distances w1, w2 below it.  Pass kInfSpacing (or
// any w <= 0) to drop a quarter space.
SumResult f_interaction(long w1, long h, long w2, const ModelParams& mp);

// Chessboard (reflection-positivity) estimate on the ring of length L:
//   H^per(blocks) >= sum_i [h_i e_s(h_i) + w_i e_s(w_i)],
// with the closing spacing w_n = L - span(seq) >= 1.
Certificate chessboard_check(const StripeSequence& seq, long L, const ModelParams& mp);

// 1D periodic Hamiltonian of the column model on [1,L] with kernel v_L.
// spins[i] in {-1,+1}; includes the nearest-neighbor -J term.
SumResult ring_energy(const std::vector<int>& spins, const ModelParams& mp);

// Largest C3 with e_s(w) - e_s(h*) >= C3/w^{p-2} + tau/w for w <= w_max.
// Returns the fitted constant (<= 0 signals failure).
double gap_bound_fit(const ModelParams& mp, long w_max, const EnergyCurve* curve = nullptr);

}  // namespace islr
