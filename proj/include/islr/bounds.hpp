#pragma once

// Localized tile/region energies and numeric certificates for the energy
// inequalities: droplet self-energy lower bound, localization, the sliced
// lower bound, the good-region and bad-tile bounds, and the quantitative
// stability estimate with its constant-free ground-state corollary.

#include "islr/config.hpp"
#include "islr/geometry.hpp"
#include "islr/stripes.hpp"

namespace islr {

// E_T: sum over bubbles of 2J|Gamma_b| + u_T(b), plus pair interactions and
// the corner term 2^{1-p/2} n_c(T). nc2 is the doubled corner count.
SumResult localized_energy_bad_tile(const BubbleConfig& bt, long nc2, const ModelParams& mp);

// E_G: same without the corner term; the starred pair sum keeps only pairs
// whose projections onto the stripe axis are disjoint (orientation 0 =
// vertical stripes -> x-projections). Throws if any bubble has corners.
SumResult localized_energy_good_region(const BubbleConfig& bg, int orientation,
                                       const ModelParams& mp);

// U(delta) >= -sum_b S(d_b) + 2^{1-p/2} N_c + 4 sum_{screened pairs} |x-y|^-p
Certificate self_energy_lower_bound_check(const Droplet& d, const ModelParams& mp);

// H^+(config) >= sum_T E_T + sum_G E_G over the given partition.
Certificate localization_check(const SpinConfig& cfg, const TilePartition& part,
                               const ModelParams& mp);

// E_G' >= l * sum_j e_inf(seq_j) - sum_j f(w1(s_j), h(s_j), w2(s_j))
Certificate sliced_region_bound_check(const SpinConfig& cfg, const SlicedRegion& sliced,
                                      const ModelParams& mp);

struct FittedCertificate {
    Certificate cert;
    double fitted = 0.0;  // smallest (resp. largest) constant making it hold
};

// E_G >= e_s(h*)|G| - c1 |tau| |dG| + (1/2) sum_{h != h*} (e_s(h)-e_s(h*)) A_h(G)
// fitted = minimal c1 for which the bound holds within tails.
FittedCertificate good_region_bound_check(const SpinConfig& cfg, const TilePartition& part,
                                          size_t region_index, const ModelParams& mp, double c1);

struct BadTileReport {
    Certificate cert;
    double fitted_c2 = 0.0;  // largest c2 for which the bound holds within tails
    bool bubble_bound_ok = true;   // per-bubble 2J|G_b| + u_T(b) >= tau |G_b|
    bool corner_length_ok = true;  // |G_b| <= 2l (1 + nu_c(b))
};

// E_T >= l^2 e_s(h*) + c2 [ n_c(T) + |tau|^{(p-2)/(p-3)} l^2 chi_hole(T) ]
BadTileReport bad_tile_bound_check(const SpinConfig& cfg, const TilePartition& part,
                                   size_t tile_index, const Localization& loc,
                                   const ModelParams& mp, double c2, double c0 = 1.0);

struct StabilityReport {
    Certificate quantitative;  // with the configured C1
    Certificate ground_state;  // constant-free corollary: relative energy >= 0
    bool strict_expected = false;  // corners present
    bool strict_ok = true;         // strictness beyond tails when expected
    double fitted_C1 = 0.0;
    long nc2 = 0;
    long hole_tiles = 0;
    double stripe_penalty = 0.0;  // (1/2) sum (e_s(h)-e_s(h*)) A_h over regions
};

// Relative energy of a compact perturbation of the striped ground state
// against the corner/hole/stripe-defect lower bound at tile side ell.
StabilityReport stability_certificate(const SpinConfig& cfg, const ModelParams& mp, long ell,
                                      double C1, double C0 = 8.0);

}  // namespace islr
