#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "islr/core.hpp"
#include "islr/kernel.hpp"

namespace islr {

enum class BoundaryKind { Plus, Periodic, OptimalStriped };

struct Boundary {
    BoundaryKind kind = BoundaryKind::Plus;
    long h = 0;       // stripe width (OptimalStriped)
    bool vertical = true;
    long phase = 0;   // offset in [0, 2h)

    // Infinite-background spin at a site (Plus / OptimalStriped only).
    int background_at(long x, long y) const;
};

// Finite box of spins plus a boundary descriptor.  Row-major storage,
// row 0 at y0.
struct SpinConfig {
    long x0 = 0, y0 = 0, nx = 0, ny = 0;
    std::vector<int8_t> spins;
    Boundary bc;

    bool inside(long x, long y) const {
        return x >= x0 && x < x0 + nx && y >= y0 && y < y0 + ny;
    }
    int box_at(long x, long y) const {
        return spins[size_t((y - y0) * nx + (x - x0))];
    }
    void set(long x, long y, int v) {
        spins[size_t((y - y0) * nx + (x - x0))] = int8_t(v);
    }
    // Spin of the infinite-volume configuration (box or background).
    int at(long x, long y) const {
        return inside(x, y) ? box_at(x, y) : bc.background_at(x, y);
    }
    void validate() const;

    static SpinConfig filled(long x0, long y0, long nx, long ny, int v, Boundary bc);
    // Box cut out of the pure background pattern.
    static SpinConfig background_patch(long x0, long y0, long nx, long ny, Boundary bc);

    // plain-text grid format and JSON alternative
    static SpinConfig parse(std::istream& in);
    static SpinConfig load(const std::string& path);
    void write(std::ostream& out) const;
    std::string to_json() const;
    static SpinConfig from_json(const std::string& text);
};

// H_X(sigma_X | background): all pair terms touching the box, against the
// infinite background, truncated at radius R (auto when R = 0).
SumResult relative_energy(const SpinConfig& cfg, const ModelParams& mp, long R = 0);

// H_X(sigma_X | bg) - H_X(bg_X | bg), summed pairwise so that far-field
// terms cancel exactly; only pairs touching a flipped site contribute.
SumResult stability_gap(const SpinConfig& cfg, const ModelParams& mp, long R = 0);

// Energy of the periodic extension; 1D inputs (ny == 1) use the ring
// Hamiltonian with v_L, 2D inputs the doubly periodized kernel.
SumResult periodic_energy(const SpinConfig& cfg, const ModelParams& mp);

struct Droplet {
    std::vector<std::pair<long, long>> cells;  // row-major sorted
    long perimeter = 0;                        // |Gamma(delta)|
};

// Maximal 4-connected components of the minus set (Plus boundary).
std::vector<Droplet> droplet_decompose(const SpinConfig& cfg);

// U(delta) = -2 sum_{x in delta, y notin delta} |x-y|^{-p}
SumResult droplet_self_energy(const Droplet& d, const ModelParams& mp);
// W(delta, delta') = 4 sum_{x in delta, y in delta'} |x-y|^{-p}
SumResult droplet_interaction(const Droplet& a, const Droplet& b, const ModelParams& mp);

// H^+ = 2J sum |Gamma| + sum U + 1/2 sum_{pairs} W  (droplet representation)
Certificate droplet_identity_check(const SpinConfig& cfg, const ModelParams& mp);

struct ReductionReport {
    std::vector<double> window_gap;   // |H_X-difference - periodic-difference| per L
    std::vector<double> per_copy;     // H^+ / M^2 of the juxtaposition per M
    bool shrinking = false;
    bool converging = false;
};

// Eqs. relating sigma*-relative, periodic, and plus-boundary energies.
ReductionReport boundary_reduction_check(const SpinConfig& pert, const ModelParams& mp,
                                         const std::vector<long>& Ls,
                                         const std::vector<long>& Ms);

}  // namespace islr
