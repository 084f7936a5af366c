#include "islr/oracle.hpp"

#include "islr/stripes.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace islr {

namespace {

using Clock = std::chrono::steady_clock;

// Symmetric pair-coupling table W(i,j) for the torus Hamiltonian
//   H = sum_{bonds} -J (s_i s_j - 1) + sum_{i<j} v(i,j) (s_i s_j - 1),
// folded so that H = sum_{i<j} W(i,j) (s_i s_j - 1).  Wrapped boxes of
// side 2 put both parallel bonds on the same unordered pair.
std::vector<double> pair_table_2d(long Lx, long Ly, const ModelParams& mp) {
    const Kernel& K = mp.kernel();
    const long Lmin = std::min(Lx, Ly);
    const long N = std::max(2L, (1200 + Lmin - 1) / Lmin);
    std::vector<double> V(size_t(Lx) * size_t(Ly), 0.0);
    for (long dy = 0; dy < Ly; ++dy)
        for (long dx = 0; dx < Lx; ++dx) {
            Kahan v;
            for (long n2 = -N; n2 <= N; ++n2)
                for (long n1 = -N; n1 <= N; ++n1) {
                    double ax = double(dx + n1 * Lx), ay = double(dy + n2 * Ly);
                    double r2 = ax * ax + ay * ay;
                    if (r2 != 0.0) v.add(K.pair(r2));
                }
            V[size_t(dy * Lx + dx)] = v.sum();
        }

    const long Ns = Lx * Ly;
    std::vector<double> W(size_t(Ns) * size_t(Ns), 0.0);
    for (long i = 0; i < Ns; ++i)
        for (long j = i + 1; j < Ns; ++j) {
            long dx = (j % Lx) - (i % Lx), dy = j / Lx - i / Lx;
            if (dx < 0) dx += Lx;
            if (dy < 0) dy += Ly;
            double w = V[size_t(dy * Lx + dx)];
            W[size_t(i * Ns + j)] = w;
            W[size_t(j * Ns + i)] = w;
        }
    for (long i = 0; i < Ns; ++i) {
        long x = i % Lx, y = i / Lx;
        long jx = y * Lx + (x + 1) % Lx, jy = ((y + 1) % Ly) * Lx + x;
        if (jx != i) {
            W[size_t(i * long(Lx * Ly) + jx)] += -mp.J;
            W[size_t(jx * long(Lx * Ly) + i)] += -mp.J;
        }
        if (jy != i) {
            W[size_t(i * long(Lx * Ly) + jy)] += -mp.J;
            W[size_t(jy * long(Lx * Ly) + i)] += -mp.J;
        }
    }
    return W;
}

std::vector<double> pair_table_1d(long L, const ModelParams& mp) {
    const Kernel& K = mp.kernel();
    std::vector<double> vL(size_t(L), 0.0);
    for (long x = 1; x < L; ++x) vL[size_t(x)] = K.chain_periodic(x, L).value;
    std::vector<double> W(size_t(L) * size_t(L), 0.0);
    for (long i = 0; i < L; ++i)
        for (long j = i + 1; j < L; ++j) {
            double w = vL[size_t(j - i)];
            if (j - i == 1 || j - i == L - 1) w += -mp.J;
            if (L == 2) w += -mp.J;  // both ring bonds join the same pair
            W[size_t(i * L + j)] = w;
            W[size_t(j * L + i)] = w;
        }
    return W;
}

double table_energy(const std::vector<double>& W, const std::vector<int>& s) {
    long n = long(s.size());
    Kahan e;
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j)
            e.add(W[size_t(i * n + j)] * double(s[size_t(i)] * s[size_t(j)] - 1));
    return e.sum();
}

// Gray-code sweep over `bits` free spins (the rest stay +1), reporting every
// mask within `slop` of the running minimum.
struct SweepResult {
    double best = 0.0;
    std::vector<std::uint64_t> masks;
    std::uint64_t count = 0;
};

SweepResult gray_sweep(const std::vector<double>& W, long n, long bits, double slop) {
    std::vector<int> s(size_t(n), 1);
    std::vector<double> field(size_t(n), 0.0);  // field[i] = sum_j W(i,j) s_j
    for (long i = 0; i < n; ++i) {
        Kahan f;
        for (long j = 0; j < n; ++j)
            if (j != i) f.add(W[size_t(i * n + j)] * double(s[size_t(j)]));
        field[size_t(i)] = f.sum();
    }

    SweepResult out;
    double e = 0.0;  // all-plus reference
    out.masks.push_back(0);
    std::uint64_t mask = 0;
    const std::uint64_t total = 1ull << bits;
    for (std::uint64_t g = 1; g < total; ++g) {
        long k = long(std::countr_zero(g));  // Gray code flips bit k
        double sk = double(s[size_t(k)]);
        // flipping k changes every pair term (s_k s_j - 1) by -2 s_k s_j
        e += -2.0 * sk * field[size_t(k)];
        s[size_t(k)] = -s[size_t(k)];
        for (long j = 0; j < n; ++j)
            if (j != k) field[size_t(j)] += -2.0 * sk * W[size_t(k * n + j)];
        mask ^= 1ull << k;

        if (e < out.best - slop) {
            out.best = e;
            out.masks.clear();
        }
        if (e <= out.best + slop) out.masks.push_back(mask);
    }
    out.count = total;
    return out;
}

std::vector<int> mask_spins(std::uint64_t mask, long n) {
    std::vector<int> s(size_t(n), 1);
    for (long i = 0; i < n; ++i)
        if (mask >> i & 1) s[size_t(i)] = -1;
    return s;
}

// Lexicographically smallest mask over the torus symmetry group.
std::uint64_t canonical_2d(std::uint64_t mask, long Lx, long Ly) {
    long n = Lx * Ly;
    auto get = [&](std::uint64_t m, long x, long y) { return m >> (y * Lx + x) & 1; };
    std::uint64_t best = ~0ull >> (64 - n);
    bool swap_ok = (Lx == Ly);
    for (int sw = 0; sw < (swap_ok ? 2 : 1); ++sw)
        for (int mx = 0; mx < 2; ++mx)
            for (int my = 0; my < 2; ++my)
                for (long tx = 0; tx < Lx; ++tx)
                    for (long ty = 0; ty < Ly; ++ty)
                        for (int fl = 0; fl < 2; ++fl) {
                            std::uint64_t m = 0;
                            for (long y = 0; y < Ly; ++y)
                                for (long x = 0; x < Lx; ++x) {
                                    long ax = sw ? y : x, ay = sw ? x : y;
                                    if (mx) ax = Lx - 1 - ax;
                                    if (my) ay = Ly - 1 - ay;
                                    ax = (ax + tx) % Lx;
                                    ay = (ay + ty) % Ly;
                                    std::uint64_t b = get(mask, ax, ay) ^ std::uint64_t(fl);
                                    if (b) m |= 1ull << (y * Lx + x);
                                }
                            best = std::min(best, m);
                        }
    return best;
}

std::uint64_t canonical_1d(std::uint64_t mask, long L) {
    std::uint64_t best = ~0ull >> (64 - L);
    for (int rf = 0; rf < 2; ++rf)
        for (long t = 0; t < L; ++t)
            for (int fl = 0; fl < 2; ++fl) {
                std::uint64_t m = 0;
                for (long i = 0; i < L; ++i) {
                    long a = rf ? (L - 1 - i) : i;
                    a = (a + t) % L;
                    std::uint64_t b = (mask >> a & 1) ^ std::uint64_t(fl);
                    if (b) m |= 1ull << i;
                }
                best = std::min(best, m);
            }
    return best;
}

SpinConfig torus_config(const std::vector<int>& s, long Lx, long Ly) {
    SpinConfig c = SpinConfig::filled(0, 0, Lx, Ly, 1, Boundary{BoundaryKind::Periodic});
    for (long y = 0; y < Ly; ++y)
        for (long x = 0; x < Lx; ++x) c.set(x, y, s[size_t(y * Lx + x)]);
    return c;
}

bool is_striped(const SpinConfig& c) {
    bool cx = true, cy = true;
    for (long y = 0; y < c.ny; ++y)
        for (long x = 0; x < c.nx; ++x) {
            if (c.box_at(x, y) != c.box_at(0, y)) cx = false;
            if (c.box_at(x, y) != c.box_at(x, 0)) cy = false;
        }
    return cx || cy;
}

// Keep only candidates whose certified energy matches the minimum.
void keep_minimal(SearchReport& rep, std::vector<std::pair<SpinConfig, SumResult>>& cands,
                  double tol) {
    double lo = std::numeric_limits<double>::infinity();
    for (auto& [c, e] : cands) lo = std::min(lo, e.value);
    for (auto& [c, e] : cands) {
        if (e.value > lo + tol + 2.0 * e.tail) continue;
        if (rep.minimizers.empty() || e.value < rep.min_energy.value) rep.min_energy = e;
        rep.minimizers.push_back(c);
        if (is_striped(c)) rep.striped = true;
    }
}

}  // namespace

SearchReport exhaustive_1d(long L, const ModelParams& mp, bool reduce) {
    if (L < 2 || L > 28) throw BudgetError("exhaustive_1d: L must be in [2, 28]");
    auto t0 = Clock::now();
    std::vector<double> W = pair_table_1d(L, mp);
    double scale = 0.0;
    for (double w : W) scale += std::abs(w);
    // Fixing the last spin to +1 exploits global flip symmetry.
    long bits = reduce ? L - 1 : L;
    SweepResult sweep = gray_sweep(W, L, bits, 1e-9 * (1.0 + scale));

    SearchReport rep;
    rep.enumerated = sweep.count;
    rep.represented = 1ull << L;
    rep.sym_factor = reduce ? 2 : 1;

    std::vector<std::uint64_t> canon;
    for (std::uint64_t m : sweep.masks) canon.push_back(canonical_1d(m, L));
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

    std::vector<std::pair<SpinConfig, SumResult>> cands;
    for (std::uint64_t m : canon) {
        std::vector<int> s = mask_spins(m, L);
        cands.push_back({torus_config(s, L, 1), ring_energy(s, mp)});
    }
    keep_minimal(rep, cands, 1e-9 * (1.0 + scale));
    rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return rep;
}

SearchReport exhaustive_2d(long Lx, long Ly, const ModelParams& mp) {
    if (Lx < 2 || Ly < 2 || Lx * Ly > 26)
        throw BudgetError("exhaustive_2d: need 2 <= Lx, Ly and Lx*Ly <= 26");
    auto t0 = Clock::now();
    long n = Lx * Ly;
    std::vector<double> W = pair_table_2d(Lx, Ly, mp);
    double scale = 0.0;
    for (double w : W) scale += std::abs(w);
    SweepResult sweep = gray_sweep(W, n, n - 1, 1e-9 * (1.0 + scale));

    SearchReport rep;
    rep.enumerated = sweep.count;
    rep.represented = 1ull << n;
    rep.sym_factor = 2;

    std::vector<std::uint64_t> canon;
    for (std::uint64_t m : sweep.masks) canon.push_back(canonical_2d(m, Lx, Ly));
    std::sort(canon.begin(), canon.end());
    canon.erase(std::unique(canon.begin(), canon.end()), canon.end());

    std::vector<std::pair<SpinConfig, SumResult>> cands;
    for (std::uint64_t m : canon) {
        SpinConfig c = torus_config(mask_spins(m, n), Lx, Ly);
        SumResult e = periodic_energy(c, mp);
        cands.push_back({c, e});
    }
    keep_minimal(rep, cands, 1e-9 * (1.0 + scale));
    rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return rep;
}

SearchReport anneal(long Lx, long Ly, const ModelParams& mp, const AnnealSchedule& sched,
                    std::uint64_t seed) {
    if (Lx < 2 || Ly < 2 || Lx * Ly > 4096)
        throw BudgetError("anneal: need 2 <= Lx, Ly and Lx*Ly <= 4096");
    auto t0 = Clock::now();
    long n = Lx * Ly;
    std::vector<double> W = pair_table_2d(Lx, Ly, mp);

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::vector<int> s(size_t(n), 1);
    for (auto& v : s) v = (rng() & 1) ? 1 : -1;

    std::vector<double> field(size_t(n), 0.0);
    for (long i = 0; i < n; ++i) {
        Kahan f;
        for (long j = 0; j < n; ++j)
            if (j != i) f.add(W[size_t(i * n + j)] * double(s[size_t(j)]));
        field[size_t(i)] = f.sum();
    }
    double e = table_energy(W, s);
    double best = e;
    std::vector<int> bests = s;
    std::vector<double> trace;

    const double ratio = sched.t_end / sched.t_start;
    for (long sweep = 0; sweep < sched.sweeps; ++sweep) {
        double T = sched.t_start *
                   std::pow(ratio, double(sweep) / double(std::max(1L, sched.sweeps - 1)));
        for (long step = 0; step < n; ++step) {
            long k = long(rng() % std::uint64_t(n));
            double de = -2.0 * double(s[size_t(k)]) * field[size_t(k)];
            if (de <= 0.0 || unif(rng) < std::exp(-de / T)) {
                double sk = double(s[size_t(k)]);
                s[size_t(k)] = -s[size_t(k)];
                e += de;
                for (long j = 0; j < n; ++j)
                    if (j != k) field[size_t(j)] += -2.0 * sk * W[size_t(k * n + j)];
                if (e < best) {
                    best = e;
                    bests = s;
                }
            }
        }
        trace.push_back(best);
    }

    SearchReport rep;
    rep.best_trace = std::move(trace);
    rep.enumerated = std::uint64_t(sched.sweeps) * std::uint64_t(n);
    rep.represented = rep.enumerated;
    // no mask-based canonicalization here: the torus may exceed 64 spins
    SpinConfig c = torus_config(bests, Lx, Ly);
    rep.min_energy = periodic_energy(c, mp);
    rep.minimizers.push_back(c);
    rep.striped = is_striped(c);
    rep.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    return rep;
}

double stripe_crossing_J(long Lx, long Ly, const ModelParams& mp) {
    // Striped candidates constant along y with period-compatible widths; the
    // torus energy is affine in J, so two evaluations pin the crossing.
    double best = -std::numeric_limits<double>::infinity();
    for (long h = 1; 2 * h <= Lx; ++h) {
        if (Lx % (2 * h) != 0) continue;
        auto energy_at = [&](double J) {
            ModelParams m2 = mp;
            m2.J = J;
            SpinConfig c = SpinConfig::filled(0, 0, Lx, Ly, 1, Boundary{BoundaryKind::Periodic});
            for (long y = 0; y < Ly; ++y)
                for (long x = 0; x < Lx; ++x)
                    if (x % (2 * h) < h) c.set(x, y, -1);
            return periodic_energy(c, m2).value;
        };
        double e0 = energy_at(0.0), e1 = energy_at(1.0);
        double slope = e1 - e0;
        if (slope == 0.0) continue;
        best = std::max(best, -e0 / slope);
    }
    if (!std::isfinite(best)) throw std::domain_error("stripe_crossing_J: no candidate stripes");
    return best;
}

}  // namespace islr
