#include "islr/stripes.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace islr {

void StripeSequence::validate() const {
    if (widths.empty()) throw std::domain_error("StripeSequence: need n >= 1");
    if (spacings.size() + 1 != widths.size())
        throw std::domain_error("StripeSequence: need n-1 spacings");
    for (long h : widths)
        if (h < 1) throw std::domain_error("StripeSequence: width < 1");
    for (long w : spacings)
        if (w < 1) throw std::domain_error("StripeSequence: spacing < 1");
}

namespace {

// Triangle-wave autocorrelation of the period-2h square wave, minus 1.
double corr_m1(long m, long h) {
    long q = m % (2 * h);
    double c = (q <= h) ? 1.0 - 2.0 * double(q) / double(h)
                        : -3.0 + 2.0 * double(q) / double(h);
    return c - 1.0;
}

}  // namespace

SumResult striped_energy_per_site(long h, const ModelParams& mp) {
    if (h < 1) throw std::domain_error("striped_energy_per_site: h >= 1");
    const Kernel& K = mp.kernel();
    double alpha = K.alpha();
    double C = K.cont_coeff();
    long R0 = K.table_limit();

    SumResult out;
    out.value = 2.0 * mp.J / double(h);

    // Continuum part, summed far beyond the correction table.
    long R1 = std::max<long>(R0, std::max<long>(20000, 20 * h));
    double cont = 0.0;
    for (long m = 1; m <= R1; ++m) cont += corr_m1(m, h) * std::pow(double(m), -alpha);
    SumResult zt = zeta_tail_em(alpha, R1);
    out.value += C * cont;
    out.tail += 2.0 * C * (zt.value + zt.tail);

    // Lattice-correction part.
    double rs = 0.0, rserr = 0.0;
    for (long m = 1; m <= R0; ++m) {
        double a = corr_m1(m, h);
        rs += a * K.r_val(m);
        rserr += std::abs(a) * K.r_err(m);
    }
    out.value += rs;
    out.tail += rserr + 2.0 * K.r_suffix_bound(R0 + 1);
    out.radius = R1;
    return out;
}

EnergyCurve build_energy_curve(const ModelParams& mp, long hmax) {
    if (hmax < 1) throw std::domain_error("build_energy_curve: hmax >= 1");
    EnergyCurve c;
    c.hmax = hmax;
    c.es.resize(size_t(hmax) + 1);
    for (long h = 1; h <= hmax; ++h) c.es[size_t(h)] = striped_energy_per_site(h, mp);
    long best = 1;
    for (long h = 2; h <= hmax; ++h)
        if (c.es[size_t(h)].value < c.es[size_t(best)].value) best = h;
    // near-ties within certified error; report the smallest member
    long lo = best;
    for (long h = 1; h <= hmax; ++h) {
        if (h == best) continue;
        double gap = c.es[size_t(h)].value - c.es[size_t(best)].value;
        if (gap <= c.es[size_t(h)].tail + c.es[size_t(best)].tail) {
            c.tie = true;
            lo = std::min(lo, h);
        }
    }
    c.h_star = lo;
    return c;
}

std::pair<long, bool> optimal_width(const ModelParams& mp) {
    if (mp.tau() >= 0.0)
        throw std::domain_error("optimal_width: requires tau < 0");
    // grow the window until the argmin is well inside it
    long hmax = 16;
    for (;;) {
        EnergyCurve c = build_energy_curve(mp, hmax);
        if (2 * c.h_star + 8 <= hmax) return {c.h_star, c.tie};
        if (hmax > 100000) throw BudgetError("optimal_width: window blow-up");
        hmax *= 2;
    }
}

SumResult e_infinity(const StripeSequence& seq, const ModelParams& mp) {
    seq.validate();
    if (mp.d != 2) throw std::domain_error("e_infinity: d = 2 only");
    const Kernel& K = mp.kernel();
    long n = seq.n();
    SumResult out;
    out.value = 4.0 * mp.J * double(n);
    for (long h : seq.widths) out += -1.0 * (2.0 * K.min_image(h));
    // stripe-stripe interaction: 4 * sum over column pairs of v(dx)
    std::vector<long> start(size_t(n), 0);
    long pos = 0;
    for (long i = 0; i < n; ++i) {
        start[size_t(i)] = pos;
        pos += seq.widths[size_t(i)];
        if (i + 1 < n) pos += seq.spacings[size_t(i)];
    }
    for (long i = 0; i < n; ++i)
        for (long j = i + 1; j < n; ++j)
            for (long a = 0; a < seq.widths[size_t(i)]; ++a)
                for (long b = 0; b < seq.widths[size_t(j)]; ++b) {
                    long dx = (start[size_t(j)] + b) - (start[size_t(i)] + a);
                    out += 4.0 * K.chain(dx);
                }
    return out;
}

namespace {

// Cached column-pair sums for the f interaction:
//   Kcol(m) = sum_{t>=1} t (m^2+t^2)^{-p/2},
//   Tcol(n) = sum_{m>=n} Kcol(m),
// so that f(w1,h,w2) = 2 sum_{j=1..h} [Tcol(w1+j) + Tcol(w2+j)].
struct FTable {
    double p;
    double tol;
    long M;
    double cp;                    // |Kcol(m) - m^{2-p}/(p-2)| <= 2 cp m^{1-p}
    std::vector<double> rT, rTerr;  // suffix sums of the Kcol correction

    explicit FTable(double p_, double tol_) : p(p_), tol(tol_) {
        cp = (1.0 / std::sqrt(p - 1.0)) * std::pow(p / (p - 1.0), -0.5 * p);
        // sum_{m>M} |corr| <= 2 cp M^{2-p}/(p-2) <= tol/4
        M = std::lround(std::pow(8.0 * cp / ((p - 2.0) * tol), 1.0 / (p - 2.0)));
        M = std::clamp<long>(M, 64, 100000);
        std::vector<double> rK(size_t(M) + 2, 0.0), rKe(size_t(M) + 2, 0.0);
        for (long m = 1; m <= M; ++m) {
            double eps = 0.3 * tol / (double(m) * double(m));
            double m2 = double(m) * m;
            long Tc = 16;
            auto tailb = [&](double T) {
                return std::pow(m2 + T * T, 0.5 * (2.0 - p)) / (p - 2.0);
            };
            while (tailb(double(Tc)) > eps && Tc < (1L << 26)) Tc *= 2;
            double s = 0.0;
            for (long t = Tc; t >= 1; --t) s += double(t) * std::pow(m2 + double(t) * t, -0.5 * p);
            rK[size_t(m)] = s - std::pow(double(m), 2.0 - p) / (p - 2.0);
            rKe[size_t(m)] = tailb(double(Tc));
        }
        rT.assign(size_t(M) + 2, 0.0);
        rTerr.assign(size_t(M) + 2, 0.0);
        for (long m = M; m >= 1; --m) {
            rT[size_t(m)] = rT[size_t(m) + 1] + rK[size_t(m)];
            rTerr[size_t(m)] = rTerr[size_t(m) + 1] + rKe[size_t(m)];
        }
    }

    SumResult T(long n) const {
        SumResult zt = zeta_tail_em(p - 2.0, n - 1);
        SumResult out;
        out.value = (zt.value) / (p - 2.0);
        out.tail = zt.tail / (p - 2.0);
        double sfx = 2.0 * cp * std::pow(double(std::max(n, M + 1)), 2.0 - p) / (p - 2.0);
        if (n <= M) {
            out.value += rT[size_t(n)];
            out.tail += rTerr[size_t(n)];
        }
        out.tail += sfx;
        out.radius = M;
        return out;
    }
};

const FTable& f_table(double p) {
    static std::map<double, std::unique_ptr<FTable>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p);
    if (it == cache.end())
        it = cache.emplace(p, std::make_unique<FTable>(p, 1e-8)).first;
    return *it->second;
}

}  // namespace

SumResult f_interaction(long w1, long h, long w2, const ModelParams& mp) {
    if (h < 1) throw std::domain_error("f_interaction: h >= 1");
    if (mp.d != 2) throw std::domain_error("f_interaction: d = 2 only");
    const FTable& ft = f_table(mp.p);
    SumResult out;
    for (long j = 1; j <= h; ++j) {
        if (w1 > 0 && w1 != kInfSpacing) out += 2.0 * ft.T(w1 + j);
        if (w2 > 0 && w2 != kInfSpacing) out += 2.0 * ft.T(w2 + j);
    }
    return out;
}

SumResult ring_energy(const std::vector<int>& spins, const ModelParams& mp) {
    long L = long(spins.size());
    if (L < 2) throw std::domain_error("ring_energy: L >= 2");
    const Kernel& K = mp.kernel();
    std::vector<SumResult> vL(size_t(L), SumResult{});
    for (long x = 1; x < L; ++x) vL[size_t(x)] = K.chain_periodic(x, L);
    SumResult out;
    for (long i = 0; i < L; ++i) {
        long j = (i + 1) % L;
        out.value += -mp.J * double(spins[size_t(i)] * spins[size_t(j)] - 1);
    }
    for (long i = 0; i < L; ++i)
        for (long j = i + 1; j < L; ++j) {
            double ss = double(spins[size_t(i)] * spins[size_t(j)] - 1);
            if (ss != 0.0) out += ss * vL[size_t(j - i)];
        }
    return out;
}

Certificate chessboard_check(const StripeSequence& seq, long L, const ModelParams& mp) {
    seq.validate();
    long wn = L - seq.span();
    if (wn < 1) throw std::domain_error("chessboard_check: closing spacing < 1");
    std::vector<int> spins(size_t(L), 1);
    long pos = 0;
    for (long i = 0; i < seq.n(); ++i) {
        for (long k = 0; k < seq.widths[size_t(i)]; ++k) spins[size_t(pos + k)] = -1;
        pos += seq.widths[size_t(i)];
        if (i + 1 < seq.n()) pos += seq.spacings[size_t(i)];
    }
    SumResult lhs = ring_energy(spins, mp);
    SumResult rhs;
    for (long i = 0; i < seq.n(); ++i) {
        long h = seq.widths[size_t(i)];
        long w = (i + 1 < seq.n()) ? seq.spacings[size_t(i)] : wn;
        rhs += double(h) * striped_energy_per_site(h, mp);
        rhs += double(w) * striped_energy_per_site(w, mp);
    }
    return make_certificate(lhs, rhs, "chessboard");
}

double gap_bound_fit(const ModelParams& mp, long w_max, const EnergyCurve* curve) {
    EnergyCurve own;
    if (!curve) {
        own = build_energy_curve(mp, std::max<long>(w_max, 2 * optimal_width(mp).first + 8));
        curve = &own;
    }
    if (curve->hmax < w_max) throw std::domain_error("gap_bound_fit: curve too short");
    double es_star = curve->at(curve->h_star).value;
    double tau = mp.tau();
    double c3 = std::numeric_limits<double>::infinity();
    for (long w = 1; w <= w_max; ++w) {
        double lhs = curve->at(w).value - es_star - tau / double(w);
        c3 = std::min(c3, lhs * std::pow(double(w), mp.p - 2.0));
    }
    return c3;
}

}  // namespace islr
