#include "islr/kernel.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace islr {

namespace {
constexpr double kPi = 3.14159265358979323846;

// Integral of (1 + t^2)^{-p/2} over the real line.
double line_coeff(double p) {
    return std::sqrt(kPi) * std::exp(std::lgamma(0.5 * (p - 1.0)) - std::lgamma(0.5 * p));
}
}  // namespace

double kernel_value(long x1, long x2, double p) {
    double r2 = double(x1) * x1 + double(x2) * x2;
    if (r2 == 0.0) throw std::domain_error("kernel_value: zero vector");
    return std::pow(r2, -0.5 * p);
}

double kernel_value(long x1, long x2, long x3, double p) {
    double r2 = double(x1) * x1 + double(x2) * x2 + double(x3) * x3;
    if (r2 == 0.0) throw std::domain_error("kernel_value: zero vector");
    return std::pow(r2, -0.5 * p);
}

SumResult zeta_tail_em(double s, long N) {
    if (s <= 1.0) throw std::domain_error("zeta tail requires s > 1");
    SumResult out;
    long M = std::max<long>(N, 48);
    double sum = 0.0;
    for (long n = N + 1; n <= M; ++n) sum += std::pow(double(n), -s);
    // Euler-Maclaurin at M with two Bernoulli terms; the remainder is
    // bounded by the magnitude of the first omitted term.
    double Ms = std::pow(double(M), -s);
    sum += double(M) * Ms / (s - 1.0) - 0.5 * Ms + s * Ms / (12.0 * M);
    double rem = s * (s + 1.0) * (s + 2.0) * Ms / (720.0 * M * M * M);
    out.value = sum;
    out.tail = rem;
    out.radius = M;
    return out;
}

SumResult zeta_em(double s) { return zeta_tail_em(s, 0); }

double Kernel::ball_tail(double R, double p, int d) {
    switch (d) {
        case 1:
            if (R < 1.0) throw std::domain_error("ball_tail: R too small");
            return 2.0 * std::pow(R, 1.0 - p) / (p - 1.0);
        case 2: {
            double a = R - std::sqrt(2.0);
            if (a <= 0.0) throw std::domain_error("ball_tail: R too small");
            double s = std::sqrt(2.0) / 2.0;
            return 2.0 * kPi *
                   (std::pow(a, 2.0 - p) / (p - 2.0) + s * std::pow(a, 1.0 - p) / (p - 1.0));
        }
        case 3: {
            double a = R - std::sqrt(3.0);
            if (a <= 0.0) throw std::domain_error("ball_tail: R too small");
            double s = std::sqrt(3.0) / 2.0;
            return 4.0 * kPi *
                   (std::pow(a, 3.0 - p) / (p - 3.0) +
                    2.0 * s * std::pow(a, 2.0 - p) / (p - 2.0) +
                    s * s * std::pow(a, 1.0 - p) / (p - 1.0));
        }
        default: throw std::domain_error("ball_tail: unsupported dimension");
    }
}

const Kernel& Kernel::shared(double p, int d, double tol) {
    static std::map<std::tuple<double, int, double>, std::unique_ptr<Kernel>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    auto key = std::make_tuple(p, d, tol);
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, std::make_unique<Kernel>(p, d, tol)).first;
    return *it->second;
}

Kernel::Kernel(double p, int d, double tol) : p_(p), d_(d), tol_(tol) {
    if (d != 2 && d != 3) throw std::domain_error("Kernel: d must be 2 or 3");
    if (p <= 2.0 * d) throw std::domain_error("Kernel: requires p > 2d");
    if (tol <= 0.0) throw std::domain_error("Kernel: tol must be positive");
    alpha_ = p - d + 1.0;
    C1_ = line_coeff(p);
    C_ = (d == 2) ? C1_ : 2.0 * kPi / (p - 2.0);
    long twop = std::lround(2.0 * p);
    if (std::abs(2.0 * p - double(twop)) < 1e-12) {
        if (twop == 10) fast_ = Fast::P5;
        else if (twop == 12) fast_ = Fast::P6;
        else if (twop == 14) fast_ = Fast::P7;
    }
    build_table_();
}

double Kernel::r_bound(double m) const {
    // Sandwich of the transverse sum between shifted continuum integrals.
    if (d_ == 2) return std::pow(m, -p_);
    return 4.0 * (C1_ * std::pow(m, 1.0 - p_) + std::pow(m, -p_));
}

// Upper bound on the truncated part of the transverse sum at cutoff Y.
double Kernel::transverse_tail_(double m, double Y) const {
    double m2 = m * m;
    if (d_ == 2) {
        // 2 * int_Y^inf (m^2+y^2)^{-p/2} dy <= 2 (m^2+Y^2)^{(2-p)/2} / ((p-2) Y)
        return 2.0 * std::pow(m2 + Y * Y, 0.5 * (2.0 - p_)) / ((p_ - 2.0) * Y);
    }
    // d = 3: four half-strips |a| > Y, b in Z, each bounded through the
    // one-dimensional profile of (m^2+a^2+b^2)^{-p/2}.
    double u = m2 + Y * Y;
    double t1 = std::pow(u, 0.5 * (2.0 - p_)) / ((p_ - 2.0) * Y);
    double t2 = std::pow(u, 0.5 * (3.0 - p_)) / ((p_ - 3.0) * Y);
    return 4.0 * (t1 + C1_ * t2);
}

void Kernel::build_table_() {
    // Table length: beyond R0 the correction series is bounded through
    // r_bound, and we need sum_{m>R0} m |r(m)| below ~tol/4.
    double target = 0.25 * tol_;
    double K = (d_ == 2) ? 1.0 : 4.0 * (C1_ + 1.0);
    double expo = p_ - d_;  // sum_{m>R} m r_bound(m) <= K R^{-expo} / expo
    long R0 = std::lround(std::pow(K / (expo * target), 1.0 / expo));
    R0_ = std::clamp<long>(R0, 64, 20000);

    r_.assign(R0_ + 1, 0.0);
    rerr_.assign(R0_ + 1, 0.0);
    pg_.assign(R0_ + 1, 0.0);
    pgerr_.assign(R0_ + 1, 0.0);
    pmg_.assign(R0_ + 1, 0.0);
    pmgerr_.assign(R0_ + 1, 0.0);

    for (long m = 1; m <= R0_; ++m) {
        double eps = tol_ / (32.0 * double(m) * double(m));
        double mm = double(m);
        long Y = 16;
        while (transverse_tail_(mm, double(Y)) > eps && Y < (1L << 26)) Y *= 2;
        // shrink back roughly to the needed size
        long lo = Y / 2, hi = Y;
        while (lo + 1 < hi) {
            long mid = (lo + hi) / 2;
            (transverse_tail_(mm, double(mid)) <= eps ? hi : lo) = mid;
        }
        Y = hi;
        double m2 = mm * mm;
        double sum = 0.0;
        if (d_ == 2) {
            for (long y = Y; y >= 1; --y) sum += pair(m2 + double(y) * y);
            sum = 2.0 * sum + pair(m2);
        } else {
            double quad = 0.0, axis = 0.0;
            for (long a = Y; a >= 1; --a) {
                double a2 = m2 + double(a) * a;
                axis += pair(a2);
                for (long b = Y; b >= 1; --b) quad += pair(a2 + double(b) * b);
            }
            sum = pair(m2) + 4.0 * axis + 4.0 * quad;
        }
        r_[m] = sum - C_ * std::pow(mm, -alpha_);
        rerr_[m] = transverse_tail_(mm, double(Y));

        double gv = sum, ge = rerr_[m];
        pg_[m] = pg_[m - 1] + gv;
        pgerr_[m] = pgerr_[m - 1] + ge;
        pmg_[m] = pmg_[m - 1] + mm * gv;
        pmgerr_[m] = pmgerr_[m - 1] + mm * ge;
    }

    // Totals: sum_{m>=1} g and sum_{m>=1} m g via zeta + correction series.
    SumResult za = zeta_em(alpha_);
    SumResult zam = zeta_em(alpha_ - 1.0);
    double rs = 0.0, rserr = 0.0, mrs = 0.0, mrserr = 0.0;
    for (long m = 1; m <= R0_; ++m) {
        rs += r_[m];
        rserr += rerr_[m];
        mrs += double(m) * r_[m];
        mrserr += double(m) * rerr_[m];
    }
    double K2 = (d_ == 2) ? 1.0 : 4.0 * (C1_ + 1.0);
    // sum_{m>R0} |r(m)| <= K2 * sum m^{-(p-d+... )}: r_bound ~ K m^{d-1-p-?}
    double rb_expo = (d_ == 2) ? p_ : p_ - 1.0;  // dominant power in r_bound
    SumResult rtail = zeta_tail_em(rb_expo, R0_);
    SumResult mrtail = zeta_tail_em(rb_expo - 1.0, R0_);
    g_total_.value = C_ * za.value + rs;
    g_total_.tail = C_ * za.tail + rserr + K2 * (rtail.value + rtail.tail);
    g_total_.radius = R0_;
    mg_total_.value = C_ * zam.value + mrs;
    mg_total_.tail = C_ * zam.tail + mrserr + K2 * (mrtail.value + mrtail.tail);
    mg_total_.radius = R0_;
}

SumResult Kernel::r_entry_(long m) const { return {r_[m], rerr_[m], R0_}; }

double Kernel::r_suffix_bound(long n) const {
    double K2 = (d_ == 2) ? 1.0 : 4.0 * (C1_ + 1.0);
    double rb_expo = (d_ == 2) ? p_ : p_ - 1.0;
    SumResult rt = zeta_tail_em(rb_expo, n - 1);
    return K2 * (rt.value + rt.tail);
}

SumResult Kernel::transverse(long m) const {
    if (m < 1) throw std::domain_error("transverse: m >= 1 required");
    double mm = double(m);
    double cont = C_ * std::pow(mm, -alpha_);
    if (m <= R0_) return {cont + r_[m], rerr_[m], R0_};
    return {cont, r_bound(mm), m};
}

SumResult Kernel::transverse0() const {
    if (d_ == 2) {
        SumResult z = zeta_em(p_);
        return 2.0 * z;
    }
    // d = 3: sum over Z^2 \ 0 = 4 zeta(p) + 4 * open-quadrant sum.
    SumResult z = zeta_em(p_);
    double q = 0.0;
    long Y = 64;
    while (transverse_tail_(1.0, double(Y)) > tol_) Y *= 2;
    for (long a = 1; a <= Y; ++a)
        for (long b = 1; b <= Y; ++b) q += pair(double(a) * a + double(b) * b);
    SumResult out;
    out.value = 4.0 * z.value + 4.0 * q;
    out.tail = 4.0 * z.tail + transverse_tail_(1.0, double(Y));
    out.radius = Y;
    return out;
}

SumResult Kernel::g_suffix(long n) const {
    if (n < 1) throw std::domain_error("g_suffix: n >= 1 required");
    if (n - 1 <= R0_) {
        SumResult out;
        out.value = g_total_.value - pg_[n - 1];
        out.tail = g_total_.tail + pgerr_[n - 1];
        out.radius = R0_;
        return out;
    }
    SumResult zt = zeta_tail_em(alpha_, n - 1);
    double K2 = (d_ == 2) ? 1.0 : 4.0 * (C1_ + 1.0);
    double rb_expo = (d_ == 2) ? p_ : p_ - 1.0;
    SumResult rt = zeta_tail_em(rb_expo, n - 1);
    return {C_ * zt.value, C_ * zt.tail + K2 * (rt.value + rt.tail), n};
}

SumResult Kernel::mg_prefix(long n) const {
    if (n < 0) throw std::domain_error("mg_prefix: n >= 0 required");
    if (n <= R0_) return {pmg_[n], pmgerr_[n], R0_};
    SumResult sfx = zeta_tail_em(alpha_ - 1.0, n);
    double K2 = (d_ == 2) ? 1.0 : 4.0 * (C1_ + 1.0);
    double rb_expo = (d_ == 2) ? p_ : p_ - 1.0;
    SumResult rt = zeta_tail_em(rb_expo - 1.0, n);
    SumResult out;
    out.value = mg_total_.value - C_ * sfx.value;
    out.tail = mg_total_.tail + C_ * sfx.tail + K2 * (rt.value + rt.tail);
    out.radius = n;
    return out;
}

SumResult Kernel::lattice_sum() const {
    SumResult g0 = transverse0();
    return g0 + 2.0 * g_total_;
}

SumResult Kernel::min_image(long dist) const {
    if (dist <= 0) return 2.0 * mg_total_;
    SumResult pre = mg_prefix(dist - 1);
    SumResult sfx = g_suffix(dist);
    return 2.0 * (pre + double(dist) * sfx);
}

SumResult Kernel::chain(long x) const {
    long m = std::labs(x);
    if (m == 0) throw std::domain_error("chain: x != 0 required");
    return transverse(m);
}

SumResult Kernel::chain_periodic(long x, long L) const {
    if (L <= 0) throw std::domain_error("chain_periodic: L >= 1 required");
    x = ((x % L) + L) % L;
    if (x == 0 && L == 1) throw std::domain_error("chain_periodic: degenerate");
    SumResult out;
    long N = std::max<long>(2, (4 * R0_) / L + 2);
    for (long n = -N; n <= N; ++n) {
        long t = x + n * L;
        if (t == 0) continue;
        out += transverse(std::labs(t));
    }
    // Remaining images sit at |t| >= M0 spaced L apart:
    // sum_k g(M0 + kL) <= g(M0) + g_suffix(M0)/L, per side.
    long M0 = std::min(std::labs(x + (N + 1) * L), std::labs(x - (N + 1) * L));
    SumResult s = g_suffix(M0);
    SumResult g1 = transverse(M0);
    out.tail += 2.0 * (g1.value + g1.tail + (s.value + s.tail) / double(L));
    out.radius = std::max(out.radius, N);
    return out;
}

}  // namespace islr
