#pragma once

#include <vector>

#include "islr/core.hpp"

namespace islr {

// |x|^{-p} for a nonzero lattice vector.
double kernel_value(long x1, long x2, double p);
double kernel_value(long x1, long x2, long x3, double p);

// Certified Riemann zeta via Euler-Maclaurin: value + rigorous remainder.
SumResult zeta_em(double s);
// sum_{m > N} m^{-s}, certified, s > 1.
SumResult zeta_tail_em(double s, long N);

// Cached lattice sums for the pair potential |x|^{-p} on Z^d.
//
// The workhorse is the transverse profile
//   g(m) = sum_{y in Z^{d-1}} (m^2 + |y|^2)^{-p/2},   m >= 1,
// stored as  g(m) = C * m^{d-1-p} + r(m)  where C is the continuum
// (integral) coefficient and the lattice correction r(m) = O(m^{d-2-p})
// is tabulated with per-entry certified error bounds.  Slowly converging
// sums (J_c, sum of g, min-image sums) then reduce to zeta values plus a
// rapidly convergent correction series.
class Kernel {
public:
    Kernel(double p, int d, double tol = 1e-11);

    // Process-wide cache; building a table is expensive.
    static const Kernel& shared(double p, int d, double tol = 1e-11);

    double p() const { return p_; }
    int dim() const { return d_; }
    double tol() const { return tol_; }

    // r2^{-p/2} for squared distance r2 > 0.
    double pair(double r2) const {
        switch (fast_) {
            case Fast::P5: {
                double s = r2 * r2;
                return 1.0 / (s * std::sqrt(r2));
            }
            case Fast::P6: return 1.0 / (r2 * r2 * r2);
            case Fast::P7: {
                double s = r2 * r2;
                return 1.0 / (s * r2 * std::sqrt(r2));
            }
            default: return std::pow(r2, -0.5 * p_);
        }
    }
    // |dx|^{-p} for an integer displacement vector.
    double pair2(long dx, long dy) const {
        return pair(double(dx) * dx + double(dy) * dy);
    }

    // Upper bound on sum_{x in Z^d, |x| > R} |x|^{-p}.
    static double ball_tail(double R, double p, int d);

    // g(m) as above; m >= 1.
    SumResult transverse(long m) const;
    // g(0) = sum over Z^{d-1} \ {0}.
    SumResult transverse0() const;
    // sum_{m >= n} g(m), n >= 1.
    SumResult g_suffix(long n) const;
    // sum_{m=1}^{n} m g(m).
    SumResult mg_prefix(long n) const;

    // J_c = sum_{y1 > 0, yperp} y1 |y|^{-p} = sum_{m>=1} m g(m).
    SumResult coupling_jc() const { return mg_total_; }
    // sum_{x in Z^d \ 0} |x|^{-p}.
    SumResult lattice_sum() const;

    // S(dist) = sum_{n in Z^d \ 0} min(|n1|, dist) |n|^{-p}.
    // dist <= 0 encodes dist = +infinity, giving 2 J_c.
    SumResult min_image(long dist) const;

    // Whole-column chain kernel v(x) = g(|x|), x != 0 (d = 2).
    SumResult chain(long x) const;
    // Periodized v_L(x) = sum_n v(x + nL); x may be 0 (n = 0 skipped).
    SumResult chain_periodic(long x, long L) const;

    // Continuum coefficient C and exponent alpha = p - d + 1 of g.
    double cont_coeff() const { return C_; }
    double alpha() const { return alpha_; }
    long table_limit() const { return R0_; }
    // Certified bound on |r(m)| valid for all m >= 1.
    double r_bound(double m) const;
    // Tabulated correction r(m) and its certified error, m <= table_limit().
    double r_val(long m) const { return r_.at(size_t(m)); }
    double r_err(long m) const { return rerr_.at(size_t(m)); }
    // Upper bound on sum_{m >= n} |r(m)|.
    double r_suffix_bound(long n) const;

private:
    enum class Fast { Generic, P5, P6, P7 };

    double p_;
    int d_;
    double tol_;
    double alpha_;  // p - d + 1
    double C_;      // integral of (1+|t|^2)^{-p/2} over R^{d-1}
    double C1_;     // same for R^1 (used in d = 3 tail bounds)
    Fast fast_ = Fast::Generic;

    long R0_ = 0;
    std::vector<double> r_, rerr_;          // index m = 1..R0
    std::vector<double> pg_, pgerr_;        // prefix sums of g
    std::vector<double> pmg_, pmgerr_;      // prefix sums of m g
    SumResult g_total_, mg_total_;

    void build_table_();
    SumResult r_entry_(long m) const;       // correction at m <= R0
    double transverse_tail_(double m, double Y) const;
};

// Model parameters with the derived critical coupling and tau = 2(J - J_c).
struct ModelParams {
    int d = 2;
    double p = 5.0;
    double J = 0.0;
    SumResult jc;
    double tol = 1e-11;

    double tau() const { return 2.0 * (J - jc.value); }
    const Kernel& kernel() const { return Kernel::shared(p, d, tol); }
};

inline ModelParams make_params(double p, int d, double J, double tol = 1e-11) {
    ModelParams mp;
    mp.d = d;
    mp.p = p;
    mp.J = J;
    mp.tol = tol;
    mp.jc = Kernel::shared(p, d, tol).coupling_jc();
    return mp;
}

}  // namespace islr
