#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace islr {

// A truncated lattice sum together with a certified bound on the
// truncation error.  The true value lies in [value - tail, value + tail].
// Floating-point roundoff is not tracked.
// Compensated accumulator for long series of small terms.
struct Kahan {
    double s = 0.0, c = 0.0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
    double sum() const { return s; }
};

struct SumResult {
    double value = 0.0;
    double tail = 0.0;
    long radius = 0;
};

inline SumResult operator+(const SumResult& a, const SumResult& b) {
    return {a.value + b.value, a.tail + b.tail, std::max(a.radius, b.radius)};
}
inline SumResult operator-(const SumResult& a, const SumResult& b) {
    return {a.value - b.value, a.tail + b.tail, std::max(a.radius, b.radius)};
}
inline SumResult operator*(double c, const SumResult& a) {
    return {c * a.value, std::abs(c) * a.tail, a.radius};
}
inline SumResult& operator+=(SumResult& a, const SumResult& b) {
    a = a + b;
    return a;
}

enum class Verdict { Holds, HoldsWithinTails, Violated };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Holds: return "holds";
        case Verdict::HoldsWithinTails: return "holds-within-tails";
        default: return "violated";
    }
}

// Numerical certificate for an inequality lhs >= rhs.
struct Certificate {
    SumResult lhs;
    SumResult rhs;
    double slack = 0.0;  // lhs.value - rhs.value
    Verdict verdict = Verdict::Holds;
    std::string context;

    bool violated() const { return verdict == Verdict::Violated; }
};

inline Certificate make_certificate(const SumResult& lhs, const SumResult& rhs,
                                    std::string context) {
    Certificate c;
    c.lhs = lhs;
    c.rhs = rhs;
    c.slack = lhs.value - rhs.value;
    double t = lhs.tail + rhs.tail;
    if (c.slack >= t)
        c.verdict = Verdict::Holds;
    else if (c.slack >= -t)
        c.verdict = Verdict::HoldsWithinTails;
    else
        c.verdict = Verdict::Violated;
    c.context = std::move(context);
    return c;
}

struct ConstructionViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct BudgetError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace islr
