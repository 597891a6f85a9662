#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <vector>

namespace sbl {

// Neumaier-compensated running sum. Mass ledgers have to balance to ~1e-12
// across millions of additions, which plain double accumulation does not
// guarantee.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct MeanStderr {
    double mean = 0.0;
    double stderr_ = 0.0;
    std::size_t n = 0;
};

inline MeanStderr mean_stderr(const std::vector<double>& xs) {
    MeanStderr r;
    r.n = xs.size();
    if (xs.empty()) return r;
    CompensatedSum s;
    for (double x : xs) s.add(x);
    r.mean = s.value() / static_cast<double>(xs.size());
    if (xs.size() < 2) return r;
    CompensatedSum sq;
    for (double x : xs) {
        double d = x - r.mean;
        sq.add(d * d);
    }
    double var = sq.value() / static_cast<double>(xs.size() - 1);
    if (var < 0.0) var = 0.0;
    r.stderr_ = std::sqrt(var / static_cast<double>(xs.size()));
    return r;
}

// Regularized upper incomplete gamma Q(s, x), via the usual series /
// continued-fraction split (Numerical Recipes style). Needed for chi-square
// p-values; good to ~1e-12 relative in the ranges used.
inline double gamma_q(double s, double x) {
    if (s <= 0.0 || x < 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    if (x < s + 1.0) {
        // P(s,x) by series, return 1 - P.
        double ap = s;
        double sum = 1.0 / s;
        double del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        double p = sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
        return 1.0 - p;
    }
    // Q(s,x) by Lentz continued fraction.
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + s * std::log(x) - std::lgamma(s)) * h;
}

inline double chi_square_pvalue(double stat, double dof) {
    if (dof <= 0.0) throw std::invalid_argument("chi_square_pvalue: dof must be positive");
    if (stat <= 0.0) return 1.0;
    return gamma_q(dof / 2.0, stat / 2.0);
}

// Max possible entropy of total mass m spread over at most n atoms.
// Used for truncation-error ledgers.
inline double max_entropy_bound(double m, std::uint64_t n) {
    if (m <= 0.0 || n == 0) return 0.0;
    if (m >= 1.0) m = 1.0;
    return -m * std::log(m) + m * std::log(static_cast<double>(n < 2 ? 2 : n));
}

inline constexpr double kInf = std::numeric_limits<double>::infinity();

} // namespace sbl
