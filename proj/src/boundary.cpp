#include "sbl/boundary.hpp"

#include <algorithm>
#include <cmath>

namespace sbl {

HittingOracle::HittingOracle(SparseMeasure mu) : mu_(std::move(mu)) {
    mass_e_ = mu_.mass(Word());
    if (mass_e_ >= 1.0 - 1e-12) {
        throw std::invalid_argument("hitting: walk never leaves the identity");
    }
    memo_.emplace(Word(), 1.0);
}

double HittingOracle::prob(const Word& u) {
    if (auto it = memo_.find(u); it != memo_.end()) return it->second;
    // Evaluate every suffix of u, shortest first; each one only needs strictly
    // shorter suffixes of the same word.
    const std::uint64_t n = u.length();
    for (std::uint64_t j = n; j-- > 0;) {
        Word s = suffix(u, j);
        if (memo_.contains(s)) continue;
        double num = 0.0;
        for (const auto& [g, m] : mu_.entries()) {
            if (g.empty()) continue;
            if (is_prefix(s, g)) {
                num += m; // first step already covers the cylinder
            } else if (g.length() < s.length() && is_prefix(g, s)) {
                num += m * memo_.at(suffix(u, j + g.length()));
            }
        }
        memo_.emplace(std::move(s), num / (1.0 - mass_e_));
    }
    return memo_.at(u);
}

double HittingOracle::err_bound(std::uint64_t depth) const {
    double b = mu_.tail().mass * static_cast<double>(std::max<std::uint64_t>(depth, 1)) /
               (1.0 - mass_e_);
    return std::min(1.0, b);
}

void HittingOracle::precompute(std::uint32_t depth) {
    for_each_cylinder(*this, depth, [](const Word&, double) {});
}

std::vector<HittingOracle::Row> HittingOracle::cylinder_table(std::uint32_t depth) {
    std::vector<Row> rows;
    for_each_cylinder(*this, depth, [&](const Word& u, double lambda) {
        rows.push_back({u, lambda, err_bound(u.length())});
    });
    std::sort(rows.begin(), rows.end(),
              [](const Row& a, const Row& b) { return Word::compare(a.prefix, b.prefix) < 0; });
    return rows;
}

void HittingOracle::corrupt(const Word& u, double value) {
    prob(u);
    memo_[u] = value;
}

void for_each_cylinder(HittingOracle& oracle, std::uint32_t depth,
                       const std::function<void(const Word&, double)>& fn) {
    const auto& alphabet = *oracle.measure().alphabet();
    std::function<void(const Word&, double)> dfs = [&](const Word& u, double lambda) {
        fn(u, lambda);
        if (u.length() >= depth) return;
        for (SymbolId s = 0; s < alphabet.size(); ++s) {
            Word child = concat(u, Word::single(s));
            double l = oracle.prob(child);
            if (l > 0.0) dfs(child, l);
        }
    };
    dfs(Word(), 1.0);
}

// ---------------------------------------------------------------------------
// Derivatives and the conditioned kernel
// ---------------------------------------------------------------------------

RnDerivative rn_derivative(HittingOracle& oracle, const Word& g, const Word& xi_prefix,
                           double tol) {
    const std::uint64_t n = xi_prefix.length();
    if (n <= g.length()) {
        throw std::invalid_argument("rn_derivative: xi_prefix must be longer than g");
    }
    if (!is_prefix(g, xi_prefix)) return {0.0, 0.0, true};

    double denom = oracle.prob(xi_prefix);
    if (denom <= 0.0) {
        throw std::invalid_argument("rn_derivative: xi_prefix has zero hitting measure");
    }
    RnDerivative out;
    out.value = oracle.prob(suffix(xi_prefix, g.length())) / denom;
    if (n >= g.length() + 2) {
        Word shorter = prefix(xi_prefix, n - 1);
        double d2 = oracle.prob(shorter);
        if (d2 > 0.0) {
            out.prev = oracle.prob(suffix(shorter, g.length())) / d2;
            out.converged = std::abs(out.value - out.prev) <= tol;
        }
    }
    return out;
}

KernelRow conditional_kernel(HittingOracle& oracle, const Word& x, const Word& xi_prefix,
                             double tol) {
    if (!is_prefix(x, xi_prefix)) {
        throw std::invalid_argument("conditional_kernel: x must be a prefix of xi_prefix");
    }
    const std::uint64_t need = x.length() + oracle.measure().max_length();
    if (xi_prefix.length() <= need) {
        throw std::invalid_argument(
            "conditional_kernel: xi_prefix too short to determine every move; need length > " +
            std::to_string(need));
    }
    RnDerivative ux = rn_derivative(oracle, x, xi_prefix, tol);
    if (ux.value <= 0.0) {
        throw std::invalid_argument("conditional_kernel: x is off the conditioned trajectory");
    }

    KernelRow row;
    row.x = x;
    row.xi_prefix = xi_prefix;
    row.all_converged = true;
    double sum = 0.0;
    for (const auto& [g, m] : oracle.measure().entries()) {
        Word target = concat(x, g);
        RnDerivative ut = g.empty() ? ux : rn_derivative(oracle, target, xi_prefix, tol);
        double weight = m * ut.value / ux.value;
        if (weight <= 0.0) continue;
        sum += weight;
        row.all_converged = row.all_converged && ut.converged;
        row.entries.push_back({g, std::move(target), weight, ut.converged});
    }
    row.residual = std::abs(sum - 1.0);
    return row;
}

// ---------------------------------------------------------------------------
// Poisson integrals
// ---------------------------------------------------------------------------

CylinderFunction::CylinderFunction(std::uint32_t depth,
                                   std::unordered_map<Word, double, WordHash> values)
    : depth_(depth), values_(std::move(values)) {
    for (const auto& [u, v] : values_) {
        (void)v;
        if (u.length() != depth_) {
            throw std::invalid_argument("cylinder function: value on wrong-depth cylinder");
        }
    }
}

CylinderFunction CylinderFunction::random(HittingOracle& oracle, std::uint32_t depth,
                                          RngStream& rng, double lo, double hi) {
    // Deterministic value assignment: collect the depth-d support in shortlex
    // order first, then draw in that order.
    std::vector<Word> support;
    for_each_cylinder(oracle, depth, [&](const Word& u, double) {
        if (u.length() == depth) support.push_back(u);
    });
    std::sort(support.begin(), support.end(),
              [](const Word& a, const Word& b) { return Word::compare(a, b) < 0; });
    std::unordered_map<Word, double, WordHash> values;
    values.reserve(support.size());
    for (const Word& u : support) {
        values.emplace(u, lo + (hi - lo) * rng.next_unit());
    }
    return CylinderFunction(depth, std::move(values));
}

double CylinderFunction::at(const Word& u) const {
    auto it = values_.find(u);
    return it == values_.end() ? 0.0 : it->second;
}

double poisson_eval(HittingOracle& oracle, const CylinderFunction& fhat, const Word& g) {
    const std::uint32_t d = fhat.depth();
    if (g.length() >= d) {
        // (g lambda) of every depth-d cylinder is concentrated on g's own
        // depth-d prefix.
        return fhat.at(prefix(g, d));
    }
    // f(g) = sum over extensions v of length d - |g| of fhat(g v) lambda([v]).
    const auto& alphabet = *oracle.measure().alphabet();
    const std::uint64_t ext = d - g.length();
    double sum = 0.0;
    std::function<void(const Word&, std::uint64_t)> dfs = [&](const Word& v, std::uint64_t len) {
        if (len == ext) {
            sum += fhat.at(concat(g, v)) * oracle.prob(v);
            return;
        }
        for (SymbolId s = 0; s < alphabet.size(); ++s) {
            Word child = concat(v, Word::single(s));
            if (oracle.prob(child) > 0.0) dfs(child, len + 1);
        }
    };
    dfs(Word(), 0);
    return sum;
}

double harmonicity_residual(HittingOracle& oracle, const CylinderFunction& fhat, const Word& g) {
    double f_g = poisson_eval(oracle, fhat, g);
    double avg = 0.0;
    for (const auto& [h, m] : oracle.measure().entries()) {
        avg += m * poisson_eval(oracle, fhat, concat(g, h));
    }
    return std::abs(f_g - avg);
}

} // namespace sbl
