#pragma once

#include <cstdint>
#include <functional>
#include <unordered_map>
#include <vector>

#include "sbl/measure.hpp"
#include "sbl/rng.hpp"

namespace sbl {

// Exact cylinder weights of the hitting (harmonic) measure on the space of
// infinite words, for a walk with step law mu.
//
// Weights satisfy the one-step unfolding
//   lambda([u]) * (1 - mu(e)) =  sum_{g != e, u is a prefix of g} mu(g)
//                              + sum_{g != e, g a proper prefix of u} mu(g) * lambda([g^-1 u])
// with lambda([e]) = 1: the first step either already covers u, stays strictly
// inside u (shifted subproblem), or leaves the cylinder forever (no
// cancellation ever brings it back). Values are memoized; each query costs
// O(|u| * support) on top of what is cached.
//
// With a truncated mu the computed lambda is exactly stationary for the
// represented sub-measure; err_bound() reports what the discarded tail could
// shift any depth-d cylinder by.
class HittingOracle {
public:
    explicit HittingOracle(SparseMeasure mu);

    double prob(const Word& u);

    double err_bound(std::uint64_t depth) const;

    // Forces evaluation of every positive-measure cylinder up to the depth.
    void precompute(std::uint32_t depth);

    struct Row {
        Word prefix;
        double lambda = 0.0;
        double err = 0.0;
    };

    // All cylinders of depth 0..depth with positive weight, shortlex order.
    std::vector<Row> cylinder_table(std::uint32_t depth);

    const SparseMeasure& measure() const { return mu_; }

    // Overwrites a memoized value. Exists only so negative-control tests can
    // prove the consistency checks actually bite.
    void corrupt(const Word& u, double value);

private:
    SparseMeasure mu_;
    double mass_e_ = 0.0;
    std::unordered_map<Word, double, WordHash> memo_;
};

// Depth-first walk over the positive-lambda cylinder tree, ascending symbol
// order, up to and including `depth`. Visits the identity cylinder first.
void for_each_cylinder(HittingOracle& oracle, std::uint32_t depth,
                       const std::function<void(const Word&, double)>& fn);

// Radon-Nikodym derivative d(g lambda)/d lambda at the boundary point
// approximated by xi_prefix, i.e. lambda([g^-1 xi_n]) / lambda([xi_n]) at the
// deepest available n. `prev` is the ratio one level up; `converged` compares
// the two. Exactly 0 (and converged) when g is not a prefix of xi_prefix.
struct RnDerivative {
    double value = 0.0;
    double prev = 0.0;
    bool converged = false;
};

RnDerivative rn_derivative(HittingOracle& oracle, const Word& g, const Word& xi_prefix,
                           double tol = 1e-6);

// One row of the Doob-conditioned walk: from position x, conditioned on the
// boundary point with prefix xi_prefix, move x -> x.g has probability
// mu(g) u(xg) / u(x). Rows over the represented support sum to 1 up to FP and
// mu's tail; `residual` reports |sum - 1|.
struct KernelEntry {
    Word g;
    Word target;
    double weight = 0.0;
    bool converged = false;
};

struct KernelRow {
    Word x;
    Word xi_prefix;
    double residual = 0.0;
    bool all_converged = false;
    std::vector<KernelEntry> entries;
};

KernelRow conditional_kernel(HittingOracle& oracle, const Word& x, const Word& xi_prefix,
                             double tol = 1e-6);

// Function on depth-d cylinders, extended to deeper words by their depth-d
// prefix value. Missing cylinders read as 0.
class CylinderFunction {
public:
    CylinderFunction(std::uint32_t depth, std::unordered_map<Word, double, WordHash> values);

    // Values drawn uniformly from [lo, hi) on every positive-lambda cylinder
    // of the given depth.
    static CylinderFunction random(HittingOracle& oracle, std::uint32_t depth, RngStream& rng,
                                   double lo, double hi);

    std::uint32_t depth() const { return depth_; }
    double at(const Word& u) const;

private:
    std::uint32_t depth_;
    std::unordered_map<Word, double, WordHash> values_;
};

// Boundary integral f(g) = integral of fhat d(g lambda). For |g| >= depth this
// collapses to fhat at the depth-prefix of g; otherwise it is a finite sum
// over the positive-lambda extensions of g.
double poisson_eval(HittingOracle& oracle, const CylinderFunction& fhat, const Word& g);

// |f(g) - sum_g' mu(g') f(g g')|. Zero in exact arithmetic when mu has no
// tail; a truncated mu leaves a residual of order tail * max|fhat| because the
// averaging side only sees the represented steps.
double harmonicity_residual(HittingOracle& oracle, const CylinderFunction& fhat, const Word& g);

} // namespace sbl
