#pragma once

#include <cstdint>
#include <vector>

#include "sbl/measure.hpp"
#include "sbl/rng.hpp"

namespace sbl {

// Inverse-CDF sampler over the represented support (shortlex order). Requires
// the represented mass to be at least 1 - 1e-9; the residual tail is
// renormalized away proportionally.
class SamplingTable {
public:
    explicit SamplingTable(const SparseMeasure& mu);
    const Word& draw(RngStream& rng) const;

private:
    std::vector<Word> words_;
    std::vector<double> cdf_; // inclusive partial sums
};

// One sampled trajectory: increments g_1..g_N and the lengths |x_1|..|x_N| of
// the positions x_k = g_1 ... g_k.
struct PathSample {
    std::uint64_t master_seed = 0;
    std::uint64_t stream = 0;
    std::vector<Word> increments;
    std::vector<std::uint64_t> position_lengths;
};

PathSample sample_path(const SparseMeasure& mu, std::size_t n_steps, std::uint64_t master_seed,
                       std::uint64_t stream = 0);

// x_k as an explicit word (k <= number of increments; k = 0 gives the identity).
Word path_position(const PathSample& path, std::size_t k);

// Empirical distribution of the first time an increment equals w, across
// independent streams (master_seed, 0..samples-1).
struct StoppingTimeStats {
    double mean = 0.0;
    double stderr_ = 0.0;
    double exact = 0.0; // 1 / mu(w)
    std::uint64_t max_tau = 0;
    std::size_t samples = 0;
};

StoppingTimeStats stopping_time_stats(const SparseMeasure& mu, const Word& w, std::size_t samples,
                                      std::uint64_t master_seed);

// Blocks of the induced walk: the products of increments between successive
// times at which the increment equals w. Each block ends in w; the blocks are
// iid with the first-return law.
struct InducedWalk {
    std::vector<Word> blocks;
    bool w_never_occurred = false;
};

InducedWalk induced_walk(const PathSample& path, const Word& w);

// Inequality check for subadditive weight F(g) = ln(1 + |g|_w):
//   sum_g mu_tau(g) F(g)  <=  E(tau) * sum_g mu(g) F(g).
// lhs is computed on the truncated first-return measure (missing mass only
// lowers it); rhs_err bounds what mu's own tail could add to the right side.
struct AbramovCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double rhs_err = 0.0;
    double lhs_missing_mass = 0.0;
    bool holds = false;
};

AbramovCheck abramov_check(const SparseMeasure& mu, const Word& w, std::uint32_t cutoff_K,
                           const TruncationPolicy& policy = {});

} // namespace sbl
