#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sbl/boundary.hpp"
#include "sbl/measure.hpp"

namespace sbl {

enum class SeriesKind { H_conv, H_proj, H_rel_exact, H_rel_mc, Lw_conv };

const char* to_string(SeriesKind kind);

struct SeriesRow {
    std::uint32_t k = 0;
    double value = 0.0;
    double err = 0.0;   // ledger bound; for MC rows this is the stderr
    bool flagged = false;
    std::string note;
};

struct EntropySeries {
    SeriesKind kind = SeriesKind::H_conv;
    std::vector<SeriesRow> rows;
    bool truncated = false; // stopped early (support budget)
    std::string truncation_note;
};

// H(mu^*k) for k = 1..kmax. Stops early (flagged) if a convolution power blows
// the support budget.
EntropySeries convolution_entropy_series(const SparseMeasure& mu, std::uint32_t kmax,
                                         const TruncationPolicy& policy = {});

// H of the k-fold convolution of the length pushforward. Projecting first and
// convolving on lengths is the same measure as convolving words first and then
// projecting, so this is the length-projection entropy series.
EntropySeries projection_entropy_series(const SparseMeasure& mu, std::uint32_t kmax,
                                        const TruncationPolicy& policy = {});

// sum mu^*k(g) ln|g|_w for k = 1..kmax.
EntropySeries w_log_moment_series(const SparseMeasure& mu, const Word& w, std::uint32_t kmax,
                                  const TruncationPolicy& policy = {});

// ---------------------------------------------------------------------------
// Entropy of the k-step position conditioned on the boundary
// ---------------------------------------------------------------------------

struct RelEntropyPoint {
    double value = 0.0;
    double residual = 0.0; // |sum of conditional masses - 1|
    bool converged = false;
};

// H_k at one boundary point: the conditional law of the k-step position given
// the boundary point under xi_prefix puts mass
//   q_g = mu^k(g) * lambda([g^-1 xi]) / lambda([xi])
// on each prefix g of xi in the support of mu^k; the value is -sum q ln q.
// Requires |xi_prefix| > max support length of mu_k, so that no support word
// can overshoot the prefix.
RelEntropyPoint relative_entropy_point(HittingOracle& oracle, const SparseMeasure& mu_k,
                                       const Word& xi_prefix, double tol = 1e-6);

// Exact averaged H_k for k = 1..kmax: the lambda-weighted average of
// relative_entropy_point over all cylinders of depth maxlen(mu^k) + margin.
// Averaging at any depth beyond maxlen(mu^k) gives a conditional entropy of
// the k-step position given a coarser sigma-algebra than the boundary, so
// every reported value is an upper bound for the boundary-conditional entropy
// and is itself bounded by the projection entropy.
EntropySeries relative_entropy_exact_series(HittingOracle& oracle, const SparseMeasure& mu,
                                            std::uint32_t kmax, std::uint32_t margin = 4,
                                            const TruncationPolicy& policy = {});

// Monte Carlo version: averages relative_entropy_point over boundary prefixes
// sampled by running the walk itself. Row err is the stderr of the mean.
EntropySeries relative_entropy_mc_series(HittingOracle& oracle, const SparseMeasure& mu,
                                         std::uint32_t kmax, std::size_t samples,
                                         std::uint64_t master_seed, std::uint32_t margin = 4,
                                         const TruncationPolicy& policy = {});

// ---------------------------------------------------------------------------
// Slope diagnostics
// ---------------------------------------------------------------------------

// Decides whether value/k is "consistent with zero": the ratios must be
// non-increasing within error slack and the final ratio must fall to at most
// half the initial one. Needs at least 4 unflagged rows.
struct SlopeReport {
    SeriesKind kind = SeriesKind::H_conv;
    bool consistent_with_zero = false;
    std::vector<double> ratios;
    std::vector<std::string> reasons; // empty when consistent
};

SlopeReport vanishing_slope_report(const EntropySeries& series);

} // namespace sbl
