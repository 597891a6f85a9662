#include "sbl/entropy.hpp"

#include <algorithm>
#include <cmath>

#include "sbl/stats.hpp"
#include "sbl/walk.hpp"

namespace sbl {

const char* to_string(SeriesKind kind) {
    switch (kind) {
        case SeriesKind::H_conv: return "H_conv";
        case SeriesKind::H_proj: return "H_proj";
        case SeriesKind::H_rel_exact: return "H_rel_exact";
        case SeriesKind::H_rel_mc: return "H_rel_mc";
        case SeriesKind::Lw_conv: return "Lw_conv";
    }
    return "?";
}

EntropySeries convolution_entropy_series(const SparseMeasure& mu, std::uint32_t kmax,
                                         const TruncationPolicy& policy) {
    EntropySeries s;
    s.kind = SeriesKind::H_conv;
    SparseMeasure mu_k = mu;
    for (std::uint32_t k = 1; k <= kmax; ++k) {
        if (k > 1) {
            try {
                mu_k = convolve(mu_k, mu, policy);
            } catch (const SupportExplosion& e) {
                s.truncated = true;
                s.truncation_note = e.what();
                break;
            }
        }
        Quantity h = entropy(mu_k);
        s.rows.push_back({k, h.value, h.err, false, ""});
    }
    return s;
}

EntropySeries projection_entropy_series(const SparseMeasure& mu, std::uint32_t kmax,
                                        const TruncationPolicy& policy) {
    EntropySeries s;
    s.kind = SeriesKind::H_proj;
    LengthMeasure theta = length_pushforward(mu);
    LengthMeasure theta_k = theta;
    for (std::uint32_t k = 1; k <= kmax; ++k) {
        if (k > 1) {
            try {
                theta_k = convolve_lengths(theta_k, theta, policy);
            } catch (const SupportExplosion& e) {
                s.truncated = true;
                s.truncation_note = e.what();
                break;
            }
        }
        Quantity h = entropy(theta_k);
        s.rows.push_back({k, h.value, h.err, false, ""});
    }
    return s;
}

EntropySeries w_log_moment_series(const SparseMeasure& mu, const Word& w, std::uint32_t kmax,
                                  const TruncationPolicy& policy) {
    EntropySeries s;
    s.kind = SeriesKind::Lw_conv;
    SparseMeasure mu_k = mu;
    for (std::uint32_t k = 1; k <= kmax; ++k) {
        if (k > 1) {
            try {
                mu_k = convolve(mu_k, mu, policy);
            } catch (const SupportExplosion& e) {
                s.truncated = true;
                s.truncation_note = e.what();
                break;
            }
        }
        Quantity lw = log_moment_w(mu_k, w);
        s.rows.push_back({k, lw.value, lw.err, false, ""});
    }
    return s;
}

// ---------------------------------------------------------------------------
// Boundary-conditional entropy
// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint64_t> support_lengths(const SparseMeasure& mu) {
    std::vector<std::uint64_t> lens;
    for (const auto& [g, m] : mu.entries()) {
        (void)m;
        if (lens.empty() || lens.back() != g.length()) lens.push_back(g.length());
    }
    // entries are shortlex sorted, so lengths arrive non-decreasing
    lens.erase(std::unique(lens.begin(), lens.end()), lens.end());
    return lens;
}

RelEntropyPoint point_impl(HittingOracle& oracle, const SparseMeasure& mu_k,
                           const std::vector<std::uint64_t>& lens, const Word& xi_prefix,
                           double tol) {
    const std::uint64_t n = xi_prefix.length();
    if (n <= mu_k.max_length()) {
        throw std::invalid_argument("relative_entropy_point: xi_prefix not longer than support");
    }
    double denom = oracle.prob(xi_prefix);
    if (denom <= 0.0) {
        throw std::invalid_argument("relative_entropy_point: xi_prefix off the boundary support");
    }
    Word shorter = prefix(xi_prefix, n - 1);
    double denom2 = oracle.prob(shorter);

    RelEntropyPoint out;
    out.converged = true;
    CompensatedSum h;
    CompensatedSum total;
    for (std::uint64_t len : lens) {
        Word g = prefix(xi_prefix, len);
        double m = mu_k.mass(g);
        if (m <= 0.0) continue;
        double u = oracle.prob(suffix(xi_prefix, len)) / denom;
        if (denom2 > 0.0 && n >= len + 2) {
            double u_prev = oracle.prob(suffix(shorter, len)) / denom2;
            if (std::abs(u - u_prev) > tol) out.converged = false;
        }
        double q = m * u;
        if (q > 0.0) {
            h.add(-q * std::log(q));
            total.add(q);
        }
    }
    out.value = h.value();
    out.residual = std::abs(total.value() - 1.0);
    return out;
}

} // namespace

RelEntropyPoint relative_entropy_point(HittingOracle& oracle, const SparseMeasure& mu_k,
                                       const Word& xi_prefix, double tol) {
    return point_impl(oracle, mu_k, support_lengths(mu_k), xi_prefix, tol);
}

EntropySeries relative_entropy_exact_series(HittingOracle& oracle, const SparseMeasure& mu,
                                            std::uint32_t kmax, std::uint32_t margin,
                                            const TruncationPolicy& policy) {
    if (margin == 0) throw std::invalid_argument("relative_entropy: margin must be >= 1");
    EntropySeries s;
    s.kind = SeriesKind::H_rel_exact;
    SparseMeasure mu_k = mu;
    for (std::uint32_t k = 1; k <= kmax; ++k) {
        if (k > 1) {
            try {
                mu_k = convolve(mu_k, mu, policy);
            } catch (const SupportExplosion& e) {
                s.truncated = true;
                s.truncation_note = e.what();
                break;
            }
        }
        const std::uint64_t depth64 = mu_k.max_length() + margin;
        if (depth64 > 4096) {
            s.truncated = true;
            s.truncation_note = "support too long for exact boundary averaging";
            break;
        }
        const auto depth = static_cast<std::uint32_t>(depth64);
        auto lens = support_lengths(mu_k);

        // lambda-weighted average of the per-prefix entropy over depth-d
        // cylinders; the weights sum to at most 1, the deficit is ledgered.
        // Own DFS rather than for_each_cylinder: wide trees (full shift at
        // depth 30+) must abort mid-walk, not after visiting everything.
        CompensatedSum val;
        CompensatedSum weight;
        CompensatedSum residual_avg;
        bool all_converged = true;
        const std::size_t leaf_budget =
            std::min<std::size_t>(policy.support_budget, std::size_t{1} << 16);
        std::size_t leaves = 0;
        std::size_t visits = 0;
        bool blown = false;
        const Alphabet& alphabet = *oracle.measure().alphabet();
        std::function<void(const Word&, double)> walk = [&](const Word& u, double lambda) {
            if (blown) return;
            if (++visits > 4 * leaf_budget + depth) {
                blown = true;
                return;
            }
            if (u.length() == depth) {
                if (++leaves > leaf_budget) {
                    blown = true;
                    return;
                }
                RelEntropyPoint p = point_impl(oracle, mu_k, lens, u, 1e-6);
                val.add(lambda * p.value);
                weight.add(lambda);
                residual_avg.add(lambda * p.residual);
                all_converged = all_converged && p.converged;
                return;
            }
            for (SymbolId sym = 0; sym < alphabet.size() && !blown; ++sym) {
                Word child = concat(u, Word::single(sym));
                double l = oracle.prob(child);
                if (l > 0.0) walk(child, l);
            }
        };
        walk(Word(), 1.0);
        if (blown) {
            s.truncated = true;
            s.truncation_note = "cylinder tree exceeds support budget";
            break;
        }
        double deficit = std::max(0.0, 1.0 - weight.value());
        double cap = std::log(std::max<double>(2.0, static_cast<double>(mu_k.size())));
        double err = (deficit + residual_avg.value()) * cap + mu_k.tail().entropy;
        s.rows.push_back({k, val.value(), err, !all_converged,
                          all_converged ? "" : "non-converged derivative"});
    }
    return s;
}

EntropySeries relative_entropy_mc_series(HittingOracle& oracle, const SparseMeasure& mu,
                                         std::uint32_t kmax, std::size_t samples,
                                         std::uint64_t master_seed, std::uint32_t margin,
                                         const TruncationPolicy& policy) {
    if (margin == 0) throw std::invalid_argument("relative_entropy: margin must be >= 1");
    if (samples == 0) throw std::invalid_argument("relative_entropy: need at least one sample");
    EntropySeries s;
    s.kind = SeriesKind::H_rel_mc;
    SamplingTable table(mu);
    SparseMeasure mu_k = mu;
    for (std::uint32_t k = 1; k <= kmax; ++k) {
        if (k > 1) {
            try {
                mu_k = convolve(mu_k, mu, policy);
            } catch (const SupportExplosion& e) {
                s.truncated = true;
                s.truncation_note = e.what();
                break;
            }
        }
        const std::uint64_t depth = mu_k.max_length() + margin;
        if (depth > 4096) {
            s.truncated = true;
            s.truncation_note = "support too long for boundary sampling";
            break;
        }
        auto lens = support_lengths(mu_k);

        std::vector<double> values;
        values.reserve(samples);
        std::size_t non_converged = 0;
        for (std::size_t i = 0; i < samples; ++i) {
            RngStream rng(master_seed, static_cast<std::uint64_t>(k) * samples + i);
            Word x;
            while (x.length() < depth) x = concat(x, table.draw(rng));
            Word xi = prefix(x, depth);
            RelEntropyPoint p = point_impl(oracle, mu_k, lens, xi, 1e-6);
            values.push_back(p.value);
            if (!p.converged) ++non_converged;
        }
        MeanStderr ms = mean_stderr(values);
        bool flagged = non_converged > 0;
        s.rows.push_back({k, ms.mean, ms.stderr_, flagged,
                          flagged ? std::to_string(non_converged) + " non-converged" : ""});
    }
    return s;
}

// ---------------------------------------------------------------------------
// Slope diagnostics
// ---------------------------------------------------------------------------

SlopeReport vanishing_slope_report(const EntropySeries& series) {
    SlopeReport r;
    r.kind = series.kind;
    std::vector<const SeriesRow*> rows;
    for (const auto& row : series.rows) {
        if (!row.flagged) rows.push_back(&row);
    }
    if (rows.size() < 4) {
        throw std::invalid_argument("vanishing_slope_report: need at least 4 unflagged rows");
    }
    const double err_factor = series.kind == SeriesKind::H_rel_mc ? 3.0 : 1.0;
    auto slack = [&](const SeriesRow& a) { return err_factor * a.err / std::max(1u, a.k); };

    for (const auto* row : rows) {
        r.ratios.push_back(row->value / static_cast<double>(row->k));
    }

    r.consistent_with_zero = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        double prev = r.ratios[i - 1];
        double cur = r.ratios[i];
        if (cur > prev + slack(*rows[i - 1]) + slack(*rows[i]) + 1e-12) {
            r.consistent_with_zero = false;
            r.reasons.push_back("slope rises at k=" + std::to_string(rows[i]->k));
        }
    }
    // The halving requirement is on the reported values themselves; error
    // slack only softens the monotonicity clause. A series that stops early
    // (support budget) therefore cannot drift into a spurious verdict.
    double first = r.ratios.front();
    double last = r.ratios.back();
    if (last > 0.5 * first + 1e-12) {
        r.consistent_with_zero = false;
        r.reasons.push_back("final slope exceeds half the initial slope");
    }
    return r;
}

} // namespace sbl
