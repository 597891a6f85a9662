#include "sbl/walk.hpp"

#include <algorithm>
#include <cmath>

#include "sbl/stats.hpp"

namespace sbl {

SamplingTable::SamplingTable(const SparseMeasure& mu) {
    if (mu.represented_mass() < 1.0 - 1e-9) {
        throw std::invalid_argument(
            "sampling: represented mass " + std::to_string(mu.represented_mass()) +
            " is too far below 1; renormalize or extend the truncation first");
    }
    words_.reserve(mu.size());
    cdf_.reserve(mu.size());
    double acc = 0.0;
    for (const auto& [w, m] : mu.entries()) {
        words_.push_back(w);
        acc += m;
        cdf_.push_back(acc);
    }
}

const Word& SamplingTable::draw(RngStream& rng) const {
    double u = rng.next_unit() * cdf_.back();
    auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    if (it == cdf_.end()) --it;
    return words_[static_cast<std::size_t>(it - cdf_.begin())];
}

PathSample sample_path(const SparseMeasure& mu, std::size_t n_steps, std::uint64_t master_seed,
                       std::uint64_t stream) {
    SamplingTable table(mu);
    RngStream rng(master_seed, stream);
    PathSample out;
    out.master_seed = master_seed;
    out.stream = stream;
    out.increments.reserve(n_steps);
    out.position_lengths.reserve(n_steps);
    std::uint64_t len = 0;
    for (std::size_t i = 0; i < n_steps; ++i) {
        const Word& g = table.draw(rng);
        len += g.length();
        out.increments.push_back(g);
        out.position_lengths.push_back(len);
    }
    return out;
}

Word path_position(const PathSample& path, std::size_t k) {
    if (k > path.increments.size()) throw std::out_of_range("path_position: k past end of path");
    Word x;
    for (std::size_t i = 0; i < k; ++i) x = concat(x, path.increments[i]);
    return x;
}

StoppingTimeStats stopping_time_stats(const SparseMeasure& mu, const Word& w, std::size_t samples,
                                      std::uint64_t master_seed) {
    const double p = mu.mass(w);
    if (p <= 0.0) throw std::invalid_argument("stopping_time: w carries no mass");
    if (samples == 0) throw std::invalid_argument("stopping_time: need at least one sample");

    SamplingTable table(mu);
    constexpr std::uint64_t kCap = 100'000'000;
    std::vector<double> taus;
    taus.reserve(samples);
    StoppingTimeStats out;
    for (std::size_t i = 0; i < samples; ++i) {
        RngStream rng(master_seed, i);
        std::uint64_t tau = 0;
        for (;;) {
            ++tau;
            if (table.draw(rng) == w) break;
            if (tau >= kCap) throw std::runtime_error("stopping_time: cap exceeded");
        }
        out.max_tau = std::max(out.max_tau, tau);
        taus.push_back(static_cast<double>(tau));
    }
    MeanStderr ms = mean_stderr(taus);
    out.mean = ms.mean;
    out.stderr_ = ms.stderr_;
    out.exact = 1.0 / p;
    out.samples = samples;
    return out;
}

InducedWalk induced_walk(const PathSample& path, const Word& w) {
    InducedWalk out;
    Word block;
    bool any = false;
    for (const Word& g : path.increments) {
        block = concat(block, g);
        if (g == w) {
            out.blocks.push_back(block);
            block = Word();
            any = true;
        }
    }
    out.w_never_occurred = !any;
    return out;
}

AbramovCheck abramov_check(const SparseMeasure& mu, const Word& w, std::uint32_t cutoff_K,
                           const TruncationPolicy& policy) {
    const double p = mu.mass(w);
    if (p <= 0.0) throw std::invalid_argument("abramov_check: w carries no mass");

    SparseMeasure mu_w = first_return_exact(mu, w, cutoff_K, policy);

    AbramovCheck out;
    CompensatedSum lhs;
    for (const auto& [g, m] : mu_w.entries()) {
        lhs.add(m * std::log1p(static_cast<double>(w_norm(g, w))));
    }
    out.lhs = lhs.value();
    out.lhs_missing_mass = mu_w.tail().mass;

    CompensatedSum ef;
    for (const auto& [g, m] : mu.entries()) {
        ef.add(m * std::log1p(static_cast<double>(w_norm(g, w))));
    }
    out.rhs = ef.value() / p;
    // What mu's own tail could add to E(F): F(g) <= ln(1+|w|) + ln 2 + ln|g|.
    const TailLedger& t = mu.tail();
    out.rhs_err =
        (t.mass * (std::log1p(static_cast<double>(w.length())) + std::log(2.0)) + t.log_len) / p;
    out.holds = out.lhs <= out.rhs + out.rhs_err + 1e-12;
    return out;
}

} // namespace sbl
