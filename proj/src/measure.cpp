#include "sbl/measure.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "sbl/stats.hpp"

namespace sbl {

namespace {

bool entry_less(const SparseMeasure::Entry& a, const SparseMeasure::Entry& b) {
    return Word::compare(a.first, b.first) < 0;
}

} // namespace

// ---------------------------------------------------------------------------
// SparseMeasure / MeasureBuilder
// ---------------------------------------------------------------------------

double SparseMeasure::mass(const Word& w) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), w,
                               [](const Entry& e, const Word& k) { return Word::compare(e.first, k) < 0; });
    if (it != entries_.end() && it->first == w) return it->second;
    return 0.0;
}

MeasureBuilder::MeasureBuilder(std::shared_ptr<const Alphabet> alphabet)
    : alphabet_(std::move(alphabet)) {
    if (!alphabet_) throw std::invalid_argument("measure: null alphabet");
}

void MeasureBuilder::add(const Word& w, double mass) {
    if (mass < 0.0) throw std::invalid_argument("measure: negative mass");
    if (mass == 0.0) return;
    pending_.emplace_back(w, mass);
}

void MeasureBuilder::set_tail(const TailLedger& t) {
    if (t.mass < 0.0 || t.mass > 1.0 + 1e-12) throw std::invalid_argument("measure: bad tail mass");
    tail_ = t;
}

SparseMeasure MeasureBuilder::freeze(double drop_epsilon) {
    // Coalesce duplicate words first (deterministically: sort, then fold).
    std::sort(pending_.begin(), pending_.end(), entry_less);
    std::vector<SparseMeasure::Entry> folded;
    folded.reserve(pending_.size());
    for (const auto& [w, m] : pending_) {
        if (!folded.empty() && folded.back().first == w) {
            folded.back().second += m;
        } else {
            folded.emplace_back(w, m);
        }
    }

    SparseMeasure out;
    out.alphabet_ = alphabet_;
    out.tail_ = tail_;
    CompensatedSum kept;
    double dropped = 0.0;
    std::uint64_t drop_count = 0;
    std::uint64_t drop_max_len = 1;
    for (auto& e : folded) {
        if (e.second < drop_epsilon) {
            dropped += e.second;
            ++drop_count;
            drop_max_len = std::max(drop_max_len, std::max<std::uint64_t>(e.first.length(), 1));
            continue;
        }
        kept.add(e.second);
        out.max_length_ = std::max(out.max_length_, e.first.length());
        out.entries_.push_back(std::move(e));
    }
    if (drop_count > 0) {
        out.tail_.mass += dropped;
        out.tail_.entropy += max_entropy_bound(dropped, drop_count);
        out.tail_.log_len += dropped * std::log(static_cast<double>(std::max<std::uint64_t>(drop_max_len, 2)));
    }
    out.represented_ = kept.value();

    double total = out.represented_ + out.tail_.mass;
    if (std::abs(total - 1.0) > 1e-12) {
        throw std::invalid_argument("measure: masses + tail sum to " + std::to_string(total) +
                                    ", expected 1");
    }
    if (out.entries_.empty()) throw std::invalid_argument("measure: empty represented support");
    return out;
}

// ---------------------------------------------------------------------------
// LengthMeasure
// ---------------------------------------------------------------------------

LengthMeasure::LengthMeasure(std::vector<Entry> entries, TailLedger tail) : tail_(tail) {
    std::sort(entries.begin(), entries.end());
    entries_.reserve(entries.size());
    for (const auto& [n, m] : entries) {
        if (m <= 0.0) throw std::invalid_argument("length measure: non-positive mass");
        if (!entries_.empty() && entries_.back().first == n) {
            entries_.back().second += m;
        } else {
            entries_.emplace_back(n, m);
        }
    }
    CompensatedSum s;
    for (const auto& [n, m] : entries_) {
        (void)n;
        s.add(m);
    }
    if (std::abs(s.value() + tail_.mass - 1.0) > 1e-12) {
        throw std::invalid_argument("length measure: masses + tail do not sum to 1");
    }
}

double LengthMeasure::mass(std::uint64_t n) const {
    auto it = std::lower_bound(entries_.begin(), entries_.end(), n,
                               [](const Entry& e, std::uint64_t k) { return e.first < k; });
    if (it != entries_.end() && it->first == n) return it->second;
    return 0.0;
}

// ---------------------------------------------------------------------------
// Convolution
// ---------------------------------------------------------------------------

namespace {

TailLedger combined_ledger(const TailLedger& ta, std::uint64_t maxlen_a, const TailLedger& tb,
                           std::uint64_t maxlen_b, double dropped, std::uint64_t drop_count) {
    TailLedger t;
    t.mass = 0.0; // set by caller from the represented sum
    t.entropy = ta.entropy + tb.entropy + max_entropy_bound(dropped, drop_count);
    double cross = ta.mass * std::log1p(static_cast<double>(maxlen_b)) +
                   tb.mass * std::log1p(static_cast<double>(maxlen_a));
    double drop_len = dropped * std::log(std::max(2.0, static_cast<double>(maxlen_a + maxlen_b)));
    t.log_len = ta.log_len + tb.log_len + cross + drop_len;
    return t;
}

} // namespace

SparseMeasure convolve(const SparseMeasure& a, const SparseMeasure& b,
                       const TruncationPolicy& policy) {
    if (a.alphabet() != b.alphabet()) {
        throw std::invalid_argument("convolve: measures over different alphabets");
    }
    std::unordered_map<Word, double, WordHash> acc;
    acc.reserve(std::min(a.size() * b.size(), policy.support_budget) + 16);
    for (const auto& [x, px] : a.entries()) {
        for (const auto& [y, py] : b.entries()) {
            acc[concat(x, y)] += px * py;
            if (acc.size() > policy.support_budget) {
                throw SupportExplosion("convolve: support exceeds budget of " +
                                       std::to_string(policy.support_budget));
            }
        }
    }

    std::vector<std::pair<Word, double>> kept;
    kept.reserve(acc.size());
    double dropped = 0.0;
    std::uint64_t drop_count = 0;
    for (const auto& e : acc) {
        if (e.second < policy.epsilon) {
            dropped += e.second;
            ++drop_count;
        } else {
            kept.push_back(e);
        }
    }
    if (kept.empty()) {
        throw std::invalid_argument("convolve: truncation policy removed all mass");
    }
    std::sort(kept.begin(), kept.end(), entry_less);

    MeasureBuilder builder(a.alphabet());
    CompensatedSum ksum;
    for (const auto& [w, m] : kept) {
        builder.add(w, m);
        ksum.add(m);
    }

    TailLedger t = combined_ledger(a.tail(), a.max_length(), b.tail(), b.max_length(), dropped,
                                   drop_count);
    t.mass = std::max(0.0, 1.0 - ksum.value());
    builder.set_tail(t);
    return builder.freeze();
}

SparseMeasure power(const SparseMeasure& mu, std::uint32_t k, const TruncationPolicy& policy) {
    if (k == 0) {
        MeasureBuilder b(mu.alphabet());
        b.add(Word(), 1.0);
        return b.freeze();
    }
    SparseMeasure out = mu;
    for (std::uint32_t i = 1; i < k; ++i) out = convolve(out, mu, policy);
    return out;
}

LengthMeasure length_pushforward(const SparseMeasure& mu) {
    std::map<std::uint64_t, double> acc;
    for (const auto& [w, m] : mu.entries()) acc[w.length()] += m;
    std::vector<LengthMeasure::Entry> entries(acc.begin(), acc.end());
    return LengthMeasure(std::move(entries), mu.tail());
}

LengthMeasure convolve_lengths(const LengthMeasure& a, const LengthMeasure& b,
                               const TruncationPolicy& policy) {
    std::unordered_map<std::uint64_t, double> acc;
    acc.reserve(std::min(a.entries().size() * b.entries().size(), policy.support_budget) + 16);
    for (const auto& [n, pn] : a.entries()) {
        for (const auto& [m, pm] : b.entries()) {
            acc[n + m] += pn * pm;
            if (acc.size() > policy.support_budget) {
                throw SupportExplosion("convolve_lengths: support exceeds budget");
            }
        }
    }
    std::uint64_t maxlen_a = a.entries().empty() ? 0 : a.entries().back().first;
    std::uint64_t maxlen_b = b.entries().empty() ? 0 : b.entries().back().first;
    std::vector<LengthMeasure::Entry> kept;
    CompensatedSum ksum;
    double dropped = 0.0;
    std::uint64_t drop_count = 0;
    std::vector<std::pair<std::uint64_t, double>> items(acc.begin(), acc.end());
    std::sort(items.begin(), items.end());
    for (const auto& [n, m] : items) {
        if (m < policy.epsilon) {
            dropped += m;
            ++drop_count;
        } else {
            kept.emplace_back(n, m);
            ksum.add(m);
        }
    }
    if (kept.empty()) throw std::invalid_argument("convolve_lengths: policy removed all mass");
    TailLedger t = combined_ledger(a.tail(), maxlen_a, b.tail(), maxlen_b, dropped, drop_count);
    t.mass = std::max(0.0, 1.0 - ksum.value());
    return LengthMeasure(std::move(kept), t);
}

LengthMeasure power_lengths(const LengthMeasure& theta, std::uint32_t k,
                            const TruncationPolicy& policy) {
    if (k == 0) return LengthMeasure({{0, 1.0}}, {});
    LengthMeasure out = theta;
    for (std::uint32_t i = 1; i < k; ++i) out = convolve_lengths(out, theta, policy);
    return out;
}

// ---------------------------------------------------------------------------
// Entropies and moments
// ---------------------------------------------------------------------------

Quantity entropy(const SparseMeasure& mu) {
    CompensatedSum s;
    for (const auto& [w, m] : mu.entries()) {
        (void)w;
        s.add(-m * std::log(m));
    }
    return {s.value(), mu.tail().entropy};
}

Quantity entropy(const LengthMeasure& theta) {
    CompensatedSum s;
    for (const auto& [n, m] : theta.entries()) {
        (void)n;
        s.add(-m * std::log(m));
    }
    return {s.value(), theta.tail().entropy};
}

Quantity log_moment(const LengthMeasure& theta) {
    CompensatedSum s;
    for (const auto& [n, m] : theta.entries()) {
        if (n >= 2) s.add(m * std::log(static_cast<double>(n)));
    }
    return {s.value(), theta.tail().log_len};
}

Quantity log_moment_w(const SparseMeasure& mu, const Word& w) {
    if (w.empty()) throw std::invalid_argument("log_moment_w: empty w");
    CompensatedSum s;
    for (const auto& [g, m] : mu.entries()) {
        s.add(m * std::log(static_cast<double>(w_norm(g, w))));
    }
    double err = mu.tail().log_len + mu.tail().mass * std::log1p(static_cast<double>(w.length()));
    return {s.value(), err};
}

Moments moments(const SparseMeasure& mu, const Word* w) {
    Moments out;
    LengthMeasure pf = length_pushforward(mu);
    out.H = entropy(mu);
    out.H_len = entropy(pf);
    out.L = log_moment(pf);
    if (w != nullptr) out.L_w = log_moment_w(mu, *w);
    return out;
}

// ---------------------------------------------------------------------------
// First return
// ---------------------------------------------------------------------------

SparseMeasure first_return_exact(const SparseMeasure& mu, const Word& w, std::uint32_t cutoff_K,
                                 const TruncationPolicy& policy) {
    if (w.empty()) throw std::invalid_argument("first_return: w must be nonempty");
    const double p = mu.mass(w);
    if (p <= 0.0) throw std::invalid_argument("first_return: w carries no mass");

    // alpha = mu restricted away from w (may include the identity), beta = mass at w.
    std::vector<SparseMeasure::Entry> alpha;
    alpha.reserve(mu.size() - 1);
    for (const auto& e : mu.entries()) {
        if (!(e.first == w)) alpha.push_back(e);
    }

    std::unordered_map<Word, double, WordHash> result;
    std::vector<SparseMeasure::Entry> term = {{w, p}}; // alpha^0 * beta
    double dropped = 0.0;
    std::uint64_t drop_count = 0;
    std::uint32_t k_stop = cutoff_K;

    for (std::uint32_t k = 0;; ++k) {
        for (const auto& [g, m] : term) result[g] += m;
        if (result.size() > policy.support_budget) {
            throw SupportExplosion("first_return: support exceeds budget");
        }
        if (k == cutoff_K) break;

        // term <- alpha * term, pruned by the policy.
        std::unordered_map<Word, double, WordHash> next;
        next.reserve(alpha.size() * term.size() + 16);
        for (const auto& [x, px] : alpha) {
            for (const auto& [y, py] : term) {
                next[concat(x, y)] += px * py;
                if (next.size() > policy.support_budget) {
                    throw SupportExplosion("first_return: intermediate support exceeds budget");
                }
            }
        }
        term.clear();
        double term_total = 0.0;
        for (const auto& [g, m] : next) {
            if (m < policy.epsilon) {
                dropped += m;
                ++drop_count;
            } else {
                term.emplace_back(g, m);
                term_total += m;
            }
        }
        std::sort(term.begin(), term.end(), entry_less);
        if (term.empty() || term_total < 1e-18) {
            k_stop = k + 1;
            break;
        }
    }

    MeasureBuilder builder(mu.alphabet());
    std::vector<SparseMeasure::Entry> kept;
    kept.reserve(result.size());
    double fine_dropped = 0.0;
    std::uint64_t fine_count = 0;
    for (const auto& [g, m] : result) {
        if (m < policy.epsilon) {
            fine_dropped += m;
            ++fine_count;
        } else {
            kept.emplace_back(g, m);
        }
    }
    if (kept.empty()) throw std::invalid_argument("first_return: policy removed all mass");
    std::sort(kept.begin(), kept.end(), entry_less);
    CompensatedSum ksum;
    for (const auto& [g, m] : kept) {
        builder.add(g, m);
        ksum.add(m);
    }

    // Ledger bounds for the un-expanded part sum_{k > k_stop} alpha^k * beta.
    // Entropy: split term k as mass q_k = (1-p)^k p times a normalized measure
    // whose entropy is at most k * H(alpha-hat); -x ln x is subadditive, so the
    // per-term bounds add. Lengths: words in term k are at most (k+1) * maxlen
    // letters, unless mu itself has tail mass (then no length bound exists).
    TailLedger t;
    t.mass = std::max(0.0, 1.0 - ksum.value());
    const double q_alpha = 1.0 - p; // mass of alpha including mu's own tail
    double h_alpha_hat = 0.0;
    {
        CompensatedSum hs;
        for (const auto& [g, m] : alpha) {
            (void)g;
            double r = m / q_alpha;
            hs.add(-r * std::log(r));
        }
        h_alpha_hat = hs.value();
        if (mu.tail().mass > 0.0) {
            h_alpha_hat += (mu.tail().entropy + mu.tail().mass * std::log(1.0 / q_alpha)) / q_alpha;
        }
    }
    double geo_entropy = 0.0;
    double geo_log_len = 0.0;
    const double lmax = static_cast<double>(std::max<std::uint64_t>(mu.max_length(), 1));
    for (std::uint32_t k = k_stop + 1; k <= k_stop + 2000; ++k) {
        double q_k = std::pow(q_alpha, k) * p;
        if (q_k < 1e-300) break;
        double hterm = q_k * static_cast<double>(k) * h_alpha_hat - q_k * std::log(q_k);
        geo_entropy += hterm;
        geo_log_len += q_k * std::log(static_cast<double>(k + 1) * lmax);
        if (hterm < 1e-18 && q_k < 1e-18) break;
    }
    t.entropy = geo_entropy + max_entropy_bound(dropped + fine_dropped, drop_count + fine_count);
    t.log_len = geo_log_len +
                (dropped + fine_dropped) * std::log(std::max(2.0, static_cast<double>(k_stop + 1) * lmax));
    if (mu.tail().mass > 0.0) t.log_len = kInf;
    if (std::isinf(h_alpha_hat)) t.entropy = kInf;
    builder.set_tail(t);
    return builder.freeze();
}

bool generates_declared_alphabet(const SparseMeasure& mu) {
    const auto& a = *mu.alphabet();
    for (SymbolId s = 0; s < a.size(); ++s) {
        if (mu.mass(Word::single(s)) <= 0.0) return false;
    }
    return true;
}

} // namespace sbl
