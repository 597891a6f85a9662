#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sbl/word.hpp"

namespace sbl {

// Knobs for keeping convolution supports finite. Atoms below `epsilon` are
// moved into the tail ledger; if a represented support would exceed
// `support_budget` the operation throws SupportExplosion rather than thrash.
struct TruncationPolicy {
    double epsilon = 1e-15;
    std::size_t support_budget = 2'000'000;
};

struct SupportExplosion : std::runtime_error {
    explicit SupportExplosion(const std::string& what) : std::runtime_error(what) {}
};

// Accounting for mass that is not represented explicitly.
//   mass     total unrepresented probability.
//   entropy  upper bound on the entropy contribution -sum p ln p of the
//            unrepresented atoms. May be +inf when no finite bound is known.
//   log_len  upper bound on sum p ln|g| over unrepresented atoms; +inf when
//            the tail has unbounded logarithmic moment.
// Bounds are propagated through operations by documented conventions (see the
// individual operations); they are reporting aids, always surfaced next to the
// values they qualify, never silently applied.
struct TailLedger {
    double mass = 0.0;
    double entropy = 0.0;
    double log_len = 0.0;
};

// Finitely supported (plus ledgered tail) probability measure on the free
// semigroup over a fixed alphabet. Immutable; entries are shortlex-sorted,
// masses are strictly positive, and sum(masses) + tail.mass = 1 within 1e-12.
class SparseMeasure {
public:
    using Entry = std::pair<Word, double>;

    const std::vector<Entry>& entries() const { return entries_; }
    const TailLedger& tail() const { return tail_; }
    const std::shared_ptr<const Alphabet>& alphabet() const { return alphabet_; }

    // Mass of w, 0.0 if unrepresented. Binary search over the sorted entries.
    double mass(const Word& w) const;

    double represented_mass() const { return represented_; }
    // Longest represented word; 0 for the point mass at the identity.
    std::uint64_t max_length() const { return max_length_; }

    std::size_t size() const { return entries_.size(); }

private:
    friend class MeasureBuilder;

    std::vector<Entry> entries_;
    TailLedger tail_;
    std::shared_ptr<const Alphabet> alphabet_;
    double represented_ = 0.0;
    std::uint64_t max_length_ = 0;
};

// Accumulates (word, mass) pairs, then freezes into a SparseMeasure.
// Repeated adds of the same word accumulate.
class MeasureBuilder {
public:
    explicit MeasureBuilder(std::shared_ptr<const Alphabet> alphabet);

    void add(const Word& w, double mass);
    void set_tail(const TailLedger& t);

    // Validates: no negative masses, ledger consistency
    // |represented + tail - 1| <= 1e-12. Entries below `drop_epsilon` are
    // folded into the tail (with the generic entropy/log-length conventions).
    SparseMeasure freeze(double drop_epsilon = 0.0);

private:
    std::shared_ptr<const Alphabet> alphabet_;
    std::vector<std::pair<Word, double>> pending_;
    TailLedger tail_;
};

// Pushforward of a word measure under g -> |g|: a measure on lengths.
// Same ledger conventions as SparseMeasure.
class LengthMeasure {
public:
    using Entry = std::pair<std::uint64_t, double>;

    LengthMeasure() = default;
    LengthMeasure(std::vector<Entry> entries, TailLedger tail);

    const std::vector<Entry>& entries() const { return entries_; }
    const TailLedger& tail() const { return tail_; }
    double mass(std::uint64_t n) const;

private:
    std::vector<Entry> entries_; // sorted by length, masses > 0
    TailLedger tail_;
};

// A value together with the error bound inherited from truncation ledgers.
struct Quantity {
    double value = 0.0;
    double err = 0.0;
};

// ---------------------------------------------------------------------------
// Operations
// ---------------------------------------------------------------------------

// Convolution (mu * nu)(w) = sum over factorizations w = x y of mu(x) nu(y).
// Ledger conventions: output tail mass is 1 - (represented sum); entropy and
// log-length bounds add the inputs' bounds plus a spread bound for atoms
// dropped by the policy.
SparseMeasure convolve(const SparseMeasure& a, const SparseMeasure& b,
                       const TruncationPolicy& policy = {});

// k-fold convolution power; power(mu, 0) is the point mass at the identity.
SparseMeasure power(const SparseMeasure& mu, std::uint32_t k,
                    const TruncationPolicy& policy = {});

LengthMeasure length_pushforward(const SparseMeasure& mu);

LengthMeasure convolve_lengths(const LengthMeasure& a, const LengthMeasure& b,
                               const TruncationPolicy& policy = {});

LengthMeasure power_lengths(const LengthMeasure& theta, std::uint32_t k,
                            const TruncationPolicy& policy = {});

// Shannon entropy -sum p ln p over represented atoms; err from the ledger.
Quantity entropy(const SparseMeasure& mu);
Quantity entropy(const LengthMeasure& theta);

// Logarithmic moment sum p ln(n) over lengths n >= 1 (identity contributes 0).
Quantity log_moment(const LengthMeasure& theta);

// sum mu(g) ln|g|_w. Finite for every represented support since |g|_w >= |w| >= 1.
Quantity log_moment_w(const SparseMeasure& mu, const Word& w);

struct Moments {
    Quantity H;      // entropy of the word measure
    Quantity H_len;  // entropy of the length pushforward
    Quantity L;      // logarithmic moment (computed on the pushforward)
    std::optional<Quantity> L_w;
};

Moments moments(const SparseMeasure& mu, const Word* w = nullptr);

// First-return decomposition for the stopping time "first increment equals w":
// sum over k <= cutoff_K of alpha^k * beta, where beta is mu restricted to w
// and alpha is the rest. Truncation goes to the tail ledger; the tail's
// entropy/log-length bounds are +inf (the discarded part is unexamined).
// Requires mu(w) > 0 and w nonempty.
SparseMeasure first_return_exact(const SparseMeasure& mu, const Word& w,
                                 std::uint32_t cutoff_K,
                                 const TruncationPolicy& policy = {});

// True iff every alphabet symbol appears as a singleton word in the support.
bool generates_declared_alphabet(const SparseMeasure& mu);

} // namespace sbl
