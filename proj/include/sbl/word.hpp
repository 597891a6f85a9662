#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <map>
#include <vector>

namespace sbl {

using SymbolId = std::uint32_t;

// Interned symbol table. Ids are dense, assigned in first-seen order, and never
// reordered, so they are stable keys for the lifetime of the alphabet.
class Alphabet {
public:
    Alphabet() = default;
    explicit Alphabet(const std::vector<std::string>& symbols);

    static std::shared_ptr<Alphabet> make(std::initializer_list<const char*> symbols);

    // Returns the id for `name`, interning it if new. Empty names and names
    // containing '.', '^', whitespace or '#' are rejected (they collide with
    // the word syntax).
    SymbolId intern(std::string_view name);

    std::optional<SymbolId> find(std::string_view name) const;
    const std::string& name(SymbolId id) const;
    std::size_t size() const { return names_.size(); }

private:
    std::vector<std::string> names_;
    std::map<std::string, SymbolId, std::less<>> index_;
};

// One maximal block of equal letters.
struct Run {
    SymbolId symbol = 0;
    std::uint64_t count = 0;

    friend bool operator==(const Run&, const Run&) = default;
};

// A word in the free semigroup over some alphabet. Immutable after
// construction.
//
// Representation is canonical and determined by length: words of at most 512
// letters store a flat letter vector, longer words store maximal runs. That
// keeps the short/hot case cache-friendly while making things like a^(2^40)
// (which the stock families produce) cheap to hold and compare, and keeps
// convolution supports full of long lacunary words from hoarding memory.
// Equal words therefore always share a representation kind.
class Word {
public:
    static constexpr std::uint64_t kMaterializeLimit = 512;

    Word() = default; // identity element

    static Word from_letters(std::vector<SymbolId> letters);
    static Word from_runs(std::vector<Run> runs);
    static Word single(SymbolId s) { return from_letters({s}); }
    // s repeated count times.
    static Word repeated(SymbolId s, std::uint64_t count);

    std::uint64_t length() const { return length_; }
    bool empty() const { return length_ == 0; }
    bool run_encoded() const { return length_ > kMaterializeLimit; }

    // Valid only for words that are not run-encoded.
    std::span<const SymbolId> letters() const;
    // Maximal-run view, valid for every word (computed on the fly for flat
    // words, so prefer RunCursor in loops).
    std::vector<Run> runs() const;

    SymbolId letter_at(std::uint64_t i) const;

    std::size_t hash() const;

    // Shortlex: compare lengths first, then lexicographically by symbol id.
    static int compare(const Word& a, const Word& b);

    friend bool operator==(const Word& a, const Word& b);
    friend bool operator!=(const Word& a, const Word& b) { return !(a == b); }
    friend bool operator<(const Word& a, const Word& b) { return compare(a, b) < 0; }

private:
    friend class RunCursor;

    std::uint64_t length_ = 0;
    std::vector<SymbolId> letters_; // used when length_ <= kMaterializeLimit
    std::vector<Run> runs_;         // used otherwise; maximal runs
};

struct WordHash {
    std::size_t operator()(const Word& w) const noexcept { return w.hash(); }
};

// Forward iteration over the maximal runs of a word, with partial consumption.
// Works uniformly over both representations.
class RunCursor {
public:
    explicit RunCursor(const Word& w) : w_(&w) {}

    bool done() const { return consumed_ == w_->length_; }

    // Remaining part of the current maximal run. Precondition: !done().
    Run current() const;

    // Consume n letters; n must not exceed current().count.
    void advance(std::uint64_t n);

    std::uint64_t consumed() const { return consumed_; }

private:
    const Word* w_;
    std::uint64_t consumed_ = 0;
    std::size_t run_idx_ = 0;      // run-encoded words
    std::uint64_t run_off_ = 0;
    std::size_t flat_pos_ = 0;     // flat words
};

// --- semigroup operations ---------------------------------------------------

Word concat(const Word& x, const Word& y);

bool is_prefix(const Word& p, const Word& w);

// First n letters of w (n clamped to |w|).
Word prefix(const Word& w, std::uint64_t n);

// w with its first n letters removed (n <= |w|).
Word suffix(const Word& w, std::uint64_t n);

// x^{-1} y: the unique z with x z = y, when x is a prefix of y.
std::optional<Word> prefix_quotient(const Word& x, const Word& y);

// --- pattern counting -------------------------------------------------------

// Number of (possibly overlapping) start positions at which w occurs in g.
// w must be nonempty. Flat-on-flat uses KMP; anything run-encoded uses a
// run-aligned matcher, so counting inside a^(2^40) stays cheap.
std::uint64_t occurrence_count(const Word& g, const Word& w);

// occurrence_count(g, w) + |w|. Subadditive under concatenation and sandwiched
// between |w| and |w| + |g|.
std::uint64_t w_norm(const Word& g, const Word& w);

// --- text form --------------------------------------------------------------

// Dotted syntax: letters separated by '.', runs writable as name^count.
// The empty string denotes the identity. Parsing interns unseen letter names.
Word parse_word(Alphabet& alphabet, std::string_view text);

std::string format_word(const Alphabet& alphabet, const Word& w);

} // namespace sbl
