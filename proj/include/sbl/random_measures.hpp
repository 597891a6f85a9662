#pragma once

#include <algorithm>
#include <set>
#include <vector>

#include "sbl/measure.hpp"
#include "sbl/rng.hpp"

namespace sbl {

// Random word of length in [0, max_len] over the whole alphabet.
inline Word random_word(const Alphabet& alphabet, RngStream& rng, std::uint64_t max_len,
                        std::uint64_t min_len = 0) {
    std::uint64_t len = min_len + rng.next_below(max_len - min_len + 1);
    std::vector<SymbolId> ls;
    ls.reserve(static_cast<std::size_t>(len));
    for (std::uint64_t i = 0; i < len; ++i) {
        ls.push_back(static_cast<SymbolId>(rng.next_below(alphabet.size())));
    }
    return Word::from_letters(std::move(ls));
}

// Random finitely-supported probability measure: up to max_atoms distinct
// words of length <= max_len (the identity allowed only when with_identity),
// weights bounded away from zero, normalized exactly.
inline SparseMeasure random_sparse_measure(const std::shared_ptr<Alphabet>& alphabet,
                                           RngStream& rng, std::size_t max_atoms,
                                           std::uint64_t max_len, bool with_identity = false) {
    std::size_t n = 2 + rng.next_below(max_atoms - 1);
    std::set<Word> support;
    while (support.size() < n) {
        Word w = random_word(*alphabet, rng, max_len, with_identity ? 0 : 1);
        support.insert(w);
    }
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t i = 0; i < support.size(); ++i) {
        double u = 0.1 + 0.9 * rng.next_unit();
        weights.push_back(u);
        total += u;
    }
    MeasureBuilder b(alphabet);
    std::size_t i = 0;
    for (const Word& w : support) b.add(w, weights[i++] / total);
    return b.freeze();
}

// Random measure on lengths 1..max_n with up to max_atoms atoms.
inline LengthMeasure random_length_measure(RngStream& rng, std::size_t max_atoms,
                                           std::uint64_t max_n) {
    std::size_t n = 2 + rng.next_below(max_atoms - 1);
    std::set<std::uint64_t> keys;
    while (keys.size() < n) keys.insert(1 + rng.next_below(max_n));
    std::vector<double> weights;
    double total = 0.0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        double u = 0.05 + 0.95 * rng.next_unit();
        weights.push_back(u);
        total += u;
    }
    std::vector<LengthMeasure::Entry> entries;
    std::size_t i = 0;
    for (std::uint64_t k : keys) entries.emplace_back(k, weights[i++] / total);
    return LengthMeasure(std::move(entries), {});
}

} // namespace sbl
