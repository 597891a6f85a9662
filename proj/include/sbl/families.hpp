#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "sbl/measure.hpp"

namespace sbl {

// Built-in measure families. Each instantiation also reports whether the
// measure puts mass on every declared letter; the stock heavy-tailed families
// intentionally do not, which is fine for everything downstream that only
// looks at the support.
struct FamilySpec {
    std::string family = "letter-uniform"; // letter-uniform | example1 | example2 | example3 | table
    std::vector<std::string> letters = {"a", "b"};
    std::uint32_t truncation_K = 40; // index cutoff for the infinite families
    bool renormalize = false;        // fold the truncated tail back into the atoms
    std::string table_file;          // family == "table": path to a word<TAB>mass file
    std::string table_inline;        // family == "table": "word:mass,word:mass,..."
};

struct FamilyInfo {
    std::string id;
    std::string params;
    std::string notes;
};

std::vector<FamilyInfo> list_families();

// Builds the measure and (optionally) hands back the mutable alphabet so the
// caller can parse further words against it.
SparseMeasure instantiate_family(const FamilySpec& spec,
                                 std::shared_ptr<Alphabet>* alphabet_out = nullptr);

// ---------------------------------------------------------------------------
// Individual constructors
// ---------------------------------------------------------------------------

// Uniform mass 1/n on each declared letter.
SparseMeasure letter_uniform(const std::shared_ptr<Alphabet>& alphabet);

// b -> 1/2, a^(2^k) -> c/k^2 for 1 <= k <= K, with c chosen so the full
// (untruncated) family sums to 1. Finite entropy; the logarithmic length
// moment diverges, which the tail ledger reports as +inf.
SparseMeasure example1(const std::shared_ptr<Alphabet>& alphabet, std::uint32_t K,
                       bool renormalize);

// Example 1's atoms at half weight, plus a second lacunary block
// a^(3^k) -> proportional to 1/(k ln^2(k+1)), normalized to total 1/4 over
// k <= K. The second block's untruncated version has divergent entropy series;
// the truncated instantiation is what is materialized.
SparseMeasure example2(const std::shared_ptr<Alphabet>& alphabet, std::uint32_t K,
                       bool renormalize);

// a^k and b^k -> 2^-(k+1) for 1 <= k <= K. Tail mass is exactly 2^-K.
SparseMeasure example3(const std::shared_ptr<Alphabet>& alphabet, std::uint32_t K,
                       bool renormalize);

// Explicit tables. Masses must be positive; the total may fall short of 1 by
// more than 1e-9 only if `renormalize` is set (otherwise the deficit becomes
// an unexamined tail with infinite entropy/log-length bounds).
SparseMeasure measure_from_rows(const std::shared_ptr<Alphabet>& alphabet,
                                const std::vector<std::pair<std::string, double>>& rows,
                                bool renormalize);

// word<TAB>mass per line, '#' starts a comment, blank lines ignored.
std::vector<std::pair<std::string, double>> parse_table(std::istream& in);

std::vector<std::pair<std::string, double>> parse_inline_table(const std::string& text);

// sum_{k >= start} 1/k^2, to ~1e-15 absolute.
double inverse_square_sum_from(std::uint64_t start);

// sum_{k > K} ln(k)/k^2, to ~1e-12 absolute.
double log_over_square_tail(std::uint64_t K);

} // namespace sbl
