#include "sbl/families.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "sbl/stats.hpp"

namespace sbl {

// ---------------------------------------------------------------------------
// Numeric helpers for the analytic tails
// ---------------------------------------------------------------------------

double inverse_square_sum_from(std::uint64_t start) {
    if (start == 0) throw std::invalid_argument("inverse_square_sum_from: start must be >= 1");
    const std::uint64_t N = start + 200000;
    double partial = 0.0;
    for (std::uint64_t k = N; k >= start; --k) { // ascending magnitude
        partial += 1.0 / (static_cast<double>(k) * static_cast<double>(k));
    }
    // Euler-Maclaurin remainder for f(x) = x^-2 past N; next term is O(N^-5).
    const double n = static_cast<double>(N);
    return partial + 1.0 / n - 1.0 / (2.0 * n * n) + 1.0 / (6.0 * n * n * n);
}

double log_over_square_tail(std::uint64_t K) {
    const std::uint64_t N = K + 200000;
    double partial = 0.0;
    for (std::uint64_t k = N; k > K; --k) {
        double kk = static_cast<double>(k);
        partial += std::log(kk) / (kk * kk);
    }
    // Remainder past N: integral (ln N + 1)/N plus the leading corrections.
    const double n = static_cast<double>(N);
    const double f_n = std::log(n) / (n * n);
    const double fp_n = (1.0 - 2.0 * std::log(n)) / (n * n * n);
    return partial + (std::log(n) + 1.0) / n - 0.5 * f_n - fp_n / 12.0;
}

namespace {

// Tail ledger for the block a^(2^k) -> c/k^2, k > K.
TailLedger dyadic_block_tail(double c, std::uint32_t K) {
    TailLedger t;
    double s2 = inverse_square_sum_from(K + 1);
    t.mass = c * s2;
    // -p ln p with p = c/k^2 summed for k > K.
    t.entropy = c * (2.0 * log_over_square_tail(K) + std::log(1.0 / c) * s2);
    // ln|a^(2^k)| = k ln 2, and sum c k / k^2 diverges.
    t.log_len = kInf;
    return t;
}

SymbolId require_letter(const std::shared_ptr<Alphabet>& alphabet, std::size_t i,
                        const char* family) {
    if (alphabet->size() <= i) {
        throw std::invalid_argument(std::string(family) + ": needs at least " +
                                    std::to_string(i + 1) + " letters");
    }
    return static_cast<SymbolId>(i);
}

} // namespace

// ---------------------------------------------------------------------------
// Families
// ---------------------------------------------------------------------------

SparseMeasure letter_uniform(const std::shared_ptr<Alphabet>& alphabet) {
    if (alphabet->size() == 0) throw std::invalid_argument("letter-uniform: empty alphabet");
    MeasureBuilder b(alphabet);
    const double m = 1.0 / static_cast<double>(alphabet->size());
    for (SymbolId s = 0; s < alphabet->size(); ++s) b.add(Word::single(s), m);
    return b.freeze();
}

SparseMeasure example1(const std::shared_ptr<Alphabet>& alphabet, std::uint32_t K,
                       bool renormalize) {
    if (K == 0 || K > 62) throw std::invalid_argument("example1: K out of range (1..62)");
    SymbolId a = require_letter(alphabet, 0, "example1");
    SymbolId bb = require_letter(alphabet, 1, "example1");
    const double c = 0.5 / inverse_square_sum_from(1);

    MeasureBuilder b(alphabet);
    b.add(Word::single(bb), 0.5);
    for (std::uint32_t k = 1; k <= K; ++k) {
        b.add(Word::repeated(a, 1ull << k), c / (static_cast<double>(k) * static_cast<double>(k)));
    }
    TailLedger t = dyadic_block_tail(c, K);
    if (renormalize) {
        MeasureBuilder rb(alphabet);
        rb.add(Word::single(bb), 0.5 / (1.0 - t.mass));
        for (std::uint32_t k = 1; k <= K; ++k) {
            rb.add(Word::repeated(a, 1ull << k),
                   c / (static_cast<double>(k) * static_cast<double>(k)) / (1.0 - t.mass));
        }
        return rb.freeze();
    }
    b.set_tail(t);
    return b.freeze();
}

SparseMeasure example2(const std::shared_ptr<Alphabet>& alphabet, std::uint32_t K,
                       bool renormalize) {
    if (K == 0 || K > 40) throw std::invalid_argument("example2: K out of range (1..40, 3^K must fit)");
    SymbolId a = require_letter(alphabet, 0, "example2");
    SymbolId bb = require_letter(alphabet, 1, "example2");
    const double c = 0.25 / inverse_square_sum_from(1);

    // Slowly-decaying block, normalized over the truncated index range so the
    // materialized measure is exact there.
    double s_w = 0.0;
    for (std::uint32_t k = K; k >= 1; --k) {
        double lk = std::log(static_cast<double>(k) + 1.0);
        s_w += 1.0 / (static_cast<double>(k) * lk * lk);
    }

    TailLedger t = dyadic_block_tail(c, K);
    const double scale = renormalize ? 1.0 / (1.0 - t.mass) : 1.0;

    MeasureBuilder b(alphabet);
    b.add(Word::single(bb), 0.5 * scale);
    for (std::uint32_t k = 1; k <= K; ++k) {
        b.add(Word::repeated(a, 1ull << k),
              scale * c / (static_cast<double>(k) * static_cast<double>(k)));
    }
    std::uint64_t p3 = 1;
    for (std::uint32_t k = 1; k <= K; ++k) {
        p3 *= 3;
        double lk = std::log(static_cast<double>(k) + 1.0);
        double w_k = 1.0 / (static_cast<double>(k) * lk * lk);
        b.add(Word::repeated(a, p3), scale * 0.25 * w_k / s_w);
    }
    if (!renormalize) b.set_tail(t);
    return b.freeze();
}

SparseMeasure example3(const std::shared_ptr<Alphabet>& alphabet, std::uint32_t K,
                       bool renormalize) {
    if (K == 0 || K > 1000) throw std::invalid_argument("example3: K out of range");
    SymbolId a = require_letter(alphabet, 0, "example3");
    SymbolId bb = require_letter(alphabet, 1, "example3");

    TailLedger t;
    t.mass = std::pow(2.0, -static_cast<double>(K));
    t.entropy = std::log(2.0) * static_cast<double>(K + 3) * t.mass;
    double ll = 0.0;
    for (std::uint32_t k = K + 1; k <= K + 1200; ++k) {
        double term = std::pow(2.0, -static_cast<double>(k)) * std::log(static_cast<double>(k));
        ll += term;
        if (term < 1e-300) break;
    }
    t.log_len = ll;

    const double scale = renormalize ? 1.0 / (1.0 - t.mass) : 1.0;
    MeasureBuilder b(alphabet);
    for (std::uint32_t k = 1; k <= K; ++k) {
        double m = scale * std::pow(2.0, -static_cast<double>(k) - 1.0);
        b.add(Word::repeated(a, k), m);
        b.add(Word::repeated(bb, k), m);
    }
    if (!renormalize) b.set_tail(t);
    return b.freeze();
}

// ---------------------------------------------------------------------------
// Tables
// ---------------------------------------------------------------------------

namespace {

double parse_mass(std::string_view text, const std::string& context) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw std::invalid_argument("table: bad mass '" + std::string(text) + "' in " + context);
    }
    return v;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

} // namespace

std::vector<std::pair<std::string, double>> parse_table(std::istream& in) {
    std::vector<std::pair<std::string, double>> rows;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view s(line);
        if (auto hash = s.find('#'); hash != std::string_view::npos) s = s.substr(0, hash);
        s = trim(s);
        if (s.empty()) continue;
        std::size_t sep = s.find_first_of(" \t");
        if (sep == std::string_view::npos) {
            throw std::invalid_argument("table: line " + std::to_string(lineno) +
                                        " has no mass column");
        }
        std::string_view word = trim(s.substr(0, sep));
        std::string_view mass = trim(s.substr(sep + 1));
        rows.emplace_back(std::string(word), parse_mass(mass, "line " + std::to_string(lineno)));
    }
    return rows;
}

std::vector<std::pair<std::string, double>> parse_inline_table(const std::string& text) {
    std::vector<std::pair<std::string, double>> rows;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t comma = text.find(',', pos);
        std::string_view item(text.data() + pos,
                              (comma == std::string::npos ? text.size() : comma) - pos);
        item = trim(item);
        if (!item.empty()) {
            std::size_t colon = item.find(':');
            if (colon == std::string_view::npos) {
                throw std::invalid_argument("table: inline entry '" + std::string(item) +
                                            "' has no ':'");
            }
            rows.emplace_back(std::string(trim(item.substr(0, colon))),
                              parse_mass(trim(item.substr(colon + 1)), "inline table"));
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return rows;
}

SparseMeasure measure_from_rows(const std::shared_ptr<Alphabet>& alphabet,
                                const std::vector<std::pair<std::string, double>>& rows,
                                bool renormalize) {
    if (rows.empty()) throw std::invalid_argument("table: no rows");
    std::vector<std::pair<Word, double>> parsed;
    parsed.reserve(rows.size());
    CompensatedSum total;
    for (const auto& [text, m] : rows) {
        if (m <= 0.0) throw std::invalid_argument("table: mass for '" + text + "' must be positive");
        parsed.emplace_back(parse_word(*alphabet, text), m);
        total.add(m);
    }
    double sum = total.value();
    if (sum > 1.0 + 1e-9) throw std::invalid_argument("table: masses sum to more than 1");

    MeasureBuilder b(alphabet);
    if (renormalize) {
        for (const auto& [w, m] : parsed) b.add(w, m / sum);
        return b.freeze();
    }
    for (const auto& [w, m] : parsed) b.add(w, m);
    double deficit = 1.0 - sum;
    if (deficit > 1e-12) {
        // Caller declared a sub-unit table without asking for renormalization:
        // treat the deficit as an unexamined tail.
        b.set_tail({deficit, kInf, kInf});
    } else if (deficit > 0.0) {
        b.set_tail({deficit, 0.0, 0.0});
    }
    return b.freeze();
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

SparseMeasure instantiate_family(const FamilySpec& spec, std::shared_ptr<Alphabet>* alphabet_out) {
    auto alphabet = std::make_shared<Alphabet>(spec.letters);
    if (alphabet_out) *alphabet_out = alphabet;
    if (spec.family == "letter-uniform") return letter_uniform(alphabet);
    if (spec.family == "example1") return example1(alphabet, spec.truncation_K, spec.renormalize);
    if (spec.family == "example2") return example2(alphabet, spec.truncation_K, spec.renormalize);
    if (spec.family == "example3") return example3(alphabet, spec.truncation_K, spec.renormalize);
    if (spec.family == "table") {
        std::vector<std::pair<std::string, double>> rows;
        if (!spec.table_file.empty()) {
            std::ifstream in(spec.table_file);
            if (!in) throw std::invalid_argument("table: cannot open '" + spec.table_file + "'");
            rows = parse_table(in);
        } else if (!spec.table_inline.empty()) {
            rows = parse_inline_table(spec.table_inline);
        } else {
            throw std::invalid_argument("table: needs table_file or table_inline");
        }
        return measure_from_rows(alphabet, rows, spec.renormalize);
    }
    throw std::invalid_argument("unknown family '" + spec.family + "'");
}

std::vector<FamilyInfo> list_families() {
    return {
        {"letter-uniform", "letters",
         "uniform mass on the declared letters; the boundary is the full shift and every "
         "conditional quantity degenerates to exact closed forms"},
        {"example1", "letters, truncation_K, renormalize",
         "b -> 1/2 plus a^(2^k) -> c/k^2; finite entropy with divergent logarithmic length "
         "moment, so length-projection entropy per step decays to zero"},
        {"example2", "letters, truncation_K, renormalize",
         "example1 at half weight plus a lacunary block a^(3^k) with slowly decaying weights "
         "1/(k ln^2(k+1)); the untruncated weight sequence has divergent entropy series"},
        {"example3", "letters, truncation_K, renormalize",
         "a^k and b^k -> 2^-(k+1); convolution squares concentrate pattern counts: the square "
         "has at most one a.b occurrence in every word of its support"},
        {"table", "table_file | table_inline, renormalize",
         "explicit word<TAB>mass table (or inline word:mass list); sub-unit totals become a "
         "declared tail unless renormalize is set"},
    };
}

} // namespace sbl
