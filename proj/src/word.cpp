#include "sbl/word.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace sbl {

// ---------------------------------------------------------------------------
// Alphabet
// ---------------------------------------------------------------------------

Alphabet::Alphabet(const std::vector<std::string>& symbols) {
    for (const auto& s : symbols) intern(s);
}

std::shared_ptr<Alphabet> Alphabet::make(std::initializer_list<const char*> symbols) {
    auto a = std::make_shared<Alphabet>();
    for (const char* s : symbols) a->intern(s);
    return a;
}

SymbolId Alphabet::intern(std::string_view name) {
    if (name.empty()) throw std::invalid_argument("alphabet: empty symbol name");
    for (char c : name) {
        if (c == '.' || c == '^' || c == '#' || c == ' ' || c == '\t' || c == '\n' || c == '\r' ||
            c == ',' || c == ':' || c == '=') {
            throw std::invalid_argument("alphabet: symbol name '" + std::string(name) +
                                        "' contains a reserved character");
        }
    }
    auto it = index_.find(name);
    if (it != index_.end()) return it->second;
    SymbolId id = static_cast<SymbolId>(names_.size());
    names_.emplace_back(name);
    index_.emplace(names_.back(), id);
    return id;
}

std::optional<SymbolId> Alphabet::find(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& Alphabet::name(SymbolId id) const {
    if (id >= names_.size()) throw std::out_of_range("alphabet: unknown symbol id");
    return names_[id];
}

// ---------------------------------------------------------------------------
// Word construction
// ---------------------------------------------------------------------------

namespace {

// Merge adjacent equal-symbol runs and drop empties.
std::vector<Run> normalize_runs(std::vector<Run> runs) {
    std::vector<Run> out;
    out.reserve(runs.size());
    for (const Run& r : runs) {
        if (r.count == 0) continue;
        if (!out.empty() && out.back().symbol == r.symbol) {
            out.back().count += r.count;
        } else {
            out.push_back(r);
        }
    }
    return out;
}

} // namespace

Word Word::from_letters(std::vector<SymbolId> letters) {
    Word w;
    w.length_ = letters.size();
    if (w.length_ <= kMaterializeLimit) {
        w.letters_ = std::move(letters);
        return w;
    }
    std::vector<Run> runs;
    std::size_t i = 0;
    while (i < letters.size()) {
        std::size_t j = i + 1;
        while (j < letters.size() && letters[j] == letters[i]) ++j;
        runs.push_back({letters[i], j - i});
        i = j;
    }
    w.runs_ = std::move(runs);
    return w;
}

Word Word::from_runs(std::vector<Run> runs) {
    runs = normalize_runs(std::move(runs));
    std::uint64_t total = 0;
    for (const Run& r : runs) {
        if (r.count > UINT64_MAX - total) throw std::overflow_error("word: length overflow");
        total += r.count;
    }
    Word w;
    w.length_ = total;
    if (total <= kMaterializeLimit) {
        w.letters_.reserve(static_cast<std::size_t>(total));
        for (const Run& r : runs) {
            w.letters_.insert(w.letters_.end(), static_cast<std::size_t>(r.count), r.symbol);
        }
    } else {
        w.runs_ = std::move(runs);
    }
    return w;
}

Word Word::repeated(SymbolId s, std::uint64_t count) {
    return from_runs({{s, count}});
}

std::span<const SymbolId> Word::letters() const {
    if (run_encoded()) throw std::logic_error("word: letters() on run-encoded word");
    return letters_;
}

std::vector<Run> Word::runs() const {
    if (run_encoded()) return runs_;
    std::vector<Run> out;
    std::size_t i = 0;
    while (i < letters_.size()) {
        std::size_t j = i + 1;
        while (j < letters_.size() && letters_[j] == letters_[i]) ++j;
        out.push_back({letters_[i], j - i});
        i = j;
    }
    return out;
}

SymbolId Word::letter_at(std::uint64_t i) const {
    if (i >= length_) throw std::out_of_range("word: letter index out of range");
    if (!run_encoded()) return letters_[static_cast<std::size_t>(i)];
    for (const Run& r : runs_) {
        if (i < r.count) return r.symbol;
        i -= r.count;
    }
    throw std::logic_error("word: inconsistent run lengths");
}

std::size_t Word::hash() const {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint64_t v) {
        h ^= v;
        h *= 1099511628211ull;
    };
    if (!run_encoded()) {
        std::size_t i = 0;
        while (i < letters_.size()) {
            std::size_t j = i + 1;
            while (j < letters_.size() && letters_[j] == letters_[i]) ++j;
            mix(letters_[i] + 0x9e3779b97f4a7c15ull);
            mix(j - i);
            i = j;
        }
    } else {
        for (const Run& r : runs_) {
            mix(r.symbol + 0x9e3779b97f4a7c15ull);
            mix(r.count);
        }
    }
    return static_cast<std::size_t>(h);
}

// ---------------------------------------------------------------------------
// RunCursor
// ---------------------------------------------------------------------------

Run RunCursor::current() const {
    if (done()) throw std::logic_error("run cursor: exhausted");
    if (w_->run_encoded()) {
        const Run& r = w_->runs_[run_idx_];
        return {r.symbol, r.count - run_off_};
    }
    const auto& ls = w_->letters_;
    std::size_t j = flat_pos_ + 1;
    while (j < ls.size() && ls[j] == ls[flat_pos_]) ++j;
    return {ls[flat_pos_], j - flat_pos_};
}

void RunCursor::advance(std::uint64_t n) {
    if (n == 0) return;
    consumed_ += n;
    if (w_->run_encoded()) {
        run_off_ += n;
        while (run_idx_ < w_->runs_.size() && run_off_ >= w_->runs_[run_idx_].count) {
            run_off_ -= w_->runs_[run_idx_].count;
            ++run_idx_;
        }
    } else {
        flat_pos_ += static_cast<std::size_t>(n);
    }
    if (consumed_ > w_->length_) throw std::logic_error("run cursor: advanced past end");
}

// ---------------------------------------------------------------------------
// Comparison
// ---------------------------------------------------------------------------

int Word::compare(const Word& a, const Word& b) {
    if (a.length_ != b.length_) return a.length_ < b.length_ ? -1 : 1;
    RunCursor ca(a), cb(b);
    while (!ca.done()) {
        Run ra = ca.current();
        Run rb = cb.current();
        if (ra.symbol != rb.symbol) return ra.symbol < rb.symbol ? -1 : 1;
        std::uint64_t step = std::min(ra.count, rb.count);
        ca.advance(step);
        cb.advance(step);
    }
    return 0;
}

bool operator==(const Word& a, const Word& b) {
    if (a.length_ != b.length_) return false;
    // Canonical representation: equal lengths mean equal kinds.
    if (!a.run_encoded()) return a.letters_ == b.letters_;
    return a.runs_ == b.runs_;
}

// ---------------------------------------------------------------------------
// Semigroup operations
// ---------------------------------------------------------------------------

Word concat(const Word& x, const Word& y) {
    if (x.empty()) return y;
    if (y.empty()) return x;
    std::uint64_t total = x.length() + y.length();
    if (!x.run_encoded() && !y.run_encoded() && total <= Word::kMaterializeLimit) {
        std::vector<SymbolId> ls;
        ls.reserve(static_cast<std::size_t>(total));
        auto xs = x.letters();
        auto ys = y.letters();
        ls.insert(ls.end(), xs.begin(), xs.end());
        ls.insert(ls.end(), ys.begin(), ys.end());
        return Word::from_letters(std::move(ls));
    }
    std::vector<Run> runs = x.runs();
    std::vector<Run> tail = y.runs();
    runs.insert(runs.end(), tail.begin(), tail.end());
    return Word::from_runs(std::move(runs));
}

bool is_prefix(const Word& p, const Word& w) {
    if (p.length() > w.length()) return false;
    if (p.empty()) return true;
    RunCursor cp(p), cw(w);
    while (!cp.done()) {
        Run rp = cp.current();
        Run rw = cw.current();
        if (rp.symbol != rw.symbol) return false;
        std::uint64_t step = std::min(rp.count, rw.count);
        if (step < rp.count && rw.count < rp.count) return false; // w's run too short
        cp.advance(step);
        cw.advance(step);
    }
    return true;
}

Word prefix(const Word& w, std::uint64_t n) {
    if (n >= w.length()) return w;
    if (n == 0) return Word();
    std::vector<Run> out;
    RunCursor c(w);
    std::uint64_t remaining = n;
    while (remaining > 0) {
        Run r = c.current();
        std::uint64_t take = std::min(r.count, remaining);
        out.push_back({r.symbol, take});
        c.advance(take);
        remaining -= take;
    }
    return Word::from_runs(std::move(out));
}

Word suffix(const Word& w, std::uint64_t n) {
    if (n == 0) return w;
    if (n > w.length()) throw std::invalid_argument("suffix: drop count exceeds length");
    if (n == w.length()) return Word();
    std::vector<Run> out;
    RunCursor c(w);
    std::uint64_t remaining = n;
    while (remaining > 0) {
        Run r = c.current();
        std::uint64_t step = std::min(r.count, remaining);
        c.advance(step);
        remaining -= step;
    }
    while (!c.done()) {
        Run r = c.current();
        out.push_back(r);
        c.advance(r.count);
    }
    return Word::from_runs(std::move(out));
}

std::optional<Word> prefix_quotient(const Word& x, const Word& y) {
    if (!is_prefix(x, y)) return std::nullopt;
    return suffix(y, x.length());
}

// ---------------------------------------------------------------------------
// Occurrence counting
// ---------------------------------------------------------------------------

namespace {

std::uint64_t count_kmp(std::span<const SymbolId> text, std::span<const SymbolId> pat) {
    std::vector<std::size_t> fail(pat.size(), 0);
    for (std::size_t i = 1; i < pat.size(); ++i) {
        std::size_t k = fail[i - 1];
        while (k > 0 && pat[i] != pat[k]) k = fail[k - 1];
        if (pat[i] == pat[k]) ++k;
        fail[i] = k;
    }
    std::uint64_t count = 0;
    std::size_t q = 0;
    for (SymbolId c : text) {
        while (q > 0 && pat[q] != c) q = fail[q - 1];
        if (pat[q] == c) ++q;
        if (q == pat.size()) {
            ++count;
            q = fail[q - 1]; // continue, occurrences may overlap
        }
    }
    return count;
}

// Occurrence counting on maximal-run encodings. An occurrence of a multi-run
// pattern P[0..r-1] inside text runs G is pinned to a run boundary: G[i] must
// end with P[0], G[i+1..i+r-2] must equal the interior runs exactly, and
// G[i+r-1] must start with P[r-1]. Each admissible i contributes exactly one
// start position. Single-run patterns s^m instead slide inside every s-run of
// length c >= m, contributing c - m + 1 starts.
std::uint64_t count_runs(const std::vector<Run>& text, const std::vector<Run>& pat) {
    std::uint64_t count = 0;
    if (pat.size() == 1) {
        for (const Run& r : text) {
            if (r.symbol == pat[0].symbol && r.count >= pat[0].count) {
                count += r.count - pat[0].count + 1;
            }
        }
        return count;
    }
    if (text.size() < pat.size()) return 0;
    const std::size_t r = pat.size();
    for (std::size_t i = 0; i + r <= text.size(); ++i) {
        if (text[i].symbol != pat[0].symbol || text[i].count < pat[0].count) continue;
        bool ok = true;
        for (std::size_t t = 1; t + 1 < r; ++t) {
            if (!(text[i + t] == pat[t])) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        const Run& last = text[i + r - 1];
        if (last.symbol == pat[r - 1].symbol && last.count >= pat[r - 1].count) ++count;
    }
    return count;
}

} // namespace

std::uint64_t occurrence_count(const Word& g, const Word& w) {
    if (w.empty()) throw std::invalid_argument("occurrence_count: empty pattern");
    if (w.length() > g.length()) return 0;
    if (!g.run_encoded() && !w.run_encoded()) {
        return count_kmp(g.letters(), w.letters());
    }
    return count_runs(g.runs(), w.runs());
}

std::uint64_t w_norm(const Word& g, const Word& w) {
    return occurrence_count(g, w) + w.length();
}

// ---------------------------------------------------------------------------
// Text form
// ---------------------------------------------------------------------------

Word parse_word(Alphabet& alphabet, std::string_view text) {
    // Trim surrounding whitespace; an all-blank string is the identity.
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (text.empty()) return Word();

    std::vector<Run> runs;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t dot = text.find('.', pos);
        std::string_view part = text.substr(pos, dot == std::string_view::npos ? dot : dot - pos);
        if (part.empty()) throw std::invalid_argument("word: empty component in '" + std::string(text) + "'");

        std::uint64_t count = 1;
        std::size_t caret = part.find('^');
        if (caret != std::string_view::npos) {
            std::string_view num = part.substr(caret + 1);
            part = part.substr(0, caret);
            std::uint64_t parsed = 0;
            auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), parsed);
            if (ec != std::errc() || ptr != num.data() + num.size() || parsed == 0) {
                throw std::invalid_argument("word: bad repeat count in '" + std::string(text) + "'");
            }
            count = parsed;
        }
        runs.push_back({alphabet.intern(part), count});

        if (dot == std::string_view::npos) break;
        pos = dot + 1;
        if (pos == text.size()) throw std::invalid_argument("word: trailing '.' in '" + std::string(text) + "'");
    }
    return Word::from_runs(std::move(runs));
}

std::string format_word(const Alphabet& alphabet, const Word& w) {
    std::string out;
    bool first = true;
    auto emit = [&](const Run& r) {
        const std::string& n = alphabet.name(r.symbol);
        if (r.count <= 4) {
            for (std::uint64_t i = 0; i < r.count; ++i) {
                if (!first) out += '.';
                out += n;
                first = false;
            }
        } else {
            if (!first) out += '.';
            out += n;
            out += '^';
            out += std::to_string(r.count);
            first = false;
        }
    };
    RunCursor c(w);
    while (!c.done()) {
        Run r = c.current();
        emit(r);
        c.advance(r.count);
    }
    return out;
}

} // namespace sbl
