#include "sbl/report.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "sbl/families.hpp"
#include "sbl/random_measures.hpp"
#include "sbl/stats.hpp"

namespace sbl {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Plumbing
// ---------------------------------------------------------------------------

std::string sha256_hex(const std::string& bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, md, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256: digest failure");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xf];
    }
    return out;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) throw std::runtime_error("short write to '" + tmp + "'");
    }
    fs::rename(tmp, path);
}

namespace {

std::string iso_utc_now() {
    auto now = std::chrono::system_clock::now();
    std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string sanitize_field(std::string s) {
    for (char& c : s) {
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    }
    return s;
}

} // namespace

// ---------------------------------------------------------------------------
// CSV / SVG
// ---------------------------------------------------------------------------

std::string series_csv(const EntropySeries& s) {
    std::string out = "kind,k,value,err,extra\n";
    for (const auto& row : s.rows) {
        out += to_string(s.kind);
        out += ',' + std::to_string(row.k);
        out += ',' + format_double(row.value);
        out += ',' + format_double(row.err);
        out += ',' + sanitize_field(row.flagged && row.note.empty() ? "flagged" : row.note);
        out += '\n';
    }
    if (s.truncated) {
        out += "# truncated: " + sanitize_field(s.truncation_note) + '\n';
    }
    return out;
}

std::string cylinder_csv(const std::vector<HittingOracle::Row>& rows, const Alphabet& alphabet) {
    std::string out = "prefix,lambda,err_bound\n";
    for (const auto& row : rows) {
        out += format_word(alphabet, row.prefix);
        out += ',' + format_double(row.lambda);
        out += ',' + format_double(row.err);
        out += '\n';
    }
    return out;
}

std::string slope_plot_csv(const EntropySeries& s) {
    std::string out = "x,y,err\n";
    for (const auto& row : s.rows) {
        double k = static_cast<double>(row.k);
        out += format_double(k);
        out += ',' + format_double(row.value / k);
        out += ',' + format_double(row.err / k);
        out += '\n';
    }
    return out;
}

std::string svg_line_chart(const EntropySeries& s, const std::string& title) {
    const int W = 480, H = 300, L = 50, B = 40, T = 24, R = 12;
    double ymax = 1e-12;
    for (const auto& row : s.rows) {
        ymax = std::max(ymax, row.value / std::max<double>(1.0, row.k));
    }
    double xmax = s.rows.empty() ? 1.0 : static_cast<double>(s.rows.back().k);
    auto px = [&](double k) { return L + (W - L - R) * (k / xmax); };
    auto py = [&](double v) { return (H - B) - (H - B - T) * (v / (ymax * 1.05)); };

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    svg << "<rect width='" << W << "' height='" << H << "' fill='white'/>\n";
    svg << "<text x='" << W / 2 << "' y='16' text-anchor='middle' font-size='12'>" << title
        << "</text>\n";
    svg << "<line x1='" << L << "' y1='" << (H - B) << "' x2='" << (W - R) << "' y2='" << (H - B)
        << "' stroke='black'/>\n";
    svg << "<line x1='" << L << "' y1='" << T << "' x2='" << L << "' y2='" << (H - B)
        << "' stroke='black'/>\n";
    svg << "<text x='" << (W / 2) << "' y='" << (H - 10) << "' text-anchor='middle' font-size='10'>k</text>\n";
    svg << "<text x='12' y='" << T - 6 << "' font-size='10'>" << format_double(ymax) << "</text>\n";
    svg << "<polyline fill='none' stroke='steelblue' stroke-width='1.5' points='";
    for (const auto& row : s.rows) {
        svg << px(static_cast<double>(row.k)) << ',' << py(row.value / row.k) << ' ';
    }
    svg << "'/>\n</svg>\n";
    return svg.str();
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

bool RunManifest::ok() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == "fail"; });
}

std::string RunManifest::to_json() const {
    nlohmann::json j;
    j["version"] = version;
    j["started_at"] = started_at;
    j["wall_seconds"] = wall_seconds;
    j["config"] = nlohmann::json::parse(serialize_config_json(config));
    j["files"] = files;
    j["values"] = values;
    j["verdicts"] = verdicts;
    nlohmann::json checks_j = nlohmann::json::array();
    for (const auto& c : checks) {
        checks_j.push_back({{"name", c.name}, {"status", c.status}, {"detail", c.detail}});
    }
    j["checks"] = checks_j;
    j["ok"] = ok();
    return j.dump(2) + "\n";
}

std::string resolve_out_dir(const ExperimentConfig& cfg) {
    if (!cfg.out.empty()) return cfg.out;
    if (const char* env = std::getenv("SBL_OUT"); env != nullptr && *env != '\0') return env;
    return "./sbl-out";
}

// ---------------------------------------------------------------------------
// run_experiment
// ---------------------------------------------------------------------------

namespace {

void add_check(RunManifest& man, const std::string& name, bool pass, const std::string& detail) {
    man.checks.push_back({name, pass ? "pass" : "fail", detail});
}

void add_skipped(RunManifest& man, const std::string& name, const std::string& why) {
    man.checks.push_back({name, "skipped", why});
}

std::string slope_verdict(const EntropySeries& s) {
    try {
        SlopeReport r = vanishing_slope_report(s);
        return r.consistent_with_zero ? "consistent-with-zero" : "not-consistent-with-zero";
    } catch (const std::invalid_argument&) {
        return "insufficient-data";
    }
}

// lambda(u) compared against one step of the walk; exact for every u != e.
double stationarity_gap(HittingOracle& oracle, const Word& u) {
    double sum = 0.0;
    for (const auto& [g, m] : oracle.measure().entries()) {
        if (g.empty()) {
            sum += m * oracle.prob(u);
        } else if (is_prefix(u, g)) {
            sum += m;
        } else if (g.length() < u.length() && is_prefix(g, u)) {
            sum += m * oracle.prob(suffix(u, g.length()));
        }
    }
    return std::abs(sum - oracle.prob(u));
}

} // namespace

RunManifest run_experiment(const ExperimentConfig& cfg) {
    validate_config(cfg);
    auto t0 = std::chrono::steady_clock::now();
    RunManifest man;
    man.config = cfg;
    man.started_at = iso_utc_now();

    FamilySpec fam;
    fam.family = cfg.family;
    fam.letters = split_letters(cfg.letters);
    fam.truncation_K = cfg.truncation_K;
    fam.renormalize = cfg.renormalize;
    fam.table_file = cfg.table_file;
    fam.table_inline = cfg.table_inline;

    std::shared_ptr<Alphabet> alphabet;
    SparseMeasure mu = instantiate_family(fam, &alphabet);
    TruncationPolicy policy{cfg.epsilon, 2'000'000};
    if (cfg.power > 1) mu = power(mu, cfg.power, policy);

    std::optional<Word> w;
    if (!cfg.w.empty()) w = parse_word(*alphabet, cfg.w);

    // --- scalar summaries ---------------------------------------------------
    Moments mom = moments(mu, w ? &*w : nullptr);
    man.values["H"] = format_double(mom.H.value);
    man.values["H_err"] = format_double(mom.H.err);
    man.values["H_len"] = format_double(mom.H_len.value);
    man.values["L"] = format_double(mom.L.value);
    man.values["L_err"] = format_double(mom.L.err);
    if (mom.L_w) {
        man.values["L_w"] = format_double(mom.L_w->value);
        man.values["L_w_err"] = format_double(mom.L_w->err);
    }
    man.values["support_size"] = std::to_string(mu.size());
    man.values["max_length"] = std::to_string(mu.max_length());
    man.values["represented_mass"] = format_double(mu.represented_mass());
    man.values["tail_mass"] = format_double(mu.tail().mass);
    man.values["tail_entropy_bound"] = format_double(mu.tail().entropy);
    man.values["tail_log_len_bound"] = format_double(mu.tail().log_len);
    man.values["generating"] = generates_declared_alphabet(mu) ? "true" : "false";
    if (w) man.values["mu_w"] = format_double(mu.mass(*w));

    double balance = std::abs(mu.represented_mass() + mu.tail().mass - 1.0);
    add_check(man, "mass-conservation", balance <= 1e-12, "|sum + tail - 1| = " + format_double(balance));

    // --- series -------------------------------------------------------------
    std::map<std::string, std::string> outputs;
    EntropySeries h_conv = convolution_entropy_series(mu, cfg.kmax_conv, policy);
    EntropySeries h_proj = projection_entropy_series(mu, cfg.kmax, policy);
    outputs["h_conv.csv"] = series_csv(h_conv);
    outputs["h_proj.csv"] = series_csv(h_proj);
    outputs["slope_h_proj.csv"] = slope_plot_csv(h_proj);
    man.verdicts["slope_H_proj"] = slope_verdict(h_proj);
    man.verdicts["slope_H_conv"] = slope_verdict(h_conv);

    // Ratio monotonicity of H_conv/k (within ledger slack).
    {
        bool mono = true;
        double worst = 0.0;
        for (std::size_t i = 1; i < h_conv.rows.size(); ++i) {
            const auto& a = h_conv.rows[i - 1];
            const auto& b = h_conv.rows[i];
            double gap = b.value / b.k - a.value / a.k - (a.err / a.k + b.err / b.k) - 1e-9;
            worst = std::max(worst, gap);
            if (gap > 0.0) mono = false;
        }
        add_check(man, "conv-entropy-rate-monotone", mono,
                  mono ? "ratios non-increasing" : "ratio rises by " + format_double(worst));
    }

    if (w) {
        EntropySeries lw = w_log_moment_series(mu, *w, cfg.kmax_conv, policy);
        outputs["lw_conv.csv"] = series_csv(lw);
        man.verdicts["slope_Lw_conv"] = slope_verdict(lw);
    }
    HittingOracle oracle(mu);
    if (cfg.rel_kmax > 0) {
        EntropySeries rel =
            relative_entropy_exact_series(oracle, mu, cfg.rel_kmax, cfg.margin, policy);
        outputs["h_rel_exact.csv"] = series_csv(rel);
        man.verdicts["slope_H_rel_exact"] = slope_verdict(rel);
        // The boundary-conditional entropy never exceeds the projection entropy.
        bool dominated = true;
        std::string detail;
        for (const auto& row : rel.rows) {
            if (row.k == 0 || row.k > h_proj.rows.size()) continue;
            const auto& proj = h_proj.rows[row.k - 1];
            if (row.value > proj.value + proj.err + row.err + 1e-9) {
                dominated = false;
                detail = "H_rel(" + std::to_string(row.k) + ") = " + format_double(row.value) +
                         " > H_proj = " + format_double(proj.value);
                break;
            }
        }
        add_check(man, "conditional-below-projection", dominated, detail);
    }

    // --- boundary tables ----------------------------------------------------
    auto table = oracle.cylinder_table(cfg.depth);
    outputs["cylinders.csv"] = cylinder_csv(table, *alphabet);
    man.values["cylinder_rows"] = std::to_string(table.size());

    {
        double worst = 0.0;
        for (const auto& row : table) {
            if (row.prefix.length() >= cfg.depth) continue;
            double children = 0.0;
            for (SymbolId s = 0; s < alphabet->size(); ++s) {
                children += oracle.prob(concat(row.prefix, Word::single(s)));
            }
            worst = std::max(worst, std::abs(row.lambda - children));
        }
        double tol = 1e-12 + oracle.err_bound(cfg.depth);
        add_check(man, "cylinder-additivity", worst <= tol,
                  "max |lambda(u) - sum lambda(u s)| = " + format_double(worst) +
                      " (tol " + format_double(tol) + ")");
    }
    {
        double worst = 0.0;
        for (const auto& row : table) {
            if (row.prefix.empty()) continue;
            worst = std::max(worst, stationarity_gap(oracle, row.prefix));
        }
        add_check(man, "lambda-stationarity", worst <= 1e-9,
                  "max one-step gap = " + format_double(worst));
    }

    // --- stopping time ------------------------------------------------------
    if (w) {
        double p = mu.mass(*w);
        if (p <= 0.0) {
            add_skipped(man, "stopping-time", "w carries no mass");
        } else if (mu.represented_mass() < 1.0 - 1e-9) {
            add_skipped(man, "stopping-time", "tail too large to sample faithfully");
        } else {
            StoppingTimeStats st = stopping_time_stats(mu, *w, cfg.samples, cfg.seed);
            std::string csv = "w,samples,mean,stderr,exact,max_tau\n";
            csv += sanitize_field(cfg.w) + ',' + std::to_string(st.samples) + ',' +
                   format_double(st.mean) + ',' + format_double(st.stderr_) + ',' +
                   format_double(st.exact) + ',' + std::to_string(st.max_tau) + '\n';
            outputs["stopping.csv"] = csv;
            double gap = std::abs(st.mean - st.exact);
            add_check(man, "stopping-time-3sigma", gap <= 3.0 * st.stderr_ + 1e-12,
                      "|mean - 1/mu(w)| = " + format_double(gap) + ", stderr = " +
                          format_double(st.stderr_));
        }
    }

    // --- occurrence certificate --------------------------------------------
    if (w && cfg.max_w_occurrences >= 0) {
        std::uint64_t worst = 0;
        Word worst_g;
        for (const auto& [g, m] : mu.entries()) {
            (void)m;
            std::uint64_t c = occurrence_count(g, *w);
            if (c > worst) {
                worst = c;
                worst_g = g;
            }
        }
        man.values["max_w_occurrences_observed"] = std::to_string(worst);
        bool pass = worst <= static_cast<std::uint64_t>(cfg.max_w_occurrences);
        add_check(man, "w-occurrence-bound", pass,
                  "max occurrences = " + std::to_string(worst) +
                      (pass ? "" : " at " + format_word(*alphabet, worst_g)));
    }

    // --- emit ---------------------------------------------------------------
    if (cfg.svg) outputs["h_proj.svg"] = svg_line_chart(h_proj, "H_proj(k)/k");
    outputs["config.echo"] = serialize_config(cfg);

    const std::string dir = resolve_out_dir(cfg);
    fs::create_directories(dir);
    for (const auto& [name, content] : outputs) {
        write_file_atomic(dir + "/" + name, content);
        man.files[name] = sha256_hex(content);
    }
    man.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_file_atomic(dir + "/manifest.json", man.to_json());
    return man;
}

// ---------------------------------------------------------------------------
// verify_suite
// ---------------------------------------------------------------------------

namespace {

SparseMeasure make_inline(const std::shared_ptr<Alphabet>& alphabet, const std::string& rows) {
    return measure_from_rows(alphabet, parse_inline_table(rows), false);
}

} // namespace

RunManifest verify_suite(const ExperimentConfig& cfg, const std::string& inject_fault) {
    auto t0 = std::chrono::steady_clock::now();
    RunManifest man;
    man.config = cfg;
    man.started_at = iso_utc_now();
    const std::uint64_t seed = cfg.seed;
    if (!inject_fault.empty() && inject_fault != "lambda-table") {
        throw std::invalid_argument("unknown fault '" + inject_fault + "'");
    }

    auto ab = Alphabet::make({"a", "b"});
    SparseMeasure uniform = letter_uniform(ab);
    SparseMeasure golden = make_inline(ab, "a:0.5,a.b:0.5");

    // 1. word round-trip under the dotted syntax
    {
        RngStream rng(seed, 1);
        bool pass = true;
        std::string detail;
        for (int i = 0; i < 500 && pass; ++i) {
            Word w = random_word(*ab, rng, 40);
            Word back = parse_word(*ab, format_word(*ab, w));
            if (!(back == w)) {
                pass = false;
                detail = "mismatch on " + format_word(*ab, w);
            }
        }
        add_check(man, "word-roundtrip", pass, detail);
    }

    // 2. w-norm subadditivity and sandwich bounds
    {
        RngStream rng(seed, 2);
        bool pass = true;
        std::string detail;
        for (int i = 0; i < 5000 && pass; ++i) {
            Word g1 = random_word(*ab, rng, 30);
            Word g2 = random_word(*ab, rng, 30);
            Word w = random_word(*ab, rng, 5, 1);
            std::uint64_t lhs = w_norm(concat(g1, g2), w);
            std::uint64_t rhs = w_norm(g1, w) + w_norm(g2, w);
            std::uint64_t lo = w.length();
            std::uint64_t hi = w.length() + g1.length();
            std::uint64_t n1 = w_norm(g1, w);
            if (lhs > rhs || n1 < lo || n1 > hi) {
                pass = false;
                detail = "violated at " + format_word(*ab, g1) + " | " + format_word(*ab, g2) +
                         " | w=" + format_word(*ab, w);
            }
        }
        add_check(man, "w-norm-subadditive", pass, detail);
    }

    // 3. convolution entropy subadditivity on random pairs
    {
        RngStream rng(seed, 3);
        bool pass = true;
        std::string detail;
        for (int i = 0; i < 25 && pass; ++i) {
            SparseMeasure m1 = random_sparse_measure(ab, rng, 5, 3);
            SparseMeasure m2 = random_sparse_measure(ab, rng, 5, 3);
            SparseMeasure conv = convolve(m1, m2);
            double lhs = entropy(conv).value;
            double rhs = entropy(m1).value + entropy(m2).value + conv.tail().entropy + 1e-12;
            if (lhs > rhs) {
                pass = false;
                detail = "H(conv) = " + format_double(lhs) + " > " + format_double(rhs);
            }
        }
        add_check(man, "entropy-subadditive", pass, detail);
    }

    // 4. entropy vs log-moment bound for length measures
    {
        RngStream rng(seed, 4);
        const double c_bound = 1.0 + 2.0 * log_over_square_tail(0);
        bool pass = true;
        std::string detail;
        for (int i = 0; i < 100 && pass; ++i) {
            LengthMeasure th = random_length_measure(rng, 12, 1u << 20);
            double h = entropy(th).value;
            double bound = 2.0 * log_moment(th).value + c_bound + 1e-9;
            if (h > bound) {
                pass = false;
                detail = "H = " + format_double(h) + " > " + format_double(bound);
            }
        }
        add_check(man, "entropy-log-moment-bound", pass, detail);
    }

    // 5. projecting lengths commutes with convolution powers
    {
        bool pass = true;
        std::string detail;
        for (std::uint32_t k = 1; k <= 4 && pass; ++k) {
            LengthMeasure a = length_pushforward(power(golden, k));
            LengthMeasure b = power_lengths(length_pushforward(golden), k);
            if (a.entries().size() != b.entries().size()) {
                pass = false;
                detail = "support mismatch at k=" + std::to_string(k);
                break;
            }
            for (std::size_t i = 0; i < a.entries().size(); ++i) {
                if (a.entries()[i].first != b.entries()[i].first ||
                    std::abs(a.entries()[i].second - b.entries()[i].second) > 1e-12) {
                    pass = false;
                    detail = "mass mismatch at k=" + std::to_string(k);
                    break;
                }
            }
        }
        add_check(man, "projection-commutes", pass, detail);
    }

    // 6. stopping time expectation
    {
        Word b_w = Word::single(ab->find("b").value());
        StoppingTimeStats st = stopping_time_stats(uniform, b_w, 20000, seed + 6);
        double gap = std::abs(st.mean - st.exact);
        add_check(man, "stopping-time", gap <= 3.0 * st.stderr_,
                  "mean " + format_double(st.mean) + " vs exact " + format_double(st.exact));
    }

    // 7. first-return walk has the same hitting measure
    {
        Word b_w = Word::single(ab->find("b").value());
        SparseMeasure mu_w = first_return_exact(uniform, b_w, 60);
        HittingOracle lam(uniform);
        HittingOracle lam_w(mu_w);
        double worst = 0.0;
        for_each_cylinder(lam, 3, [&](const Word& u, double v) {
            worst = std::max(worst, std::abs(v - lam_w.prob(u)));
        });
        double tol = 1e-6 + lam_w.err_bound(3);
        add_check(man, "first-return-hitting", worst <= tol,
                  "max cylinder gap = " + format_double(worst));
    }

    // 8. conditioned kernel rows are stochastic
    {
        Word xi = parse_word(*ab, "a.b.a.b.a.b.a.b.a.b.a.b.a.b.a.b");
        HittingOracle oracle(golden);
        double worst = 0.0;
        bool conv = true;
        // under `golden` the conditioned walk only ever sits at even prefixes
        for (std::uint32_t n = 0; n <= 4; n += 2) {
            KernelRow row = conditional_kernel(oracle, prefix(xi, n), xi);
            worst = std::max(worst, row.residual);
            conv = conv && row.all_converged;
        }
        HittingOracle ou(uniform);
        for (std::uint32_t n = 0; n <= 4; ++n) {
            KernelRow row = conditional_kernel(ou, prefix(xi, n), xi);
            worst = std::max(worst, row.residual);
        }
        add_check(man, "kernel-row-sums", worst <= 1e-9 && conv,
                  "max |row sum - 1| = " + format_double(worst));
    }

    // 9. boundary integrals are harmonic
    {
        RngStream rng(seed, 9);
        HittingOracle oracle(golden);
        CylinderFunction fhat = CylinderFunction::random(oracle, 3, rng, -1.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 25; ++i) {
            Word g = random_word(*ab, rng, 6);
            worst = std::max(worst, harmonicity_residual(oracle, fhat, g));
        }
        add_check(man, "poisson-harmonic", worst <= 1e-9,
                  "max residual = " + format_double(worst));
    }

    // 10. hitting recursion fixed point (fault injection target)
    {
        HittingOracle oracle(golden);
        oracle.precompute(4);
        if (inject_fault == "lambda-table") {
            oracle.corrupt(parse_word(*ab, "a.b"), 0.375);
        }
        double worst = 0.0;
        for_each_cylinder(oracle, 4, [&](const Word& u, double) {
            if (!u.empty()) worst = std::max(worst, stationarity_gap(oracle, u));
        });
        add_check(man, "lambda-table", worst <= 1e-9,
                  "max stationarity gap = " + format_double(worst));
    }

    // 11. subadditive weight inequality for first returns
    {
        Word b_w = Word::single(ab->find("b").value());
        AbramovCheck base = abramov_check(uniform, b_w, 40);
        bool pass = base.holds && std::abs(base.lhs - std::log(3.0)) < 1e-9 &&
                    std::abs(base.rhs - std::log(6.0)) < 1e-12;
        RngStream rng(seed, 11);
        for (int i = 0; i < 20 && pass; ++i) {
            SparseMeasure m = random_sparse_measure(ab, rng, 4, 3);
            const auto& entries = m.entries();
            Word w = entries[rng.next_below(entries.size())].first;
            if (w.empty()) continue;
            AbramovCheck c = abramov_check(m, w, 8);
            pass = c.holds;
        }
        add_check(man, "first-return-weight-bound", pass,
                  "lhs " + format_double(base.lhs) + " vs rhs " + format_double(base.rhs));
    }

    // 12. ledgers stay balanced through operations
    {
        RngStream rng(seed, 12);
        bool pass = true;
        for (int i = 0; i < 10 && pass; ++i) {
            SparseMeasure m = random_sparse_measure(ab, rng, 4, 3);
            SparseMeasure sq = power(m, 2);
            SparseMeasure fr = first_return_exact(m, m.entries().front().first, 8);
            for (const SparseMeasure* p : {&m, &sq, &fr}) {
                double bal = std::abs(p->represented_mass() + p->tail().mass - 1.0);
                if (bal > 1e-12) pass = false;
            }
        }
        add_check(man, "mass-conservation", pass, "");
    }

    man.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const std::string dir = resolve_out_dir(cfg);
    fs::create_directories(dir);
    write_file_atomic(dir + "/verify.manifest.json", man.to_json());
    return man;
}

} // namespace sbl
