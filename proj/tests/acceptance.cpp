// End-to-end acceptance harness. Each criterion prints exactly one PASS/FAIL
// line; the process exits nonzero if any criterion fails. Everything is
// seeded, so a green run is green forever.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "sbl/boundary.hpp"
#include "sbl/entropy.hpp"
#include "sbl/families.hpp"
#include "sbl/random_measures.hpp"
#include "sbl/report.hpp"
#include "sbl/walk.hpp"

using namespace sbl;

namespace {

int g_failures = 0;

void criterion(int number, const std::string& name, double budget_seconds,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget_seconds > 0.0 && secs > budget_seconds) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("over time budget");
    }
    if (!ok) ++g_failures;
    std::printf("%s  %2d  %-34s %6.2fs  %s\n", ok ? "PASS" : "FAIL", number, name.c_str(), secs,
                detail.c_str());
    std::fflush(stdout);
}

SparseMeasure inline_measure(const std::shared_ptr<Alphabet>& ab, const std::string& rows) {
    return measure_from_rows(ab, parse_inline_table(rows), false);
}

std::string fmt(double x) { return format_double(x); }

} // namespace

int main() {
    std::printf("acceptance: random walks on free semigroups\n");

    // 1. hitting-measure recursion against sampled boundary prefixes
    criterion(1, "hitting-recursion-vs-monte-carlo", 5.0, [](std::string& detail) {
        auto ab = Alphabet::make({"a", "b"});
        SparseMeasure golden = inline_measure(ab, "a:0.5,a.b:0.5");
        HittingOracle oracle(golden);

        if (std::abs(oracle.prob(parse_word(*ab, "a.b")) - 0.5) > 1e-12 ||
            std::abs(oracle.prob(parse_word(*ab, "a.a")) - 0.5) > 1e-12) {
            detail = "exact cylinder weights are off";
            return false;
        }

        const std::size_t n = 100000;
        std::map<Word, std::size_t> counts;
        for (std::size_t i = 0; i < n; ++i) {
            PathSample p = sample_path(golden, 4, 20240817, i);
            Word pos4 = prefix(path_position(p, 4), 4);
            for (std::uint64_t d = 1; d <= 4; ++d) counts[prefix(pos4, d)] += 1;
        }
        double worst_z = 0.0;
        std::size_t cylinders = 0;
        bool ok = true;
        for_each_cylinder(oracle, 4, [&](const Word& u, double lam) {
            if (u.empty()) return;
            ++cylinders;
            double freq = double(counts[u]) / double(n);
            double se = std::sqrt(lam * (1.0 - lam) / double(n));
            double gap = std::abs(freq - lam);
            if (se == 0.0) {
                if (gap != 0.0) ok = false;
            } else {
                worst_z = std::max(worst_z, gap / se);
                if (gap > 3.0 * se) ok = false;
            }
        });
        detail = std::to_string(cylinders) + " cylinders, worst z = " + fmt(worst_z);
        return ok;
    });

    // 2. empirical stopping times match 1/mu(w)
    criterion(2, "stopping-time-expectation", 5.0, [](std::string& detail) {
        auto ab = Alphabet::make({"a", "b"});
        bool ok = true;
        std::string parts;
        int idx = 0;
        for (double p : {0.5, 0.25, 0.1}) {
            SparseMeasure m = inline_measure(
                ab, "a:" + fmt(1.0 - p) + ",b:" + fmt(p));
            StoppingTimeStats st =
                stopping_time_stats(m, parse_word(*ab, "b"), 100000, 8899 + idx++);
            double z = std::abs(st.mean - st.exact) / st.stderr_;
            ok = ok && z <= 3.0;
            if (!parts.empty()) parts += ", ";
            parts += "1/" + fmt(1.0 / p) + ": z=" + fmt(z);
        }
        detail = parts;
        return ok;
    });

    // 3. first-return walks share the hitting measure
    criterion(3, "induced-walk-hitting-measure", 10.0, [](std::string& detail) {
        auto ab = Alphabet::make({"a", "b"});
        struct Case {
            std::string rows;
            std::string w;
        };
        std::vector<Case> cases = {
            {"a:0.5,b:0.5", "b"},
            {"a:0.35,a.a:0.15,b:0.5", "b"},
            {"a:0.25,a.a.a:0.25,b:0.5", "b"},
        };
        double worst = 0.0;
        bool ok = true;
        for (const auto& c : cases) {
            SparseMeasure m = inline_measure(ab, c.rows);
            SparseMeasure m_w = first_return_exact(m, parse_word(*ab, c.w), 60);
            HittingOracle lam(m);
            HittingOracle lam_w(m_w);
            double tol = 1e-6 + lam_w.err_bound(3);
            for_each_cylinder(lam, 3, [&](const Word& u, double v) {
                double gap = std::abs(v - lam_w.prob(u));
                worst = std::max(worst, gap);
                if (gap > tol) ok = false;
            });
        }
        detail = "3 measures, worst cylinder gap = " + fmt(worst);
        return ok;
    });

    // 4. entropy of a length law is at most twice its log moment plus a constant
    criterion(4, "entropy-log-moment-bound", 0.0, [](std::string& detail) {
        RngStream rng(20230404, 0);
        double worst = -1e300;
        for (int i = 0; i < 200; ++i) {
            LengthMeasure th = random_length_measure(rng, 14, 1u << 20);
            double slack =
                2.0 * log_moment(th).value + 2.8750965 + 1e-9 - entropy(th).value;
            worst = std::max(worst, -slack);
            if (slack < 0.0) {
                detail = "violated by " + fmt(-slack);
                return false;
            }
        }
        detail = "200 laws, max H - (2L + c) = " + fmt(worst);
        return true;
    });

    // 5. subadditivity: w-norms pointwise, entropy under convolution
    criterion(5, "subadditivity-sweeps", 0.0, [](std::string& detail) {
        auto ab = Alphabet::make({"a", "b"});
        RngStream rng(5150, 0);
        for (int i = 0; i < 10000; ++i) {
            Word g1 = random_word(*ab, rng, 28);
            Word g2 = random_word(*ab, rng, 28);
            Word w = random_word(*ab, rng, 5, 1);
            if (w_norm(concat(g1, g2), w) > w_norm(g1, w) + w_norm(g2, w)) {
                detail = "w-norm subadditivity violated";
                return false;
            }
        }
        RngStream rng2(5151, 0);
        for (int i = 0; i < 50; ++i) {
            SparseMeasure x = random_sparse_measure(ab, rng2, 6, 3);
            SparseMeasure y = random_sparse_measure(ab, rng2, 6, 3);
            SparseMeasure c = convolve(x, y);
            double lhs = entropy(c).value;
            double rhs = entropy(x).value + entropy(y).value + c.tail().entropy + 1e-12;
            if (lhs > rhs) {
                detail = "entropy subadditivity violated by " + fmt(lhs - rhs);
                return false;
            }
        }
        detail = "10000 triples + 50 measure pairs";
        return true;
    });

    // 6. boundary-conditional entropy sits below the projected entropy
    criterion(6, "relative-entropy-chain", 0.0, [](std::string& detail) {
        auto ab = Alphabet::make({"a", "b"});
        auto a_only = Alphabet::make({"a"});
        std::vector<SparseMeasure> measures = {
            letter_uniform(ab),
            inline_measure(a_only, "a:0.5,a.a:0.5"),
            inline_measure(ab, "a:0.5,a.b:0.5"),
        };
        for (const auto& m : measures) {
            HittingOracle oracle(m);
            EntropySeries rel = relative_entropy_exact_series(oracle, m, 8, 2);
            EntropySeries proj = projection_entropy_series(m, 8);
            if (rel.rows.size() != 8) {
                detail = "exact series stopped early";
                return false;
            }
            for (std::size_t i = 0; i < 8; ++i) {
                if (rel.rows[i].value > proj.rows[i].value + rel.rows[i].err + 1e-9) {
                    detail = "H_rel exceeds H_proj at k=" + std::to_string(i + 1);
                    return false;
                }
            }
        }

        EntropySeries two_len = projection_entropy_series(measures[1], 2);
        if (std::abs(two_len.rows[1].value - 1.5 * std::log(2.0)) > 1e-12) {
            detail = "H_proj(2) misses (3/2) ln 2";
            return false;
        }

        HittingOracle uo(measures[0]);
        EntropySeries uni_rel = relative_entropy_exact_series(uo, measures[0], 8, 2);
        for (const auto& row : uni_rel.rows) {
            if (row.value != 0.0) {
                detail = "uniform H_k not exactly zero";
                return false;
            }
        }
        detail = "3 measures, k <= 8; binomial H_proj(2) and uniform H_k exact";
        return true;
    });

    // 7. first-return weight inequality, frozen case plus random sweep
    criterion(7, "first-return-weight-inequality", 0.0, [](std::string& detail) {
        auto ab = Alphabet::make({"a", "b"});
        AbramovCheck base = abramov_check(letter_uniform(ab), parse_word(*ab, "b"), 50);
        if (std::abs(base.lhs - std::log(3.0)) > 1e-9 ||
            std::abs(base.rhs - std::log(6.0)) > 1e-12 || !(base.lhs < base.rhs)) {
            detail = "frozen case: lhs " + fmt(base.lhs) + " rhs " + fmt(base.rhs);
            return false;
        }
        RngStream rng(7777, 0);
        int tested = 0;
        while (tested < 100) {
            SparseMeasure m = random_sparse_measure(ab, rng, 4, 3);
            const auto& entries = m.entries();
            Word w = entries[rng.next_below(entries.size())].first;
            AbramovCheck c = abramov_check(m, w, 8);
            ++tested;
            if (!c.holds) {
                detail = "sweep violation at measure " + std::to_string(tested);
                return false;
            }
        }
        detail = "ln3 < ln6 frozen; 100-measure sweep";
        return true;
    });

    // 8. the shipped example experiments behave as documented
    criterion(8, "example-experiments", 60.0, [](std::string& detail) {
        namespace fs = std::filesystem;
        std::string base = (fs::temp_directory_path() / "sbl-acceptance").string();
        fs::remove_all(base);

        ExperimentConfig e1;
        e1.family = "example1";
        e1.truncation_K = 16;
        e1.renormalize = true;
        e1.epsilon = 1e-10;
        e1.kmax = 32;
        e1.kmax_conv = 4;
        e1.depth = 4;
        e1.out = base + "/example1";
        RunManifest m1 = run_experiment(e1);
        if (m1.verdicts.at("slope_H_proj") != "consistent-with-zero") {
            detail = "example1 slope verdict: " + m1.verdicts.at("slope_H_proj");
            return false;
        }
        if (!m1.ok()) {
            detail = "example1 run has failing checks";
            return false;
        }

        ExperimentConfig e3;
        e3.family = "example3";
        e3.truncation_K = 40;
        e3.power = 2;
        e3.w = "a.b";
        e3.max_w_occurrences = 1;
        e3.kmax = 12;
        e3.kmax_conv = 1;
        e3.depth = 4;
        e3.samples = 20000;
        e3.out = base + "/example3";
        RunManifest m3 = run_experiment(e3);
        bool certified = false;
        for (const auto& c : m3.checks) {
            if (c.name == "w-occurrence-bound") certified = c.status == "pass";
        }
        if (!certified) {
            detail = "example3 squared measure: occurrence certificate failed";
            return false;
        }
        if (!m3.ok()) {
            detail = "example3 run has failing checks";
            return false;
        }
        detail = "example1 slope verdict + example3 occurrence certificate";
        return true;
    });

    // 9. the conditioned kernel is a stochastic matrix along the trajectory
    criterion(9, "conditioned-kernel-rows", 0.0, [](std::string& detail) {
        auto ab = Alphabet::make({"a", "b"});
        SparseMeasure golden = inline_measure(ab, "a:0.5,a.b:0.5");
        HittingOracle oracle(golden);
        Word xi;
        for (int i = 0; i < 10; ++i) xi = concat(xi, parse_word(*ab, "a.b"));

        KernelRow at_e = conditional_kernel(oracle, Word(), xi);
        double ab_weight = 0.0;
        for (const auto& e : at_e.entries) {
            if (e.g == parse_word(*ab, "a.b")) ab_weight = e.weight;
        }
        if (std::abs(ab_weight - 1.0) > 1e-9) {
            detail = "mass on the ab move = " + fmt(ab_weight);
            return false;
        }

        double worst = at_e.residual;
        for (std::uint32_t n = 2; n <= 8; n += 2) {
            worst = std::max(worst, conditional_kernel(oracle, prefix(xi, n), xi).residual);
        }
        HittingOracle uni(letter_uniform(ab));
        Word path = parse_word(*ab, "a.b.b.a.b.a.a.b.a.b");
        for (std::uint32_t n = 0; n <= 6; ++n) {
            worst = std::max(worst, conditional_kernel(uni, prefix(path, n), path).residual);
        }
        detail = "worst row residual = " + fmt(worst);
        return worst <= 1e-9;
    });

    // 10. boundary integrals of cylinder functions are harmonic
    criterion(10, "poisson-formula-harmonicity", 0.0, [](std::string& detail) {
        auto ab = Alphabet::make({"a", "b"});
        std::vector<SparseMeasure> measures = {
            letter_uniform(ab),
            inline_measure(ab, "a:0.5,a.b:0.5"),
        };
        FamilySpec spec;
        spec.family = "example3";
        spec.letters = {"a", "b"};
        spec.truncation_K = 30;
        std::shared_ptr<Alphabet> ab3;
        measures.push_back(instantiate_family(spec, &ab3));

        RngStream rng(1010, 0);
        double worst_excess = -1e300;
        for (const auto& m : measures) {
            HittingOracle oracle(m);
            CylinderFunction fhat = CylinderFunction::random(oracle, 3, rng, -1.0, 1.0);
            double tol = 1e-9 + m.tail().mass;
            const Alphabet& letters = *m.alphabet();
            for (int i = 0; i < 50; ++i) {
                Word g = random_word(letters, rng, 6);
                double r = harmonicity_residual(oracle, fhat, g);
                worst_excess = std::max(worst_excess, r - tol);
                if (r > tol) {
                    detail = "residual " + fmt(r) + " above " + fmt(tol);
                    return false;
                }
            }
        }
        detail = "3 measures x 50 positions, worst residual-tolerance = " + fmt(worst_excess);
        return true;
    });

    if (g_failures == 0) {
        std::printf("acceptance: all criteria satisfied\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return 1;
}
