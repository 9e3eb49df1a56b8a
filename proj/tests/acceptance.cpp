// Acceptance suite: one check per criterion, one pass/fail line each.
//
//   acceptance            runs every criterion
//   acceptance --only N   runs a single criterion (used by ctest)
//
// Exit code is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "involab/asym.hpp"
#include "involab/esf.hpp"
#include "involab/experiments.hpp"
#include "involab/feller.hpp"
#include "involab/perm_core.hpp"
#include "involab/series.hpp"

using namespace involab;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

constexpr std::uint64_t kSeed = 20240801;

Outcome criterion_oracle_equivalence() {
    std::int64_t checked = 0;
    for (std::int64_t n = 1; n <= 7; ++n) {
        std::vector<std::int32_t> image(static_cast<std::size_t>(n));
        for (std::size_t i = 0; i < image.size(); ++i) image[i] = static_cast<std::int32_t>(i);
        do {
            Permutation p(image);
            const auto type = cycle_type_of(p);
            const auto direct = invol(type);
            if (direct != brute_force_invol(p) || direct != invol_hermite(type))
                return {false, "mismatch at n=" + std::to_string(n)};
            ++checked;
        } while (std::next_permutation(image.begin(), image.end()));
    }
    return {true, std::to_string(checked) + " permutations, three routes identical"};
}

Outcome criterion_pair_identity() {
    for (std::int64_t n = 1; n <= 9; ++n) {
        BigInt sum = 0;
        enumerate_cycle_types(n, [&](const CycleType& c, const BigInt& cls) { sum += cls * invol(c); });
        if (sum != telephone(n) * telephone(n))
            return {false, "identity fails at n=" + std::to_string(n)};
    }
    return {true, "sum class_size*invol = t_n^2 for n <= 9, exact"};
}

Outcome criterion_moment_exactness() {
    const std::vector<BigRat> thetas{BigRat(1, 3), BigRat(1, 2), BigRat(1), BigRat(2), BigRat(7, 2)};
    for (const auto& theta : thetas) {
        const auto params = ESFParams::from_rational(theta);
        for (std::int64_t n = 1; n <= 25; ++n) {
            BigRat mean_sum = 0, second_sum = 0;
            enumerate_cycle_types(n, [&](const CycleType& c, const BigInt&) {
                const BigRat p = esf_pmf(c, params);
                const BigRat iv(invol(c));
                mean_sum += p * iv;
                if (n <= 20) second_sum += p * iv * iv;
            });
            if (mean_invol_exact(n, params) != mean_sum)
                return {false, "mean mismatch at n=" + std::to_string(n) + ", theta=" + theta.str()};
            if (n <= 20 && second_moment_exact(n, params) != second_sum)
                return {false, "second-moment mismatch at n=" + std::to_string(n) + ", theta=" + theta.str()};
        }
    }
    return {true, "series moments equal ESF partition sums (mean n<=25, second n<=20, 5 thetas)"};
}

Outcome criterion_mean_asymptotic() {
    auto F = mean_generating_series<RealDomain>(Real(1), 10000);
    std::ostringstream detail;
    double prev = -1.0;
    bool ok = true;
    for (std::int64_t n : {250, 1000, 4000, 10000}) {
        const Real exact = moment_from_series_real(F, n, Real(1));
        const double ratio = (exact / mean_asym(n, Real(1)).value).convert_to<double>();
        detail << "n=" << n << " ratio=" << ratio << "  ";
        if (prev > 0 && std::abs(ratio - 1) >= std::abs(prev - 1)) ok = false;
        prev = ratio;
    }
    if (std::abs(prev - 1) > 0.05) ok = false;
    return {ok, detail.str()};
}

Outcome criterion_second_moment_asymptotic() {
    std::ostringstream detail;
    bool ok = true;
    for (double th : {0.5, 1.0}) {
        const Real theta(th);
        auto G = second_moment_generating_series<RealDomain>(theta, 2000);
        const Real exact = moment_from_series_real(G, 2000, theta);
        const double ratio = (exact / second_moment_asym(2000, theta).value).convert_to<double>();
        detail << "theta=" << th << " n=2000 ratio=" << ratio << "  ";
        if (std::abs(ratio - 1) > 0.10) ok = false;
    }
    {
        const Real theta(2);
        auto G = second_moment_generating_series<RealDomain>(theta, 500);
        const double log_exact = log(moment_from_series_real(G, 500, theta)).convert_to<double>();
        const double log_asym = log(second_moment_asym(500, theta).value).convert_to<double>();
        detail << "theta=2 n=500 log-ratio err=" << std::abs(log_asym / log_exact - 1) << "  ";
        if (std::abs(log_asym / log_exact - 1) > 0.02) ok = false;
    }
    // regime contrast: growth increments between n=1000 and n=2000
    const double inc_sub = (log(second_moment_asym(2000, Real(0.5)).value) -
                            log(second_moment_asym(1000, Real(0.5)).value))
                               .convert_to<double>();
    const double inc_sup = (log(second_moment_asym(2000, Real(2)).value) -
                            log(second_moment_asym(1000, Real(2)).value))
                               .convert_to<double>();
    detail << "regimes: dlog(theta=1/2)=" << inc_sub << " (~n^{2/3} scale) vs dlog(theta=2)="
           << inc_sup << " (~n log theta scale)";
    return {ok, detail.str()};
}

Outcome criterion_mellin() {
    std::ostringstream detail;
    bool ok = true;
    for (double th : {0.5, 1.0}) {
        const Real theta(th);
        double cmin = 1e300, cmax = 0;
        for (double t : {0.2, 0.1, 0.05, 0.025, 0.0125}) {
            const double diff =
                abs(mellin_lhs(Real(t), theta) - mellin_expansion(Real(t), theta)).convert_to<double>();
            cmin = std::min(cmin, diff / t);
            cmax = std::max(cmax, diff / t);
        }
        detail << "theta=" << th << " C range [" << cmin << ", " << cmax << "]  ";
        if (cmax > 2 * cmin) ok = false;
    }
    return {ok, detail.str()};
}

Outcome criterion_feller_exactness() {
    for (const auto& theta : {BigRat(1, 2), BigRat(1), BigRat(3, 2), BigRat(2)}) {
        const auto params = ESFParams::from_rational(theta);
        for (std::int64_t n = 1; n <= 6; ++n) {
            for (const auto& [counts, prob] : exact_feller_distribution(n, params))
                if (prob != esf_pmf(counts, n, params))
                    return {false, "mismatch at n=" + std::to_string(n) + ", theta=" + theta.str()};
        }
    }
    return {true, "window distribution == ESF pmf, n <= 6, four thetas, exact"};
}

Outcome criterion_clt() {
    ExperimentConfig cfg;
    cfg.n_grid = {100000, 1000000};
    cfg.theta = 1.0;
    cfg.samples = 20000;
    cfg.seed = kSeed;
    const auto report = clt_experiment(cfg);
    const auto& rows = report.at("results").at("rows");
    const double ks5 = rows[0].at("ks").get<double>();
    const double ks6 = rows[1].at("ks").get<double>();
    std::ostringstream detail;
    detail << "KS(1e5)=" << ks5 << " KS(1e6)=" << ks6;
    return {ks5 <= 0.08 && ks6 < ks5, detail.str()};
}

Outcome criterion_edgeworth() {
    ExperimentConfig cfg;
    cfg.n_grid = {10000};
    cfg.theta = 1.0;
    cfg.samples = 100000;
    cfg.seed = kSeed + 1;
    const auto report = clt_experiment(cfg);
    const auto& row = report.at("results").at("rows").front();
    const double ks = row.at("ks").get<double>();
    const double ks_edge = row.at("ks_edgeworth").get<double>();
    const int agree = row.at("sign_agreements").get<int>();
    const int points = row.at("sign_points").get<int>();
    std::ostringstream detail;
    detail << "KS=" << ks << " KS+edgeworth=" << ks_edge << " sign " << agree << "/" << points;
    return {ks_edge < ks && 2 * agree > points, detail.str()};
}

Outcome criterion_functional() {
    ExperimentConfig cfg;
    cfg.n_grid = {10000, 100000, 1000000};
    cfg.theta = 1.0;
    cfg.samples = 10000;
    cfg.seed = kSeed + 2;
    const auto report = functional_experiment(cfg);
    const auto& rows = report.at("results").at("rows");
    std::ostringstream detail;
    bool cov_ok = true;
    const double dev = rows[2].at("max_cov_deviation").get<double>();
    cov_ok = dev <= 0.05;
    double prev = 1e300;
    bool sup_ok = true;
    for (const auto& row : rows) {
        const double es = row.at("e_sup_w_minus_b").get<double>();
        detail << "n=" << row.at("n").get<std::int64_t>() << " Esup=" << es << "  ";
        if (es >= prev) sup_ok = false;
        prev = es;
    }
    detail << "max |cov - min(s,t)^3| at n=1e6: " << dev;
    return {cov_ok && sup_ok, detail.str()};
}

Outcome criterion_concentration() {
    ExperimentConfig cfg;
    cfg.n_grid = {100000};
    cfg.theta = 1.0;
    cfg.samples = 100000;
    cfg.seed = kSeed + 3;
    cfg.xi_grid = {5, 10, 20, 40};
    const auto report = membership_experiment(cfg);
    double lo = 1e300, hi = 0;
    for (const auto& row : report.at("results").at("rows")) {
        const double v = row.at("xi_times_p").get<double>();
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    ExperimentConfig cfg2;
    cfg2.n_grid = {10000};
    cfg2.theta = 1.0;
    cfg2.samples = 100000;
    cfg2.seed = kSeed + 4;
    cfg2.xi_grid = {5};
    cfg2.xi1 = 20;
    cfg2.xi2 = 20;
    const auto r2 = membership_experiment(cfg2);
    const auto& sk = r2.at("results").at("skew_check");
    const double below = sk.at("below_bound_fraction").get<double>();
    const double guarantee = sk.at("prob_guarantee").get<double>();
    std::ostringstream detail;
    detail << "xi*P in [" << lo << ", " << hi << "]; below-bound " << below
           << " >= guarantee " << guarantee;
    return {hi <= 3 * lo && below >= guarantee, detail.str()};
}

Outcome criterion_inequalities() {
    ExperimentConfig cfg;
    cfg.n_grid = {1000};
    cfg.theta_grid = {0.5, 1.0, 2.0};
    cfg.samples = 1000000;
    cfg.seed = kSeed + 5;
    const auto report = inequality_suite(cfg);
    std::int64_t total = 0, violations = 0;
    for (const auto& row : report.at("results").at("rows")) {
        total += row.at("samples").get<std::int64_t>();
        violations += row.at("violations_lower_bound").get<std::int64_t>() +
                      row.at("violations_log_ratio").get<std::int64_t>() +
                      row.at("violations_sandwich").get<std::int64_t>() +
                      row.at("violations_domination").get<std::int64_t>();
    }
    std::ostringstream detail;
    detail << violations << " violations over " << total << " samples";
    return {violations == 0 && total >= 3000000, detail.str()};
}

Outcome criterion_composition_bias() {
    ExperimentConfig cfg;
    cfg.n_grid = {500};
    cfg.samples = 100000;
    cfg.seed = kSeed + 6;
    cfg.kmax = 5;
    const auto report = composition_bias_experiment(cfg);
    bool ok = report.at("results").at("t6_squared_identity").get<bool>();
    std::ostringstream detail;
    for (const auto& row : report.at("results").at("rows")) {
        const double mean = row.at("mean").get<double>();
        const double se = row.at("se").get<double>();
        const double target = row.at("limit_target").get<double>();
        detail << "k=" << row.at("k").get<int>() << ": " << mean << " vs " << target << " (3se="
               << 3 * se << ")  ";
        if (std::abs(mean - target) > 3 * se) ok = false;
    }
    return {ok, detail.str()};
}

struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> criteria{
        {1, "oracle equivalence (invol = hermite = brute force, n <= 7)", criterion_oracle_equivalence},
        {2, "involution-pair identity (t_n^2, n <= 9)", criterion_pair_identity},
        {3, "moment exactness vs partition sums", criterion_moment_exactness},
        {4, "mean asymptotic reproduction at theta = 1", criterion_mean_asymptotic},
        {5, "second-moment asymptotics in all three regimes", criterion_second_moment_asymptotic},
        {6, "mellin expansion remainder is O(t)", criterion_mellin},
        {7, "feller window exactness (n <= 6)", criterion_feller_exactness},
        {8, "lognormal CLT: KS <= 0.08 at n=1e5 and smaller at 1e6", criterion_clt},
        {9, "edgeworth refinement at n=1e4", criterion_edgeworth},
        {10, "functional limit: covariances and coupling distance", criterion_functional},
        {11, "typical-set concentration and the typical-value bound", criterion_concentration},
        {12, "inequality suite: zero violations over 3e6 samples", criterion_inequalities},
        {13, "composition bias at n=500", criterion_composition_bias},
    };

    int only = 0;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--only") == 0 && i + 1 < argc) only = std::atoi(argv[i + 1]);

    int failures = 0;
    for (const auto& c : criteria) {
        if (only != 0 && c.id != only) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome out{false, "exception"};
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::printf("[%s] criterion %2d: %s (%.1fs)\n    %s\n", out.pass ? "PASS" : "FAIL", c.id,
                    c.name, secs, out.detail.c_str());
        std::fflush(stdout);
        if (!out.pass) ++failures;
    }
    return failures;
}
