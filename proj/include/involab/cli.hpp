#pragma once

// Command-line front door. Every subcommand is a thin adapter over the
// library: parse flags, call, serialize. No numerics live here.
//
// Exit codes: 0 success, 2 precondition violation, 1 internal error,
// 64 usage error.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "involab/asym.hpp"
#include "involab/esf.hpp"
#include "involab/experiments.hpp"
#include "involab/perm_core.hpp"
#include "involab/series.hpp"

namespace involab::cli {

// "k^a k^b ..." or "k,k,..." compact cycle-type notation; bare k means one k-cycle
inline CycleType parse_cycle_type(const std::string& text) {
    SparseCounts sc;
    std::string tok;
    std::istringstream in(text);
    std::string norm = text;
    for (auto& ch : norm)
        if (ch == ',') ch = ' ';
    std::istringstream stream(norm);
    while (stream >> tok) {
        const auto caret = tok.find('^');
        const std::int64_t k = std::stoll(tok.substr(0, caret));
        const std::int64_t c = caret == std::string::npos ? 1 : std::stoll(tok.substr(caret + 1));
        sc.add(k, c);
    }
    if (sc.kv.empty()) throw std::invalid_argument("empty cycle type");
    const std::int64_t n = sc.weighted_sum();
    return CycleType(n, std::move(sc));
}

inline CycleType parse_dense_counts(const std::string& text) {
    std::vector<std::int64_t> dense;
    for (const auto& tok : involab::detail::split_list(text)) dense.push_back(std::stoll(tok));
    return CycleType::from_dense(dense);
}

inline ESFParams parse_theta(const std::string& text) {
    return ESFParams::from_rational(parse_rational(text));
}

namespace detail {

inline void emit(const json& payload, const ExperimentConfig& io, std::ostream& out) {
    if (io.out_path.empty() && io.format != "csv") {
        out << payload.dump(2) << "\n";
    } else if (io.out_path.empty()) {
        out << report_to_csv(payload);
    } else {
        write_report(payload, io);
    }
}

inline std::string resolve_out(const std::string& path) {
    if (path.empty()) return path;
    if (path.front() == '/') return path;
    const char* dir = std::getenv("INVOLAB_OUT_DIR");
    if (dir == nullptr || *dir == '\0') return path;
    std::string d(dir);
    if (d.back() != '/') d.push_back('/');
    return d + path;
}

inline json real_json(const Real& v) {
    return json{{"value", v.convert_to<double>()},
                {"log_value", v > 0 ? log(v).convert_to<double>() : 0.0}};
}

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"involution-factorization laboratory"};
    app.require_subcommand(1);

    // shared experiment flags
    ExperimentConfig cfg;
    std::string config_path, n_list, theta_text = "1", theta_list, xi_list, cov_list, out_path,
                format = "json";
    auto add_io = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "key=value configuration file");
        sub->add_option("--out", out_path, "output file (INVOLAB_OUT_DIR resolves relative paths)");
        sub->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}));
        sub->add_option("--threads", cfg.threads, "worker count (0 = hardware)");
        sub->add_option("--seed", cfg.seed, "random seed");
    };
    auto given = [](CLI::App* sub, const char* name) {
        auto* opt = sub->get_option_no_throw(name);
        return opt != nullptr && opt->count() > 0;
    };
    auto finish_cfg = [&](CLI::App* sub) {
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (given(sub, "--n")) {
            cfg.n_grid.clear();
            for (const auto& tok : involab::detail::split_list(n_list))
                cfg.n_grid.push_back(std::stoll(tok));
        }
        if (given(sub, "--theta")) cfg.theta = std::stod(theta_text);
        if (given(sub, "--theta-grid")) {
            cfg.theta_grid.clear();
            for (const auto& tok : involab::detail::split_list(theta_list))
                cfg.theta_grid.push_back(std::stod(tok));
        }
        if (given(sub, "--xi")) {
            cfg.xi_grid.clear();
            for (const auto& tok : involab::detail::split_list(xi_list))
                cfg.xi_grid.push_back(std::stoll(tok));
        }
        if (given(sub, "--cov-grid")) {
            cfg.cov_grid.clear();
            for (const auto& tok : involab::detail::split_list(cov_list))
                cfg.cov_grid.push_back(std::stod(tok));
        }
        if (given(sub, "--out")) cfg.out_path = out_path;
        cfg.out_path = detail::resolve_out(cfg.out_path);
        if (given(sub, "--format")) cfg.format = format;
    };

    // ---- compute ----
    auto* compute = app.add_subcommand("compute", "exact invol/B for a cycle type");
    std::string type_text, counts_text;
    compute->add_option("--cycle-type", type_text, "compact notation, e.g. \"1^2 2\" or \"5\"");
    compute->add_option("--counts", counts_text, "dense multiplicities, e.g. \"2,1\"");
    add_io(compute);

    // ---- oracle ----
    auto* oracle = app.add_subcommand("oracle", "brute-force involution-pair counts");
    std::string perm_text;
    std::int64_t oracle_n = 0, cap = kBruteForceDefaultCap;
    bool sweep = false;
    oracle->add_option("--perm", perm_text, "one-line permutation, e.g. \"2,1,3\"");
    oracle->add_option("--n", oracle_n, "ground-set size for --sweep");
    oracle->add_flag("--sweep", sweep, "check every permutation of S_n against the formulas");
    oracle->add_option("--cap", cap, "enumeration size cap");
    add_io(oracle);

    // ---- moments ----
    auto* moments = app.add_subcommand("moments", "exact ESF moments of invol");
    std::int64_t mom_n = 1;
    bool second = true, exact_flag = false;
    std::string dump_path, dump_domain = "rational";
    std::int64_t dump_order = -1;
    moments->add_option("--n", mom_n, "ground-set size")->required();
    moments->add_option("--theta", theta_text, "ESF parameter, rational p/q or decimal");
    moments->add_flag("--exact", exact_flag, "treat a decimal theta literally (always on)");
    moments->add_flag("!--no-second", second, "skip the second moment");
    moments->add_option("--dump-coeffs", dump_path, "write generating-series coefficients as CSV");
    moments->add_option("--domain", dump_domain, "rational|real coefficients for --dump-coeffs")
        ->check(CLI::IsMember({"rational", "real"}));
    moments->add_option("--order", dump_order, "truncation order for --dump-coeffs (default n)");
    add_io(moments);

    // ---- asym ----
    auto* asym = app.add_subcommand("asym", "closed-form asymptotics");
    std::string which = "mean";
    std::int64_t asym_n = 1000, asym_m = 1, xi1 = 0, xi2 = 0;
    asym->add_option("--which", which, "mean|second|conditional|skew|skew-symmetric")
        ->check(CLI::IsMember({"mean", "second", "conditional", "skew", "skew-symmetric"}));
    asym->add_option("--n", asym_n, "ground-set size");
    asym->add_option("--theta", theta_text, "parameter");
    asym->add_option("--m", asym_m, "cycle count for --which conditional");
    asym->add_option("--xi1", xi1);
    asym->add_option("--xi2", xi2);
    add_io(asym);

    // ---- mellin ----
    auto* mellin = app.add_subcommand("mellin", "harmonic sum vs singular expansion");
    std::string t_list = "0.2,0.1,0.05,0.025,0.0125";
    mellin->add_option("--theta", theta_text, "parameter in (0,1]");
    mellin->add_option("--t-grid", t_list, "comma-separated t values");
    add_io(mellin);

    // ---- experiments ----
    auto add_experiment_flags = [&](CLI::App* sub, const char* samples_name) {
        sub->add_option("--n", n_list, "ground-set size(s), comma separated");
        sub->add_option("--theta", theta_text, "parameter");
        sub->add_option(samples_name, cfg.samples, "sample count");
        sub->add_option("--horizon-factor", cfg.horizon_factor, "limit-process horizon M = f*n");
        sub->add_option("--scan-limit", cfg.scan_limit, "per-index sampling threshold");
        add_io(sub);
    };
    auto* clt = app.add_subcommand("clt", "standardized log invol vs the normal law");
    add_experiment_flags(clt, "--samples");
    auto* paths = app.add_subcommand("paths", "functional coupling statistics");
    add_experiment_flags(paths, "--paths");
    paths->add_option("--t-points", cfg.t_points, "fine grid size for the sup statistic");
    paths->add_option("--cov-grid", cov_list, "covariance grid t values");
    auto* membership = app.add_subcommand("membership", "typical-set concentration");
    add_experiment_flags(membership, "--samples");
    membership->add_option("--xi", xi_list, "xi grid, comma separated");
    membership->add_option("--xi1", cfg.xi1, "typical-value bound parameter");
    membership->add_option("--xi2", cfg.xi2, "typical-value bound parameter");
    auto* ineq = app.add_subcommand("inequalities", "sample-level inequality suite");
    add_experiment_flags(ineq, "--samples");
    ineq->add_option("--theta-grid", theta_list, "run one pass per theta");
    auto* bias = app.add_subcommand("compose-bias", "cycle counts of composed involutions");
    add_experiment_flags(bias, "--pairs");
    bias->add_option("--kmax", cfg.kmax, "largest cycle length tracked");

    std::vector<std::string> argv_copy(args.rbegin(), args.rend());
    try {
        app.parse(argv_copy);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n" << app.help();
        return 64;
    }

    try {
        ExperimentConfig io;  // output routing for non-experiment commands
        io.out_path = detail::resolve_out(out_path);
        io.format = format;

        if (compute->parsed()) {
            if (type_text.empty() == counts_text.empty())
                throw std::invalid_argument("compute: give exactly one of --cycle-type/--counts");
            const CycleType c =
                type_text.empty() ? parse_dense_counts(counts_text) : parse_cycle_type(type_text);
            json payload{{"schema_version", kReportSchemaVersion},
                         {"command", "compute"},
                         {"n", c.n()},
                         {"invol", invol(c).str()},
                         {"B", big_b(c).str()},
                         {"invol_hermite", invol_hermite(c).str()}};
            detail::emit(payload, io, out);
            return 0;
        }
        if (oracle->parsed()) {
            json payload{{"schema_version", kReportSchemaVersion}, {"command", "oracle"}};
            if (sweep) {
                if (oracle_n < 1) throw std::invalid_argument("oracle --sweep needs --n >= 1");
                std::int64_t checked = 0;
                std::vector<std::int32_t> image(static_cast<std::size_t>(oracle_n));
                for (std::size_t i = 0; i < image.size(); ++i)
                    image[i] = static_cast<std::int32_t>(i);
                bool all_equal = true;
                do {
                    Permutation p(image);
                    const auto type = cycle_type_of(p);
                    const auto bf = brute_force_invol(p, cap);
                    all_equal = all_equal && bf == invol(type) && bf == invol_hermite(type);
                    ++checked;
                } while (std::next_permutation(image.begin(), image.end()) && all_equal);
                payload["n"] = oracle_n;
                payload["permutations_checked"] = checked;
                payload["all_equal"] = all_equal;
            } else {
                std::vector<std::int64_t> one_line;
                for (const auto& tok : involab::detail::split_list(perm_text))
                    one_line.push_back(std::stoll(tok));
                const auto p = Permutation::from_one_based(one_line);
                const auto type = cycle_type_of(p);
                payload["n"] = p.size();
                payload["brute_force"] = brute_force_invol(p, cap).str();
                payload["invol"] = invol(type).str();
                payload["invol_hermite"] = invol_hermite(type).str();
            }
            detail::emit(payload, io, out);
            return 0;
        }
        if (moments->parsed()) {
            const auto params = parse_theta(theta_text);
            const BigRat mean = mean_invol_exact(mom_n, params);
            json payload{{"schema_version", kReportSchemaVersion},
                         {"command", "moments"},
                         {"n", mom_n},
                         {"theta", rational_to_string(params.theta)},
                         {"mean", rational_to_string(mean)},
                         {"mean_decimal", to_double(mean)}};
            if (second) {
                const BigRat m2 = second_moment_exact(mom_n, params);
                payload["second_moment"] = rational_to_string(m2);
                payload["second_moment_decimal"] = to_double(m2);
            }
            if (!dump_path.empty()) {
                const auto N = static_cast<std::size_t>(dump_order < 0 ? mom_n : dump_order);
                std::ofstream coeffs(detail::resolve_out(dump_path));
                if (!coeffs) throw std::runtime_error("cannot open " + dump_path);
                if (dump_domain == "rational") {
                    auto F = mean_generating_series<RationalDomain>(params.theta, N);
                    coeffs << "index,numerator,denominator\n";
                    for (std::size_t i = 0; i <= N; ++i)
                        coeffs << i << "," << numerator(F[i]).str() << ","
                               << denominator(F[i]).str() << "\n";
                } else {
                    auto F = mean_generating_series<RealDomain>(to_real(params.theta), N);
                    coeffs << "index,decimal\n";
                    coeffs.precision(30);
                    for (std::size_t i = 0; i <= N; ++i) coeffs << i << "," << F[i] << "\n";
                }
                payload["coeffs_written"] = dump_path;
            }
            detail::emit(payload, io, out);
            return 0;
        }
        if (asym->parsed()) {
            json payload{{"schema_version", kReportSchemaVersion},
                         {"command", "asym"},
                         {"which", which},
                         {"n", asym_n}};
            if (which == "mean" || which == "second") {
                const Real theta(std::stod(theta_text));
                const auto est = which == "mean" ? mean_asym(asym_n, theta)
                                                 : second_moment_asym(asym_n, theta);
                payload["theta"] = std::stod(theta_text);
                payload["estimate"] = detail::real_json(est.value);
                payload["claimed_error_exponent"] = rational_to_string(est.claimed_error_exponent);
            } else if (which == "conditional") {
                payload["m"] = asym_m;
                payload["estimate"] = detail::real_json(conditional_mean_asym(asym_n, asym_m));
                if (asym_n <= 4000) {
                    const BigRat exact = conditional_mean_given_cycles(asym_n, asym_m);
                    payload["exact"] = rational_to_string(exact);
                    payload["exact_decimal"] = to_double(exact);
                }
            } else if (which == "skew") {
                const auto b = skew_bound(asym_n, xi1, xi2);
                payload["xi1"] = xi1;
                payload["xi2"] = xi2;
                payload["log_bound"] = b.log_bound;
                payload["prob_guarantee"] = b.prob_guarantee;
            } else {
                payload["xi"] = xi1;
                payload["log_bound"] = symmetric_skew_log_bound(asym_n, xi1);
            }
            detail::emit(payload, io, out);
            return 0;
        }
        if (mellin->parsed()) {
            const Real theta(std::stod(theta_text));
            json rows = json::array();
            for (const auto& tok : involab::detail::split_list(t_list)) {
                const Real t(std::stod(tok));
                const Real lhs = mellin_lhs(t, theta);
                const Real expn = mellin_expansion(t, theta);
                const double diff = abs(lhs - expn).convert_to<double>();
                rows.push_back(json{{"t", std::stod(tok)},
                                    {"lhs", lhs.convert_to<double>()},
                                    {"expansion", expn.convert_to<double>()},
                                    {"abs_diff", diff},
                                    {"diff_over_t", diff / std::stod(tok)}});
            }
            json payload{{"schema_version", kReportSchemaVersion},
                         {"command", "mellin"},
                         {"theta", std::stod(theta_text)},
                         {"rows", std::move(rows)}};
            detail::emit(payload, io, out);
            return 0;
        }

        // experiments
        CLI::App* sub = nullptr;
        json report;
        if (clt->parsed()) {
            finish_cfg(sub = clt);
            report = clt_experiment(cfg);
        } else if (paths->parsed()) {
            finish_cfg(sub = paths);
            report = functional_experiment(cfg);
        } else if (membership->parsed()) {
            finish_cfg(sub = membership);
            report = membership_experiment(cfg);
        } else if (ineq->parsed()) {
            finish_cfg(sub = ineq);
            report = inequality_suite(cfg);
        } else if (bias->parsed()) {
            finish_cfg(sub = bias);
            report = composition_bias_experiment(cfg);
        }
        if (sub != nullptr) {
            if (cfg.out_path.empty()) {
                if (cfg.format == "csv")
                    out << report_to_csv(report);
                else
                    out << report.dump(2) << "\n";
            } else {
                write_report(report, cfg);
            }
            return 0;
        }
        err << "no subcommand executed\n";
        return 64;
    } catch (const std::invalid_argument& e) {
        err << "precondition violation: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace involab::cli
