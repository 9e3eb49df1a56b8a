#pragma once

// Monte Carlo reproduction of the probabilistic limit theorems: the scalar
// CLT for log invol with its Edgeworth comparison, the functional coupling
// statistics, typical-set concentration, the sample-level inequality suite,
// and the composed-involutions bias study.
//
// Determinism contract: sample i always runs on Rng(seed, i), chunk results
// are stored by chunk index and reduced in order, so a report depends only on
// (config, seed), not on the worker count. Reports reserialize byte-for-byte
// apart from the wall_ms field.

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <chrono>
#include <cctype>
#include <thread>
#include <vector>

#include "involab/asym.hpp"
#include "involab/feller.hpp"
#include "involab/perm_core.hpp"
#include "involab/series.hpp"
#include "involab/stats.hpp"

namespace involab {

using json = nlohmann::json;

inline constexpr int kReportSchemaVersion = 1;

struct ExperimentConfig {
    std::vector<std::int64_t> n_grid{100000};
    double theta = 1.0;
    std::vector<double> theta_grid;      // inequality suite runs one pass per entry
    std::int64_t samples = 10000;
    std::uint64_t seed = 1;
    std::int64_t horizon_factor = 4;
    std::int64_t scan_limit = kDefaultScanLimit;
    std::int64_t t_points = 101;         // fine grid for sup over t
    std::vector<double> cov_grid{0.2, 0.4, 0.6, 0.8, 1.0};
    std::vector<std::int64_t> xi_grid{5, 10, 20, 40};
    std::int64_t xi1 = 0, xi2 = 0;       // when both set, membership also checks the skew bound
    std::int64_t kmax = 5;               // compose-bias: cycle lengths tracked
    std::int64_t threads = 0;            // 0 = hardware concurrency
    std::string out_path;
    std::string format = "json";

    json to_json() const {
        return json{{"n_grid", n_grid},
                    {"theta", theta},
                    {"theta_grid", theta_grid},
                    {"samples", samples},
                    {"seed", seed},
                    {"horizon_factor", horizon_factor},
                    {"scan_limit", scan_limit},
                    {"t_points", t_points},
                    {"cov_grid", cov_grid},
                    {"xi_grid", xi_grid},
                    {"xi1", xi1},
                    {"xi2", xi2},
                    {"kmax", kmax}};
    }
};

namespace detail {

inline std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            if (!cur.empty()) out.push_back(cur);
            cur.clear();
        } else if (!std::isspace(static_cast<unsigned char>(ch))) {
            cur.push_back(ch);
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

}  // namespace detail

// key=value configuration file; '#' starts a comment. Keys mirror the CLI
// flags: n, theta, theta_grid, samples, seed, horizon_factor, scan_limit,
// t_points, cov_grid, xi_grid, xi1, xi2, kmax, threads, out, format.
inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
    auto as_i64 = [&] { return static_cast<std::int64_t>(std::stoll(value)); };
    if (key == "n" || key == "n_grid") {
        cfg.n_grid.clear();
        for (const auto& tok : detail::split_list(value)) cfg.n_grid.push_back(std::stoll(tok));
    } else if (key == "theta") {
        cfg.theta = std::stod(value);
    } else if (key == "theta_grid") {
        cfg.theta_grid.clear();
        for (const auto& tok : detail::split_list(value)) cfg.theta_grid.push_back(std::stod(tok));
    } else if (key == "samples" || key == "pairs") {
        cfg.samples = as_i64();
    } else if (key == "seed") {
        cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (key == "horizon_factor") {
        cfg.horizon_factor = as_i64();
    } else if (key == "scan_limit") {
        cfg.scan_limit = as_i64();
    } else if (key == "t_points") {
        cfg.t_points = as_i64();
    } else if (key == "cov_grid") {
        cfg.cov_grid.clear();
        for (const auto& tok : detail::split_list(value)) cfg.cov_grid.push_back(std::stod(tok));
    } else if (key == "xi_grid") {
        cfg.xi_grid.clear();
        for (const auto& tok : detail::split_list(value)) cfg.xi_grid.push_back(std::stoll(tok));
    } else if (key == "xi1") {
        cfg.xi1 = as_i64();
    } else if (key == "xi2") {
        cfg.xi2 = as_i64();
    } else if (key == "kmax") {
        cfg.kmax = as_i64();
    } else if (key == "threads") {
        cfg.threads = as_i64();
    } else if (key == "out") {
        cfg.out_path = value;
    } else if (key == "format") {
        cfg.format = value;
    } else {
        throw std::invalid_argument("unknown configuration key: " + key);
    }
}

inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!key.empty()) apply_config_entry(cfg, key, value);
    }
}

// ---- deterministic chunked runner -------------------------------------------

template <class R>
std::vector<R> run_chunked(std::int64_t total, std::int64_t chunk_size, std::int64_t threads,
                           const std::function<R(std::int64_t, std::int64_t)>& work_range) {
    const std::int64_t chunks = (total + chunk_size - 1) / chunk_size;
    std::vector<R> results(static_cast<std::size_t>(chunks));
    std::int64_t hw = threads > 0 ? threads
                                  : static_cast<std::int64_t>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (hw == 1 || chunks == 1) {
        for (std::int64_t c = 0; c < chunks; ++c)
            results[static_cast<std::size_t>(c)] =
                work_range(c * chunk_size, std::min(total, (c + 1) * chunk_size));
        return results;
    }
    std::atomic<std::int64_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::int64_t c = next.fetch_add(1);
            if (c >= chunks) break;
            results[static_cast<std::size_t>(c)] =
                work_range(c * chunk_size, std::min(total, (c + 1) * chunk_size));
        }
    };
    std::vector<std::thread> pool;
    for (std::int64_t t = 0; t < std::min(hw, chunks); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return results;
}

// ---- report plumbing ---------------------------------------------------------

inline json make_report(const std::string& experiment, const ExperimentConfig& cfg, json results,
                        double wall_ms) {
    return json{{"schema_version", kReportSchemaVersion},
                {"experiment", experiment},
                {"config", cfg.to_json()},
                {"results", std::move(results)},
                {"wall_ms", wall_ms}};
}

// flat tables (arrays of uniform objects anywhere under the payload) -> CSV,
// one block per table; scalar leaves become a key,value table when no array
// tables exist
inline std::string report_to_csv(const json& report) {
    std::ostringstream out;
    const std::string label = report.contains("experiment")
                                  ? report.at("experiment").get<std::string>()
                                  : report.value("command", std::string("report"));
    out << "# " << label << " schema_version=" << report.value("schema_version", 0) << "\n";
    bool any_table = false;
    std::vector<std::pair<std::string, std::string>> scalars;
    std::function<void(const std::string&, const json&)> walk = [&](const std::string& name,
                                                                    const json& node) {
        if (node.is_object()) {
            for (auto it = node.begin(); it != node.end(); ++it)
                walk(name.empty() ? it.key() : name + "." + it.key(), it.value());
        } else if (node.is_array() && !node.empty() && node.front().is_object()) {
            any_table = true;
            out << "# table: " << name << "\n";
            std::vector<std::string> header;
            for (auto it = node.front().begin(); it != node.front().end(); ++it)
                header.push_back(it.key());
            for (std::size_t i = 0; i < header.size(); ++i)
                out << header[i] << (i + 1 < header.size() ? "," : "\n");
            for (const auto& row : node) {
                for (std::size_t i = 0; i < header.size(); ++i) {
                    const auto& cell = row.at(header[i]);
                    if (cell.is_string())
                        out << cell.get<std::string>();
                    else
                        out << cell.dump();
                    out << (i + 1 < header.size() ? "," : "\n");
                }
            }
        } else if (!node.is_array()) {
            scalars.emplace_back(name, node.is_string() ? node.get<std::string>() : node.dump());
        }
    };
    walk("", report.contains("results") ? report.at("results") : report);
    if (!any_table) {
        out << "field,value\n";
        for (const auto& [k, v] : scalars) out << k << "," << v << "\n";
    }
    return out.str();
}

inline void write_report(const json& report, const ExperimentConfig& cfg) {
    std::string payload =
        cfg.format == "csv" ? report_to_csv(report) : report.dump(2) + std::string("\n");
    if (cfg.out_path.empty()) {
        std::fputs(payload.c_str(), stdout);
    } else {
        std::ofstream out(cfg.out_path);
        if (!out) throw std::runtime_error("cannot open output file: " + cfg.out_path);
        out << payload;
    }
}

// ---- shared sampling helpers --------------------------------------------------

namespace detail {

// aggregate spacing lengths of the window 1 b2 .. bn 1 from success positions
inline void window_spacings(const std::vector<std::int64_t>& ones, std::int64_t n,
                            std::vector<std::pair<std::int64_t, std::int64_t>>& out) {
    out.clear();
    std::int64_t prev = 1;
    for (auto p : ones) {
        if (p > n) break;
        if (p == 1) continue;
        out.emplace_back(p - prev, 1);
        prev = p;
    }
    out.emplace_back(n + 1 - prev, 1);
    std::sort(out.begin(), out.end());
    std::size_t w = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (w > 0 && out[w - 1].first == out[i].first)
            out[w - 1].second += out[i].second;
        else
            out[w++] = out[i];
    }
    out.resize(w);
}

inline double log_invol_of_spacings(const std::vector<std::pair<std::int64_t, std::int64_t>>& sp) {
    double s = 0.0;
    for (const auto& [k, c] : sp)
        s += static_cast<double>(c) * std::log(static_cast<double>(k)) + log_v_factor(c, k);
    return s;
}

}  // namespace detail

// ---- paths -------------------------------------------------------------------

// W_n(t) and B_n(t) on a t-grid for one coupled sample: prefix sums of the
// window counts (with the V factors) and of the truncated limit counts
// (without), centered by (theta t^2/2) log^2 n and scaled by
// sqrt((theta/3) log^3 n). The t = 0 prefix is k <= floor(n^0) = 1.
struct PathSample {
    std::vector<double> w;
    std::vector<double> b;
};

inline PathSample log_invol_prefix(const SpacingSample& sample, const std::vector<double>& t_grid) {
    const double logn = std::log(static_cast<double>(sample.n));
    const double scale = std::sqrt(sample.theta / 3.0 * logn * logn * logn);
    PathSample out;
    out.w.resize(t_grid.size());
    out.b.resize(t_grid.size());
    const auto& cs = sample.c.counts().kv;
    const auto& zs = sample.z.kv;
    std::size_t ci = 0, zi = 0;
    double w_acc = 0.0, b_acc = 0.0;
    for (std::size_t g = 0; g < t_grid.size(); ++g) {
        const double t = t_grid[g];
        const auto j = static_cast<std::int64_t>(
            std::floor(std::pow(static_cast<double>(sample.n), t)));
        while (ci < cs.size() && cs[ci].first <= j) {
            w_acc += static_cast<double>(cs[ci].second) * std::log(static_cast<double>(cs[ci].first)) +
                     log_v_factor(cs[ci].second, cs[ci].first);
            ++ci;
        }
        while (zi < zs.size() && zs[zi].first <= j) {
            b_acc += static_cast<double>(zs[zi].second) * std::log(static_cast<double>(zs[zi].first));
            ++zi;
        }
        const double center = sample.theta * t * t / 2.0 * logn * logn;
        out.w[g] = (w_acc - center) / scale;
        out.b[g] = (b_acc - center) / scale;
    }
    return out;
}

// ---- experiments ---------------------------------------------------------------

// Scalar CLT: standardized log invol at each n of the grid, Kolmogorov
// distance to the normal cdf with and without the Edgeworth refinement, and
// the signed deviations on |x| <= 2. Samples are coupled across the n-grid
// (one success sequence per sample index) which sharpens cross-n trend
// comparisons without biasing any single-n statistic.
inline json clt_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::int64_t> grid = cfg.n_grid;
    const std::int64_t n_max = *std::max_element(grid.begin(), grid.end());

    struct Chunk {
        std::vector<std::vector<double>> w;  // per n-grid entry
    };
    std::vector<Normalizers> nz;
    for (auto n : grid) nz.push_back(normalizers(n, cfg.theta));

    auto work = [&](std::int64_t b, std::int64_t e) {
        Chunk ch;
        ch.w.resize(grid.size());
        std::vector<std::pair<std::int64_t, std::int64_t>> sp;
        for (std::int64_t i = b; i < e; ++i) {
            Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
            const auto ones = feller_success_positions(n_max, cfg.theta, rng, cfg.scan_limit);
            for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                detail::window_spacings(ones, grid[gi], sp);
                const double li = detail::log_invol_of_spacings(sp);
                ch.w[gi].push_back((li - nz[gi].mu) / nz[gi].sigma);
            }
        }
        return ch;
    };
    auto chunks = run_chunked<Chunk>(cfg.samples, 4096, cfg.threads,
                                     [&](std::int64_t b, std::int64_t e) { return work(b, e); });

    json per_n = json::array();
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        std::vector<double> w;
        w.reserve(static_cast<std::size_t>(cfg.samples));
        for (auto& ch : chunks) w.insert(w.end(), ch.w[gi].begin(), ch.w[gi].end());
        std::sort(w.begin(), w.end());
        MeanVar mv;
        for (double x : w) mv.add(x);
        const double n_value = static_cast<double>(grid[gi]);
        const double ks_plain = ks_distance(w, [](double x) { return phi_normal(x); });
        const bool has_edge = cfg.theta == 1.0;
        const double ks_edge =
            has_edge ? ks_distance(w, [&](double x) { return phi_normal(x) + edgeworth_term(x, n_value); })
                     : 0.0;
        json deviations = json::array();
        int agree = 0, points = 0;
        for (int xi = -10; xi <= 10; ++xi) {
            const double x = 0.2 * xi;
            const double dev = empirical_cdf(w, x) - phi_normal(x);
            const double target = 1.0 - x * x;
            const int sd = dev > 0 ? 1 : (dev < 0 ? -1 : 0);
            const int st = target > 0 ? 1 : (target < 0 ? -1 : 0);
            deviations.push_back(json{{"x", x}, {"deviation", dev}, {"sign_target", st}});
            ++points;
            if (sd == st) ++agree;
        }
        json entry{{"n", grid[gi]},
                   {"samples", cfg.samples},
                   {"mu_n", nz[gi].mu},
                   {"sigma_n", nz[gi].sigma},
                   {"ks", ks_plain},
                   {"mean_w", mv.mean()},
                   {"var_w", mv.variance()},
                   {"sign_agreements", agree},
                   {"sign_points", points},
                   {"deviations", deviations}};
        if (has_edge) entry["ks_edgeworth"] = ks_edge;
        per_n.push_back(std::move(entry));
    }
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return make_report("clt", cfg, json{{"rows", std::move(per_n)}}, wall);
}

// Functional statistics: E sup_t |W_n - B_n| over the fine grid and the
// empirical covariance of W_n on cov_grid, against min(s,t)^3.
inline json functional_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto& grid = cfg.n_grid;
    const std::int64_t n_max = *std::max_element(grid.begin(), grid.end());
    if (cfg.t_points < 2) throw std::invalid_argument("functional_experiment: need t_points >= 2");

    std::vector<double> t_fine(static_cast<std::size_t>(cfg.t_points));
    for (std::int64_t i = 0; i < cfg.t_points; ++i)
        t_fine[static_cast<std::size_t>(i)] =
            static_cast<double>(i) / static_cast<double>(cfg.t_points - 1);
    const auto& t_cov = cfg.cov_grid;
    const std::size_t C = t_cov.size();

    struct Chunk {
        std::vector<double> sup_sum;                 // per n
        std::vector<std::vector<double>> cov_sum;    // per n: C*C cross products
        std::vector<std::vector<double>> mean_sum;   // per n: C means
        std::int64_t count = 0;
    };

    auto work = [&](std::int64_t b, std::int64_t e) {
        Chunk ch;
        ch.sup_sum.assign(grid.size(), 0.0);
        ch.cov_sum.assign(grid.size(), std::vector<double>(C * C, 0.0));
        ch.mean_sum.assign(grid.size(), std::vector<double>(C, 0.0));
        for (std::int64_t i = b; i < e; ++i) {
            Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
            auto ones = feller_success_positions(cfg.horizon_factor * n_max, cfg.theta, rng,
                                                 cfg.scan_limit);
            for (std::size_t gi = 0; gi < grid.size(); ++gi) {
                const std::int64_t n = grid[gi];
                // truncate to this n's horizon, then rebuild the coupled pair
                std::vector<std::int64_t> pref;
                for (auto p : ones) {
                    if (p > cfg.horizon_factor * n) break;
                    pref.push_back(p);
                }
                auto s = make_spacing_sample(n, cfg.horizon_factor * n, cfg.theta, std::move(pref));
                auto fine = log_invol_prefix(s, t_fine);
                double sup = 0.0;
                for (std::size_t g = 0; g < t_fine.size(); ++g)
                    sup = std::max(sup, std::abs(fine.w[g] - fine.b[g]));
                ch.sup_sum[gi] += sup;
                auto cov_pts = log_invol_prefix(s, t_cov);
                for (std::size_t a = 0; a < C; ++a) {
                    ch.mean_sum[gi][a] += cov_pts.w[a];
                    for (std::size_t bidx = 0; bidx < C; ++bidx)
                        ch.cov_sum[gi][a * C + bidx] += cov_pts.w[a] * cov_pts.w[bidx];
                }
            }
            ++ch.count;
        }
        return ch;
    };
    auto chunks = run_chunked<Chunk>(cfg.samples, 1024, cfg.threads,
                                     [&](std::int64_t b, std::int64_t e) { return work(b, e); });

    json per_n = json::array();
    for (std::size_t gi = 0; gi < grid.size(); ++gi) {
        double sup_sum = 0.0;
        std::vector<double> mean(C, 0.0), cross(C * C, 0.0);
        std::int64_t total = 0;
        for (const auto& ch : chunks) {
            if (ch.count == 0) continue;
            sup_sum += ch.sup_sum[gi];
            total += ch.count;
            for (std::size_t a = 0; a < C; ++a) mean[a] += ch.mean_sum[gi][a];
            for (std::size_t a = 0; a < C * C; ++a) cross[a] += ch.cov_sum[gi][a];
        }
        for (auto& m : mean) m /= static_cast<double>(total);
        json cov_rows = json::array();
        double max_dev = 0.0;
        for (std::size_t a = 0; a < C; ++a)
            for (std::size_t bidx = a; bidx < C; ++bidx) {
                const double cov =
                    cross[a * C + bidx] / static_cast<double>(total) - mean[a] * mean[bidx];
                const double mn = std::min(t_cov[a], t_cov[bidx]);
                const double target = mn * mn * mn;
                max_dev = std::max(max_dev, std::abs(cov - target));
                cov_rows.push_back(json{{"s", t_cov[a]},
                                        {"t", t_cov[bidx]},
                                        {"cov", cov},
                                        {"target", target},
                                        {"deviation", cov - target}});
            }
        per_n.push_back(json{{"n", grid[gi]},
                             {"paths", total},
                             {"e_sup_w_minus_b", sup_sum / static_cast<double>(total)},
                             {"max_cov_deviation", max_dev},
                             {"cov", std::move(cov_rows)}});
    }
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return make_report("paths", cfg, json{{"rows", std::move(per_n)}}, wall);
}

// Typical-set concentration: empirical P(sigma not in P_xi) per xi, plus an
// optional check of the typical-value bound when (xi1, xi2) are configured.
inline json membership_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::int64_t n = cfg.n_grid.front();
    const auto& xis = cfg.xi_grid;
    const bool with_bound = cfg.xi1 > 0 && cfg.xi2 > 0;
    double log_bound = 0.0, guarantee = 0.0;
    if (with_bound) {
        const auto sb = skew_bound(n, cfg.xi1, cfg.xi2);
        log_bound = sb.log_bound;
        guarantee = sb.prob_guarantee;
    }

    struct Chunk {
        std::vector<std::int64_t> not_in;
        std::int64_t below_bound = 0;
        std::int64_t count = 0;
    };
    auto work = [&](std::int64_t b, std::int64_t e) {
        Chunk ch;
        ch.not_in.assign(xis.size(), 0);
        std::vector<std::pair<std::int64_t, std::int64_t>> sp;
        for (std::int64_t i = b; i < e; ++i) {
            Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
            const auto ones = feller_success_positions(n, cfg.theta, rng, cfg.scan_limit);
            detail::window_spacings(ones, n, sp);
            SparseCounts counts;
            counts.kv = sp;
            for (std::size_t x = 0; x < xis.size(); ++x)
                if (!in_typical_set(counts, xis[x])) ++ch.not_in[x];
            if (with_bound && detail::log_invol_of_spacings(sp) < log_bound) ++ch.below_bound;
            ++ch.count;
        }
        return ch;
    };
    auto chunks = run_chunked<Chunk>(cfg.samples, 4096, cfg.threads,
                                     [&](std::int64_t b, std::int64_t e) { return work(b, e); });

    std::vector<std::int64_t> not_in(xis.size(), 0);
    std::int64_t below = 0, total = 0;
    for (const auto& ch : chunks) {
        for (std::size_t x = 0; x < xis.size(); ++x) not_in[x] += ch.not_in[x];
        below += ch.below_bound;
        total += ch.count;
    }
    json rows = json::array();
    for (std::size_t x = 0; x < xis.size(); ++x) {
        const double p = static_cast<double>(not_in[x]) / static_cast<double>(total);
        rows.push_back(json{{"xi", xis[x]},
                            {"p_not_typical", p},
                            {"xi_times_p", static_cast<double>(xis[x]) * p},
                            {"violations", not_in[x]},
                            {"samples", total}});
    }
    json results{{"n", n}, {"rows", std::move(rows)}};
    if (with_bound) {
        results["skew_check"] = json{{"xi1", cfg.xi1},
                                     {"xi2", cfg.xi2},
                                     {"log_bound", log_bound},
                                     {"prob_guarantee", guarantee},
                                     {"below_bound_fraction",
                                      static_cast<double>(below) / static_cast<double>(total)}};
    }
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return make_report("membership", cfg, std::move(results), wall);
}

// Sample-level inequality suite. Each sample asserts:
//  (a) invol >= B,
//  (b) log invol - log B <= sum c_k^2/(2k),
//  (c) the coupling sandwich coordinatewise for k <= n,
//  (d) the domination inequality invol_j(b) <= invol_j(a) n^{|b-a|_1} prod exp(b_k^2/2k)
//      for a random coordinatewise thinning a of b = C^(n), at every breakpoint j.
// All comparisons in log space with a 1e-9 safety margin; violations must be 0.
inline json inequality_suite(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::int64_t n = cfg.n_grid.front();
    std::vector<double> thetas = cfg.theta_grid.empty() ? std::vector<double>{cfg.theta}
                                                        : cfg.theta_grid;
    constexpr double kMargin = 1e-9;

    json per_theta = json::array();
    for (std::size_t ti = 0; ti < thetas.size(); ++ti) {
        const double theta = thetas[ti];
        struct Chunk {
            std::int64_t lower = 0, upper = 0, sandwich = 0, domination = 0, count = 0;
            json offenders = json::array();
            void offend(const char* what, std::uint64_t seed, std::uint64_t stream,
                        std::int64_t n_, double theta_) {
                if (offenders.size() < 5)
                    offenders.push_back(json{{"check", what},
                                             {"seed", seed},
                                             {"stream", stream},
                                             {"n", n_},
                                             {"theta", theta_}});
            }
        };
        const std::uint64_t seed_base = cfg.seed + 1000003 * ti;
        auto work = [&](std::int64_t b, std::int64_t e) {
            Chunk ch;
            for (std::int64_t i = b; i < e; ++i) {
                const auto stream = static_cast<std::uint64_t>(i);
                Rng rng(seed_base, stream);
                auto s = feller_sample(n, theta, cfg.horizon_factor, rng, cfg.scan_limit);
                // (a) and (b)
                double log_ratio = 0.0, quad = 0.0;
                for (const auto& [k, c] : s.c.counts().kv) {
                    log_ratio += log_v_factor(c, k);
                    quad += static_cast<double>(c) * static_cast<double>(c) /
                            (2.0 * static_cast<double>(k));
                }
                if (log_ratio < -kMargin) {
                    ++ch.lower;
                    ch.offend("invol>=B", seed_base, stream, n, theta);
                }
                if (log_ratio > quad + kMargin) {
                    ++ch.upper;
                    ch.offend("log-ratio", seed_base, stream, n, theta);
                }
                // (c) sandwich over the union of supports and indicator keys
                {
                    const auto zn = s.z_after_n();
                    const auto L = s.left_gap();
                    const auto R = s.right_gap();
                    std::vector<std::int64_t> keys;
                    for (const auto& [k, c] : s.c.counts().kv) keys.push_back(k);
                    for (const auto& [k, c] : s.z.kv) keys.push_back(k);
                    for (const auto& [k, c] : zn.kv) keys.push_back(k);
                    keys.push_back(L);
                    if (R) keys.push_back(L + *R - 1);
                    std::sort(keys.begin(), keys.end());
                    keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
                    for (auto k : keys) {
                        if (k < 1 || k > n) continue;
                        const auto ck = s.c.count(k);
                        const std::int64_t hi = s.z.at(k) + (L == k ? 1 : 0);
                        const std::int64_t lo =
                            s.z.at(k) - zn.at(k) - ((R && L + *R == k + 1) ? 1 : 0);
                        if (ck < lo || ck > hi) {
                            ++ch.sandwich;
                            ch.offend("sandwich", seed_base, stream, n, theta);
                            break;
                        }
                    }
                }
                // (d) domination with a binomial thinning
                {
                    const auto& bkv = s.c.counts().kv;
                    std::vector<std::pair<std::int64_t, std::int64_t>> akv;
                    std::int64_t l1 = 0;
                    for (const auto& [k, c] : bkv) {
                        const auto ak = static_cast<std::int64_t>(
                            rng.binomial_half(static_cast<std::uint64_t>(c)));
                        akv.emplace_back(k, ak);
                        l1 += c - ak;
                    }
                    double quad_b = quad;
                    const double budget = static_cast<double>(l1) *
                                              std::log(static_cast<double>(n)) +
                                          quad_b;
                    double lb = 0.0, la = 0.0;
                    bool bad = false;
                    for (std::size_t idx = 0; idx < bkv.size() && !bad; ++idx) {
                        lb += static_cast<double>(bkv[idx].second) *
                                  std::log(static_cast<double>(bkv[idx].first)) +
                              log_v_factor(bkv[idx].second, bkv[idx].first);
                        la += static_cast<double>(akv[idx].second) *
                                  std::log(static_cast<double>(akv[idx].first)) +
                              log_v_factor(akv[idx].second, akv[idx].first);
                        if (lb > la + budget + kMargin) bad = true;
                    }
                    if (bad) {
                        ++ch.domination;
                        ch.offend("domination", seed_base, stream, n, theta);
                    }
                }
                ++ch.count;
            }
            return ch;
        };
        auto chunks = run_chunked<Chunk>(cfg.samples, 4096, cfg.threads,
                                         [&](std::int64_t b, std::int64_t e) { return work(b, e); });
        Chunk total;
        for (const auto& ch : chunks) {
            total.lower += ch.lower;
            total.upper += ch.upper;
            total.sandwich += ch.sandwich;
            total.domination += ch.domination;
            total.count += ch.count;
            for (const auto& o : ch.offenders)
                if (total.offenders.size() < 10) total.offenders.push_back(o);
        }
        per_theta.push_back(json{{"theta", theta},
                                 {"samples", total.count},
                                 {"violations_lower_bound", total.lower},
                                 {"violations_log_ratio", total.upper},
                                 {"violations_sandwich", total.sandwich},
                                 {"violations_domination", total.domination},
                                 {"offending_samples", total.offenders}});
    }
    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return make_report("inequalities", cfg, json{{"n", cfg.n_grid.front()}, {"rows", std::move(per_theta)}},
                       wall);
}

// Composition bias: cycle counts of tau2 o tau1 for independent uniform
// involutions versus the X + 2Y_k limit (mean 1 + 1/k), with the exact
// finite-n means (f_{n-k} + f_{n-2k}/k)/f_n from the theta = 1 series as a
// reference column, and the exact t_6^2 identity.
inline json composition_bias_experiment(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::int64_t n = cfg.n_grid.front();
    const std::int64_t kmax = cfg.kmax;

    struct Chunk {
        std::vector<MeanVar> stats;
    };
    auto work = [&](std::int64_t b, std::int64_t e) {
        Chunk ch;
        ch.stats.assign(static_cast<std::size_t>(kmax + 1), MeanVar{});
        const InvolutionSampler sampler(n);
        std::vector<std::int64_t> counts(static_cast<std::size_t>(kmax + 1));
        std::vector<bool> seen(static_cast<std::size_t>(n));
        for (std::int64_t i = b; i < e; ++i) {
            Rng rng(cfg.seed, static_cast<std::uint64_t>(i));
            const auto tau1 = sampler.sample(rng);
            const auto tau2 = sampler.sample(rng);
            std::fill(counts.begin(), counts.end(), 0);
            std::fill(seen.begin(), seen.end(), false);
            for (std::int32_t v = 0; v < n; ++v) {
                if (seen[static_cast<std::size_t>(v)]) continue;
                std::int64_t len = 0;
                std::int32_t j = v;
                while (!seen[static_cast<std::size_t>(j)]) {
                    seen[static_cast<std::size_t>(j)] = true;
                    j = tau2(tau1(j));
                    ++len;
                }
                if (len <= kmax) ++counts[static_cast<std::size_t>(len)];
            }
            for (std::int64_t k = 1; k <= kmax; ++k)
                ch.stats[static_cast<std::size_t>(k)].add(
                    static_cast<double>(counts[static_cast<std::size_t>(k)]));
        }
        return ch;
    };
    auto chunks = run_chunked<Chunk>(cfg.samples, 1024, cfg.threads,
                                     [&](std::int64_t b, std::int64_t e) { return work(b, e); });
    std::vector<MeanVar> stats(static_cast<std::size_t>(kmax + 1));
    for (const auto& ch : chunks)
        for (std::size_t k = 1; k < stats.size(); ++k) stats[k].merge(ch.stats[k]);

    // exact finite-n reference from the mean generating series at theta = 1
    auto F = mean_generating_series<RealDomain>(Real(1), static_cast<std::size_t>(n));
    json rows = json::array();
    for (std::int64_t k = 1; k <= kmax; ++k) {
        const auto& mv = stats[static_cast<std::size_t>(k)];
        double finite_n = 0.0;
        if (n - k >= 0) {
            Real v = F[static_cast<std::size_t>(n - k)] / F[static_cast<std::size_t>(n)];
            if (n - 2 * k >= 0)
                v += F[static_cast<std::size_t>(n - 2 * k)] / F[static_cast<std::size_t>(n)] /
                     static_cast<double>(k);
            finite_n = v.convert_to<double>();
        }
        rows.push_back(json{{"k", k},
                            {"mean", mv.mean()},
                            {"se", mv.standard_error()},
                            {"limit_target", 1.0 + 1.0 / static_cast<double>(k)},
                            {"finite_n_mean", finite_n}});
    }
    // ordered involution pairs of [6] biject with (sigma, factorization) pairs
    BigInt sum6 = 0;
    enumerate_cycle_types(6, [&](const CycleType& c, const BigInt& cls) { sum6 += cls * invol(c); });
    const bool t6 = (sum6 == telephone(6) * telephone(6));

    const double wall =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return make_report("compose-bias", cfg,
                       json{{"n", n},
                            {"pairs", cfg.samples},
                            {"rows", std::move(rows)},
                            {"t6_squared_identity", t6}},
                       wall);
}

}  // namespace involab
