#pragma once

// Config-driven ensemble runner and the pure record transformations built
// on top of its persisted output.
//
// A run writes one append-only records CSV (one row per replicate and
// level, in a fixed deterministic order) plus one summary CSV recomputed
// from the records after all replicates finish.  Re-running an identical
// config reproduces the records byte for byte; interrupting a run and
// resuming appends exactly the rows the interrupted run would have written
// next.  Replicates execute on a small worker pool; a single ordered
// appender serializes all file writes.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "lkc/chaos.hpp"
#include "lkc/errors.hpp"
#include "lkc/field.hpp"
#include "lkc/geometry.hpp"
#include "lkc/io.hpp"
#include "lkc/lattice.hpp"
#include "lkc/rng.hpp"
#include "lkc/sampler.hpp"

namespace lkc {

inline constexpr const char* kWorkersEnvVar = "LKCWAVE_WORKERS";

/// Worker count from the environment, 1 if unset or unusable.
inline int default_worker_count() {
    const char* s = std::getenv(kWorkersEnvVar);
    if (!s) return 1;
    char* end = nullptr;
    long v = std::strtol(s, &end, 10);
    if (end == s || *end != '\0' || v < 1 || v > 1024) return 1;
    return static_cast<int>(v);
}

// ---------------------------------------------------------------------------
// config
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    Manifold manifold = Manifold::Torus;
    std::vector<long long> n_list;
    std::vector<double> levels;
    int replicates = 0;
    std::uint64_t seed = 0;
    int resolution = 0;                          // 0 = per-n default policy
    std::string boundary_estimator = "marching"; // or "eps"
    double eps = 0.2;
    std::string output_dir = ".";

    bool operator==(const ExperimentConfig& o) const {
        return manifold == o.manifold && n_list == o.n_list && levels == o.levels &&
               replicates == o.replicates && seed == o.seed &&
               resolution == o.resolution &&
               boundary_estimator == o.boundary_estimator && eps == o.eps &&
               output_dir == o.output_dir;
    }
};

inline std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "manifold = " << manifold_name(cfg.manifold) << "\n";
    out << "n_list = ";
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
        out << (i ? "," : "") << cfg.n_list[i];
    out << "\n";
    out << "levels = ";
    for (std::size_t i = 0; i < cfg.levels.size(); ++i)
        out << (i ? "," : "") << format_double(cfg.levels[i]);
    out << "\n";
    out << "replicates = " << cfg.replicates << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "resolution = " << cfg.resolution << "\n";
    out << "boundary_estimator = " << cfg.boundary_estimator << "\n";
    out << "eps = " << format_double(cfg.eps) << "\n";
    out << "output_dir = " << cfg.output_dir << "\n";
    return out.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

} // namespace detail

/// Parse flat `key = value` text.  Unknown keys, duplicate keys, missing
/// required keys, and untyped garbage all fail fast with InvalidConfig.
inline ExperimentConfig parse_config(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw InvalidConfig("config line without '=': " + line);
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string val = detail::trim(line.substr(eq + 1));
        if (key.empty()) throw InvalidConfig("config line with empty key");
        if (!kv.emplace(key, val).second)
            throw InvalidConfig("duplicate config key '" + key + "'");
    }

    auto take = [&](const char* key) {
        auto it = kv.find(key);
        std::string v;
        if (it != kv.end()) {
            v = it->second;
            kv.erase(it);
        }
        return v;
    };
    auto require = [&](const char* key) {
        auto it = kv.find(key);
        if (it == kv.end())
            throw InvalidConfig(std::string("missing config key '") + key + "'");
        std::string v = it->second;
        kv.erase(it);
        return v;
    };
    auto as_ll = [](const std::string& v, const char* key) {
        try {
            return parse_ll(v, key);
        } catch (const MalformedRecord& e) {
            throw InvalidConfig(e.what());
        }
    };
    auto as_double = [](const std::string& v, const char* key) {
        try {
            return parse_double(v, key);
        } catch (const MalformedRecord& e) {
            throw InvalidConfig(e.what());
        }
    };

    const std::string m = require("manifold");
    if (m == "torus")
        cfg.manifold = Manifold::Torus;
    else if (m == "sphere")
        cfg.manifold = Manifold::Sphere;
    else
        throw InvalidConfig("manifold must be torus or sphere, got '" + m + "'");

    for (const std::string& tok : split_csv_line(require("n_list")))
        cfg.n_list.push_back(as_ll(detail::trim(tok), "n_list"));
    for (const std::string& tok : split_csv_line(require("levels")))
        cfg.levels.push_back(as_double(detail::trim(tok), "levels"));
    cfg.replicates = static_cast<int>(as_ll(require("replicates"), "replicates"));
    {
        const std::string v = require("seed");
        try {
            cfg.seed = parse_u64(v, "seed");
        } catch (const MalformedRecord& e) {
            throw InvalidConfig(e.what());
        }
    }
    if (std::string v = take("resolution"); !v.empty())
        cfg.resolution = static_cast<int>(as_ll(v, "resolution"));
    if (std::string v = take("boundary_estimator"); !v.empty()) {
        if (v != "marching" && v != "eps")
            throw InvalidConfig("boundary_estimator must be marching or eps");
        cfg.boundary_estimator = v;
    }
    if (std::string v = take("eps"); !v.empty()) cfg.eps = as_double(v, "eps");
    if (std::string v = take("output_dir"); !v.empty()) cfg.output_dir = v;

    if (!kv.empty())
        throw InvalidConfig("unknown config key '" + kv.begin()->first + "'");
    return cfg;
}

inline ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoFailure("parse_config_file: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

/// Fail-fast semantic checks; called by run_ensemble before any work.
inline void validate_config(const ExperimentConfig& cfg) {
    if (cfg.replicates < 1) throw InvalidConfig("replicates must be >= 1");
    if (cfg.n_list.empty()) throw InvalidConfig("n_list must be non-empty");
    if (cfg.levels.empty()) throw InvalidConfig("levels must be non-empty");
    for (std::size_t i = 0; i < cfg.n_list.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.n_list.size(); ++j)
            if (cfg.n_list[i] == cfg.n_list[j])
                throw InvalidConfig("duplicate n in n_list");
    for (std::size_t i = 0; i < cfg.levels.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.levels.size(); ++j)
            if (cfg.levels[i] == cfg.levels[j])
                throw InvalidConfig("duplicate level in levels");
    for (long long n : cfg.n_list) {
        if (cfg.manifold == Manifold::Torus) {
            if (n < 1 || !is_representable(n))
                throw InvalidConfig("torus n = " + std::to_string(n) +
                                    " is not a sum of two squares");
            if (cfg.resolution > 0 && cfg.resolution < torus_min_resolution(n))
                throw InvalidConfig("resolution below the exact-quadrature floor " +
                                    std::to_string(torus_min_resolution(n)) +
                                    " for n = " + std::to_string(n));
        } else {
            if (n < 2)
                throw InvalidConfig("sphere needs degree n >= 2, got " +
                                    std::to_string(n));
            if (cfg.resolution > 0 &&
                cfg.resolution < sphere_min_resolution(static_cast<int>(n)))
                throw InvalidConfig("resolution below 4n for n = " + std::to_string(n));
        }
    }
    if (cfg.boundary_estimator == "eps" && cfg.eps <= 0.0)
        throw InvalidConfig("eps estimator needs eps > 0");
}

// ---------------------------------------------------------------------------
// records
// ---------------------------------------------------------------------------

struct EnsembleRecord {
    int replicate = 0;
    std::uint64_t seed = 0;   // per-field stream seed
    long long n = 0;
    double u = 0.0;
    double L0 = 0.0, L1 = 0.0, L2 = 0.0;
    double int_h2 = 0.0;      // Int H_2(f), level-independent
    double area_q2 = 0.0;     // second chaos of the area at u
    double bl_deriv = 0.0, bl_reduced = 0.0;
    double epc_deriv = 0.0;   // nan where the derivative form is undefined
    double epc_reduced = 0.0;
};

inline constexpr const char* kRecordsHeader =
    "replicate,seed,n,u,L0,L1,L2,int_h2,area_q2,bl_deriv,bl_reduced,"
    "epc_deriv,epc_reduced";

inline std::string format_record(const EnsembleRecord& r) {
    std::ostringstream out;
    out << r.replicate << ',' << r.seed << ',' << r.n << ',' << format_double(r.u)
        << ',' << format_double(r.L0) << ',' << format_double(r.L1) << ','
        << format_double(r.L2) << ',' << format_double(r.int_h2) << ','
        << format_double(r.area_q2) << ',' << format_double(r.bl_deriv) << ','
        << format_double(r.bl_reduced) << ',' << format_double(r.epc_deriv) << ','
        << format_double(r.epc_reduced);
    return out.str();
}

inline EnsembleRecord parse_record(const std::string& line) {
    const std::vector<std::string> c = split_csv_line(line);
    if (c.size() != 13)
        throw MalformedRecord("record has " + std::to_string(c.size()) +
                              " columns, expected 13");
    EnsembleRecord r;
    r.replicate = static_cast<int>(parse_ll(c[0], "replicate"));
    r.seed = parse_u64(c[1], "seed");
    r.n = parse_ll(c[2], "n");
    r.u = parse_double(c[3], "u");
    r.L0 = parse_double(c[4], "L0");
    r.L1 = parse_double(c[5], "L1");
    r.L2 = parse_double(c[6], "L2");
    r.int_h2 = parse_double(c[7], "int_h2");
    r.area_q2 = parse_double(c[8], "area_q2");
    r.bl_deriv = parse_double(c[9], "bl_deriv");
    r.bl_reduced = parse_double(c[10], "bl_reduced");
    r.epc_deriv = parse_double(c[11], "epc_deriv");
    r.epc_reduced = parse_double(c[12], "epc_reduced");
    return r;
}

struct RecordsFile {
    ExperimentConfig config; // parsed back from the `# cfg:` echo
    std::vector<EnsembleRecord> records;
};

/// Read a records CSV.  Strict mode (the default, used by the pure
/// transformations) rejects any malformed row and empty files; resume mode
/// stops at the first unparsable row instead, treating it as a torn tail
/// from an interrupted writer.
inline RecordsFile read_records(const std::string& path, bool strict = true) {
    std::ifstream in(path);
    if (!in) throw IoFailure("read_records: cannot open " + path);
    RecordsFile rf;
    std::string line, cfg_text;
    bool saw_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.rfind("# cfg: ", 0) == 0) {
            cfg_text += line.substr(7);
            cfg_text += "\n";
            continue;
        }
        if (line == kRecordsHeader) {
            saw_header = true;
            break;
        }
        throw MalformedRecord("read_records: unexpected line '" + line + "'");
    }
    if (!saw_header) throw MalformedRecord("read_records: missing column header");
    try {
        rf.config = parse_config(cfg_text);
    } catch (const InvalidConfig& e) {
        throw MalformedRecord(std::string("read_records: bad config echo: ") +
                              e.what());
    }
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            rf.records.push_back(parse_record(line));
        } catch (const MalformedRecord&) {
            if (strict) throw;
            break;
        }
    }
    if (strict && rf.records.empty())
        throw MalformedRecord("read_records: no records in " + path);
    return rf;
}

// ---------------------------------------------------------------------------
// summary and plot data (pure transformations of stored records)
// ---------------------------------------------------------------------------

struct SummaryRow {
    long long n = 0;
    double u = 0.0;
    int replicates = 0;
    double mean_L0 = 0.0, var_L0 = 0.0;
    double mean_L1 = 0.0, var_L1 = 0.0;
    double mean_L2 = 0.0, var_L2 = 0.0;
    double var_int_h2 = 0.0;
    double expected_var_int_h2 = 0.0;
    double corr_L2_area_q2 = 0.0;
    double corr_L1_bl_reduced = 0.0;
    double corr_L0_epc_reduced = 0.0;
    double bl_pathwise_max = 0.0;
    double epc_pathwise_max = 0.0; // nan when the derivative form is absent
    bool bl_pass = false;
    bool epc_pass = false;
};

namespace detail {

inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
}

inline double var_of(const std::vector<double>& v) {
    if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / double(v.size() - 1);
}

inline double corr_of(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() < 2 || a.size() != b.size())
        return std::numeric_limits<double>::quiet_NaN();
    const double ma = mean_of(a), mb = mean_of(b);
    double saa = 0, sbb = 0, sab = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        saa += (a[i] - ma) * (a[i] - ma);
        sbb += (b[i] - mb) * (b[i] - mb);
        sab += (a[i] - ma) * (b[i] - mb);
    }
    if (saa <= 0.0 || sbb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
    return sab / std::sqrt(saa * sbb);
}

} // namespace detail

/// Theoretical Var(Int H_2(f)): 2/N_n on the torus, 32 pi^2/(2n+1) on the
/// sphere.
inline double expected_var_int_h2(Manifold m, long long n) {
    if (m == Manifold::Torus)
        return 2.0 / double(enumerate_frequencies(n).multiplicity);
    return 32.0 * M_PI * M_PI / (2.0 * double(n) + 1.0);
}

/// Group records by (n, u) and reduce.  Sorting first makes the result
/// independent of record order.
inline std::vector<SummaryRow> summarize(const RecordsFile& rf) {
    if (rf.records.empty()) throw MalformedRecord("summarize: no records");
    std::map<std::pair<long long, double>, std::vector<EnsembleRecord>> groups;
    for (const EnsembleRecord& r : rf.records)
        groups[{r.n, r.u}].push_back(r);

    const double tol = rf.config.manifold == Manifold::Torus ? kPathwiseTolTorus
                                                             : kPathwiseTolSphere;
    std::vector<SummaryRow> rows;
    for (auto& [key, recs] : groups) {
        std::sort(recs.begin(), recs.end(),
                  [](const EnsembleRecord& a, const EnsembleRecord& b) {
                      return a.replicate < b.replicate;
                  });
        SummaryRow s;
        s.n = key.first;
        s.u = key.second;
        s.replicates = static_cast<int>(recs.size());
        std::vector<double> l0, l1, l2, ih2, aq2, blr, epr;
        for (const EnsembleRecord& r : recs) {
            l0.push_back(r.L0);
            l1.push_back(r.L1);
            l2.push_back(r.L2);
            ih2.push_back(r.int_h2);
            aq2.push_back(r.area_q2);
            blr.push_back(r.bl_reduced);
            epr.push_back(r.epc_reduced);
        }
        s.mean_L0 = detail::mean_of(l0);
        s.var_L0 = detail::var_of(l0);
        s.mean_L1 = detail::mean_of(l1);
        s.var_L1 = detail::var_of(l1);
        s.mean_L2 = detail::mean_of(l2);
        s.var_L2 = detail::var_of(l2);
        s.var_int_h2 = detail::var_of(ih2);
        s.expected_var_int_h2 = expected_var_int_h2(rf.config.manifold, s.n);
        s.corr_L2_area_q2 = detail::corr_of(l2, aq2);
        s.corr_L1_bl_reduced = detail::corr_of(l1, blr);
        s.corr_L0_epc_reduced = detail::corr_of(l0, epr);
        double blmax = 0.0, epmax = 0.0;
        bool ep_defined = false;
        for (const EnsembleRecord& r : recs) {
            blmax = std::max(blmax, std::fabs(r.bl_deriv - r.bl_reduced) /
                                        (1.0 + std::fabs(r.bl_reduced)));
            if (!std::isnan(r.epc_deriv)) {
                ep_defined = true;
                epmax = std::max(epmax, std::fabs(r.epc_deriv - r.epc_reduced) /
                                            (1.0 + std::fabs(r.epc_reduced)));
            }
        }
        s.bl_pathwise_max = blmax;
        s.bl_pass = blmax <= tol;
        if (ep_defined) {
            s.epc_pathwise_max = epmax;
            s.epc_pass = epmax <= tol;
        } else {
            s.epc_pathwise_max = std::numeric_limits<double>::quiet_NaN();
            s.epc_pass = true; // vacuous: no derivative form stored
        }
        rows.push_back(s);
    }
    return rows;
}

inline constexpr const char* kSummaryHeader =
    "n,u,replicates,mean_L0,var_L0,mean_L1,var_L1,mean_L2,var_L2,"
    "var_int_h2,expected_var_int_h2,corr_L2_area_q2,corr_L1_bl_reduced,"
    "corr_L0_epc_reduced,bl_pathwise_max,epc_pathwise_max,bl_pass,epc_pass";

inline std::string format_summary_row(const SummaryRow& s) {
    std::ostringstream out;
    out << s.n << ',' << format_double(s.u) << ',' << s.replicates << ','
        << format_double(s.mean_L0) << ',' << format_double(s.var_L0) << ','
        << format_double(s.mean_L1) << ',' << format_double(s.var_L1) << ','
        << format_double(s.mean_L2) << ',' << format_double(s.var_L2) << ','
        << format_double(s.var_int_h2) << ','
        << format_double(s.expected_var_int_h2) << ','
        << format_double(s.corr_L2_area_q2) << ','
        << format_double(s.corr_L1_bl_reduced) << ','
        << format_double(s.corr_L0_epc_reduced) << ','
        << format_double(s.bl_pathwise_max) << ','
        << format_double(s.epc_pathwise_max) << ',' << (s.bl_pass ? 1 : 0) << ','
        << (s.epc_pass ? 1 : 0);
    return out.str();
}

inline void write_summary_csv(const std::vector<SummaryRow>& rows,
                              const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("write_summary_csv: cannot open " + path);
    out << kSummaryHeader << "\n";
    for (const SummaryRow& s : rows) out << format_summary_row(s) << "\n";
    if (!out) throw IoFailure("write_summary_csv: write failed for " + path);
}

/// One plot-ready row per (n, u) pair: the variance-law figure, the
/// correlation figure, and the LKC-means-vs-level figure share it.
struct PlotRow {
    long long n = 0;
    double u = 0.0;
    double eigenvalue = 0.0;
    double var_int_h2 = 0.0;
    double expected_var_int_h2 = 0.0;
    double var_ratio = 0.0;
    double corr_L2_area_q2 = 0.0;
    double corr_L1_bl_reduced = 0.0;
    double corr_L0_epc_reduced = 0.0;
    double mean_L0 = 0.0, mean_L1 = 0.0, mean_L2 = 0.0;
    double expected_mean_L2 = 0.0; // (1 - Phi(u)) * area(M)
};

inline std::vector<PlotRow> emit_plotdata(const RecordsFile& rf) {
    const std::vector<SummaryRow> sums = summarize(rf);
    const double area = rf.config.manifold == Manifold::Torus ? 1.0 : 4.0 * M_PI;
    std::vector<PlotRow> rows;
    for (const SummaryRow& s : sums) {
        PlotRow p;
        p.n = s.n;
        p.u = s.u;
        p.eigenvalue = rf.config.manifold == Manifold::Torus
                           ? 4.0 * M_PI * M_PI * double(s.n)
                           : double(s.n) * (s.n + 1.0);
        p.var_int_h2 = s.var_int_h2;
        p.expected_var_int_h2 = s.expected_var_int_h2;
        p.var_ratio = s.var_int_h2 / s.expected_var_int_h2;
        p.corr_L2_area_q2 = s.corr_L2_area_q2;
        p.corr_L1_bl_reduced = s.corr_L1_bl_reduced;
        p.corr_L0_epc_reduced = s.corr_L0_epc_reduced;
        p.mean_L0 = s.mean_L0;
        p.mean_L1 = s.mean_L1;
        p.mean_L2 = s.mean_L2;
        p.expected_mean_L2 = (1.0 - gaussian_cdf(s.u)) * area;
        rows.push_back(p);
    }
    return rows;
}

inline constexpr const char* kPlotdataHeader =
    "n,u,eigenvalue,var_int_h2,expected_var_int_h2,var_ratio,"
    "corr_L2_area_q2,corr_L1_bl_reduced,corr_L0_epc_reduced,"
    "mean_L0,mean_L1,mean_L2,expected_mean_L2";

inline std::string format_plot_row(const PlotRow& p) {
    std::ostringstream out;
    out << p.n << ',' << format_double(p.u) << ',' << format_double(p.eigenvalue)
        << ',' << format_double(p.var_int_h2) << ','
        << format_double(p.expected_var_int_h2) << ',' << format_double(p.var_ratio)
        << ',' << format_double(p.corr_L2_area_q2) << ','
        << format_double(p.corr_L1_bl_reduced) << ','
        << format_double(p.corr_L0_epc_reduced) << ',' << format_double(p.mean_L0)
        << ',' << format_double(p.mean_L1) << ',' << format_double(p.mean_L2) << ','
        << format_double(p.expected_mean_L2);
    return out.str();
}

inline void write_plotdata_csv(const std::vector<PlotRow>& rows,
                               const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoFailure("write_plotdata_csv: cannot open " + path);
    out << kPlotdataHeader << "\n";
    for (const PlotRow& p : rows) out << format_plot_row(p) << "\n";
    if (!out) throw IoFailure("write_plotdata_csv: write failed for " + path);
}

// ---------------------------------------------------------------------------
// ensemble runner
// ---------------------------------------------------------------------------

struct EnsembleResult {
    ExperimentConfig config;
    std::string records_path;
    std::string summary_path;
    std::vector<EnsembleRecord> records;
    std::vector<SummaryRow> summary;
    double wall_seconds = 0.0;
    int resumed_items = 0; // (n, replicate) work items reused from disk
};

namespace detail {

struct ItemPlan {
    long long n = 0;
    int rows = 0, cols = 0;
    const FrequencySet* fs = nullptr; // torus only
    bool epc_deriv_defined = false;
};

inline std::vector<EnsembleRecord> compute_item(const ExperimentConfig& cfg,
                                                const ItemPlan& plan, int replicate,
                                                std::uint64_t item_seed) {
    FieldGrid g = plan.fs
                      ? sample_torus(*plan.fs, item_seed, plan.rows)
                      : sample_sphere(static_cast<int>(plan.n), item_seed,
                                      plan.rows, plan.cols);
    const double ih2 = integral_hermite(g, 2);
    std::vector<EnsembleRecord> out;
    out.reserve(cfg.levels.size());
    for (double u : cfg.levels) {
        EnsembleRecord r;
        r.replicate = replicate;
        r.seed = item_seed;
        r.n = plan.n;
        r.u = u;
        const LkcEstimate est = cfg.boundary_estimator == "eps"
                                    ? lkc_estimate_eps(g, u, cfg.eps)
                                    : lkc_estimate(g, u);
        r.L0 = est.L0;
        r.L1 = est.L1;
        r.L2 = est.L2;
        r.int_h2 = ih2;
        r.area_q2 = area_chaos(g, u, 2);
        r.bl_deriv = boundary_second_chaos(g, u, ChaosForm::Derivative);
        r.bl_reduced = boundary_second_chaos(g, u, ChaosForm::Reduced);
        r.epc_deriv = plan.epc_deriv_defined
                          ? epc_second_chaos(g, u, ChaosForm::Derivative)
                          : std::numeric_limits<double>::quiet_NaN();
        r.epc_reduced = epc_second_chaos(g, u, ChaosForm::Reduced);
        out.push_back(r);
    }
    return out;
}

} // namespace detail

/// Run (or resume) the ensemble described by cfg.  workers <= 0 reads the
/// environment default.  Records land in output_dir/records.csv in a fixed
/// order (n_list major, replicate minor, levels innermost); the summary is
/// recomputed from the full records and written to output_dir/summary.csv.
inline EnsembleResult run_ensemble(const ExperimentConfig& cfg, int workers = 0) {
    validate_config(cfg);
    const auto t0 = std::chrono::steady_clock::now();
    if (workers <= 0) workers = default_worker_count();

    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec)
        throw IoFailure("run_ensemble: cannot create output dir " + cfg.output_dir +
                        ": " + ec.message());

    EnsembleResult res;
    res.config = cfg;
    res.records_path = cfg.output_dir + "/records.csv";
    res.summary_path = cfg.output_dir + "/summary.csv";

    // hold torus frequency sets alive for the whole run
    std::vector<FrequencySet> fsets;
    std::vector<detail::ItemPlan> plans;
    if (cfg.manifold == Manifold::Torus) fsets.reserve(cfg.n_list.size());
    for (long long n : cfg.n_list) {
        detail::ItemPlan p;
        p.n = n;
        if (cfg.manifold == Manifold::Torus) {
            fsets.push_back(enumerate_frequencies(n));
            p.rows = p.cols = cfg.resolution > 0 ? cfg.resolution
                                                 : torus_default_resolution(n);
        } else {
            p.rows = p.cols = cfg.resolution > 0
                                  ? cfg.resolution
                                  : sphere_default_resolution(static_cast<int>(n));
        }
        plans.push_back(p);
    }
    if (cfg.manifold == Manifold::Torus)
        for (std::size_t i = 0; i < plans.size(); ++i) {
            plans[i].fs = &fsets[i];
            plans[i].epc_deriv_defined = !fsets[i].epc_degenerate();
        }

    const int R = cfg.replicates;
    const std::size_t n_items = cfg.n_list.size() * std::size_t(R);
    const std::size_t L = cfg.levels.size();
    auto item_seed = [&](std::size_t item) {
        const std::size_t ni = item / std::size_t(R);
        const std::size_t r = item % std::size_t(R);
        return stream_seed(cfg.seed, (std::uint64_t(ni) << 40) | std::uint64_t(r));
    };

    // resume: keep the longest valid prefix of already-written items
    std::size_t prefix_items = 0;
    std::vector<EnsembleRecord> prefix_records;
    if (std::filesystem::exists(res.records_path) &&
        std::filesystem::file_size(res.records_path, ec) > 0 && !ec) {
        RecordsFile old = read_records(res.records_path, /*strict=*/false);
        if (!(old.config == cfg))
            throw InvalidConfig(
                "run_ensemble: existing records at " + res.records_path +
                " were produced by a different config; refusing to mix");
        std::size_t pos = 0;
        while (prefix_items < n_items) {
            const std::size_t item = prefix_items;
            const std::size_t ni = item / std::size_t(R);
            const int r = static_cast<int>(item % std::size_t(R));
            if (pos + L > old.records.size()) break;
            bool ok = true;
            for (std::size_t k = 0; k < L; ++k) {
                const EnsembleRecord& rec = old.records[pos + k];
                if (rec.n != cfg.n_list[ni] || rec.replicate != r ||
                    rec.u != cfg.levels[k]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) break;
            for (std::size_t k = 0; k < L; ++k)
                prefix_records.push_back(old.records[pos + k]);
            pos += L;
            ++prefix_items;
        }
    }
    res.resumed_items = static_cast<int>(prefix_items);

    // rewrite header plus the kept prefix, then append the remainder
    std::ofstream out(res.records_path, std::ios::trunc);
    if (!out) throw IoFailure("run_ensemble: cannot open " + res.records_path);
    {
        std::istringstream cfg_lines(serialize_config(cfg));
        std::string line;
        while (std::getline(cfg_lines, line)) out << "# cfg: " << line << "\n";
    }
    out << kRecordsHeader << "\n";
    for (const EnsembleRecord& r : prefix_records) out << format_record(r) << "\n";
    out.flush();
    res.records = std::move(prefix_records);

    if (prefix_items < n_items) {
        std::mutex mu;
        std::condition_variable cv;
        std::map<std::size_t, std::vector<EnsembleRecord>> ready;
        std::atomic<std::size_t> next{prefix_items};
        std::atomic<bool> failed{false};
        std::exception_ptr err;

        auto work = [&]() {
            while (!failed.load(std::memory_order_relaxed)) {
                const std::size_t item = next.fetch_add(1);
                if (item >= n_items) break;
                try {
                    std::vector<EnsembleRecord> rows = detail::compute_item(
                        cfg, plans[item / std::size_t(R)],
                        static_cast<int>(item % std::size_t(R)), item_seed(item));
                    std::lock_guard<std::mutex> lk(mu);
                    ready.emplace(item, std::move(rows));
                } catch (...) {
                    std::lock_guard<std::mutex> lk(mu);
                    if (!failed.exchange(true)) err = std::current_exception();
                }
                cv.notify_all();
            }
            cv.notify_all();
        };

        const int nw = std::max(1, std::min<int>(workers, static_cast<int>(
                                                              n_items - prefix_items)));
        std::vector<std::thread> pool;
        for (int w = 0; w < nw; ++w) pool.emplace_back(work);

        for (std::size_t item = prefix_items; item < n_items; ++item) {
            std::unique_lock<std::mutex> lk(mu);
            cv.wait(lk, [&] { return failed.load() || ready.count(item); });
            if (failed.load()) break;
            std::vector<EnsembleRecord> rows = std::move(ready[item]);
            ready.erase(item);
            lk.unlock();
            for (const EnsembleRecord& r : rows) out << format_record(r) << "\n";
            out.flush();
            for (EnsembleRecord& r : rows) res.records.push_back(std::move(r));
        }
        for (std::thread& t : pool) t.join();
        if (failed.load()) std::rethrow_exception(err);
    }
    out.flush();
    if (!out) throw IoFailure("run_ensemble: write failed for " + res.records_path);
    out.close();

    // summary after the barrier, recomputed from the persisted file
    RecordsFile persisted = read_records(res.records_path, /*strict=*/true);
    res.summary = summarize(persisted);
    write_summary_csv(res.summary, res.summary_path);
    res.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace lkc
