// lkcwave: sample Gaussian Laplace eigenfunctions on the flat torus or the
// unit sphere, measure the Lipschitz-Killing curvatures of their excursion
// sets, and check the second-chaos reduction identities.
//
// Exit codes: 0 success, 1 invalid input or I/O trouble, 2 a verification
// ran and failed.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "lkc/chaos.hpp"
#include "lkc/ensemble.hpp"
#include "lkc/geometry.hpp"
#include "lkc/io.hpp"

using namespace lkc;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitVerifyFailed = 2;

Manifold parse_manifold(const std::string& s) {
    if (s == "torus") return Manifold::Torus;
    if (s == "sphere") return Manifold::Sphere;
    throw InvalidConfig("unknown manifold '" + s + "' (torus or sphere)");
}

std::vector<double> parse_levels(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
        out.push_back(parse_double(item, "levels"));
    if (out.empty()) throw InvalidConfig("no levels given");
    return out;
}

int cmd_lattice(long long n) {
    FrequencySet fs = enumerate_frequencies(n);
    std::printf("n,xi1,xi2\n");
    for (const auto& p : fs.points)
        std::printf("%lld,%lld,%lld\n", n, p[0], p[1]);
    std::printf("# multiplicity=%lld mu4=%lld/%lld mu4_value=%s eigenvalue=%s "
                "epc_degenerate=%d\n",
                fs.multiplicity, fs.mu4_exact.num, fs.mu4_exact.den,
                format_double(fs.mu4).c_str(), format_double(fs.eigenvalue()).c_str(),
                fs.epc_degenerate() ? 1 : 0);
    return kExitOk;
}

int cmd_coeffs(const std::string& manifold, long long n, double u) {
    const Manifold m = parse_manifold(manifold);
    std::ostringstream out;
    out << "key,value\n";
    auto put = [&](const std::string& k, double v) {
        out << k << ',' << format_double(v) << "\n";
    };

    if (m == Manifold::Torus) {
        const FrequencySet fs = enumerate_frequencies(n);
        put("eigenvalue", fs.eigenvalue());
        put("multiplicity", double(fs.multiplicity));
        put("mu4", fs.mu4);
        put("epc_degenerate", fs.epc_degenerate() ? 1.0 : 0.0);
        // |mu4| = 1 makes the EPC normalization singular; the kappa rows are
        // simply absent in that case.
        if (!fs.epc_degenerate()) {
            const KappaSet ks = kappa_set(fs);
            put("kappa1", ks.k1);
            put("kappa2", ks.k2);
            put("kappa3", ks.k3);
            put("kappa4", ks.k4);
            put("kappa5", ks.k5);
        }
        const HCoeffs h = h_coeffs(fs, u);
        put("h1", h.h1);
        put("h2", h.h2);
        put("h3", h.h3);
        put("h4", h.h4);
        put("h5", h.h5);
        put("h35", h.h35);
    } else {
        if (n < 2) throw InvalidConfig("sphere needs n >= 2");
        put("eigenvalue", double(n) * (n + 1.0));
        put("multiplicity", 2.0 * double(n) + 1.0);
        const KappaSet ks = kappa_set_sphere(static_cast<int>(n));
        put("kappa1", ks.k1);
        put("kappa2", ks.k2);
        put("kappa3", ks.k3);
        put("kappa4", ks.k4);
        put("kappa5", ks.k5);
    }
    for (int q = 0; q <= 4; ++q)
        put("gamma" + std::to_string(q), gamma_coeff(q, u));
    for (int l = 0; l <= 3; ++l)
        put("beta" + std::to_string(l), beta_coeff(l, u));
    put("alpha00", alpha_coeff(0, 0));
    put("alpha20", alpha_coeff(2, 0));
    put("alpha22", alpha_coeff(2, 2));
    put("alpha40", alpha_coeff(4, 0));
    const ReductionConstants rc = reduction_constants(u);
    put("c0", rc.c0);
    put("c1", rc.c1);
    put("c2", rc.c2);
    std::fputs(out.str().c_str(), stdout);
    return kExitOk;
}

int cmd_sample(const std::string& manifold, long long n, std::uint64_t seed, int res,
               const std::string& out) {
    const Manifold m = parse_manifold(manifold);
    FieldGrid g;
    if (m == Manifold::Torus) {
        FrequencySet fs = enumerate_frequencies(n);
        const int M = res > 0 ? res : torus_default_resolution(n);
        g = sample_torus(fs, seed, M);
    } else {
        if (n < 2) throw InvalidConfig("sphere needs n >= 2");
        const int M = res > 0 ? res : sphere_default_resolution(static_cast<int>(n));
        g = sample_sphere(static_cast<int>(n), seed, M, M);
    }
    write_field_csv(g, out);
    std::printf("wrote %s (%d x %d nodes)\n", out.c_str(), g.rows, g.cols);
    return kExitOk;
}

int cmd_lkc(const std::string& in, const std::string& levels,
            const std::string& estimator, double eps) {
    FieldGrid g = read_field_csv(in);
    const std::vector<double> us = parse_levels(levels);
    if (estimator != "marching" && estimator != "eps")
        throw InvalidConfig("estimator must be marching or eps");
    std::printf("level,L0,L1,L2,estimator,resolution\n");
    for (double u : us) {
        const LkcEstimate e = estimator == "eps" ? lkc_estimate_eps(g, u, eps)
                                                 : lkc_estimate(g, u);
        if (e.eps_band_underresolved)
            std::fprintf(stderr,
                         "warning: eps band narrower than ~3 cells at u=%s\n",
                         format_double(u).c_str());
        std::printf("%s,%s,%s,%s,%s,%d\n", format_double(u).c_str(),
                    format_double(e.L0).c_str(), format_double(e.L1).c_str(),
                    format_double(e.L2).c_str(), e.boundary_estimator.c_str(),
                    e.rows);
    }
    return kExitOk;
}

int cmd_chaos(const std::string& in, int k, int q, double u,
              const std::string& form_name) {
    FieldGrid g = read_field_csv(in);
    ChaosForm form;
    if (form_name == "derivative") form = ChaosForm::Derivative;
    else if (form_name == "reduced") form = ChaosForm::Reduced;
    else throw InvalidConfig("form must be derivative or reduced");

    double value = 0.0;
    if (k == 2) {
        value = form == ChaosForm::Reduced && q == 2
                    ? reduced_second_chaos(g, u, 2)
                    : area_chaos(g, u, q);
    } else if (k == 1) {
        if (form == ChaosForm::Reduced) {
            if (q != 2)
                throw InvalidConfig("reduced boundary form exists only for q = 2");
            value = boundary_second_chaos(g, u, ChaosForm::Reduced);
        } else {
            value = boundary_chaos(g, u, q);
        }
    } else if (k == 0) {
        if (q != 2)
            throw InvalidConfig("EPC chaos is implemented for q = 2 only");
        value = epc_second_chaos(g, u, form);
    } else {
        throw InvalidConfig("k must be 0 (EPC), 1 (boundary) or 2 (area)");
    }
    std::printf("k,q,u,form,value\n%d,%d,%s,%s,%s\n", k, q, format_double(u).c_str(),
                form_name.c_str(), format_double(value).c_str());
    return kExitOk;
}

void report_json(std::ostream& out, const std::vector<ReductionReport>& reports) {
    out << "{\n  \"reports\": [\n";
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const ReductionReport& r = reports[i];
        out << "    {\n"
            << "      \"manifold\": \"" << manifold_name(r.manifold) << "\",\n"
            << "      \"n\": " << r.n << ",\n"
            << "      \"replicates\": " << r.replicates << ",\n"
            << "      \"seed\": " << r.seed << ",\n"
            << "      \"rows\": " << r.rows << ",\n"
            << "      \"cols\": " << r.cols << ",\n"
            << "      \"pathwise_tol\": " << format_double(r.pathwise_tol) << ",\n"
            << "      \"cases\": [\n";
        for (std::size_t c = 0; c < r.cases.size(); ++c) {
            const ReductionCase& rc = r.cases[c];
            out << "        {\"k\": " << rc.k << ", \"u\": " << format_double(rc.u)
                << ", \"mode\": \"" << (rc.statistical ? "statistical" : "pathwise")
                << "\"";
            if (rc.statistical)
                out << ", \"correlation\": " << format_double(rc.correlation)
                    << ", \"fitted_slope\": " << format_double(rc.fitted_slope)
                    << ", \"expected_slope\": " << format_double(rc.expected_slope);
            else
                out << ", \"max_rel_error\": " << format_double(rc.max_rel_error);
            out << ", \"pass\": " << (rc.pass ? "true" : "false") << "}"
                << (c + 1 < r.cases.size() ? "," : "") << "\n";
        }
        out << "      ],\n      \"pass\": " << (r.pass ? "true" : "false") << "\n"
            << "    }" << (i + 1 < reports.size() ? "," : "") << "\n";
    }
    out << "  ],\n  \"pass\": ";
    bool all = true;
    for (const auto& r : reports) all = all && r.pass;
    out << (all ? "true" : "false") << "\n}\n";
}

int cmd_verify_reduction(const std::string& config_path) {
    const ExperimentConfig cfg = parse_config_file(config_path);
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw IoFailure("cannot create output dir " + cfg.output_dir);

    std::vector<ReductionReport> reports;
    for (long long n : cfg.n_list)
        reports.push_back(verify_reduction(cfg.manifold, n, cfg.levels,
                                           cfg.replicates, cfg.seed, cfg.resolution,
                                           cfg.resolution));

    const std::string errs_path = cfg.output_dir + "/reduction_errors.csv";
    std::ofstream errs(errs_path);
    if (!errs) throw IoFailure("cannot open " + errs_path);
    errs << "n,k,u,replicate,rel_error\n";
    for (const ReductionReport& r : reports)
        for (const ReductionCase& c : r.cases)
            for (std::size_t i = 0; i < c.rel_errors.size(); ++i)
                errs << r.n << ',' << c.k << ',' << format_double(c.u) << ',' << i
                     << ',' << format_double(c.rel_errors[i]) << "\n";
    if (!errs.flush()) throw IoFailure("write failed for " + errs_path);

    const std::string report_path = cfg.output_dir + "/reduction_report.json";
    std::ofstream rj(report_path);
    if (!rj) throw IoFailure("cannot open " + report_path);
    report_json(rj, reports);
    if (!rj.flush()) throw IoFailure("write failed for " + report_path);

    report_json(std::cout, reports);
    std::fprintf(stderr, "report: %s\nper-replicate errors: %s\n",
                 report_path.c_str(), errs_path.c_str());
    for (const auto& r : reports)
        if (!r.pass) return kExitVerifyFailed;
    return kExitOk;
}

int cmd_ensemble(const std::string& config_path, int workers) {
    const ExperimentConfig cfg = parse_config_file(config_path);
    const EnsembleResult res = run_ensemble(cfg, workers);
    std::printf("records: %s (%zu records, %d items resumed)\n",
                res.records_path.c_str(), res.records.size(), res.resumed_items);
    std::printf("summary: %s\n", res.summary_path.c_str());
    std::printf("wall_seconds: %s\n", format_double(res.wall_seconds).c_str());
    bool ok = true;
    for (const SummaryRow& s : res.summary) {
        std::printf("n=%lld u=%s mean_L2=%s bl_pass=%d epc_pass=%d\n", s.n,
                    format_double(s.u).c_str(), format_double(s.mean_L2).c_str(),
                    s.bl_pass ? 1 : 0, s.epc_pass ? 1 : 0);
        ok = ok && s.bl_pass && s.epc_pass;
    }
    return ok ? kExitOk : kExitVerifyFailed;
}

int cmd_summarize(const std::string& in, const std::string& out) {
    RecordsFile rf = read_records(in);
    const std::vector<SummaryRow> rows = summarize(rf);
    if (out.empty()) {
        std::ostringstream ss;
        ss << kSummaryHeader << "\n";
        for (const SummaryRow& s : rows) ss << format_summary_row(s) << "\n";
        std::fputs(ss.str().c_str(), stdout);
    } else {
        write_summary_csv(rows, out);
        std::printf("wrote %s (%zu rows)\n", out.c_str(), rows.size());
    }
    return kExitOk;
}

int cmd_plotdata(const std::string& in, const std::string& out) {
    RecordsFile rf = read_records(in);
    const std::vector<PlotRow> rows = emit_plotdata(rf);
    if (out.empty()) {
        std::ostringstream ss;
        ss << kPlotdataHeader << "\n";
        for (const PlotRow& p : rows) ss << format_plot_row(p) << "\n";
        std::fputs(ss.str().c_str(), stdout);
    } else {
        write_plotdata_csv(rows, out);
        std::printf("wrote %s (%zu rows)\n", out.c_str(), rows.size());
    }
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lipschitz-Killing curvatures of random wave excursion sets"};
    app.require_subcommand(1);

    long long lat_n = 0;
    auto* lat = app.add_subcommand("lattice", "enumerate lattice points on a circle");
    lat->add_option("n", lat_n, "energy index (sum of two squares)")->required();

    std::string co_manifold = "torus";
    long long co_n = 0;
    double co_u = 0.0;
    auto* co = app.add_subcommand("coeffs", "print spectral and chaos coefficients");
    co->add_option("--manifold", co_manifold, "torus or sphere")->required();
    co->add_option("--n", co_n, "energy index / degree")->required();
    co->add_option("--u", co_u, "excursion level")->required();

    std::string sa_manifold = "torus", sa_out = "field.csv";
    long long sa_n = 0;
    std::uint64_t sa_seed = 0;
    int sa_res = 0;
    auto* sa = app.add_subcommand("sample", "sample one field realization to CSV");
    sa->add_option("--manifold", sa_manifold, "torus or sphere")->required();
    sa->add_option("--n", sa_n, "energy index / degree")->required();
    sa->add_option("--seed", sa_seed, "random seed")->required();
    sa->add_option("--res", sa_res, "grid resolution (0 = default policy)");
    sa->add_option("--out", sa_out, "output CSV path");

    std::string lk_in, lk_levels, lk_estimator = "marching";
    double lk_eps = 0.2;
    auto* lk = app.add_subcommand("lkc", "measure excursion-set curvatures");
    lk->add_option("--in", lk_in, "field CSV from `sample`")->required();
    lk->add_option("--levels", lk_levels, "comma-separated levels")->required();
    lk->add_option("--estimator", lk_estimator, "marching or eps");
    lk->add_option("--eps", lk_eps, "band half-width for the eps estimator");

    std::string ch_in, ch_form = "derivative";
    int ch_k = 0, ch_q = 2;
    double ch_u = 0.0;
    auto* ch = app.add_subcommand("chaos", "evaluate one chaotic projection");
    ch->add_option("--in", ch_in, "field CSV from `sample`")->required();
    ch->add_option("--k", ch_k, "functional: 0 EPC, 1 boundary, 2 area")->required();
    ch->add_option("--q", ch_q, "chaos order")->required();
    ch->add_option("--u", ch_u, "excursion level")->required();
    ch->add_option("--form", ch_form, "derivative or reduced");

    std::string vr_config;
    auto* vr = app.add_subcommand("verify-reduction",
                                  "compare second-chaos forms over an ensemble");
    vr->add_option("--config", vr_config, "experiment config file")->required();

    std::string en_config;
    int en_workers = 0;
    auto* en = app.add_subcommand("ensemble", "run a config-driven ensemble");
    en->add_option("--config", en_config, "experiment config file")->required();
    en->add_option("--workers", en_workers,
                   "worker threads (0 = LKCWAVE_WORKERS or hardware)");

    std::string su_in, su_out;
    auto* su = app.add_subcommand("summarize", "summary table from a records file");
    su->add_option("--in", su_in, "records.csv from `ensemble`")->required();
    su->add_option("--out", su_out, "output CSV (default stdout)");

    std::string pl_in, pl_out;
    auto* pl = app.add_subcommand("plotdata", "plot-ready CSV from a records file");
    pl->add_option("--in", pl_in, "records.csv from `ensemble`")->required();
    pl->add_option("--out", pl_out, "output CSV (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (lat->parsed()) return cmd_lattice(lat_n);
        if (co->parsed()) return cmd_coeffs(co_manifold, co_n, co_u);
        if (sa->parsed()) return cmd_sample(sa_manifold, sa_n, sa_seed, sa_res, sa_out);
        if (lk->parsed()) return cmd_lkc(lk_in, lk_levels, lk_estimator, lk_eps);
        if (ch->parsed()) return cmd_chaos(ch_in, ch_k, ch_q, ch_u, ch_form);
        if (vr->parsed()) return cmd_verify_reduction(vr_config);
        if (en->parsed()) return cmd_ensemble(en_config, en_workers);
        if (su->parsed()) return cmd_summarize(su_in, su_out);
        if (pl->parsed()) return cmd_plotdata(pl_in, pl_out);
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitInvalid;
    }
    return kExitInvalid;
}
