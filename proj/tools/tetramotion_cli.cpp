// Command-line front end: ensemble simulation, density/limiting-density
// grids, singular-mass sweeps, Monte-Carlo-vs-analytic comparison and
// first-passage estimation, all on the regular tetrahedron. Emits
// plot-ready CSV or JSON; identical config + seed gives byte-identical
// output.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tetramotion/fpt.hpp"
#include "tetramotion/mc_compare.hpp"
#include "tetramotion/run_config.hpp"
#include "tetramotion/tetramotion.hpp"

using nlohmann::ordered_json;
using namespace tetramotion;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& body) {
    if (path.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + path);
    f << body;
}

ordered_json config_json(const RunConfig& cfg) {
    ordered_json j;
    to_json(j, cfg);
    return j;
}

std::string density_csv(const std::vector<GridRow>& rows) {
    std::ostringstream os;
    os << "x1,x2,x3,t,p11,p12,p13,p14,p1,xi\n";
    for (const GridRow& r : rows) {
        os << fmt(r.x.x) << ',' << fmt(r.x.y) << ',' << fmt(r.x.z) << ',' << fmt(r.t);
        for (double p : r.p) os << ',' << fmt(p);
        os << ',' << fmt(r.total) << ',' << fmt(r.xi) << '\n';
    }
    return os.str();
}

ordered_json density_json(const RunConfig& cfg, const std::vector<GridRow>& rows) {
    ordered_json out;
    out["config"] = config_json(cfg);
    ordered_json arr = ordered_json::array();
    for (const GridRow& r : rows) {
        arr.push_back(ordered_json{{"x1", r.x.x},
                                   {"x2", r.x.y},
                                   {"x3", r.x.z},
                                   {"t", r.t},
                                   {"p11", r.p[0]},
                                   {"p12", r.p[1]},
                                   {"p13", r.p[2]},
                                   {"p14", r.p[3]},
                                   {"p1", r.total},
                                   {"xi", r.xi}});
    }
    out["rows"] = std::move(arr);
    return out;
}

int run_density(const RunConfig& cfg) {
    const SliceSpec slice = parse_slice_grid(cfg.grid);
    const MotionParams mp = motion_params(cfg);
    const std::vector<GridRow> rows = evaluate_slice(mp, cfg.t, slice.x1, slice.n, cfg.threads);
    if (cfg.format == "csv")
        write_text(cfg.out, density_csv(rows));
    else
        write_text(cfg.out, density_json(cfg, rows).dump(2) + "\n");
    return 0;
}

int run_masses(const RunConfig& cfg, const std::vector<std::array<double, 4>>& lambda_sweeps) {
    const SweepSpec sweep = parse_sweep_grid(cfg.grid);
    std::ostringstream os;
    ordered_json arr = ordered_json::array();
    const bool csv = cfg.format == "csv";
    if (csv) os << "lambda1,lambda2,lambda3,lambda4,t,eta1,eta2,eta3,interior\n";
    for (const auto& lam : lambda_sweeps) {
        RunConfig c2 = cfg;
        c2.lambda = lam;
        const MotionParams mp = motion_params(c2);
        for (int i = 0; i <= sweep.steps; ++i) {
            const double t = sweep.t0 + (sweep.t1 - sweep.t0) * i / sweep.steps;
            const SingularMasses m = singular_masses(mp, t);
            if (csv) {
                os << fmt(lam[0]) << ',' << fmt(lam[1]) << ',' << fmt(lam[2]) << ',' << fmt(lam[3])
                   << ',' << fmt(t) << ',' << fmt(m.eta1) << ',' << fmt(m.eta2) << ','
                   << fmt(m.eta3) << ',' << fmt(m.interior) << '\n';
            } else {
                arr.push_back(ordered_json{{"lambda", lam},
                                           {"t", t},
                                           {"eta1", m.eta1},
                                           {"eta2", m.eta2},
                                           {"eta3", m.eta3},
                                           {"interior", m.interior}});
            }
        }
    }
    if (csv) {
        write_text(cfg.out, os.str());
    } else {
        ordered_json out;
        out["config"] = config_json(cfg);
        out["rows"] = std::move(arr);
        write_text(cfg.out, out.dump(2) + "\n");
    }
    return 0;
}

int run_simulate(const RunConfig& cfg) {
    const MotionParams mp = motion_params(cfg);
    const auto grid = parse_box_grid(cfg.grid);
    const EnsembleResult ens = run_ensemble(mp, cfg.t, cfg.n, cfg.seed, grid, cfg.threads);
    if (cfg.format == "csv") {
        std::ostringstream os;
        if (ens.histogram) {
            const Histogram3D& h = *ens.histogram;
            os << "ix,iy,iz,x1,x2,x3,count\n";
            for (int ix = 0; ix < h.nx; ++ix)
                for (int iy = 0; iy < h.ny; ++iy)
                    for (int iz = 0; iz < h.nz; ++iz) {
                        const Vec3 ctr = h.cell_center(ix, iy, iz);
                        os << ix << ',' << iy << ',' << iz << ',' << fmt(ctr.x) << ',' << fmt(ctr.y)
                           << ',' << fmt(ctr.z) << ','
                           << h.count[(static_cast<std::size_t>(ix) * h.ny + iy) * h.nz + iz]
                           << '\n';
                    }
        } else {
            os << "component,count,frequency\n";
            const char* names[4] = {"vertex", "edge", "face", "interior"};
            for (int i = 0; i < 4; ++i)
                os << names[i] << ',' << ens.component_counts[i] << ','
                   << fmt(static_cast<double>(ens.component_counts[i]) / ens.n) << '\n';
        }
        write_text(cfg.out, os.str());
        return 0;
    }
    ordered_json out;
    out["config"] = config_json(cfg);
    const SingularMasses m = singular_masses(mp, cfg.t);
    out["counts"] = {{"vertex", ens.component_counts[0]},
                     {"edge", ens.component_counts[1]},
                     {"face", ens.component_counts[2]},
                     {"interior", ens.component_counts[3]}};
    out["expected_masses"] = {{"eta1", m.eta1}, {"eta2", m.eta2}, {"eta3", m.eta3},
                              {"interior", m.interior}};
    out["mean_position"] = {ens.mean_position.x, ens.mean_position.y, ens.mean_position.z};
    out["mean_switches"] = ens.mean_switches;
    if (ens.histogram) {
        const Histogram3D& h = *ens.histogram;
        out["histogram"] = {{"nx", h.nx},
                            {"ny", h.ny},
                            {"nz", h.nz},
                            {"lo", {h.lo.x, h.lo.y, h.lo.z}},
                            {"hi", {h.hi.x, h.hi.y, h.hi.z}},
                            {"count", h.count}};
    }
    write_text(cfg.out, out.dump(2) + "\n");
    return 0;
}

int run_compare(const RunConfig& cfg) {
    const MotionParams mp = motion_params(cfg);
    auto grid = parse_box_grid(cfg.grid);
    if (!grid) grid = HistogramSpec{12, 12, 12};
    const EnsembleResult ens = run_ensemble(mp, cfg.t, cfg.n, cfg.seed, grid, cfg.threads);
    const ComponentComparison comp = compare_components(mp, ens);
    const std::vector<CellComparison> cells = compare_histogram(mp, ens);
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "ix,iy,iz,x1,x2,x3,expected_prob,observed_count,expected_count,z\n";
        for (const CellComparison& cc : cells) {
            os << cc.ix << ',' << cc.iy << ',' << cc.iz << ',' << fmt(cc.center.x) << ','
               << fmt(cc.center.y) << ',' << fmt(cc.center.z) << ',' << fmt(cc.expected_prob)
               << ',' << cc.observed << ',' << fmt(cc.expected_prob * ens.n) << ',' << fmt(cc.z)
               << '\n';
        }
        write_text(cfg.out, os.str());
        return 0;
    }
    ordered_json out;
    out["config"] = config_json(cfg);
    const char* names[4] = {"vertex", "edge", "face", "interior"};
    for (int i = 0; i < 4; ++i) {
        out["components"][names[i]] = {{"expected", comp.expected[i]},
                                       {"observed", comp.observed[i]},
                                       {"z", comp.z[i]}};
    }
    std::size_t within3 = 0;
    double maxz = 0.0;
    for (const CellComparison& cc : cells) {
        if (std::fabs(cc.z) <= 3.0) ++within3;
        maxz = std::max(maxz, std::fabs(cc.z));
    }
    out["cells"] = {{"total", cells.size()},
                    {"within_3_sigma", within3},
                    {"fraction_within_3_sigma",
                     cells.empty() ? 1.0 : static_cast<double>(within3) / cells.size()},
                    {"max_abs_z", maxz}};
    write_text(cfg.out, out.dump(2) + "\n");
    return 0;
}

int run_fpt(const RunConfig& cfg) {
    FptSpec spec{cfg.beta, motion_params(cfg)};
    const FptEstimate est = estimate_fpt(spec, cfg.t, cfg.n, cfg.seed, cfg.threads);
    if (cfg.format == "csv") {
        std::ostringstream os;
        os << "hit_time,n_switches_at_hit,is_atom\n";
        for (const FptSample& s : est.hits)
            os << fmt(s.time) << ',' << s.switches << ',' << (s.is_atom() ? 1 : 0) << '\n';
        write_text(cfg.out, os.str());
        return 0;
    }
    ordered_json out;
    out["config"] = config_json(cfg);
    out["atom_probability"] = est.atom_probability;
    out["atom_frequency"] = est.atom_frequency();
    out["atom_hits"] = est.atom_hits;
    out["hits"] = est.hits.size();
    out["hit_fraction"] = est.hit_fraction();
    out["censored_count"] = est.censored_count;
    out["n"] = est.n;
    out["horizon"] = est.horizon;
    out["beta"] = est.beta;
    write_text(cfg.out, out.dump(2) + "\n");
    return 0;
}

// x1 slices of the limiting density (same row format; the p-columns carry
// the finite-intensity closed form for the configured lambdas)
int run_limiting(const RunConfig& cfg) { return run_density(cfg); }

struct Preset {
    RunConfig cfg;
    std::vector<std::array<double, 4>> sweeps;   // for masses presets
};

Preset make_preset(const std::string& name, RunConfig base) {
    Preset p;
    p.cfg = std::move(base);
    auto all = [](double l) { return std::array<double, 4>{l, l, l, l}; };
    if (name == "fig3a") {
        p.cfg.command = "masses";
        if (p.cfg.grid.empty()) p.cfg.grid = "0:10:200";
        p.sweeps = {all(1), all(2), all(10)};
    } else if (name == "fig3b") {
        p.cfg.command = "masses";
        if (p.cfg.grid.empty()) p.cfg.grid = "0:10:200";
        p.sweeps = {{1, 2, 2, 2}, {2, 4, 4, 4}, {5, 10, 10, 10}};
    } else if (name == "fig3c") {
        p.cfg.command = "masses";
        if (p.cfg.grid.empty()) p.cfg.grid = "0:10:200";
        p.sweeps = {all(1), all(5), all(10)};
    } else if (name == "fig4l" || name == "fig5l") {
        p.cfg.command = name == "fig4l" ? "density" : "limiting";
        p.cfg.c = 1.0;
        p.cfg.t = 1.0;
        if (p.cfg.grid.empty()) p.cfg.grid = "x1=0.5:61";
    } else if (name == "fig4r" || name == "fig5r") {
        p.cfg.command = name == "fig4r" ? "density" : "limiting";
        p.cfg.c = 1.0;
        p.cfg.t = 2.0;
        if (p.cfg.grid.empty()) p.cfg.grid = "x1=1.0:61";
    } else {
        throw std::invalid_argument("unknown preset: " + name);
    }
    return p;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cyclic four-direction random motion in R^3 driven by geometric counting processes"};
    app.get_formatter()->column_width(34);

    RunConfig cfg;
    std::string preset, config_path;
    app.add_option("--command", cfg.command,
                   "one of simulate|density|masses|compare|fpt|limiting");
    app.add_option("--preset", preset, "figure preset: fig3a|fig3b|fig3c|fig4l|fig4r|fig5l|fig5r");
    app.add_option("--config", config_path, "load a RunConfig JSON file (flags override)");
    app.add_option("--lambda1", cfg.lambda[0], "GCP intensity for direction 1");
    app.add_option("--lambda2", cfg.lambda[1], "GCP intensity for direction 2");
    app.add_option("--lambda3", cfg.lambda[2], "GCP intensity for direction 3");
    app.add_option("--lambda4", cfg.lambda[3], "GCP intensity for direction 4");
    app.add_option("--c", cfg.c, "speed");
    app.add_option("--t", cfg.t, "evaluation time (simulate/compare/fpt: horizon)");
    app.add_option("--beta", cfg.beta, "fpt barrier");
    app.add_option("--n", cfg.n, "number of Monte Carlo replications");
    app.add_option("--seed", cfg.seed, "64-bit seed");
    app.add_option("--grid", cfg.grid,
                   "simulate/compare: \"nx,ny,nz\"; density/limiting: \"x1=<v>:<n>\"; "
                   "masses: \"t0:t1:steps\"");
    app.add_option("--tol", cfg.tol, "numerical tolerance");
    app.add_option("--out", cfg.out, "output path (default stdout)");
    app.add_option("--format", cfg.format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", cfg.threads, "worker threads (0 = hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);   // --help
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    }

    try {
        if (!config_path.empty()) {
            std::ifstream f(config_path);
            if (!f) throw std::invalid_argument("cannot read config file: " + config_path);
            ordered_json j = ordered_json::parse(f);
            RunConfig file_cfg;
            from_json(j, file_cfg);
            // explicit flags win over the file
            RunConfig merged = file_cfg;
            if (app.count("--command")) merged.command = cfg.command;
            if (app.count("--lambda1")) merged.lambda[0] = cfg.lambda[0];
            if (app.count("--lambda2")) merged.lambda[1] = cfg.lambda[1];
            if (app.count("--lambda3")) merged.lambda[2] = cfg.lambda[2];
            if (app.count("--lambda4")) merged.lambda[3] = cfg.lambda[3];
            if (app.count("--c")) merged.c = cfg.c;
            if (app.count("--t")) merged.t = cfg.t;
            if (app.count("--beta")) merged.beta = cfg.beta;
            if (app.count("--n")) merged.n = cfg.n;
            if (app.count("--seed")) merged.seed = cfg.seed;
            if (app.count("--grid")) merged.grid = cfg.grid;
            if (app.count("--tol")) merged.tol = cfg.tol;
            if (app.count("--out")) merged.out = cfg.out;
            if (app.count("--format")) merged.format = cfg.format;
            if (app.count("--threads")) merged.threads = cfg.threads;
            cfg = merged;
        }

        std::vector<std::array<double, 4>> sweeps{cfg.lambda};
        if (!preset.empty()) {
            Preset p = make_preset(preset, cfg);
            cfg = p.cfg;
            if (!p.sweeps.empty()) sweeps = p.sweeps;
        }
        if (cfg.command.empty())
            throw std::invalid_argument("no command given (use --command or --preset)");

        if (cfg.command == "simulate") return run_simulate(cfg);
        if (cfg.command == "density") return run_density(cfg);
        if (cfg.command == "limiting") return run_limiting(cfg);
        if (cfg.command == "masses") return run_masses(cfg, sweeps);
        if (cfg.command == "compare") return run_compare(cfg);
        if (cfg.command == "fpt") return run_fpt(cfg);
        throw std::invalid_argument("unknown command: " + cfg.command);
    } catch (const NumericalError& e) {
        std::cerr << "error: numerical: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: internal: " << e.what() << "\n";
        return 3;
    }
}
