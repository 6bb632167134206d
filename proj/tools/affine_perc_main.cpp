// affine-perc: command-line front end for the self-affine percolation toolkit.
//
// Subcommands: generate, render, estimate, sweep, critical, census, analytic,
// compare-hv, survival.  Every run echoes its fully resolved configuration
// (seed included) as a JSON line so it can be reproduced verbatim.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "affperc/analytic.hpp"
#include "affperc/carpet.hpp"
#include "affperc/connectivity.hpp"
#include "affperc/estimator.hpp"
#include "affperc/render.hpp"
#include "affperc/serial.hpp"

namespace {

using affperc::json;

std::uint64_t random_seed() {
    std::random_device rd;
    return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

int threads_from_env() {
    if (const char* env = std::getenv("AFFINE_PERC_THREADS")) {
        try {
            return std::max(0, std::stoi(env));
        } catch (...) {
            throw std::domain_error("AFFINE_PERC_THREADS must be an integer");
        }
    }
    return 0;  // auto
}

struct Options {
    int n = 2;
    int m = 3;
    double p = 0.5;
    std::string p_grid;
    int level = 1;
    int depth = 1;
    std::int64_t trials = 1000;
    std::optional<std::uint64_t> seed;
    std::uint64_t copy = 0;
    std::string adjacency = "corner";
    std::string domain = "unit";
    std::string direction = "h";
    double threshold = 0.5;
    double tol = 0.02;
    std::string out;
    std::string in;
    std::string format = "svg";
    int width = 800;
    std::string fill = "#15405f";
    std::string empty = "#ffffff";
    bool gridlines = false;
    bool coupled = false;
    int threads = -1;
    std::int64_t cell_cap = affperc::kDefaultCellCap;

    std::uint64_t resolved_seed() {
        if (!seed) seed = random_seed();
        return *seed;
    }
    int resolved_threads() const { return threads >= 0 ? threads : threads_from_env(); }
};

std::vector<double> parse_p_grid(const std::string& s) {
    const auto c1 = s.find(':');
    const auto c2 = s.find(':', c1 == std::string::npos ? c1 : c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
        throw std::domain_error("--p-grid expects lo:hi:step");
    double lo, hi, step;
    try {
        lo = std::stod(s.substr(0, c1));
        hi = std::stod(s.substr(c1 + 1, c2 - c1 - 1));
        step = std::stod(s.substr(c2 + 1));
    } catch (...) {
        throw std::domain_error("--p-grid expects numeric lo:hi:step");
    }
    if (step <= 0.0 || hi < lo) throw std::domain_error("--p-grid needs step > 0 and hi >= lo");
    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double v = lo + i * step;
        if (v > hi + 1e-12) break;
        grid.push_back(std::min(v, hi));
    }
    return grid;
}

void emit(const json& config, const std::optional<json>& result) {
    std::cout << json{{"config", config}}.dump() << "\n";
    if (result) std::cout << result->dump() << "\n";
}

void add_grid_opts(CLI::App* cmd, Options& o) {
    cmd->add_option("--n", o.n, "columns per subdivision");
    cmd->add_option("--m", o.m, "rows per subdivision (m > n >= 2)");
}

int run_generate(Options& o) {
    const std::uint64_t seed = o.resolved_seed();
    const affperc::Realization r =
        affperc::generate({o.n, o.m}, o.p, o.depth, seed, o.copy, o.cell_cap);
    const json config{{"subcommand", "generate"}, {"n", o.n},       {"m", o.m},
                      {"p", o.p},                 {"depth", o.depth}, {"seed", seed},
                      {"copy", o.copy},           {"cell_cap", o.cell_cap},
                      {"out", o.out.empty() ? json() : json(o.out)}};
    if (o.out.empty()) {
        emit(config, affperc::realization_to_json(r));
    } else {
        affperc::save_realization(r, o.out);
        emit(config, json{{"out", o.out}, {"cells_at_depth", r.levels.back().size()}});
    }
    return 0;
}

int run_render(Options& o) {
    affperc::Realization r = [&] {
        if (!o.in.empty()) return affperc::load_realization(o.in);
        const std::uint64_t seed = o.resolved_seed();
        return affperc::generate({o.n, o.m}, o.p, o.depth, seed, o.copy, o.cell_cap);
    }();
    if (o.level == 0) o.level = r.depth;
    affperc::RenderSpec spec;
    spec.level = o.level;
    spec.format = o.format == "pgm" ? affperc::RenderFormat::pgm : affperc::RenderFormat::svg;
    if (o.format != "pgm" && o.format != "svg")
        throw std::domain_error("--format must be svg or pgm");
    spec.width_px = o.width;
    spec.fill_color = o.fill;
    spec.empty_color = o.empty;
    spec.draw_gridlines = o.gridlines;
    if (o.out.empty()) throw std::domain_error("render requires --out");
    affperc::render(r, spec, o.out);
    const json config{{"subcommand", "render"},
                      {"n", r.params.n},
                      {"m", r.params.m},
                      {"p", r.p},
                      {"depth", r.depth},
                      {"seed", r.seed},
                      {"copy", r.copy},
                      {"level", o.level},
                      {"format", o.format},
                      {"width", o.width},
                      {"fill", o.fill},
                      {"empty", o.empty},
                      {"gridlines", o.gridlines},
                      {"in", o.in.empty() ? json() : json(o.in)},
                      {"out", o.out}};
    emit(config, json{{"out", o.out}, {"cells", r.cells_at(o.level).size()}});
    return 0;
}

json estimator_config(const char* name, const Options& o, std::uint64_t seed) {
    return json{{"subcommand", name},       {"n", o.n},
                {"m", o.m},                 {"level", o.level},
                {"trials", o.trials},       {"seed", seed},
                {"adjacency", o.adjacency}, {"domain", o.domain},
                {"direction", o.direction}, {"threads", o.resolved_threads()},
                {"cell_cap", o.cell_cap}};
}

int run_estimate(Options& o) {
    const std::uint64_t seed = o.resolved_seed();
    const auto est = affperc::estimate_crossing(
        {o.n, o.m}, o.p, o.level, o.trials, affperc::parse_direction(o.direction),
        affperc::parse_layout(o.domain), affperc::parse_adjacency(o.adjacency), seed,
        o.resolved_threads(), o.cell_cap);
    json config = estimator_config("estimate", o, seed);
    config["p"] = o.p;
    emit(config, affperc::estimate_to_json(est));
    return 0;
}

int run_survival(Options& o) {
    const std::uint64_t seed = o.resolved_seed();
    const auto est = affperc::estimate_survival({o.n, o.m}, o.p, o.level, o.trials, seed,
                                                o.resolved_threads());
    json config{{"subcommand", "survival"}, {"n", o.n},           {"m", o.m},
                {"p", o.p},                 {"level", o.level},   {"trials", o.trials},
                {"seed", seed},             {"threads", o.resolved_threads()}};
    emit(config, affperc::survival_to_json(est));
    return 0;
}

int run_sweep(Options& o) {
    const std::uint64_t seed = o.resolved_seed();
    const auto grid = parse_p_grid(o.p_grid);
    const auto result = affperc::sweep({o.n, o.m}, grid, o.level, o.trials,
                                       affperc::parse_direction(o.direction),
                                       affperc::parse_layout(o.domain),
                                       affperc::parse_adjacency(o.adjacency), o.coupled, seed,
                                       o.resolved_threads(), o.cell_cap);
    json config = estimator_config("sweep", o, seed);
    config["p_grid"] = o.p_grid;
    config["coupled"] = o.coupled;
    config["out"] = o.out.empty() ? json() : json(o.out);
    const std::string csv = affperc::sweep_to_csv(result);
    if (o.out.empty()) {
        emit(config, std::nullopt);
        std::cout << csv;
    } else {
        affperc::write_file_atomic(o.out, csv);
        emit(config, json{{"out", o.out}, {"points", result.points.size()}});
    }
    return 0;
}

int run_critical(Options& o) {
    const std::uint64_t seed = o.resolved_seed();
    const auto bracket = affperc::find_critical(
        {o.n, o.m}, o.level, o.trials, affperc::parse_direction(o.direction),
        affperc::parse_layout(o.domain), affperc::parse_adjacency(o.adjacency), o.threshold, o.tol,
        seed, o.resolved_threads(), o.cell_cap);
    json config = estimator_config("critical", o, seed);
    config["threshold"] = o.threshold;
    config["tol"] = o.tol;
    emit(config, affperc::bracket_to_json(bracket));
    return 0;
}

int run_census(Options& o) {
    affperc::Realization r = [&] {
        if (!o.in.empty()) return affperc::load_realization(o.in);
        const std::uint64_t seed = o.resolved_seed();
        return affperc::generate({o.n, o.m}, o.p, o.depth, seed, o.copy, o.cell_cap);
    }();
    if (o.level == 0) o.level = r.depth;
    const auto c = affperc::census(r, o.level, affperc::parse_adjacency(o.adjacency));
    const json config{{"subcommand", "census"}, {"n", r.params.n},    {"m", r.params.m},
                      {"p", r.p},               {"depth", r.depth},   {"seed", r.seed},
                      {"copy", r.copy},         {"level", o.level},   {"adjacency", o.adjacency},
                      {"in", o.in.empty() ? json() : json(o.in)}};
    emit(config, affperc::census_to_json(c));
    return 0;
}

int run_analytic(Options& o) {
    const auto report = affperc::analytic_report(o.n, o.m, o.p, o.tol);
    const json config{{"subcommand", "analytic"}, {"n", o.n}, {"m", o.m}, {"p", o.p},
                      {"tol", o.tol}};
    emit(config, affperc::report_to_json(report));
    return 0;
}

int run_compare_hv(Options& o) {
    const std::uint64_t seed = o.resolved_seed();
    const auto cmp = affperc::compare_hv({o.n, o.m}, o.p, o.level, o.trials, seed,
                                         o.resolved_threads(),
                                         affperc::parse_adjacency(o.adjacency), o.cell_cap);
    json config = estimator_config("compare-hv", o, seed);
    config["p"] = o.p;
    emit(config, affperc::hv_to_json(cmp));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"statistically self-affine fractal percolation toolkit"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("generate", "sample a carpet and write it as JSON");
    add_grid_opts(gen, o);
    gen->add_option("--p", o.p, "selection probability");
    gen->add_option("--depth", o.depth, "levels to generate")->required();
    gen->add_option("--seed", o.seed, "master seed (random and echoed when omitted)");
    gen->add_option("--copy", o.copy, "domain copy index");
    gen->add_option("--cell-cap", o.cell_cap, "hard cap on cells per level");
    gen->add_option("--out", o.out, "output path (stdout when omitted)");

    auto* ren = app.add_subcommand("render", "draw one level of a carpet as SVG or PGM");
    add_grid_opts(ren, o);
    ren->add_option("--in", o.in, "realization JSON to draw (generates one when omitted)");
    ren->add_option("--p", o.p, "selection probability");
    ren->add_option("--depth", o.depth, "levels to generate");
    ren->add_option("--seed", o.seed, "master seed");
    ren->add_option("--copy", o.copy, "domain copy index");
    ren->add_option("--level", o.level, "level to draw (defaults to depth)")->default_val(0);
    ren->add_option("--format", o.format, "svg or pgm");
    ren->add_option("--width", o.width, "output width in pixels");
    ren->add_option("--fill", o.fill, "cell color, #rrggbb");
    ren->add_option("--empty", o.empty, "background color, #rrggbb");
    ren->add_flag("--gridlines", o.gridlines, "draw grid lines (SVG only)");
    ren->add_option("--cell-cap", o.cell_cap, "hard cap on cells per level");
    ren->add_option("--out", o.out, "output path")->required();

    const auto add_estimator_opts = [&](CLI::App* cmd, bool with_direction) {
        add_grid_opts(cmd, o);
        cmd->add_option("--level", o.level, "evaluation level")->required();
        cmd->add_option("--trials", o.trials, "Monte Carlo trials");
        cmd->add_option("--seed", o.seed, "master seed (random and echoed when omitted)");
        cmd->add_option("--threads", o.threads,
                        "worker threads (0 = all cores; env AFFINE_PERC_THREADS)");
        cmd->add_option("--cell-cap", o.cell_cap, "hard cap on cells per level");
        cmd->add_option("--adjacency", o.adjacency, "edge or corner");
        if (with_direction) {
            cmd->add_option("--direction", o.direction, "h or v");
            cmd->add_option("--domain", o.domain, "unit, two-tall or two-wide");
        }
    };

    auto* est = app.add_subcommand("estimate", "Monte Carlo crossing probability");
    add_estimator_opts(est, true);
    est->add_option("--p", o.p, "selection probability")->required();

    auto* swp = app.add_subcommand("sweep", "crossing estimates over a grid of p values");
    add_estimator_opts(swp, true);
    swp->add_option("--p-grid", o.p_grid, "lo:hi:step")->required();
    swp->add_flag("--coupled", o.coupled, "share uniforms across p (exact monotone sweep)");
    swp->add_option("--out", o.out, "CSV output path (stdout when omitted)");

    auto* crit = app.add_subcommand("critical", "bisect for the p where the estimate crosses a threshold");
    add_estimator_opts(crit, true);
    crit->add_option("--threshold", o.threshold, "target crossing probability");
    crit->add_option("--tol", o.tol, "bracket width");

    auto* cen = app.add_subcommand("census", "component census of one level");
    add_grid_opts(cen, o);
    cen->add_option("--in", o.in, "realization JSON (generates one when omitted)");
    cen->add_option("--p", o.p, "selection probability");
    cen->add_option("--depth", o.depth, "levels to generate");
    cen->add_option("--seed", o.seed, "master seed");
    cen->add_option("--copy", o.copy, "domain copy index");
    cen->add_option("--level", o.level, "level to examine (defaults to depth)")->default_val(0);
    cen->add_option("--adjacency", o.adjacency, "edge or corner");
    cen->add_option("--cell-cap", o.cell_cap, "hard cap on cells per level");

    auto* ana = app.add_subcommand("analytic", "closed-form quantities for (n, m, p)");
    add_grid_opts(ana, o);
    ana->add_option("--p", o.p, "selection probability")->required();
    ana->add_option("--tol", o.tol, "bisection width for the crossing upper bound")
        ->default_val(1e-4);

    auto* cmp = app.add_subcommand("compare-hv", "paired H vs V crossing comparison");
    add_estimator_opts(cmp, false);
    cmp->add_option("--p", o.p, "selection probability")->required();

    auto* sur = app.add_subcommand("survival", "Monte Carlo survival of E_level");
    add_estimator_opts(sur, false);
    sur->add_option("--p", o.p, "selection probability")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (gen->parsed()) return run_generate(o);
        if (ren->parsed()) return run_render(o);
        if (est->parsed()) return run_estimate(o);
        if (swp->parsed()) return run_sweep(o);
        if (crit->parsed()) return run_critical(o);
        if (cen->parsed()) return run_census(o);
        if (ana->parsed()) return run_analytic(o);
        if (cmp->parsed()) return run_compare_hv(o);
        if (sur->parsed()) return run_survival(o);
    } catch (const std::domain_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const affperc::parse_error& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
