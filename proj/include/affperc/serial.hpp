#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "affperc/analytic.hpp"
#include "affperc/carpet.hpp"
#include "affperc/connectivity.hpp"
#include "affperc/estimator.hpp"

namespace affperc {

using json = nlohmann::json;

inline std::string direction_name(Direction d) { return d == Direction::H ? "H" : "V"; }
inline std::string layout_name(Layout l) {
    switch (l) {
        case Layout::unit: return "unit";
        case Layout::two_tall: return "two-tall";
        default: return "two-wide";
    }
}
inline std::string adjacency_name(AdjacencyMode m) {
    return m == AdjacencyMode::edge ? "edge" : "corner";
}

inline Direction parse_direction(const std::string& s) {
    if (s == "h" || s == "H") return Direction::H;
    if (s == "v" || s == "V") return Direction::V;
    throw std::domain_error("direction must be h or v, got '" + s + "'");
}
inline Layout parse_layout(const std::string& s) {
    if (s == "unit") return Layout::unit;
    if (s == "two-tall") return Layout::two_tall;
    if (s == "two-wide") return Layout::two_wide;
    throw std::domain_error("domain must be unit, two-tall or two-wide, got '" + s + "'");
}
inline AdjacencyMode parse_adjacency(const std::string& s) {
    if (s == "edge") return AdjacencyMode::edge;
    if (s == "corner") return AdjacencyMode::edge_corner;
    throw std::domain_error("adjacency must be edge or corner, got '" + s + "'");
}

// Shortest representation that round-trips the double exactly.
inline std::string fmt_double(double v) { return json(v).dump(); }

// Write via a temporary and rename, so a failed run leaves no partial file.
inline void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open '" + tmp.string() + "' for writing");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out) {
            out.close();
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("cannot move temporary file onto '" + path.string() + "'");
    }
}

inline json realization_to_json(const Realization& r) {
    json levels = json::array();
    for (const auto& lv : r.levels) {
        std::vector<Cell> sorted(lv.begin(), lv.end());
        std::sort(sorted.begin(), sorted.end());
        json cells = json::array();
        for (const Cell& c : sorted) cells.push_back(json::array({c.col, c.row}));
        levels.push_back(std::move(cells));
    }
    return json{{"n", r.params.n}, {"m", r.params.m},    {"p", r.p},          {"depth", r.depth},
                {"seed", r.seed},  {"copy", r.copy},     {"levels", levels}};
}

inline Realization realization_from_json(const json& j) {
    if (!j.is_object()) throw std::domain_error("realization must be a JSON object");
    for (const char* key : {"n", "m", "p", "depth", "seed", "copy", "levels"})
        if (!j.contains(key)) throw std::domain_error(std::string("missing field '") + key + "'");
    Realization r;
    if (!j["n"].is_number_integer() || !j["m"].is_number_integer())
        throw std::domain_error("n and m must be integers");
    r.params.n = j["n"].get<int>();
    r.params.m = j["m"].get<int>();
    r.params.validate();  // rejects m <= n with the m > n >= 2 constraint message
    r.p = j["p"].get<double>();
    if (!(r.p >= 0.0 && r.p <= 1.0)) throw std::domain_error("p must lie in [0,1]");
    r.depth = j["depth"].get<int>();
    if (r.depth < 1) throw std::domain_error("depth must be >= 1");
    r.seed = j["seed"].get<std::uint64_t>();
    r.copy = j["copy"].get<std::uint64_t>();
    const json& levels = j["levels"];
    if (!levels.is_array() || static_cast<int>(levels.size()) != r.depth)
        throw std::domain_error("levels must be an array of length depth");
    for (int k = 1; k <= r.depth; ++k) {
        const json& lv = levels[static_cast<std::size_t>(k) - 1];
        if (!lv.is_array()) throw std::domain_error("each level must be an array of [col,row] pairs");
        const std::int64_t w = r.params.cols_at(k), h = r.params.rows_at(k);
        std::vector<Cell> cells;
        cells.reserve(lv.size());
        for (const json& e : lv) {
            if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
                !e[1].is_number_integer())
                throw std::domain_error("cells must be [col,row] integer pairs");
            const Cell c{e[0].get<std::int64_t>(), e[1].get<std::int64_t>()};
            if (c.col < 0 || c.col >= w || c.row < 0 || c.row >= h)
                throw std::domain_error("cell out of bounds at level " + std::to_string(k));
            cells.push_back(c);
        }
        std::sort(cells.begin(), cells.end());
        if (std::adjacent_find(cells.begin(), cells.end()) != cells.end())
            throw std::domain_error("duplicate cell at level " + std::to_string(k));
        if (k > 1) {
            const auto& parents = r.levels.back();
            for (const Cell& c : cells) {
                const Cell parent{c.col / r.params.n, c.row / r.params.m};
                if (!std::binary_search(parents.begin(), parents.end(), parent))
                    throw std::domain_error("cell without selected parent at level " +
                                            std::to_string(k));
            }
        }
        r.levels.push_back(std::move(cells));
    }
    return r;
}

inline void save_realization(const Realization& r, const std::filesystem::path& path) {
    write_file_atomic(path, realization_to_json(r).dump() + "\n");
}

inline Realization load_realization(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw parse_error(std::string("malformed realization file: ") + e.what());
    }
    return realization_from_json(j);
}

inline json census_to_json(const ComponentCensus& c) {
    return json{{"level", c.level},
                {"num_components", c.num_components},
                {"num_nontrivial", c.num_nontrivial},
                {"num_touching_boundary", c.num_touching_boundary},
                {"num_islands", c.num_islands},
                {"largest_size", c.largest_size},
                {"crossing_h", c.crossing_h},
                {"crossing_v", c.crossing_v}};
}

inline std::string census_csv_header() {
    return "level,num_components,num_nontrivial,num_touching_boundary,num_islands,largest_size,"
           "crossing_h,crossing_v";
}

inline std::string census_csv_row(const ComponentCensus& c) {
    std::ostringstream os;
    os << c.level << ',' << c.num_components << ',' << c.num_nontrivial << ','
       << c.num_touching_boundary << ',' << c.num_islands << ',' << c.largest_size << ','
       << (c.crossing_h ? 1 : 0) << ',' << (c.crossing_v ? 1 : 0);
    return os.str();
}

inline json estimate_to_json(const CrossingEstimate& e) {
    return json{{"params", {{"n", e.params.n}, {"m", e.params.m}}},
                {"p", e.p},
                {"level", e.level},
                {"domain", layout_name(e.domain)},
                {"direction", direction_name(e.direction)},
                {"trials", e.trials},
                {"hits", e.hits},
                {"p_hat", e.p_hat},
                {"ci_low", e.ci_low},
                {"ci_high", e.ci_high},
                {"master_seed", e.master_seed}};
}

inline json survival_to_json(const SurvivalEstimate& e) {
    return json{{"params", {{"n", e.params.n}, {"m", e.params.m}}},
                {"p", e.p},
                {"level", e.level},
                {"event", "survival"},
                {"trials", e.trials},
                {"hits", e.hits},
                {"p_hat", e.p_hat},
                {"ci_low", e.ci_low},
                {"ci_high", e.ci_high},
                {"master_seed", e.master_seed}};
}

inline std::string sweep_csv_header() {
    return "p,level,direction,domain,trials,hits,p_hat,ci_low,ci_high";
}

inline std::string sweep_csv_row(const CrossingEstimate& e) {
    std::ostringstream os;
    os << fmt_double(e.p) << ',' << e.level << ',' << direction_name(e.direction) << ','
       << layout_name(e.domain) << ',' << e.trials << ',' << e.hits << ',' << fmt_double(e.p_hat)
       << ',' << fmt_double(e.ci_low) << ',' << fmt_double(e.ci_high);
    return os.str();
}

inline std::string sweep_to_csv(const SweepResult& s) {
    std::ostringstream os;
    os << sweep_csv_header() << '\n';
    for (const auto& e : s.points) os << sweep_csv_row(e) << '\n';
    return os.str();
}

inline json bracket_to_json(const CriticalBracket& b) {
    json history = json::array();
    for (const auto& [p, phat] : b.history) history.push_back(json::array({p, phat}));
    return json{{"params", {{"n", b.params.n}, {"m", b.params.m}}},
                {"direction", direction_name(b.direction)},
                {"domain", layout_name(b.domain)},
                {"level", b.level},
                {"threshold", b.threshold},
                {"lo", b.lo},
                {"hi", b.hi},
                {"trials_per_step", b.trials_per_step},
                {"history", history},
                {"master_seed", b.master_seed}};
}

inline json hv_to_json(const HvComparison& c) {
    return json{{"params", {{"n", c.params.n}, {"m", c.params.m}}},
                {"p", c.p},
                {"level", c.level},
                {"trials", c.trials},
                {"n11", c.counts.n11},
                {"n10", c.counts.n10},
                {"n01", c.counts.n01},
                {"n00", c.counts.n00},
                {"p_hat_h", c.p_hat_h},
                {"p_hat_v", c.p_hat_v},
                {"diff", c.diff},
                {"ci_low", c.ci_low},
                {"ci_high", c.ci_high},
                {"master_seed", c.master_seed}};
}

inline json report_to_json(const AnalyticReport& r) {
    json j{{"n", r.n},
           {"m", r.m},
           {"p", r.p},
           {"extinction_t", r.extinction_t},
           {"survival", r.survival},
           {"tau_h_bound", r.tau_h_bound},
           {"tau_v_bound", r.tau_v_bound}};
    if (r.dim_hb) j["dim_hb"] = *r.dim_hb;
    if (r.dim_assouad) j["dim_assouad"] = *r.dim_assouad;
    if (r.jfull_limit) j["jfull_limit"] = *r.jfull_limit;
    if (r.p_A) j["p_A"] = *r.p_A;
    return j;
}

}  // namespace affperc
