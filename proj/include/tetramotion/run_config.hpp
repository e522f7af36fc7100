#pragma once

#include <array>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "tetramotion/law.hpp"
#include "tetramotion/sim.hpp"

namespace tetramotion {

// One CLI invocation. The file form is JSON with exactly these keys, so a
// config can be captured from any JSON summary and replayed.
struct RunConfig {
    std::string command;                      // simulate|density|masses|compare|fpt|limiting
    std::array<double, 4> lambda{1, 1, 1, 1};
    double c = 1.0;
    double t = 1.0;                           // horizon for simulate/compare/fpt, eval time otherwise
    double beta = 1.0;                        // fpt barrier
    std::uint64_t n = 100000;
    std::uint64_t seed = 1;
    std::string grid;                         // per-command microformat, may be empty
    double tol = 1e-8;
    std::string out;                          // output path; empty = stdout
    std::string format = "csv";               // csv|json
    unsigned threads = 0;                     // 0 = hardware concurrency
};

inline void to_json(nlohmann::ordered_json& j, const RunConfig& cfg) {
    j = nlohmann::ordered_json{
        {"command", cfg.command}, {"lambda", cfg.lambda}, {"c", cfg.c},     {"t", cfg.t},
        {"beta", cfg.beta},       {"n", cfg.n},           {"seed", cfg.seed}, {"grid", cfg.grid},
        {"tol", cfg.tol},         {"out", cfg.out},       {"format", cfg.format},
        {"threads", cfg.threads}};
}

inline void from_json(const nlohmann::ordered_json& j, RunConfig& cfg) {
    j.at("command").get_to(cfg.command);
    j.at("lambda").get_to(cfg.lambda);
    j.at("c").get_to(cfg.c);
    j.at("t").get_to(cfg.t);
    j.at("beta").get_to(cfg.beta);
    j.at("n").get_to(cfg.n);
    j.at("seed").get_to(cfg.seed);
    j.at("grid").get_to(cfg.grid);
    j.at("tol").get_to(cfg.tol);
    j.at("out").get_to(cfg.out);
    j.at("format").get_to(cfg.format);
    j.at("threads").get_to(cfg.threads);
}

// The CLI always works on the regular tetrahedron of Assumptions-style
// geometry; general direction sets are a library-level feature.
inline MotionParams motion_params(const RunConfig& cfg) {
    return MotionParams{regular_directions(cfg.c), cfg.lambda};
}

// grid microformats ------------------------------------------------------

// "nx,ny,nz" or "n" (cube); empty -> no histogram
inline std::optional<HistogramSpec> parse_box_grid(const std::string& s) {
    if (s.empty()) return std::nullopt;
    HistogramSpec spec;
    char extra;
    if (std::sscanf(s.c_str(), "%d,%d,%d%c", &spec.nx, &spec.ny, &spec.nz, &extra) == 3) return spec;
    if (std::sscanf(s.c_str(), "%d%c", &spec.nx, &extra) == 1) {
        spec.ny = spec.nz = spec.nx;
        return spec;
    }
    throw std::invalid_argument("grid: expected \"nx,ny,nz\" or \"n\", got \"" + s + "\"");
}

struct SliceSpec {
    double x1 = 0.5;
    int n = 61;
};

// "x1=<value>:<n>"
inline SliceSpec parse_slice_grid(const std::string& s) {
    SliceSpec spec;
    if (s.empty()) return spec;
    char extra;
    if (std::sscanf(s.c_str(), "x1=%lf:%d%c", &spec.x1, &spec.n, &extra) == 2) return spec;
    throw std::invalid_argument("grid: expected \"x1=<value>:<n>\", got \"" + s + "\"");
}

struct SweepSpec {
    double t0 = 0.0;
    double t1 = 10.0;
    int steps = 200;
};

// "t0:t1:steps"
inline SweepSpec parse_sweep_grid(const std::string& s) {
    SweepSpec spec;
    if (s.empty()) return spec;
    char extra;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d%c", &spec.t0, &spec.t1, &spec.steps, &extra) == 3)
        return spec;
    throw std::invalid_argument("grid: expected \"t0:t1:steps\", got \"" + s + "\"");
}

}  // namespace tetramotion
