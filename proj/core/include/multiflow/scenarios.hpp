#pragma once

#include <cstdint>
#include <string>

#include "multiflow/dynamics.hpp"

namespace multiflow {

// Flat key=value configuration (TOML-style syntax). Zero dim/phases
// mean "scenario default"; resolve_config fills them in and validates.
struct ScenarioConfig {
    std::string scenario;
    int dim = 0;
    int N = 64;
    int phases = 0;
    std::string weights;  // "unit" or "trapezoid"; empty = scenario default
    double dt = 1e-3;
    double T = 1.0;
    int snapshot_stride = 100;
    std::string out_dir = "out";
    bool check_kelvin = false;
    bool check_pushforward = false;
    bool check_consistency = false;
    std::uint64_t seed = 12345;
};

// Parses and validates; throws ConfigError with file:line on syntax or
// unknown keys, and naming the offending field on bad values.
ScenarioConfig load_config(const std::string& path);

// Catalog defaults for a scenario name (dt=1e-3, T=1, N=64, stride 100).
ScenarioConfig default_config(const std::string& scenario);

// Fills scenario-dependent defaults (dim, phases, weights) and checks
// every field; throws ConfigError naming the field.
void resolve_config(ScenarioConfig& cfg);

// Built-in initial states:
//   taylor_green    n=1, 2D stationary vortex array
//   equal_velocity  n=2, 2D, one shared divergence-free velocity
//   two_phase_shear n=2, 2D, smoothed counter-shear
//   one_d_two_phase n=2, 1D counter-flow
//   continuum       trapezoid label nodes on [0,1], profile smooth in the label
//   potential       every phase velocity a projected gradient
// Every returned state passes the validators.
FlowState build_scenario(const ScenarioConfig& cfg);

}  // namespace multiflow
