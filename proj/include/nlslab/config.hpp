#pragma once

#include "nlslab/evolve.hpp"
#include "nlslab/solitons.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace nlslab {

struct GridConfig {
    double L = 60.0;
    int N = 1024;
};

struct PerturbationConfig {
    std::string shape = "none"; // none | gaussian | random
    double amplitude = 0.0;
    double width = 2.0;
    double center = 0.0;
    std::uint64_t seed = 1;
    bool orthogonalize = true; // remove the unstable-dual overlap
};

struct ShootingConfig {
    double T = 12.0;
    double stage_T0 = 8.0;
    double stage_step = 4.0;
    double tol = 1e-8;
    int ladder_steps = 2;
    std::string solver = "newton_fd"; // newton_fd | secant
    std::vector<double> scan_scales;  // non-empty enables manifold_scan
};

struct VerifierConfig {
    std::vector<std::string> select = {"interactt", "interpol", "interaction"};
    double ratio_upper = 50.0; // envelope-ratio band for the lemma suites
    double ratio_lower = 1e-3;
    double rate_lo = 0.9; // interaction-rate band
    double rate_hi = 1.1;
};

/// Full batch-run description. All fields carry validated ranges; parsing is
/// strict (unknown keys are typos and rejected before any compute).
struct RunConfig {
    double k = 3.0;
    GridConfig grid;
    IntegratorConfig integrator; // integrator.k is overwritten by k
    std::vector<SolitonParams> solitons = {SolitonParams{0.0, 0.0, 1.0, 0.0}};
    PerturbationConfig perturbation;
    ShootingConfig shooting;
    VerifierConfig verifier;
    std::string output_dir = "out";

    void validate() const; // throws std::invalid_argument
    MultiSolitonConfig soliton_config() const;
};

/// Strict JSON parse + schema validation. Throws std::invalid_argument with
/// the offending key path on unknown keys, wrong types, or out-of-range values.
RunConfig config_from_json(const std::string& text);

/// Canonical serialization; config_from_json(config_to_json(c)) round-trips
/// to an identical emission.
std::string config_to_json(const RunConfig& c);

RunConfig load_config(const std::string& path);
void save_config(const std::string& path, const RunConfig& c);

} // namespace nlslab
