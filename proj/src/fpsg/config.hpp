#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fpsg/models.hpp"
#include "fpsg/sg.hpp"

namespace fpsg {

/// Raised for malformed or invalid configuration files. The message lists
/// every violation found, one bullet per line.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct SweepSpec {
    std::string parameter; // one of M, N, dt, beta
    std::vector<double> values;
};

struct RunConfig {
    std::string name;     // output subdirectory, defaults to the config basename
    std::string model_id; // classical_fp | opinion | bounded_confidence | swarming
    Model model;
    Scheme scheme = Scheme::MMsG;
    int M = 5;
    int N = 41;
    int Nq = 0; // resolved to a concrete value during parsing
    double dt = 0.1;
    double T = 1.0;
    double vmin = 0.0;
    double vmax = 0.0;
    std::vector<double> output_times;
    std::string output_dir = "out";
    std::optional<SweepSpec> sweep;
    bool with_reference = false;
    int ref_M = 40;
    int ref_N = 321;
    int threads = 1;
    // Canonical textual form of the model parameters; combined with the
    // discretization fields it keys cached reference solutions.
    std::string params_signature;
};

/// Parse and validate a JSON configuration. Unknown keys are rejected at
/// every nesting level and all violations are reported together.
RunConfig parse_config_text(const std::string& text, const std::string& name);
RunConfig parse_config_file(const std::string& path);

/// Quadrature-size rule shared by runs and their references: the sharp
/// indicator kernel pins Nq = 64 so that coarse and reference runs integrate
/// the discontinuity identically; smooth models use the order-driven default.
int resolve_quadrature_size(const Model& m, int M);

/// Copy of `base` with the sweep parameter set to `value` and the signature
/// updated accordingly. Throws ConfigError when the value is invalid for the
/// parameter (e.g. non-integer M).
RunConfig sweep_variant(const RunConfig& base, double value);

} // namespace fpsg
