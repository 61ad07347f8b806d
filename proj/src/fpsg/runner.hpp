#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fpsg/config.hpp"
#include "fpsg/sg.hpp"

namespace fpsg {

/// Reference trajectory snapshots used by the error metrics: the same model
/// solved with MMsG at higher resolution (default M=40, N=321) and the same
/// time step, stored at the run's output times.
struct ReferenceData {
    int M = 0;
    int N = 0;
    int Nq = 0;
    std::vector<double> times;
    std::vector<CoefficientField> fields;
};

struct ExecOptions {
    bool diagnostics = true;     // fill the per-output-time metric rows
    bool collect_fields = false; // keep coefficient snapshots at output times
    bool trace_entropy = false;  // per-node relative entropy at every step
};

/// One run's diagnostics. Metric values that are undefined at a given time
/// (no reference attached, or the reference variance vanishes) are NaN and
/// rendered as empty CSV cells.
struct RunResult {
    std::vector<double> times;
    std::vector<double> mass;
    std::vector<double> first_moment;
    std::vector<double> eps_var;
    std::vector<double> l2;
    std::vector<double> var_l1;
    std::vector<double> entropy_max;
    long entropy_clipped = 0;
    CoefficientField final_field;
    std::vector<CoefficientField> fields;        // when collect_fields
    std::vector<std::vector<double>> entropy_trace; // when trace_entropy, one row per step
    double trace_dt = 0.0;
};

/// Advance one trajectory and evaluate the diagnostics. Pure apart from the
/// floating-point work: no files are touched. `ref` may be null.
RunResult execute_single(const RunConfig& cfg, const ReferenceData* ref,
                         const ExecOptions& opts = {});

/// Project the exact classical solution onto the gPC basis at the output
/// times and compare against its order-50 truncation on the same grid.
/// Throws for models without an exact solution.
RunResult execute_compare_exact(const RunConfig& cfg, const ReferenceData* ref,
                                const ExecOptions& opts = {});

/// Build the high-resolution reference trajectory for `cfg` (or the order-50
/// exact-solution truncation in compare mode).
ReferenceData make_reference(const RunConfig& cfg);
ReferenceData make_exact_reference(const RunConfig& cfg);

/// Cache key and load-or-compute wrapper for PDE references; artifacts live
/// under <output_dir>/refs/ and are reused when the key matches.
std::string reference_cache_key(const RunConfig& cfg);
ReferenceData ensure_reference(const RunConfig& cfg);

enum class RunMode { Run, Sweep, CompareExact };

/// Top-level driver: runs the requested mode, writes CSV artifacts under
/// <output_dir>/<name>/, and returns a process exit status. Failures write a
/// machine-readable error.json into the output directory.
int execute(const RunConfig& cfg, RunMode mode);

} // namespace fpsg
