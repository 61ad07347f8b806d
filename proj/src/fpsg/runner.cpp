#include "fpsg/runner.hpp"

#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fpsg/diagnostics.hpp"
#include "fpsg/exact.hpp"
#include "fpsg/integrators.hpp"
#include "fpsg/quasi_eq.hpp"

namespace fpsg {

namespace {

namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string csv_cell(double x) { return std::isnan(x) ? std::string() : fmt17(x); }

/// The mean opinion enters the drift as a frozen constant; it is taken from
/// the initial datum on the run's own grid (the first moment is conserved).
void resolve_opinion_mean(Model& m, const VelocityGrid& g) {
    if (m.kind != ModelKind::Opinion) return;
    std::vector<double> f0(g.N);
    initial_field(m, 0.0, g, f0.data());
    double mass = 0.0, mom = 0.0;
    for (int j = 0; j < g.N; ++j) {
        mass += g.cw[j] * f0[j];
        mom += g.cw[j] * g.v[j] * f0[j];
    }
    m.opinion_mean = mom / mass;
}

std::vector<long> output_step_indices(const RunConfig& cfg, long n_steps) {
    std::vector<long> idx;
    idx.reserve(cfg.output_times.size());
    for (double t : cfg.output_times) {
        long s = std::lround(t / cfg.dt);
        if (s < 0) s = 0;
        if (s > n_steps) s = n_steps;
        idx.push_back(s);
    }
    return idx;
}

struct DiagContext {
    const GpcBasis* basis = nullptr;
    const VelocityGrid* grid = nullptr;
    const Model* model = nullptr;
    const ReferenceData* ref = nullptr;
    NodalField fnodal, fqnodal;
};

/// Per-node relative entropy of the reconstructed state against its
/// instantaneous quasi-equilibrium.
EntropyStats entropy_against_quasi_equilibrium(DiagContext& dc,
                                               const CoefficientField& state) {
    dc.fnodal = nodal_view(*dc.basis, state);
    for (int q = 0; q < dc.basis->Nq; ++q)
        compute_fq(*dc.model, dc.basis->z[q], *dc.grid, dc.fnodal.row(q),
                   dc.fqnodal.row(q));
    return relative_entropy_nodal(*dc.grid, dc.fnodal, dc.fqnodal);
}

void collect_row(DiagContext& dc, const CoefficientField& state, double t,
                 size_t time_index, RunResult& out) {
    out.times.push_back(t);
    out.mass.push_back(field_mass(*dc.grid, state));
    out.first_moment.push_back(field_first_moment(*dc.grid, state));

    double ev = kNaN, l2 = kNaN;
    if (dc.ref && time_index < dc.ref->fields.size()) {
        const CoefficientField& rf = dc.ref->fields[time_index];
        try {
            ev = eps_var(*dc.grid, state, rf);
        } catch (const std::exception&) {
            ev = kNaN; // undefined metric (reference variance vanishes)
        }
        l2 = l2_error(*dc.grid, state, rf);
    }
    out.eps_var.push_back(ev);
    out.l2.push_back(l2);
    out.var_l1.push_back(variance_of_l1_norm(*dc.basis, *dc.grid, state));

    double hmax = kNaN;
    try {
        EntropyStats es = entropy_against_quasi_equilibrium(dc, state);
        hmax = es.max_value;
        out.entropy_clipped += es.clipped;
    } catch (const std::exception&) {
        hmax = kNaN;
    }
    out.entropy_max.push_back(hmax);
}

/// gPC coefficients of the exact classical solution at time t: per velocity
/// node, sample over the z-quadrature and project (fixed summation order).
CoefficientField project_exact(const Model& m, const GpcBasis& basis,
                               const VelocityGrid& grid, double t) {
    CoefficientField out(basis.M, grid.N);
    std::vector<double> vals(basis.Nq);
    for (int j = 0; j < grid.N; ++j) {
        for (int q = 0; q < basis.Nq; ++q)
            vals[q] = exact_classical_solution(m, basis.z[q], grid.v[j], t);
        for (int k = 0; k <= basis.M; ++k) {
            double acc = 0.0;
            for (int q = 0; q < basis.Nq; ++q)
                acc += basis.w[q] * basis.phi_at(k, q) * vals[q];
            out.at(k, j) = acc;
        }
    }
    return out;
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

void save_reference(const std::string& path, const ReferenceData& ref) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write reference cache: " + path);
    const char magic[8] = {'F', 'P', 'S', 'G', 'R', 'E', 'F', '1'};
    out.write(magic, 8);
    const int32_t hdr[4] = {ref.M, ref.N, ref.Nq,
                            static_cast<int32_t>(ref.times.size())};
    out.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
    out.write(reinterpret_cast<const char*>(ref.times.data()),
              static_cast<std::streamsize>(ref.times.size() * sizeof(double)));
    for (const auto& f : ref.fields)
        out.write(reinterpret_cast<const char*>(f.a.data()),
                  static_cast<std::streamsize>(f.a.size() * sizeof(double)));
    if (!out) throw std::runtime_error("short write to reference cache: " + path);
}

bool load_reference(const std::string& path, const RunConfig& cfg,
                    ReferenceData& ref) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return false;
    char magic[8];
    in.read(magic, 8);
    if (!in || std::string(magic, 8) != "FPSGREF1") return false;
    int32_t hdr[4];
    in.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
    if (!in || hdr[0] != cfg.ref_M || hdr[1] != cfg.ref_N) return false;
    if (hdr[3] != static_cast<int32_t>(cfg.output_times.size())) return false;
    ref.M = hdr[0];
    ref.N = hdr[1];
    ref.Nq = hdr[2];
    ref.times.assign(hdr[3], 0.0);
    in.read(reinterpret_cast<char*>(ref.times.data()),
            static_cast<std::streamsize>(ref.times.size() * sizeof(double)));
    if (!in) return false;
    for (int32_t i = 0; i < hdr[3]; ++i)
        if (std::abs(ref.times[i] - cfg.output_times[i]) > 1e-12) return false;
    ref.fields.clear();
    for (int32_t i = 0; i < hdr[3]; ++i) {
        CoefficientField f(ref.M, ref.N);
        in.read(reinterpret_cast<char*>(f.a.data()),
                static_cast<std::streamsize>(f.a.size() * sizeof(double)));
        if (!in) return false;
        ref.fields.push_back(std::move(f));
    }
    return true;
}

std::string format_value(const std::string& parameter, double v) {
    if (parameter == "M" || parameter == "N")
        return std::to_string(static_cast<long>(v));
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

void write_timeseries(const fs::path& dir, const RunResult& rr) {
    if (rr.times.empty()) return;
    std::ofstream out(dir / "timeseries.csv");
    out << "t,mass,mean_first_moment,eps_var,l2_error,var_l1norm,entropy_max\n";
    for (size_t i = 0; i < rr.times.size(); ++i)
        out << fmt17(rr.times[i]) << ',' << csv_cell(rr.mass[i]) << ','
            << csv_cell(rr.first_moment[i]) << ',' << csv_cell(rr.eps_var[i]) << ','
            << csv_cell(rr.l2[i]) << ',' << csv_cell(rr.var_l1[i]) << ','
            << csv_cell(rr.entropy_max[i]) << '\n';
    if (!out) throw std::runtime_error("cannot write " + (dir / "timeseries.csv").string());
}

void write_snapshot(const fs::path& dir, const RunConfig& cfg,
                    const CoefficientField& field, const CoefficientField* exact) {
    VelocityGrid grid = make_grid(cfg.vmin, cfg.vmax, cfg.N);
    std::vector<double> var(field.N);
    variance_profile(field, var.data());
    std::vector<double> evar;
    if (exact) {
        evar.resize(exact->N);
        variance_profile(*exact, evar.data());
    }
    std::ofstream out(dir / "snapshot.csv");
    out << (exact ? "v,mean,variance,exact_mean,exact_variance\n" : "v,mean,variance\n");
    for (int j = 0; j < grid.N; ++j) {
        out << fmt17(grid.v[j]) << ',' << fmt17(field.at(0, j)) << ',' << fmt17(var[j]);
        if (exact) out << ',' << fmt17(exact->at(0, j)) << ',' << fmt17(evar[j]);
        out << '\n';
    }
    if (!out) throw std::runtime_error("cannot write " + (dir / "snapshot.csv").string());
}

/// Run fn(i) for i in [0, n) on up to `threads` workers, collecting per-entry
/// failures; deterministic outputs are guaranteed by per-entry files.
void for_each_entry(int threads, size_t n, const std::function<void(size_t)>& fn) {
    std::vector<std::string> errors(n);
    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t i = next.fetch_add(1);
            if (i >= n) break;
            try {
                fn(i);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            } catch (...) {
                errors[i] = "unknown error";
            }
        }
    };
    const int nt = std::max(1, std::min<int>(threads, static_cast<int>(n)));
    if (nt == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    std::string joined;
    for (size_t i = 0; i < n; ++i)
        if (!errors[i].empty())
            joined += (joined.empty() ? "" : "; ") + ("entry " + std::to_string(i) + ": " + errors[i]);
    if (!joined.empty()) throw std::runtime_error(joined);
}

void write_summary(const fs::path& dir, const std::vector<double>& values,
                   const std::vector<double>& final_eps,
                   const std::vector<double>& final_l2) {
    std::ofstream out(dir / "summary.csv");
    out << "value,final_eps_var,final_l2_error\n";
    for (size_t i = 0; i < values.size(); ++i)
        out << fmt17(values[i]) << ',' << csv_cell(final_eps[i]) << ','
            << csv_cell(final_l2[i]) << '\n';
    if (!out) throw std::runtime_error("cannot write " + (dir / "summary.csv").string());
}

void note_clipped(const std::string& name, long clipped) {
    if (clipped > 0)
        std::fprintf(stderr, "note: %s clipped %ld nonpositive density values in entropy evaluations\n",
                     name.c_str(), clipped);
}

void run_one(const RunConfig& cfg, const fs::path& dir) {
    std::optional<ReferenceData> ref;
    if (cfg.with_reference) ref = ensure_reference(cfg);
    RunResult rr = execute_single(cfg, ref ? &*ref : nullptr);
    write_timeseries(dir, rr);
    write_snapshot(dir, cfg, rr.final_field, nullptr);
    note_clipped(cfg.name, rr.entropy_clipped);
}

void run_sweep(const RunConfig& cfg, const fs::path& base) {
    if (!cfg.sweep) throw ConfigError("sweep mode requires a \"sweep\" block in the config");
    const std::vector<double>& values = cfg.sweep->values;

    std::vector<RunConfig> variants;
    variants.reserve(values.size());
    std::map<std::string, std::shared_ptr<ReferenceData>> refs;
    for (double v : values) {
        RunConfig rc = sweep_variant(cfg, v);
        if (cfg.with_reference) {
            const std::string key = reference_cache_key(rc);
            if (!refs.count(key))
                refs[key] = std::make_shared<ReferenceData>(ensure_reference(rc));
        }
        variants.push_back(std::move(rc));
    }

    std::vector<double> final_eps(values.size(), kNaN), final_l2(values.size(), kNaN);
    std::atomic<long> clipped{0};
    for_each_entry(cfg.threads, values.size(), [&](size_t i) {
        const RunConfig& rc = variants[i];
        const ReferenceData* rp = nullptr;
        if (cfg.with_reference) rp = refs.at(reference_cache_key(rc)).get();
        RunResult rr = execute_single(rc, rp);
        const fs::path dir = base / (cfg.sweep->parameter + "=" + format_value(cfg.sweep->parameter, values[i]));
        fs::create_directories(dir);
        write_timeseries(dir, rr);
        write_snapshot(dir, rc, rr.final_field, nullptr);
        if (!rr.eps_var.empty()) final_eps[i] = rr.eps_var.back();
        if (!rr.l2.empty()) final_l2[i] = rr.l2.back();
        clipped += rr.entropy_clipped;
    });
    write_summary(base, values, final_eps, final_l2);
    note_clipped(cfg.name, clipped.load());
}

void run_compare(const RunConfig& cfg, const fs::path& base) {
    if (cfg.model.kind != ModelKind::ClassicalFP)
        throw ConfigError("compare-exact requires the classical_fp model");

    if (!cfg.sweep) {
        ReferenceData ref = make_exact_reference(cfg);
        RunResult rr = execute_compare_exact(cfg, &ref, {});
        write_timeseries(base, rr);
        const CoefficientField* exact = ref.fields.empty() ? nullptr : &ref.fields.back();
        write_snapshot(base, cfg, rr.final_field, exact);
        note_clipped(cfg.name, rr.entropy_clipped);
        return;
    }

    const std::vector<double>& values = cfg.sweep->values;
    std::vector<RunConfig> variants;
    variants.reserve(values.size());
    for (double v : values) variants.push_back(sweep_variant(cfg, v));

    // The order-50 truncation depends on the grid and times only, so entries
    // share it unless the sweep changes N.
    std::shared_ptr<ReferenceData> shared;
    if (cfg.sweep->parameter != "N")
        shared = std::make_shared<ReferenceData>(make_exact_reference(cfg));

    std::vector<double> final_eps(values.size(), kNaN), final_l2(values.size(), kNaN);
    std::atomic<long> clipped{0};
    for_each_entry(cfg.threads, values.size(), [&](size_t i) {
        const RunConfig& rc = variants[i];
        std::shared_ptr<ReferenceData> ref = shared;
        if (!ref) ref = std::make_shared<ReferenceData>(make_exact_reference(rc));
        RunResult rr = execute_compare_exact(rc, ref.get(), {});
        const fs::path dir = base / (cfg.sweep->parameter + "=" + format_value(cfg.sweep->parameter, values[i]));
        fs::create_directories(dir);
        write_timeseries(dir, rr);
        const CoefficientField* exact = ref->fields.empty() ? nullptr : &ref->fields.back();
        write_snapshot(dir, rc, rr.final_field, exact);
        if (!rr.eps_var.empty()) final_eps[i] = rr.eps_var.back();
        if (!rr.l2.empty()) final_l2[i] = rr.l2.back();
        clipped += rr.entropy_clipped;
    });
    write_summary(base, values, final_eps, final_l2);
    note_clipped(cfg.name, clipped.load());
}

} // namespace

RunResult execute_single(const RunConfig& cfg, const ReferenceData* ref,
                         const ExecOptions& opts) {
    GpcBasis basis = make_basis(cfg.M, cfg.Nq);
    VelocityGrid grid = make_grid(cfg.vmin, cfg.vmax, cfg.N);
    Model model = cfg.model;
    resolve_opinion_mean(model, grid);

    SGWorkspace ws = make_workspace(model, basis, grid);

    NodalField f0n(basis.Nq, grid.N);
    for (int q = 0; q < basis.Nq; ++q)
        initial_field(model, basis.z[q], grid, f0n.row(q));
    CoefficientField state(cfg.M, grid.N);
    to_coeff(ws, f0n, state);

    const long n_steps = std::lround(cfg.T / cfg.dt);
    const std::vector<long> osteps = output_step_indices(cfg, n_steps);

    DiagContext dc;
    dc.basis = &basis;
    dc.grid = &grid;
    dc.model = &model;
    dc.ref = ref;
    dc.fnodal = NodalField(basis.Nq, grid.N);
    dc.fqnodal = NodalField(basis.Nq, grid.N);

    RunResult out;
    out.trace_dt = cfg.dt;

    std::optional<Dirk2> dirk;
    std::optional<Imex2Scratch> imex;
    if (is_linear(model))
        dirk.emplace(make_dirk2(ws, cfg.scheme, cfg.dt, state));
    else
        imex.emplace(make_imex2_scratch(ws));

    size_t next_out = 0;
    for (long s = 0; s <= n_steps; ++s) {
        if (opts.trace_entropy) {
            EntropyStats es = entropy_against_quasi_equilibrium(dc, state);
            out.entropy_clipped += es.clipped;
            out.entropy_trace.push_back(std::move(es.per_node));
        }
        while (next_out < osteps.size() && osteps[next_out] == s) {
            if (opts.diagnostics)
                collect_row(dc, state, cfg.output_times[next_out], next_out, out);
            else
                out.times.push_back(cfg.output_times[next_out]);
            if (opts.collect_fields) out.fields.push_back(state);
            ++next_out;
        }
        if (s == n_steps) break;
        if (dirk)
            dirk2_step(*dirk, state);
        else
            imex2_step(ws, cfg.scheme, cfg.dt, state, *imex);
    }
    out.final_field = std::move(state);
    return out;
}

RunResult execute_compare_exact(const RunConfig& cfg, const ReferenceData* ref,
                                const ExecOptions& opts) {
    if (cfg.model.kind != ModelKind::ClassicalFP)
        throw std::invalid_argument("compare-exact requires the classical_fp model");
    GpcBasis basis = make_basis(cfg.M, cfg.Nq);
    VelocityGrid grid = make_grid(cfg.vmin, cfg.vmax, cfg.N);

    DiagContext dc;
    dc.basis = &basis;
    dc.grid = &grid;
    dc.model = &cfg.model;
    dc.ref = ref;
    dc.fnodal = NodalField(basis.Nq, grid.N);
    dc.fqnodal = NodalField(basis.Nq, grid.N);

    RunResult out;
    for (size_t i = 0; i < cfg.output_times.size(); ++i) {
        CoefficientField state = project_exact(cfg.model, basis, grid, cfg.output_times[i]);
        if (opts.diagnostics)
            collect_row(dc, state, cfg.output_times[i], i, out);
        else
            out.times.push_back(cfg.output_times[i]);
        if (opts.collect_fields) out.fields.push_back(state);
        out.final_field = std::move(state);
    }
    if (cfg.output_times.empty())
        out.final_field = project_exact(cfg.model, basis, grid, cfg.T);
    return out;
}

ReferenceData make_reference(const RunConfig& cfg) {
    RunConfig rc = cfg;
    rc.M = cfg.ref_M;
    rc.N = cfg.ref_N;
    rc.Nq = resolve_quadrature_size(cfg.model, cfg.ref_M);
    rc.scheme = Scheme::MMsG;
    rc.with_reference = false;
    ExecOptions opts;
    opts.diagnostics = false;
    opts.collect_fields = true;
    RunResult rr = execute_single(rc, nullptr, opts);

    ReferenceData ref;
    ref.M = rc.M;
    ref.N = rc.N;
    ref.Nq = rc.Nq;
    ref.times = cfg.output_times;
    ref.fields = std::move(rr.fields);
    return ref;
}

ReferenceData make_exact_reference(const RunConfig& cfg) {
    const int ref_order = 50;
    GpcBasis basis = make_basis(ref_order, default_quadrature_size(ref_order));
    VelocityGrid grid = make_grid(cfg.vmin, cfg.vmax, cfg.N);
    ReferenceData ref;
    ref.M = ref_order;
    ref.N = cfg.N;
    ref.Nq = basis.Nq;
    ref.times = cfg.output_times;
    for (double t : cfg.output_times)
        ref.fields.push_back(project_exact(cfg.model, basis, grid, t));
    return ref;
}

std::string reference_cache_key(const RunConfig& cfg) {
    std::ostringstream key;
    key << cfg.params_signature << "|dom=" << fmt17(cfg.vmin) << ',' << fmt17(cfg.vmax)
        << "|dt=" << fmt17(cfg.dt) << "|T=" << fmt17(cfg.T) << "|times=";
    for (double t : cfg.output_times) key << fmt17(t) << ',';
    key << "|refM=" << cfg.ref_M << "|refN=" << cfg.ref_N
        << "|refNq=" << resolve_quadrature_size(cfg.model, cfg.ref_M);
    char buf[24];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a(key.str())));
    return buf;
}

ReferenceData ensure_reference(const RunConfig& cfg) {
    const fs::path dir = fs::path(cfg.output_dir) / "refs";
    fs::create_directories(dir);
    const fs::path file = dir / (reference_cache_key(cfg) + ".bin");
    ReferenceData ref;
    if (fs::exists(file) && load_reference(file.string(), cfg, ref)) return ref;
    ref = make_reference(cfg);
    save_reference(file.string(), ref);
    return ref;
}

int execute(const RunConfig& cfg, RunMode mode) {
    const fs::path base = fs::path(cfg.output_dir) / cfg.name;
    try {
        fs::create_directories(base);
        if (mode == RunMode::Sweep) {
            run_sweep(cfg, base);
        } else if (mode == RunMode::CompareExact) {
            run_compare(cfg, base);
        } else {
            if (cfg.sweep)
                throw ConfigError("config declares a sweep; use the sweep command");
            run_one(cfg, base);
        }
        std::printf("wrote %s\n", base.string().c_str());
        return 0;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        try {
            nlohmann::json rec;
            rec["error"] = e.what();
            rec["config"] = cfg.name;
            std::ofstream out(base / "error.json");
            out << rec.dump(2) << '\n';
        } catch (...) {
            // the error report is best-effort; the exit status carries the failure
        }
        return 1;
    }
}

} // namespace fpsg
