#include "fpsg/config.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fpsg {

namespace {

using nlohmann::json;

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

/// Accumulates validation failures so a bad config reports everything at once.
struct Collector {
    std::vector<std::string> errors;
    void add(const std::string& msg) { errors.push_back(msg); }
    [[noreturn]] void raise() const {
        std::ostringstream out;
        out << "invalid configuration:";
        for (const auto& e : errors) out << "\n  - " << e;
        throw ConfigError(out.str());
    }
};

void check_known_keys(const json& obj, const std::set<std::string>& allowed,
                      const std::string& where, Collector& errs) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key()))
            errs.add("unknown key \"" + it.key() + "\" in " + where);
    }
}

bool require_number(const json& obj, const std::string& key, double& out,
                    const std::string& where, Collector& errs) {
    if (!obj.contains(key)) {
        errs.add("missing required key \"" + key + "\" in " + where);
        return false;
    }
    if (!obj[key].is_number()) {
        errs.add("\"" + key + "\" in " + where + " must be a number");
        return false;
    }
    out = obj[key].get<double>();
    return true;
}

bool get_int(const json& v, int& out) {
    if (!v.is_number_integer()) return false;
    out = v.get<int>();
    return true;
}

/// A z-profile is either a constant (number) or an affine map given as
/// [a, b] meaning a + b*z. Returns the canonical text used in signatures.
bool parse_zprofile(const json& v, const std::string& key, ZProfile& out,
                    std::string& text, Collector& errs) {
    if (v.is_number()) {
        const double a = v.get<double>();
        out = [a](double) { return a; };
        text = fmt_double(a);
        return true;
    }
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number()) {
        const double a = v[0].get<double>();
        const double b = v[1].get<double>();
        out = [a, b](double z) { return a + b * z; };
        text = fmt_double(a) + "+" + fmt_double(b) + "*z";
        return true;
    }
    errs.add("\"" + key + "\" must be a number or a two-element array [a, b] meaning a + b*z");
    return false;
}

bool parse_model_params(const json& params, const std::string& model_id,
                        Model& model, std::string& signature, Collector& errs) {
    std::ostringstream sig;
    sig << model_id;
    bool ok = true;
    auto profile = [&](const std::string& key, ZProfile& dst) {
        if (!params.contains(key)) {
            errs.add("model \"" + model_id + "\" requires params key \"" + key + "\"");
            ok = false;
            return;
        }
        std::string text;
        if (parse_zprofile(params[key], key, dst, text, errs))
            sig << ";" << key << "=" << text;
        else
            ok = false;
    };
    auto scalar = [&](const std::string& key, double& dst, bool required, double fallback) {
        if (!params.contains(key)) {
            if (required) {
                errs.add("model \"" + model_id + "\" requires params key \"" + key + "\"");
                ok = false;
            } else {
                dst = fallback;
                sig << ";" << key << "=" << fmt_double(fallback);
            }
            return;
        }
        if (!params[key].is_number()) {
            errs.add("params key \"" + key + "\" must be a number");
            ok = false;
            return;
        }
        dst = params[key].get<double>();
        sig << ";" << key << "=" << fmt_double(dst);
    };

    if (model_id == "classical_fp") {
        check_known_keys(params, {"K", "sigma"}, "params", errs);
        model.kind = ModelKind::ClassicalFP;
        profile("K", model.K);
        profile("sigma", model.sigma);
    } else if (model_id == "opinion") {
        check_known_keys(params, {"gamma", "sigma2"}, "params", errs);
        model.kind = ModelKind::Opinion;
        profile("gamma", model.gamma);
        scalar("sigma2", model.sigma2, true, 0.0);
    } else if (model_id == "bounded_confidence") {
        check_known_keys(params, {"Delta", "sigma2", "kernel", "beta"}, "params", errs);
        model.kind = ModelKind::BoundedConfidence;
        profile("Delta", model.Delta);
        scalar("sigma2", model.sigma2, true, 0.0);
        model.kernel = BcKernel::Indicator;
        std::string kernel_name = "indicator";
        if (params.contains("kernel")) {
            if (!params["kernel"].is_string()) {
                errs.add("params key \"kernel\" must be a string");
                ok = false;
            } else {
                kernel_name = params["kernel"].get<std::string>();
                if (kernel_name == "indicator") {
                    model.kernel = BcKernel::Indicator;
                } else if (kernel_name == "sigmoid") {
                    model.kernel = BcKernel::Sigmoid;
                } else {
                    errs.add("params key \"kernel\" must be \"indicator\" or \"sigmoid\"");
                    ok = false;
                }
            }
        }
        sig << ";kernel=" << kernel_name;
        scalar("beta", model.beta, false, 10.0);
    } else if (model_id == "swarming") {
        check_known_keys(params, {"alpha", "D"}, "params", errs);
        model.kind = ModelKind::Swarming;
        profile("alpha", model.alpha);
        profile("D", model.D);
    } else {
        errs.add("unknown model \"" + model_id +
                 "\" (expected classical_fp, opinion, bounded_confidence, or swarming)");
        return false;
    }
    signature = sig.str();
    return ok;
}

std::vector<double> zprobe_points() {
    std::vector<double> pts;
    for (int i = 0; i <= 32; ++i) pts.push_back(-1.0 + 2.0 * i / 32.0);
    return pts;
}

} // namespace

int resolve_quadrature_size(const Model& m, int M) {
    if (m.kind == ModelKind::BoundedConfidence && m.kernel == BcKernel::Indicator)
        return 64;
    return default_quadrature_size(M);
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config root must be a JSON object");

    Collector errs;
    RunConfig cfg;
    cfg.name = name;

    check_known_keys(root,
                     {"model", "params", "scheme", "M", "N", "Nq", "dt", "T", "domain",
                      "output_times", "output_dir", "sweep", "reference", "threads"},
                     "config", errs);

    bool model_ok = false;
    if (!root.contains("model")) {
        errs.add("missing required key \"model\"");
    } else if (!root["model"].is_string()) {
        errs.add("\"model\" must be a string");
    } else {
        cfg.model_id = root["model"].get<std::string>();
        if (!root.contains("params")) {
            errs.add("missing required key \"params\"");
        } else if (!root["params"].is_object()) {
            errs.add("\"params\" must be an object");
        } else {
            model_ok = parse_model_params(root["params"], cfg.model_id, cfg.model,
                                          cfg.params_signature, errs);
        }
    }

    if (!root.contains("scheme")) {
        errs.add("missing required key \"scheme\"");
    } else if (!root["scheme"].is_string()) {
        errs.add("\"scheme\" must be a string");
    } else {
        const std::string s = root["scheme"].get<std::string>();
        if (s == "cdsg")
            cfg.scheme = Scheme::CDsG;
        else if (s == "mmsg")
            cfg.scheme = Scheme::MMsG;
        else
            errs.add("\"scheme\" must be \"cdsg\" or \"mmsg\"");
    }

    auto require_int = [&](const std::string& key, int& dst, int min_value) {
        if (!root.contains(key)) {
            errs.add("missing required key \"" + key + "\"");
            return;
        }
        int v;
        if (!get_int(root[key], v)) {
            errs.add("\"" + key + "\" must be an integer");
            return;
        }
        if (v < min_value) {
            errs.add("\"" + key + "\" must be >= " + std::to_string(min_value));
            return;
        }
        dst = v;
    };
    require_int("M", cfg.M, 0);
    require_int("N", cfg.N, 3);

    double dt = 0.0, T = 0.0;
    if (require_number(root, "dt", dt, "config", errs)) {
        if (dt > 0.0)
            cfg.dt = dt;
        else
            errs.add("\"dt\" must be positive");
    }
    if (require_number(root, "T", T, "config", errs)) {
        if (T > 0.0)
            cfg.T = T;
        else
            errs.add("\"T\" must be positive");
    }
    if (dt > 0.0 && T > 0.0) {
        const double n = std::round(T / dt);
        if (n < 1.0 || std::abs(n * dt - T) > 1e-9 * std::max(1.0, std::abs(T)))
            errs.add("\"T\" must be an integer multiple of \"dt\"");
    }

    if (root.contains("Nq")) {
        int v;
        if (!get_int(root["Nq"], v))
            errs.add("\"Nq\" must be an integer");
        else if (v < cfg.M + 1)
            errs.add("\"Nq\" must be at least M+1");
        else
            cfg.Nq = v;
    }

    bool domain_given = false;
    if (root.contains("domain")) {
        const json& d = root["domain"];
        if (d.is_array() && d.size() == 2 && d[0].is_number() && d[1].is_number()) {
            cfg.vmin = d[0].get<double>();
            cfg.vmax = d[1].get<double>();
            if (cfg.vmin < cfg.vmax)
                domain_given = true;
            else
                errs.add("\"domain\" must satisfy v_min < v_max");
        } else {
            errs.add("\"domain\" must be a two-element numeric array [v_min, v_max]");
        }
    }

    if (root.contains("output_times")) {
        const json& ot = root["output_times"];
        if (!ot.is_array()) {
            errs.add("\"output_times\" must be an array of numbers");
        } else {
            bool ok = true;
            for (const auto& v : ot) {
                if (!v.is_number()) {
                    errs.add("\"output_times\" must contain only numbers");
                    ok = false;
                    break;
                }
                cfg.output_times.push_back(v.get<double>());
            }
            if (ok) {
                for (size_t i = 0; i < cfg.output_times.size(); ++i) {
                    const double t = cfg.output_times[i];
                    if (t < -1e-12 || t > cfg.T + 1e-12) {
                        errs.add("output time " + fmt_double(t) + " lies outside [0, T]");
                        break;
                    }
                    if (i > 0 && t <= cfg.output_times[i - 1]) {
                        errs.add("\"output_times\" must be strictly increasing");
                        break;
                    }
                }
            }
        }
    }

    if (root.contains("output_dir")) {
        if (!root["output_dir"].is_string() || root["output_dir"].get<std::string>().empty())
            errs.add("\"output_dir\" must be a nonempty string");
        else
            cfg.output_dir = root["output_dir"].get<std::string>();
    }

    if (root.contains("sweep")) {
        const json& sw = root["sweep"];
        if (!sw.is_object()) {
            errs.add("\"sweep\" must be an object");
        } else {
            check_known_keys(sw, {"parameter", "values"}, "sweep", errs);
            SweepSpec spec;
            if (!sw.contains("parameter") || !sw["parameter"].is_string()) {
                errs.add("sweep requires a string key \"parameter\"");
            } else {
                spec.parameter = sw["parameter"].get<std::string>();
                if (spec.parameter != "M" && spec.parameter != "N" &&
                    spec.parameter != "dt" && spec.parameter != "beta")
                    errs.add("sweep parameter must be one of M, N, dt, beta");
            }
            if (!sw.contains("values") || !sw["values"].is_array() || sw["values"].empty()) {
                errs.add("sweep requires a nonempty array \"values\"");
            } else {
                for (const auto& v : sw["values"]) {
                    if (!v.is_number()) {
                        errs.add("sweep values must be numbers");
                        break;
                    }
                    spec.values.push_back(v.get<double>());
                }
                if (spec.parameter == "M" || spec.parameter == "N") {
                    for (double v : spec.values) {
                        if (v != std::floor(v) || v < (spec.parameter == "M" ? 0.0 : 3.0)) {
                            errs.add("sweep values for " + spec.parameter +
                                     " must be integers in the parameter's valid range");
                            break;
                        }
                    }
                } else {
                    for (double v : spec.values) {
                        if (v <= 0.0) {
                            errs.add("sweep values for " + spec.parameter + " must be positive");
                            break;
                        }
                    }
                }
            }
            if (spec.parameter == "beta" &&
                (cfg.model_id != "bounded_confidence" || cfg.model.kernel != BcKernel::Sigmoid))
                errs.add("a beta sweep requires the bounded_confidence model with the sigmoid kernel");
            cfg.sweep = std::move(spec);
        }
    }

    if (root.contains("reference")) {
        const json& ref = root["reference"];
        if (ref.is_boolean()) {
            cfg.with_reference = ref.get<bool>();
        } else if (ref.is_object()) {
            check_known_keys(ref, {"M", "N"}, "reference", errs);
            cfg.with_reference = true;
            int v;
            if (ref.contains("M")) {
                if (get_int(ref["M"], v) && v >= 1)
                    cfg.ref_M = v;
                else
                    errs.add("reference \"M\" must be a positive integer");
            }
            if (ref.contains("N")) {
                if (get_int(ref["N"], v) && v >= 3)
                    cfg.ref_N = v;
                else
                    errs.add("reference \"N\" must be an integer >= 3");
            }
        } else {
            errs.add("\"reference\" must be a boolean or an object with keys M, N");
        }
    }

    if (root.contains("threads")) {
        int v;
        if (get_int(root["threads"], v) && v >= 1)
            cfg.threads = v;
        else
            errs.add("\"threads\" must be a positive integer");
    }

    if (model_ok) {
        try {
            validate_model(cfg.model, zprobe_points());
        } catch (const std::exception& e) {
            errs.add(e.what());
        }
        if (!domain_given) {
            auto dom = default_domain(cfg.model);
            cfg.vmin = dom.first;
            cfg.vmax = dom.second;
        }
        if (cfg.Nq == 0) cfg.Nq = resolve_quadrature_size(cfg.model, cfg.M);
        if (cfg.Nq < cfg.M + 1) errs.add("resolved Nq is smaller than M+1; set \"Nq\" explicitly");
    }

    // An explicitly empty list suppresses the timeseries (final snapshot
    // only); the default applies when the key is absent.
    if (!root.contains("output_times")) {
        const double half = std::round(0.5 * cfg.T / cfg.dt) * cfg.dt;
        cfg.output_times = {0.0, half, cfg.T};
        if (half <= 0.0 || half >= cfg.T) cfg.output_times = {0.0, cfg.T};
    }

    if (!errs.errors.empty()) errs.raise();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), std::filesystem::path(path).stem().string());
}

RunConfig sweep_variant(const RunConfig& base, double value) {
    RunConfig cfg = base;
    cfg.sweep.reset();
    const std::string& p = base.sweep ? base.sweep->parameter : "";
    if (p == "M") {
        cfg.M = static_cast<int>(value);
        cfg.Nq = resolve_quadrature_size(cfg.model, cfg.M);
    } else if (p == "N") {
        cfg.N = static_cast<int>(value);
    } else if (p == "dt") {
        cfg.dt = value;
        const double n = std::round(cfg.T / cfg.dt);
        if (n < 1.0 || std::abs(n * cfg.dt - cfg.T) > 1e-9 * std::max(1.0, std::abs(cfg.T)))
            throw ConfigError("sweep dt value " + fmt_double(value) +
                              " does not divide the horizon T");
    } else if (p == "beta") {
        cfg.model.beta = value;
        cfg.params_signature += ";beta=" + fmt_double(value);
    } else {
        throw ConfigError("sweep_variant called without a sweep parameter");
    }
    return cfg;
}

} // namespace fpsg
