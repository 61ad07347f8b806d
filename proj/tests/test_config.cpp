#include <doctest.h>

#include <string>

#include "fpsg/config.hpp"

using namespace fpsg;

namespace {

const char* minimal_classical = R"({
    "model": "classical_fp",
    "params": {"K": [1.0, 0.5], "sigma": 1.0},
    "scheme": "mmsg",
    "M": 5, "N": 41, "dt": 0.1, "T": 1.0
})";

std::string parse_error(const std::string& text) {
    try {
        parse_config_text(text, "test");
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

bool mentions(const std::string& msg, const std::string& needle) {
    return msg.find(needle) != std::string::npos;
}

} // namespace

TEST_CASE("a minimal config resolves every derived field") {
    RunConfig cfg = parse_config_text(minimal_classical, "mini");
    CHECK(cfg.name == "mini");
    CHECK(cfg.model_id == "classical_fp");
    CHECK(cfg.scheme == Scheme::MMsG);
    CHECK(cfg.M == 5);
    CHECK(cfg.N == 41);
    CHECK(cfg.Nq == 32); // order-driven default for M = 5
    CHECK(cfg.dt == 0.1);
    CHECK(cfg.T == 1.0);
    CHECK(cfg.model.K(0.4) == doctest::Approx(1.2).epsilon(1e-15));
    CHECK(cfg.model.sigma(-0.9) == 1.0);
    // default domain for constant sigma = 1: +-8
    CHECK(cfg.vmin == doctest::Approx(-8.0));
    CHECK(cfg.vmax == doctest::Approx(8.0));
    // absent output_times default to start, midpoint, end
    REQUIRE(cfg.output_times.size() == 3);
    CHECK(cfg.output_times[0] == 0.0);
    CHECK(cfg.output_times[1] == doctest::Approx(0.5));
    CHECK(cfg.output_times[2] == 1.0);
    CHECK(!cfg.sweep.has_value());
    CHECK(!cfg.with_reference);
    CHECK(!cfg.params_signature.empty());
}

TEST_CASE("an explicitly empty output list suppresses the timeseries") {
    std::string text = std::string(minimal_classical);
    text.insert(text.rfind('}'), ", \"output_times\": []");
    RunConfig cfg = parse_config_text(text, "test");
    CHECK(cfg.output_times.empty());
}

TEST_CASE("unknown keys are rejected at every nesting level") {
    std::string top = parse_error(R"({
        "model": "classical_fp", "params": {"K": 1.0, "sigma": 1.0},
        "scheme": "mmsg", "M": 2, "N": 11, "dt": 0.1, "T": 1.0,
        "timestep": 0.1
    })");
    CHECK(mentions(top, "unknown key \"timestep\""));

    std::string inparams = parse_error(R"({
        "model": "classical_fp", "params": {"K": 1.0, "sigma": 1.0, "Kappa": 2.0},
        "scheme": "mmsg", "M": 2, "N": 11, "dt": 0.1, "T": 1.0
    })");
    CHECK(mentions(inparams, "unknown key \"Kappa\""));

    std::string insweep = parse_error(R"({
        "model": "classical_fp", "params": {"K": 1.0, "sigma": 1.0},
        "scheme": "mmsg", "M": 2, "N": 11, "dt": 0.1, "T": 1.0,
        "sweep": {"parameter": "M", "values": [1, 2], "step": 1}
    })");
    CHECK(mentions(insweep, "unknown key \"step\""));
}

TEST_CASE("all violations are reported together") {
    std::string msg = parse_error(R"({
        "model": "classical_fp", "params": {"K": 1.0, "sigma": 1.0},
        "scheme": "leapfrog", "M": -3, "N": 2, "dt": 0.1, "T": 1.0
    })");
    CHECK(mentions(msg, "scheme"));
    CHECK(mentions(msg, "\"M\""));
    CHECK(mentions(msg, "\"N\""));
}

TEST_CASE("validation failures") {
    SUBCASE("horizon must be a whole number of steps") {
        std::string msg = parse_error(R"({
            "model": "classical_fp", "params": {"K": 1.0, "sigma": 1.0},
            "scheme": "mmsg", "M": 2, "N": 11, "dt": 0.3, "T": 1.0
        })");
        CHECK(mentions(msg, "integer multiple"));
    }
    SUBCASE("model coefficients are probed over the parameter range") {
        // K = z dips below zero inside [-1,1]
        std::string msg = parse_error(R"({
            "model": "classical_fp", "params": {"K": [0.0, 1.0], "sigma": 1.0},
            "scheme": "mmsg", "M": 2, "N": 11, "dt": 0.1, "T": 1.0
        })");
        CHECK(mentions(msg, "K(z) must be positive"));
    }
    SUBCASE("output times must lie inside the horizon and increase") {
        std::string text = std::string(minimal_classical);
        text.insert(text.rfind('}'), ", \"output_times\": [0.0, 2.0]");
        CHECK(mentions(parse_error(text), "outside [0, T]"));
        text = std::string(minimal_classical);
        text.insert(text.rfind('}'), ", \"output_times\": [0.5, 0.5]");
        CHECK(mentions(parse_error(text), "strictly increasing"));
    }
    SUBCASE("profiles must be numbers or affine pairs") {
        std::string msg = parse_error(R"({
            "model": "classical_fp", "params": {"K": "one", "sigma": 1.0},
            "scheme": "mmsg", "M": 2, "N": 11, "dt": 0.1, "T": 1.0
        })");
        CHECK(mentions(msg, "\"K\""));
    }
    SUBCASE("quadrature size must cover the basis") {
        std::string text = std::string(minimal_classical);
        text.insert(text.rfind('}'), ", \"Nq\": 4");
        CHECK(mentions(parse_error(text), "at least M+1"));
    }
}

TEST_CASE("sweep declarations are validated") {
    SUBCASE("valid integer sweep") {
        std::string text = std::string(minimal_classical);
        text.insert(text.rfind('}'), R"(, "sweep": {"parameter": "M", "values": [1, 3, 5]})");
        RunConfig cfg = parse_config_text(text, "test");
        REQUIRE(cfg.sweep.has_value());
        CHECK(cfg.sweep->parameter == "M");
        CHECK(cfg.sweep->values == std::vector<double>{1.0, 3.0, 5.0});
    }
    SUBCASE("non-integer values for M are refused") {
        std::string text = std::string(minimal_classical);
        text.insert(text.rfind('}'), R"(, "sweep": {"parameter": "M", "values": [1.5]})");
        CHECK(mentions(parse_error(text), "integers"));
    }
    SUBCASE("unknown parameter name") {
        std::string text = std::string(minimal_classical);
        text.insert(text.rfind('}'), R"(, "sweep": {"parameter": "Nq", "values": [8]})");
        CHECK(mentions(parse_error(text), "one of M, N, dt, beta"));
    }
    SUBCASE("beta sweeps need the sigmoid kernel") {
        std::string text = R"({
            "model": "bounded_confidence",
            "params": {"Delta": 0.5, "sigma2": 0.1},
            "scheme": "mmsg", "M": 2, "N": 11, "dt": 0.1, "T": 1.0,
            "sweep": {"parameter": "beta", "values": [10, 100]}
        })";
        CHECK(mentions(parse_error(text), "sigmoid"));
    }
}

TEST_CASE("sweep variants update the dependent fields") {
    std::string text = std::string(minimal_classical);
    text.insert(text.rfind('}'), R"(, "sweep": {"parameter": "M", "values": [1, 20]})");
    RunConfig base = parse_config_text(text, "test");

    RunConfig v = sweep_variant(base, 20.0);
    CHECK(v.M == 20);
    CHECK(v.Nq == 42); // re-resolved for the larger basis
    CHECK(!v.sweep.has_value());

    SUBCASE("dt variants must still divide the horizon") {
        base.sweep->parameter = "dt";
        CHECK_NOTHROW(sweep_variant(base, 0.05));
        CHECK_THROWS_AS(sweep_variant(base, 0.3), ConfigError);
    }
    SUBCASE("beta variants carry their value into the signature") {
        RunConfig bc = parse_config_text(R"({
            "model": "bounded_confidence",
            "params": {"Delta": [1.25, 0.25], "sigma2": 0.1, "kernel": "sigmoid", "beta": 10},
            "scheme": "mmsg", "M": 2, "N": 11, "dt": 0.1, "T": 1.0,
            "sweep": {"parameter": "beta", "values": [10, 100]}
        })", "test");
        RunConfig b100 = sweep_variant(bc, 100.0);
        CHECK(b100.model.beta == 100.0);
        CHECK(mentions(b100.params_signature, "beta=100"));
        CHECK(b100.params_signature != bc.params_signature);
    }
}

TEST_CASE("quadrature resolution pins the discontinuous kernel") {
    Model ind = make_bounded_confidence([](double) { return 0.5; }, 0.1);
    CHECK(resolve_quadrature_size(ind, 5) == 64);
    CHECK(resolve_quadrature_size(ind, 40) == 64);
    Model sig = make_bounded_confidence([](double) { return 0.5; }, 0.1, BcKernel::Sigmoid);
    CHECK(resolve_quadrature_size(sig, 5) == 32);
    Model cl = make_classical([](double) { return 1.0; }, [](double) { return 1.0; });
    CHECK(resolve_quadrature_size(cl, 40) == 82);
}

TEST_CASE("explicit quadrature sizes are honored") {
    std::string text = std::string(minimal_classical);
    text.insert(text.rfind('}'), ", \"Nq\": 40");
    RunConfig cfg = parse_config_text(text, "test");
    CHECK(cfg.Nq == 40);
}

TEST_CASE("every shipped configuration parses") {
    const char* names[] = {"test1a", "test1b", "test2", "test3",
                           "test3_sigmoid_beta10", "test3_sigmoid_beta100",
                           "test4_alpha2", "test4_alpha4"};
    for (const char* n : names) {
        std::string path = std::string(FPSG_REPO_DIR) + "/configs/" + n + ".json";
        RunConfig cfg = parse_config_file(path);
        CHECK(cfg.name == n);
        CHECK(cfg.N >= 3);
        CHECK(cfg.dt > 0.0);
        CHECK(cfg.T > 0.0);
    }
}

TEST_CASE("missing files and broken json raise the config error") {
    CHECK_THROWS_AS(parse_config_file("/nonexistent/nowhere.json"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{not json", "test"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[1,2]", "test"), ConfigError);
}
