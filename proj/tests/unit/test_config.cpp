#include "catch_amalgamated.hpp"
#include "sddhopf/config.hpp"

using namespace sddhopf;

namespace {

ErrorKind kind_of(const std::string& text) {
    try {
        parse_config(text);
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::InternalCheck;
}

}  // namespace

TEST_CASE("Empty configuration gives the Hes1 defaults", "[config]") {
    const RunConfig cfg = parse_config("{}");
    CHECK(cfg == RunConfig{});
    CHECK(cfg.model.mu_m == 0.03);
    CHECK(cfg.model.nonlinearity.half == 1200.0);
    CHECK(cfg.analysis.terms == "corrected");
    CHECK(cfg.output.format == "text");
}

TEST_CASE("Configuration round-trips through JSON", "[config]") {
    RunConfig cfg;
    cfg.model.c = 0.025;
    cfg.model.nonlinearity.kind = "polynomial";
    cfg.model.nonlinearity.f = {1.0, -1e-4};
    cfg.model.nonlinearity.g = {0.0, 10.0};
    cfg.analysis.system = "original";
    cfg.analysis.terms = "printed";
    cfg.analysis.perturbation = {-3.0, 7.0};
    cfg.analysis.sweep.x = {"eps", {}, -0.2, 0.2, 5, true};
    cfg.analysis.sweep.y = {"mu_p", {0.03, 0.04}, 0.0, 0.0, 0, false};
    cfg.output = {"json", "out.json", 0.25};
    CHECK(config_from_json(config_to_json(cfg)) == cfg);
    CHECK(parse_config(config_to_json(cfg).dump()) == cfg);
}

TEST_CASE("Unknown keys and bad values are configuration errors", "[config]") {
    CHECK(kind_of(R"({"modle": {}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"model": {"mu": 1}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"model": {"nonlinearity": {"kind": "hill"}}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"analysis": {"terms": "other"}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"analysis": {"system": "both"}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"analysis": {"sweep": {"x": {"param": "zeta"}}}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"analysis": {"sweep": {"x": {"param": "mu_m", "relative": true}}}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"analysis": {"transient": 1.5}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"output": {"format": "xml"}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"model": {"eps": "six"}})") == ErrorKind::Config);
    CHECK(kind_of(R"({"model": )") == ErrorKind::Config);
    CHECK(kind_of("[]") == ErrorKind::Config);
}

TEST_CASE("Model parameters from a configuration are validated", "[config]") {
    ModelConfig m;
    m.mu_m = -1.0;
    try {
        make_params(m);
        FAIL("expected Config");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Config);
    }
    const ModelParams p = make_params(ModelConfig{});
    CHECK(p.nonlinearity.f(1200.0).value == 17.5);
}

TEST_CASE("Sweep axes expand to grids", "[config]") {
    AxisConfig a{"eps", {}, 1.0, 2.0, 5, false};
    CHECK(a.grid() == std::vector<double>{1.0, 1.25, 1.5, 1.75, 2.0});
    a.count = 1;
    CHECK(a.grid() == std::vector<double>{1.0});
    a.values = {3.0, 4.0};
    CHECK(a.grid() == std::vector<double>{3.0, 4.0});
}

TEST_CASE("Missing configuration file", "[config]") {
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}
