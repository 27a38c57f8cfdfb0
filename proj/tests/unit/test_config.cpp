#include <catch_amalgamated.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "wgm/config.hpp"
#include "wgm/errors.hpp"

using namespace wgm;
using nlohmann::json;
using Catch::Matchers::WithinRel;

namespace {

json baseline() {
    std::ifstream in(std::string(WGM_CONFIG_DIR) + "/baseline.json");
    return json::parse(in);
}

std::string key_path_of(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.key_path();
    }
    return "<no error>";
}

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << text;
    return path;
}

}  // namespace

TEST_CASE("baseline file loads with the quoted rates") {
    const LoadedConfig c = load_config(std::string(WGM_CONFIG_DIR) + "/baseline.json");
    CHECK_THAT(to_hz_over_2pi(c.system.rates.kappa_ex), WithinRel(30e9, 1e-15));
    CHECK_THAT(to_hz_over_2pi(c.system.rates.gamma), WithinRel(6e6, 1e-15));
    CHECK_THAT(c.system.coupler.t, WithinRel(0.99, 1e-3));
    CHECK(c.system.coupler.t == c.system.coupler.alpha);
    CHECK(c.system.rates.omega_qe == c.system.geometry.resonance);
    CHECK(c.sweep.points == 2001);
    CHECK(c.sweep.methods.size() == 4);
    CHECK(c.warnings.empty());
    CHECK(c.source == baseline());
}

TEST_CASE("every shipped configuration loads") {
    for (const char* name : {"fig2a", "fig2b", "fig2c", "fig3a", "fig3b", "fig3c", "fig4a", "fig4b"}) {
        CAPTURE(name);
        CHECK_NOTHROW(load_config(std::string(WGM_CONFIG_DIR) + "/" + name + ".json"));
    }
    const LoadedConfig strong = load_config(std::string(WGM_CONFIG_DIR) + "/fig3c.json");
    CHECK(std::abs(strong.system.rates.g / strong.system.rates.kappa_tot() - 0.995) < 1e-3);
    const LoadedConfig split = load_config(std::string(WGM_CONFIG_DIR) + "/fig2c.json");
    CHECK_THAT(split.system.rates.epsilon, WithinRel(0.1, 1e-12));
}

TEST_CASE("an empty file reports the first missing key") {
    const auto path = temp_file("wgm_empty.json", "");
    try {
        load_config(path);
        FAIL("expected a ConfigError");
    } catch (const ConfigError& e) {
        CHECK(e.key_path() == "rates.kappa_ex_over_2pi_hz");
    }
    CHECK(key_path_of(json::object()) == "rates.kappa_ex_over_2pi_hz");
}

TEST_CASE("missing files and malformed JSON") {
    CHECK_THROWS_AS(load_config("/nonexistent/wgm.json"), IoError);
    CHECK_THROWS_AS(load_config(temp_file("wgm_bad.json", "{ not json")), ConfigError);
    CHECK(key_path_of(json::array()) == "");
}

TEST_CASE("unknown and mistyped keys carry their path") {
    json d = baseline();
    d["rates"]["kappa_typo_over_2pi_hz"] = 1.0;
    CHECK(key_path_of(d) == "rates.kappa_typo_over_2pi_hz");

    d = baseline();
    d["extra"] = 1;
    CHECK(key_path_of(d) == "extra");

    d = baseline();
    d["geometry"]["n_eff"] = "1.5";
    CHECK(key_path_of(d) == "geometry.n_eff");

    d = baseline();
    d["sweep"]["points"] = 2.5;
    CHECK(key_path_of(d) == "sweep.points");

    d = baseline();
    d["sweep"]["methods"] = {"tm", "magic"};
    CHECK(key_path_of(d) == "sweep.methods");

    d = baseline();
    d["rates"]["gamma_over_2pi_hz"] = -1.0;
    CHECK(key_path_of(d) == "rates.gamma_over_2pi_hz");

    d = baseline();
    d["geometry"].erase("radius_m");
    CHECK(key_path_of(d) == "geometry.radius_m");
}

TEST_CASE("bridged pairs: either member, or both when consistent") {
    const double fsr = hz_over_2pi(3e12);
    json d = baseline();
    d["rates"]["Gamma_over_2pi_hz"] = 600e6;
    const LoadedConfig from_decay = parse_config(d);

    d["rates"].erase("Gamma_over_2pi_hz");
    d["rates"]["g_over_2pi_hz"] = to_hz_over_2pi(from_decay.system.rates.g);
    const LoadedConfig from_g = parse_config(d);
    CHECK_THAT(from_g.system.rates.emitter_decay, WithinRel(from_decay.system.rates.emitter_decay, 1e-12));

    // bridge residual for a deliberately wrong pair
    d["rates"]["Gamma_over_2pi_hz"] = 600e6;
    d["rates"]["g_over_2pi_hz"] = 30e9;
    const double residual = std::abs(std::pow(hz_over_2pi(30e9), 2) -
                                     hz_over_2pi(600e6) * (2 * fsr - hz_over_2pi(60e9)));
    REQUIRE(residual > 0.1 * std::pow(hz_over_2pi(30e9), 2));
    CHECK(key_path_of(d) == "rates.g_over_2pi_hz");

    d = baseline();
    d["rates"].erase("h_over_2pi_hz");
    d["rates"]["epsilon"] = 0.01;
    const LoadedConfig eps = parse_config(d);
    CHECK_THAT(eps.system.rates.h, WithinRel(eps.system.rates.kappa_in, 1e-12));
    d["rates"]["h_over_2pi_hz"] = 31e9;
    CHECK(key_path_of(d) == "rates.h_over_2pi_hz");
    d["rates"]["h_over_2pi_hz"] = 30e9;
    CHECK_NOTHROW(parse_config(d));
}

TEST_CASE("invariant violations name a key") {
    json d = baseline();
    d["drive"]["alpha_in"] = 0.7;
    CHECK(key_path_of(d) == "drive.alpha_in");

    d = baseline();
    d["drive"]["alpha_in"] = 0.3;
    CHECK(parse_config(d).warnings.size() == 1);

    d = baseline();
    d["sigma_z"] = 2.0;
    CHECK(key_path_of(d) == "sigma_z");

    d = baseline();
    d["direction"] = "up";
    CHECK(key_path_of(d) == "direction");

    d = baseline();
    d["sweep"]["points"] = 1;
    CHECK(key_path_of(d) == "sweep.points");

    d = baseline();
    d["sweep"]["min_over_kappa_tot"] = 20;
    CHECK(key_path_of(d) == "sweep.min_over_kappa_tot");

    d = baseline();
    d["truncation"] = {{"n_max_a", 1}, {"n_max_b", 1}};
    CHECK(key_path_of(d) == "truncation");

    d = baseline();
    d["rates"]["kappa_ex_over_2pi_hz"] = 6e12;  // kappa_tot > 2F
    CHECK(key_path_of(d) == "rates.kappa_ex_over_2pi_hz");

    d = baseline();
    d["rates"]["epsilon"] = 2.0;
    d["rates"].erase("h_over_2pi_hz");
    CHECK(key_path_of(d) == "rates.epsilon");

    d = baseline();
    d["compare"] = {{"tolerances", {{"tm-spt", 0.1}}}};
    CHECK(key_path_of(d) == "compare.tolerances.tm-spt");
}

TEST_CASE("optional sections") {
    json d = baseline();
    d["direction"] = "backward";
    d["bridge_form"] = "first_order";
    d["compare"] = {{"default_tolerance", 0.05}, {"tolerances", {{"spt:tm", 0.02}}}};
    d["truncation"] = {{"n_max_a", 3}, {"n_max_b", 5}};
    d["rates"]["omega_qe_over_2pi_hz"] = 193.4e12 + 1e9;
    const LoadedConfig c = parse_config(d);
    CHECK(c.system.direction == Direction::Backward);
    CHECK(c.sweep.directions == std::vector<Direction>{Direction::Backward});
    CHECK(c.system.bridge_form == BridgeForm::FirstOrder);
    CHECK_THAT(c.system.coupler.t, WithinRel(0.99, 1e-12));
    CHECK(c.compare.default_tolerance == 0.05);
    CHECK(c.compare.tolerance(Method::Tm, Method::Spt) == 0.02);
    CHECK(c.compare.tolerance(Method::Spt, Method::CqedSemiclassical) == 1e-12);
    CHECK(c.sweep.truncation.n_max_a == 3);
    CHECK(c.sweep.truncation.n_max_b == 5);
    CHECK_THAT(c.system.emitter_detuning(0.0), WithinRel(-hz_over_2pi(1e9), 1e-3));
}

TEST_CASE("describe reports derived values in /2pi Hz") {
    const LoadedConfig c = load_config(std::string(WGM_CONFIG_DIR) + "/fig3c.json");
    const json j = describe(c.system);
    CHECK_THAT(j["kappa_tot_over_2pi_hz"].get<double>(), WithinRel(60e9, 1e-12));
    CHECK_THAT(j["Gamma_over_2pi_hz"].get<double>(), WithinRel(600e6, 1e-12));
    CHECK(j["direction"] == "forward");
}
