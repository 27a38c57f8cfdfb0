#include "wgm/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <sstream>

#include "wgm/errors.hpp"

namespace wgm {

namespace {

using nlohmann::json;

class Section {
public:
    Section(const json& parent, std::string_view name, std::string path,
            std::initializer_list<std::string_view> allowed)
        : path_(std::move(path)) {
        const auto it = parent.find(name);
        if (it == parent.end()) {
            return;
        }
        if (!it->is_object()) {
            throw ConfigError(path_, "expected an object");
        }
        node_ = &*it;
        check_keys(allowed);
    }

    // Top-level document.
    Section(const json& document, std::initializer_list<std::string_view> allowed) {
        if (!document.is_object()) {
            throw ConfigError("", "configuration must be a JSON object");
        }
        node_ = &document;
        check_keys(allowed);
    }

    std::string key_path(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    const json* find(std::string_view key) const {
        if (node_ == nullptr) return nullptr;
        const auto it = node_->find(key);
        return it == node_->end() ? nullptr : &*it;
    }

    const json& node() const { return *node_; }
    bool present() const { return node_ != nullptr; }

    std::optional<double> number(std::string_view key) const {
        const json* v = find(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_number()) throw ConfigError(key_path(key), "expected a number");
        const double d = v->get<double>();
        if (!std::isfinite(d)) throw ConfigError(key_path(key), "must be finite");
        return d;
    }

    double required_number(std::string_view key) const {
        const auto v = number(key);
        if (!v) throw ConfigError(key_path(key), "missing required key");
        return *v;
    }

    std::optional<int> integer(std::string_view key) const {
        const json* v = find(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_number_integer()) throw ConfigError(key_path(key), "expected an integer");
        return v->get<int>();
    }

    std::optional<std::string> string(std::string_view key) const {
        const json* v = find(key);
        if (v == nullptr) return std::nullopt;
        if (!v->is_string()) throw ConfigError(key_path(key), "expected a string");
        return v->get<std::string>();
    }

private:
    void check_keys(std::initializer_list<std::string_view> allowed) const {
        for (const auto& [key, value] : node_->items()) {
            bool known = false;
            for (std::string_view a : allowed) known = known || key == a;
            if (!known) throw ConfigError(key_path(key), "unknown key");
        }
    }

    const json* node_ = nullptr;
    std::string path_;
};

double non_negative(const Section& s, std::string_view key, double value) {
    if (!(value >= 0.0)) throw ConfigError(s.key_path(key), "must be non-negative");
    return value;
}

bool pair_consistent(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= kPairConsistencyTolerance * scale;
}

template <typename Fn>
auto with_path(const std::string& path, Fn&& fn) {
    try {
        return fn();
    } catch (const DomainError& e) {
        throw ConfigError(path, e.what());
    }
}

}  // namespace

LoadedConfig parse_config(const json& document) {
    const Section root(document, {"geometry", "rates", "drive", "direction", "sigma_z", "bridge_form", "sweep",
                                  "truncation", "compare", "description"});
    const Section rates(document, "rates", "rates",
                        {"kappa_in_over_2pi_hz", "kappa_ex_over_2pi_hz", "gamma_over_2pi_hz", "Gamma_over_2pi_hz",
                         "g_over_2pi_hz", "h_over_2pi_hz", "epsilon", "omega_qe_over_2pi_hz"});
    const Section geometry(document, "geometry", "geometry",
                           {"radius_m", "n_eff", "fsr_over_2pi_hz", "resonance_over_2pi_hz"});
    const Section drive(document, "drive", "drive", {"alpha_in"});
    const Section sweep(document, "sweep", "sweep",
                        {"min_over_kappa_tot", "max_over_kappa_tot", "points", "methods", "master_stride"});
    const Section truncation(document, "truncation", "truncation", {"n_max_a", "n_max_b"});
    const Section compare(document, "compare", "compare", {"default_tolerance", "tolerances"});

    LoadedConfig out;
    out.source = document;
    SystemConfig& sys = out.system;

    const double kappa_ex = non_negative(rates, "kappa_ex_over_2pi_hz", rates.required_number("kappa_ex_over_2pi_hz"));
    const double kappa_in = non_negative(rates, "kappa_in_over_2pi_hz", rates.required_number("kappa_in_over_2pi_hz"));
    const double gamma = non_negative(rates, "gamma_over_2pi_hz", rates.required_number("gamma_over_2pi_hz"));
    sys.rates.kappa_ex = hz_over_2pi(kappa_ex);
    sys.rates.kappa_in = hz_over_2pi(kappa_in);
    sys.rates.gamma = hz_over_2pi(gamma);

    const double fsr = hz_over_2pi(geometry.required_number("fsr_over_2pi_hz"));
    const double radius = geometry.required_number("radius_m");
    const double n_eff = geometry.required_number("n_eff");
    const double resonance = hz_over_2pi(geometry.required_number("resonance_over_2pi_hz"));
    sys.geometry = with_path("geometry", [&] { return RingGeometry::make(radius, n_eff, fsr, resonance); });

    if (const auto form = root.string("bridge_form")) {
        sys.bridge_form = with_path("bridge_form", [&] { return parse_bridge_form(*form); });
    }
    const double kappa_tot = sys.rates.kappa_tot();
    if (!(2.0 * fsr > kappa_tot)) {
        throw ConfigError("rates.kappa_ex_over_2pi_hz", "kappa_tot must stay below 2F");
    }

    const auto decay = rates.number("Gamma_over_2pi_hz");
    const auto coupling = rates.number("g_over_2pi_hz");
    if (decay) non_negative(rates, "Gamma_over_2pi_hz", *decay);
    if (coupling) non_negative(rates, "g_over_2pi_hz", *coupling);
    if (decay) {
        sys.rates.emitter_decay = hz_over_2pi(*decay);
        sys.rates.g = bridge_emitter(sys.rates.emitter_decay, fsr, kappa_tot);
        if (coupling && !pair_consistent(sys.rates.g, hz_over_2pi(*coupling))) {
            throw ConfigError("rates.g_over_2pi_hz", "inconsistent with Gamma: g^2 != Gamma (2F - kappa_tot)");
        }
    } else if (coupling) {
        sys.rates.g = hz_over_2pi(*coupling);
        sys.rates.emitter_decay = emitter_decay_from_coupling(sys.rates.g, fsr, kappa_tot);
    }

    const auto backscatter = rates.number("h_over_2pi_hz");
    const auto strength = rates.number("epsilon");
    if (backscatter) non_negative(rates, "h_over_2pi_hz", *backscatter);
    if (strength) non_negative(rates, "epsilon", *strength);
    if (strength) {
        sys.rates.epsilon = *strength;
        sys.rates.h = bridge_scatterer(*strength, fsr);
        if (backscatter && !pair_consistent(sys.rates.h, hz_over_2pi(*backscatter))) {
            throw ConfigError("rates.h_over_2pi_hz", "inconsistent with epsilon: h != epsilon F");
        }
    } else if (backscatter) {
        sys.rates.h = hz_over_2pi(*backscatter);
        sys.rates.epsilon = scatterer_strength_from_rate(sys.rates.h, fsr);
    }
    if (!(sys.rates.epsilon < std::numbers::pi / 2.0)) {
        throw ConfigError(strength ? "rates.epsilon" : "rates.h_over_2pi_hz", "scatterer strength must be below pi/2");
    }

    sys.rates.omega_qe = rates.number("omega_qe_over_2pi_hz")
                             ? hz_over_2pi(non_negative(rates, "omega_qe_over_2pi_hz",
                                                        *rates.number("omega_qe_over_2pi_hz")))
                             : resonance;

    sys.coupler = with_path("rates", [&] {
        return bridge_rates_to_coupler(sys.rates.kappa_in, sys.rates.kappa_ex, fsr, sys.bridge_form);
    });

    if (const auto alpha = drive.number("alpha_in")) {
        if (*alpha < 0.0 || *alpha > kMaxDriveAmplitude) {
            throw ConfigError("drive.alpha_in", "must lie in [0, 0.5]");
        }
        sys.drive_amplitude = *alpha;
    }
    if (const auto dir = root.string("direction")) {
        sys.direction = with_path("direction", [&] { return parse_direction(*dir); });
    }
    if (const auto sz = root.number("sigma_z")) {
        if (*sz < -1.0 || *sz > 1.0) throw ConfigError("sigma_z", "must lie in [-1, 1]");
        sys.sigma_z = *sz;
    }
    out.warnings = with_path("", [&] { return validate(sys); });

    SweepSpec& spec = out.sweep;
    spec.directions = {sys.direction};
    if (const auto v = sweep.number("min_over_kappa_tot")) spec.min_over_kappa_tot = *v;
    if (const auto v = sweep.number("max_over_kappa_tot")) spec.max_over_kappa_tot = *v;
    if (const auto v = sweep.integer("points")) spec.points = *v;
    if (const auto v = sweep.integer("master_stride")) spec.master_stride = *v;
    if (const json* methods = sweep.find("methods")) {
        if (!methods->is_array()) throw ConfigError("sweep.methods", "expected an array of method names");
        std::string joined;
        for (const auto& m : *methods) {
            if (!m.is_string()) throw ConfigError("sweep.methods", "expected an array of method names");
            joined += (joined.empty() ? "" : ",") + m.get<std::string>();
        }
        spec.methods = with_path("sweep.methods", [&] { return parse_method_list(joined); });
    }
    if (const auto v = truncation.integer("n_max_a")) spec.truncation.n_max_a = *v;
    if (const auto v = truncation.integer("n_max_b")) spec.truncation.n_max_b = *v;
    spec.validate();

    out.compare = CompareOptions::defaults_for(sys);
    if (const auto v = compare.number("default_tolerance")) {
        if (!(*v > 0.0)) throw ConfigError("compare.default_tolerance", "must be positive");
        out.compare.default_tolerance = *v;
    }
    if (const json* tol = compare.find("tolerances")) {
        if (!tol->is_object()) throw ConfigError("compare.tolerances", "expected an object");
        for (const auto& [key, value] : tol->items()) {
            const std::string path = "compare.tolerances." + key;
            const auto colon = key.find(':');
            if (colon == std::string::npos) throw ConfigError(path, "expected a key of the form method:method");
            const Method a = with_path(path, [&] { return parse_method(key.substr(0, colon)); });
            const Method b = with_path(path, [&] { return parse_method(key.substr(colon + 1)); });
            if (!value.is_number() || !(value.get<double>() > 0.0)) {
                throw ConfigError(path, "expected a positive number");
            }
            out.compare.tolerances[CompareOptions::pair_key(a, b)] = value.get<double>();
        }
    }
    return out;
}

LoadedConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open configuration file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    const std::string text = buffer.str();
    json document;
    if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
        document = json::object();
    } else {
        try {
            document = json::parse(text);
        } catch (const json::parse_error& e) {
            throw ConfigError("", std::string("invalid JSON: ") + e.what());
        }
    }
    return parse_config(document);
}

json describe(const SystemConfig& config) {
    const RateSet& r = config.rates;
    return json{
        {"kappa_in_over_2pi_hz", to_hz_over_2pi(r.kappa_in)},
        {"kappa_ex_over_2pi_hz", to_hz_over_2pi(r.kappa_ex)},
        {"kappa_tot_over_2pi_hz", to_hz_over_2pi(r.kappa_tot())},
        {"gamma_over_2pi_hz", to_hz_over_2pi(r.gamma)},
        {"Gamma_over_2pi_hz", to_hz_over_2pi(r.emitter_decay)},
        {"g_over_2pi_hz", to_hz_over_2pi(r.g)},
        {"g_over_kappa_tot", r.kappa_tot() > 0.0 ? r.g / r.kappa_tot() : 0.0},
        {"h_over_2pi_hz", to_hz_over_2pi(r.h)},
        {"h_over_kappa_in", r.kappa_in > 0.0 ? r.h / r.kappa_in : 0.0},
        {"epsilon", r.epsilon},
        {"omega_qe_over_2pi_hz", to_hz_over_2pi(r.omega_qe)},
        {"fsr_over_2pi_hz", to_hz_over_2pi(config.geometry.free_spectral_range)},
        {"round_trip_time_s", config.geometry.round_trip_time()},
        {"modal_number", config.geometry.modal_number},
        {"coupler", {{"t", config.coupler.t}, {"kappa", config.coupler.kappa_c}, {"alpha", config.coupler.alpha}}},
        {"drive_alpha_in", config.drive_amplitude},
        {"direction", to_string(config.direction)},
        {"sigma_z", config.sigma_z},
        {"bridge_form", to_string(config.bridge_form)},
    };
}

}  // namespace wgm
