// wgmtx: transmission spectra of a chiral emitter in a WGM ring.
//
//   wgmtx spectrum  --config c.json [--out f.csv] [--format csv|json] [--methods tm,spt] ...
//   wgmtx compare   --config c.json [--format json]
//   wgmtx chirality --config c.json
//   wgmtx validate  --config c.json
//
// Exit codes: 0 ok, 1 invalid config or arguments, 2 solver failure, 3 I/O.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "wgm/config.hpp"
#include "wgm/errors.hpp"
#include "wgm/sweep.hpp"

namespace {

enum Exit : int { kOk = 0, kInvalid = 1, kSolver = 2, kIo = 3 };

struct Common {
    std::string config;
    std::string out;
    std::string format;
    std::string methods;
    std::string direction;
    std::optional<int> points;
    std::string range;
    std::optional<int> stride;
    unsigned threads = 0;
};

void add_common(CLI::App* cmd, Common& c, bool sweep_flags) {
    cmd->add_option("--config", c.config, "JSON configuration file")->required();
    if (!sweep_flags) return;
    cmd->add_option("--out", c.out, "output file (default: stdout)");
    cmd->add_option("--format", c.format, "csv or json");
    cmd->add_option("--methods", c.methods, "comma-separated: tm,spt,cqed-semiclassical,cqed-master");
    cmd->add_option("--direction", c.direction, "forward, backward or both");
    cmd->add_option("--points", c.points, "grid points");
    cmd->add_option("--range", c.range, "min:max in units of kappa_tot (use --range=-10:10)");
    cmd->add_option("--master-stride", c.stride, "solve the master equation on every n-th point");
    cmd->add_option("--threads", c.threads, "worker threads (0: all cores)");
}

// Applies command-line overrides on top of the file's sweep section.
wgm::LoadedConfig load(const Common& c) {
    wgm::LoadedConfig loaded = wgm::load_config(c.config);
    wgm::SweepSpec& spec = loaded.sweep;
    if (!c.methods.empty()) spec.methods = wgm::parse_method_list(c.methods);
    if (!c.direction.empty()) {
        if (c.direction == "both") {
            spec.directions = {wgm::Direction::Forward, wgm::Direction::Backward};
        } else {
            spec.directions = {wgm::parse_direction(c.direction)};
        }
    }
    if (c.points) spec.points = *c.points;
    if (c.stride) spec.master_stride = *c.stride;
    if (!c.range.empty()) {
        const auto colon = c.range.find(':');
        if (colon == std::string::npos) throw wgm::ConfigError("--range", "expected min:max");
        try {
            std::size_t used = 0;
            spec.min_over_kappa_tot = std::stod(c.range.substr(0, colon), &used);
            if (used != colon) throw std::invalid_argument("trailing characters");
            const std::string upper = c.range.substr(colon + 1);
            spec.max_over_kappa_tot = std::stod(upper, &used);
            if (used != upper.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::logic_error&) {
            throw wgm::ConfigError("--range", "expected two numbers as min:max, got '" + c.range + "'");
        }
    }
    spec.validate();
    for (const auto& w : loaded.warnings) std::cerr << "warning: " << w << "\n";
    return loaded;
}

wgm::SweepOptions sweep_options(const Common& c) {
    wgm::SweepOptions o;
    o.threads = c.threads;
    return o;
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty()) {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw wgm::IoError("failed to write to stdout");
        return;
    }
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (f == nullptr) throw wgm::IoError("cannot open " + path + " for writing");
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !ok) throw wgm::IoError("failed to write " + path);
}

int run_spectrum(const Common& c) {
    const wgm::LoadedConfig loaded = load(c);
    const auto format = wgm::parse_output_format(c.format.empty() ? "csv" : c.format);
    const wgm::Spectrum s = wgm::run_sweep(loaded.system, loaded.sweep, sweep_options(c), loaded.source);
    if (c.out.empty()) {
        wgm::emit(s, format, std::cout);
    } else {
        wgm::emit(s, format, std::filesystem::path(c.out));
    }
    return kOk;
}

int run_compare(const Common& c) {
    wgm::LoadedConfig loaded = load(c);
    const bool json_out = c.format == "json";
    if (!c.format.empty() && !json_out && c.format != "text") {
        throw wgm::ConfigError("--format", "compare emits text or json");
    }
    const wgm::Spectrum s = wgm::run_sweep(loaded.system, loaded.sweep, sweep_options(c), loaded.source);
    const wgm::CompareReport report = wgm::compare_report(s, loaded.compare);
    if (json_out) {
        nlohmann::json j = report.to_json();
        j["metadata"] = s.metadata;
        write_text(j.dump(2) + "\n", c.out);
    } else {
        write_text(report.to_text(), c.out);
    }
    return kOk;
}

int run_chirality(const Common& c) {
    const wgm::LoadedConfig loaded = load(c);
    const wgm::ChiralityReport report =
        wgm::chirality_report(loaded.system, loaded.sweep, sweep_options(c), loaded.source);
    if (c.format == "json") {
        write_text(report.to_json().dump(2) + "\n", c.out);
        return kOk;
    }
    std::string text = "transmission at delta1/kappa_tot = " + std::to_string(report.detuning_over_kappa_tot) + "\n";
    for (const auto& [m, fwd] : report.forward) {
        char line[160];
        const auto bwd = report.backward.find(m);
        std::snprintf(line, sizeof line, "  %-20s forward %.12g  backward %.12g\n", std::string(wgm::to_string(m)).c_str(),
                      fwd, bwd == report.backward.end() ? 0.0 : bwd->second);
        text += line;
    }
    write_text(text, c.out);
    return kOk;
}

int run_validate(const Common& c) {
    const wgm::LoadedConfig loaded = wgm::load_config(c.config);
    loaded.sweep.validate();
    nlohmann::json j;
    j["valid"] = true;
    j["warnings"] = loaded.warnings;
    j["derived"] = wgm::describe(loaded.system);
    std::cout << j.dump(2) << "\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-photon transmission of a WGM ring with a chiral emitter and a backscatterer"};
    app.require_subcommand(1);

    Common spectrum, compare, chirality, check;
    add_common(app.add_subcommand("spectrum", "sweep the cavity detuning"), spectrum, true);
    add_common(app.add_subcommand("compare", "cross-method comparison report"), compare, true);
    add_common(app.add_subcommand("chirality", "forward and backward sweeps of one configuration"), chirality, true);
    add_common(app.add_subcommand("validate", "check a configuration without solving"), check, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kInvalid;
    }

    try {
        if (app.got_subcommand("spectrum")) return run_spectrum(spectrum);
        if (app.got_subcommand("compare")) return run_compare(compare);
        if (app.got_subcommand("chirality")) return run_chirality(chirality);
        return run_validate(check);
    } catch (const wgm::ConfigError& e) {
        std::cerr << "config error";
        if (!e.key_path().empty()) std::cerr << " at " << e.key_path();
        std::cerr << ": " << e.what() << "\n";
        return kInvalid;
    } catch (const wgm::DomainError& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kInvalid;
    } catch (const wgm::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIo;
    } catch (const wgm::Error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolver;
    } catch (const std::bad_alloc&) {
        std::cerr << "solver failure: out of memory\n";
        return kSolver;
    }
}
