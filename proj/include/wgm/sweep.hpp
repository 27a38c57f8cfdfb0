#pragma once

// Detuning sweeps across the solvers, multi-method comparison and
// CSV/JSON output.

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "wgm/cqed.hpp"
#include "wgm/model.hpp"

namespace wgm {

enum class Method { Tm, Spt, CqedSemiclassical, CqedMaster };

inline constexpr Method kAllMethods[] = {Method::Tm, Method::Spt, Method::CqedSemiclassical, Method::CqedMaster};

std::string_view to_string(Method m);       // "tm", "spt", "cqed-semiclassical", "cqed-master"
std::string_view column_name(Method m);     // "T_tm", ...
Method parse_method(std::string_view s);
// Comma-separated list; duplicates removed, canonical order kept.
std::vector<Method> parse_method_list(std::string_view s);

struct SweepSpec {
    double min_over_kappa_tot = -10.0;
    double max_over_kappa_tot = 10.0;
    int points = 2001;
    std::vector<Method> methods{std::begin(kAllMethods), std::end(kAllMethods)};
    std::vector<Direction> directions{Direction::Forward};
    int master_stride = 10;
    cqed::HilbertSpace truncation;

    // Throws ConfigError naming the offending sweep key.
    void validate() const;
    // Detunings in units of kappa_tot; mirror-symmetric when min = -max.
    std::vector<double> grid() const;
    bool has(Method m) const;
};

struct MasterDiagnostics {
    double residual = 0.0;
    cqed::PhysicalityReport physicality;
};

struct Series {
    Method method = Method::Spt;
    Direction direction = Direction::Forward;
    std::vector<std::optional<double>> transmission;
    // Populated for the master-equation method only.
    std::vector<std::optional<MasterDiagnostics>> diagnostics;

    bool operator==(const Series&) const = default;
};

struct Spectrum {
    std::vector<double> detuning_over_kappa_tot;
    double kappa_tot = 0.0;  // rad/s
    std::vector<Series> series;
    nlohmann::json metadata = nlohmann::json::object();

    const Series* find(Method m, Direction d) const;
    bool operator==(const Spectrum&) const = default;
};

bool operator==(const MasterDiagnostics& a, const MasterDiagnostics& b);

struct SweepOptions {
    unsigned threads = 0;  // 0: hardware concurrency
    cqed::SteadyStateOptions master;
};

// Evaluates every selected method and direction at each grid point. The
// master equation runs on every master_stride-th point only. Solver
// failures surface as SolverError naming the method and grid point.
Spectrum run_sweep(const SystemConfig& config, const SweepSpec& spec, const SweepOptions& options = {},
                   const nlohmann::json& config_echo = nullptr);

struct CompareOptions {
    double default_tolerance = 1e-2;
    // Keyed "first:second" with method names in canonical order, e.g. "tm:spt".
    std::map<std::string, double> tolerances;

    double tolerance(Method a, Method b) const;
    static std::string pair_key(Method a, Method b);
    // Default tolerances: the weak-probe semiclassical and transport forms are
    // algebraically identical when sigma_z = -1.
    static CompareOptions defaults_for(const SystemConfig& config);
};

struct PairComparison {
    Method first = Method::Tm;
    Method second = Method::Spt;
    Direction direction = Direction::Forward;
    std::size_t points = 0;
    double max_abs_diff = 0.0;
    double mean_abs_diff = 0.0;
    double worst_detuning_over_kappa_tot = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

struct Dip {
    double detuning_over_kappa_tot = 0.0;
    double transmission = 0.0;
};

struct SeriesDips {
    Method method = Method::Spt;
    Direction direction = Direction::Forward;
    std::vector<Dip> dips;
};

struct CompareReport {
    std::vector<PairComparison> pairs;
    std::vector<SeriesDips> dips;

    bool pass() const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

// Strict local minima over the points where `values` is present.
std::vector<Dip> find_local_minima(std::span<const double> detunings, std::span<const std::optional<double>> values);

// Merges the spectra (grids must match exactly) and compares every pair of
// methods per direction. Throws DomainError on a grid mismatch.
CompareReport compare_report(std::span<const Spectrum> spectra, const CompareOptions& options);
CompareReport compare_report(const Spectrum& spectrum, const CompareOptions& options);

struct ChiralityReport {
    Spectrum spectrum;
    double detuning_over_kappa_tot = 0.0;  // grid point nearest resonance
    std::map<Method, double> forward;
    std::map<Method, double> backward;

    nlohmann::json to_json() const;
};

// Forward and backward sweeps of the same configuration, with the
// transmission at the grid point nearest zero detuning.
ChiralityReport chirality_report(const SystemConfig& config, SweepSpec spec, const SweepOptions& options = {},
                                 const nlohmann::json& config_echo = nullptr);

enum class OutputFormat { Csv, Json };

OutputFormat parse_output_format(std::string_view s);

// CSV: one column per method (suffixed _forward/_backward when both
// directions are present), 12 significant digits, empty cells where the
// master equation was not evaluated. JSON mirrors Spectrum.
void emit(const Spectrum& spectrum, OutputFormat format, std::ostream& out);
void emit(const Spectrum& spectrum, OutputFormat format, const std::filesystem::path& path);

nlohmann::json to_json(const Spectrum& spectrum);
Spectrum spectrum_from_json(const nlohmann::json& j);
Spectrum read_spectrum_json(const std::filesystem::path& path);

}  // namespace wgm
