#include "wgm/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <sstream>
#include <thread>

#include "wgm/config.hpp"
#include "wgm/errors.hpp"
#include "wgm/spt.hpp"
#include "wgm/transfer_matrix.hpp"

namespace wgm {

using nlohmann::json;

std::string_view to_string(Method m) {
    switch (m) {
        case Method::Tm: return "tm";
        case Method::Spt: return "spt";
        case Method::CqedSemiclassical: return "cqed-semiclassical";
        case Method::CqedMaster: return "cqed-master";
    }
    return "unknown";
}

std::string_view column_name(Method m) {
    switch (m) {
        case Method::Tm: return "T_tm";
        case Method::Spt: return "T_spt";
        case Method::CqedSemiclassical: return "T_cqed_semiclassical";
        case Method::CqedMaster: return "T_cqed_master";
    }
    return "T_unknown";
}

Method parse_method(std::string_view s) {
    for (Method m : kAllMethods) {
        if (s == to_string(m)) return m;
    }
    throw DomainError("unknown method '" + std::string(s) + "' (expected tm, spt, cqed-semiclassical or cqed-master)");
}

std::vector<Method> parse_method_list(std::string_view s) {
    std::vector<bool> selected(std::size(kAllMethods), false);
    std::size_t start = 0;
    while (start <= s.size()) {
        const std::size_t comma = std::min(s.find(',', start), s.size());
        std::string_view token = s.substr(start, comma - start);
        while (!token.empty() && token.front() == ' ') token.remove_prefix(1);
        while (!token.empty() && token.back() == ' ') token.remove_suffix(1);
        if (!token.empty()) selected[static_cast<std::size_t>(parse_method(token))] = true;
        start = comma + 1;
    }
    std::vector<Method> out;
    for (Method m : kAllMethods) {
        if (selected[static_cast<std::size_t>(m)]) out.push_back(m);
    }
    return out;
}

void SweepSpec::validate() const {
    if (points < 2) throw ConfigError("sweep.points", "at least 2 points are required");
    if (!(min_over_kappa_tot < max_over_kappa_tot)) {
        throw ConfigError("sweep.min_over_kappa_tot", "must be below sweep.max_over_kappa_tot");
    }
    if (std::abs(min_over_kappa_tot) > tm::kMaxDetuningOverKappaTot ||
        std::abs(max_over_kappa_tot) > tm::kMaxDetuningOverKappaTot) {
        throw ConfigError("sweep.max_over_kappa_tot", "detuning range limited to 1000 kappa_tot");
    }
    if (methods.empty()) throw ConfigError("sweep.methods", "at least one method must be selected");
    if (directions.empty()) throw ConfigError("direction", "at least one direction must be selected");
    if (master_stride < 1) throw ConfigError("sweep.master_stride", "must be at least 1");
    truncation.validate();
}

std::vector<double> SweepSpec::grid() const {
    std::vector<double> x(static_cast<std::size_t>(points));
    const double last = static_cast<double>(points - 1);
    for (int i = 0; i < points; ++i) {
        x[static_cast<std::size_t>(i)] =
            (min_over_kappa_tot * (last - i) + max_over_kappa_tot * static_cast<double>(i)) / last;
    }
    return x;
}

bool SweepSpec::has(Method m) const { return std::find(methods.begin(), methods.end(), m) != methods.end(); }

const Series* Spectrum::find(Method m, Direction d) const {
    for (const Series& s : series) {
        if (s.method == m && s.direction == d) return &s;
    }
    return nullptr;
}

bool operator==(const MasterDiagnostics& a, const MasterDiagnostics& b) {
    const auto& p = a.physicality;
    const auto& q = b.physicality;
    return a.residual == b.residual && p.trace_deviation == q.trace_deviation &&
           p.hermiticity_deviation == q.hermiticity_deviation && p.min_eigenvalue == q.min_eigenvalue &&
           p.top_fock_population_a == q.top_fock_population_a && p.top_fock_population_b == q.top_fock_population_b;
}

namespace {

template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
    unsigned workers = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
}

std::string format_g(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

}  // namespace

Spectrum run_sweep(const SystemConfig& config, const SweepSpec& spec, const SweepOptions& options,
                   const json& config_echo) {
    spec.validate();
    validate(config);

    Spectrum out;
    out.detuning_over_kappa_tot = spec.grid();
    out.kappa_tot = config.rates.kappa_tot();
    const std::size_t n = out.detuning_over_kappa_tot.size();

    struct Job {
        Series series;
        SystemConfig config;
        std::optional<cqed::MasterEquationSolver> master;
    };
    std::vector<Job> jobs;
    for (Direction d : spec.directions) {
        SystemConfig cfg = config;
        cfg.direction = d;
        for (Method m : spec.methods) {
            Job job{Series{m, d, std::vector<std::optional<double>>(n), {}}, cfg, std::nullopt};
            if (m == Method::CqedMaster) {
                job.series.diagnostics.resize(n);
                job.master.emplace(cfg, spec.truncation, options.master);
            }
            jobs.push_back(std::move(job));
        }
    }

    std::vector<std::exception_ptr> failures(n * jobs.size());
    parallel_for(n, options.threads, [&](std::size_t i) {
        const double delta = out.detuning_over_kappa_tot[i] * out.kappa_tot;
        for (std::size_t k = 0; k < jobs.size(); ++k) {
            Job& job = jobs[k];
            try {
                const SystemConfig& cfg = job.config;
                switch (job.series.method) {
                    case Method::Tm: job.series.transmission[i] = std::norm(tm::transmission(cfg, delta)); break;
                    case Method::Spt:
                        job.series.transmission[i] = spt::spt_power(spt::make_input(cfg, delta));
                        break;
                    case Method::CqedSemiclassical:
                        job.series.transmission[i] =
                            std::norm(cqed::semiclassical_transmission(cfg, delta, cfg.emitter_detuning(delta)));
                        break;
                    case Method::CqedMaster:
                        if (i % static_cast<std::size_t>(spec.master_stride) == 0) {
                            const cqed::SteadyStateResult r = job.master->solve(delta);
                            job.series.transmission[i] = r.transmission;
                            job.series.diagnostics[i] = MasterDiagnostics{r.residual, *r.physicality};
                        }
                        break;
                }
            } catch (...) {
                failures[i * jobs.size() + k] = std::current_exception();
            }
        }
    });

    for (std::size_t idx = 0; idx < failures.size(); ++idx) {
        if (!failures[idx]) continue;
        const Job& job = jobs[idx % jobs.size()];
        const double x = out.detuning_over_kappa_tot[idx / jobs.size()];
        try {
            std::rethrow_exception(failures[idx]);
        } catch (const std::exception& e) {
            throw SolverError(std::string(to_string(job.series.method)) + " (" +
                              std::string(to_string(job.series.direction)) + ") failed at delta1/kappa_tot = " +
                              format_g(x) + ": " + e.what());
        }
    }

    json meta;
    meta["config"] = config_echo.is_null() ? describe(config) : config_echo;
    meta["derived"] = describe(config);
    meta["sweep"] = {{"min_over_kappa_tot", spec.min_over_kappa_tot},
                     {"max_over_kappa_tot", spec.max_over_kappa_tot},
                     {"points", spec.points},
                     {"master_stride", spec.master_stride}};
    meta["truncation"] = {{"n_max_a", spec.truncation.n_max_a}, {"n_max_b", spec.truncation.n_max_b}};
    meta["tolerances"] = {{"master_residual", options.master.residual_tolerance}};
    meta["warnings"] = validate(config);

    for (Job& job : jobs) {
        if (job.series.method != Method::CqedMaster) continue;
        double worst_residual = 0.0;
        double worst_trace = 0.0;
        double worst_herm = 0.0;
        double lowest_eig = 0.0;
        double worst_top = 0.0;
        std::size_t solves = 0;
        for (const auto& d : job.series.diagnostics) {
            if (!d) continue;
            ++solves;
            worst_residual = std::max(worst_residual, d->residual);
            worst_trace = std::max(worst_trace, d->physicality.trace_deviation);
            worst_herm = std::max(worst_herm, d->physicality.hermiticity_deviation);
            lowest_eig = std::min(lowest_eig, d->physicality.min_eigenvalue);
            worst_top = std::max(worst_top, d->physicality.top_fock_population());
        }
        meta["master"][std::string(to_string(job.series.direction))] = {
            {"solves", solves},
            {"max_residual", worst_residual},
            {"max_trace_deviation", worst_trace},
            {"max_hermiticity_deviation", worst_herm},
            {"min_eigenvalue", lowest_eig},
            {"max_top_fock_population", worst_top}};
    }
    for (Direction d : spec.directions) {
        const auto find = [&](Method m) -> const Series* {
            for (const Job& j : jobs)
                if (j.series.method == m && j.series.direction == d) return &j.series;
            return nullptr;
        };
        const Series* tm_series = find(Method::Tm);
        const Series* spt_series = find(Method::Spt);
        if (tm_series != nullptr && spt_series != nullptr) {
            double worst = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                worst = std::max(worst, std::abs(*tm_series->transmission[i] - *spt_series->transmission[i]));
            }
            meta["max_abs_diff_tm_spt"][std::string(to_string(d))] = worst;
        }
    }
    out.metadata = std::move(meta);
    for (Job& job : jobs) out.series.push_back(std::move(job.series));
    return out;
}

std::string CompareOptions::pair_key(Method a, Method b) {
    if (b < a) std::swap(a, b);
    return std::string(to_string(a)) + ":" + std::string(to_string(b));
}

double CompareOptions::tolerance(Method a, Method b) const {
    const auto it = tolerances.find(pair_key(a, b));
    return it == tolerances.end() ? default_tolerance : it->second;
}

CompareOptions CompareOptions::defaults_for(const SystemConfig& config) {
    CompareOptions o;
    if (config.sigma_z == -1.0) {
        o.tolerances[pair_key(Method::Spt, Method::CqedSemiclassical)] = 1e-12;
    }
    return o;
}

bool CompareReport::pass() const {
    return std::all_of(pairs.begin(), pairs.end(), [](const PairComparison& p) { return p.pass; });
}

json CompareReport::to_json() const {
    json j;
    j["pass"] = pass();
    j["pairs"] = json::array();
    for (const PairComparison& p : pairs) {
        j["pairs"].push_back({{"first", to_string(p.first)},
                              {"second", to_string(p.second)},
                              {"direction", to_string(p.direction)},
                              {"points", p.points},
                              {"max_abs_diff", p.max_abs_diff},
                              {"mean_abs_diff", p.mean_abs_diff},
                              {"worst_delta1_over_kappa_tot", p.worst_detuning_over_kappa_tot},
                              {"tolerance", p.tolerance},
                              {"pass", p.pass}});
    }
    j["dips"] = json::array();
    for (const SeriesDips& s : dips) {
        json list = json::array();
        for (const Dip& d : s.dips) {
            list.push_back({{"delta1_over_kappa_tot", d.detuning_over_kappa_tot}, {"T", d.transmission}});
        }
        j["dips"].push_back({{"method", to_string(s.method)}, {"direction", to_string(s.direction)}, {"minima", list}});
    }
    return j;
}

std::string CompareReport::to_text() const {
    std::ostringstream os;
    os << "method comparison: " << (pass() ? "PASS" : "FAIL") << "\n";
    for (const PairComparison& p : pairs) {
        os << "  " << (p.pass ? "[pass] " : "[FAIL] ") << to_string(p.first) << " vs " << to_string(p.second) << " ("
           << to_string(p.direction) << "): max |dT| = " << format_g(p.max_abs_diff, 4)
           << ", mean |dT| = " << format_g(p.mean_abs_diff, 4) << " over " << p.points
           << " points, tolerance " << format_g(p.tolerance, 3) << "\n";
    }
    for (const SeriesDips& s : dips) {
        os << "  dips " << to_string(s.method) << " (" << to_string(s.direction) << "):";
        if (s.dips.empty()) os << " none";
        for (const Dip& d : s.dips) {
            os << " [delta1/kappa_tot = " << format_g(d.detuning_over_kappa_tot, 6)
               << ", T = " << format_g(d.transmission, 6) << "]";
        }
        os << "\n";
    }
    return os.str();
}

std::vector<Dip> find_local_minima(std::span<const double> detunings, std::span<const std::optional<double>> values) {
    std::vector<std::size_t> present;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i]) present.push_back(i);
    }
    std::vector<Dip> out;
    for (std::size_t k = 1; k + 1 < present.size(); ++k) {
        const double prev = *values[present[k - 1]];
        const double here = *values[present[k]];
        const double next = *values[present[k + 1]];
        if (here < prev && here < next) {
            out.push_back({detunings[present[k]], here});
        }
    }
    return out;
}

CompareReport compare_report(std::span<const Spectrum> spectra, const CompareOptions& options) {
    if (spectra.empty()) {
        throw DomainError("compare_report: no spectra given");
    }
    const std::vector<double>& grid = spectra.front().detuning_over_kappa_tot;
    std::vector<const Series*> all;
    for (const Spectrum& s : spectra) {
        if (s.detuning_over_kappa_tot != grid) {
            throw DomainError("compare_report: grid mismatch between spectra");
        }
        for (const Series& series : s.series) all.push_back(&series);
    }
    std::stable_sort(all.begin(), all.end(), [](const Series* a, const Series* b) {
        return std::pair(a->direction, a->method) < std::pair(b->direction, b->method);
    });

    CompareReport report;
    for (std::size_t i = 0; i < all.size(); ++i) {
        report.dips.push_back({all[i]->method, all[i]->direction, find_local_minima(grid, all[i]->transmission)});
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            if (all[i]->direction != all[j]->direction || all[i]->method == all[j]->method) continue;
            PairComparison p;
            p.first = all[i]->method;
            p.second = all[j]->method;
            p.direction = all[i]->direction;
            double sum = 0.0;
            for (std::size_t k = 0; k < grid.size(); ++k) {
                const auto& a = all[i]->transmission[k];
                const auto& b = all[j]->transmission[k];
                if (!a || !b) continue;
                const double diff = std::abs(*a - *b);
                if (p.points == 0 || diff > p.max_abs_diff) {
                    p.max_abs_diff = diff;
                    p.worst_detuning_over_kappa_tot = grid[k];
                }
                sum += diff;
                ++p.points;
            }
            p.mean_abs_diff = p.points > 0 ? sum / static_cast<double>(p.points) : 0.0;
            p.tolerance = options.tolerance(p.first, p.second);
            p.pass = p.points > 0 && p.max_abs_diff < p.tolerance;
            report.pairs.push_back(p);
        }
    }
    if (report.pairs.empty()) {
        throw DomainError("compare_report: at least two methods on the same direction are required");
    }
    return report;
}

CompareReport compare_report(const Spectrum& spectrum, const CompareOptions& options) {
    return compare_report(std::span<const Spectrum>(&spectrum, 1), options);
}

json ChiralityReport::to_json() const {
    json j;
    j["delta1_over_kappa_tot"] = detuning_over_kappa_tot;
    for (const auto& [m, v] : forward) j["forward"][std::string(to_string(m))] = v;
    for (const auto& [m, v] : backward) j["backward"][std::string(to_string(m))] = v;
    return j;
}

ChiralityReport chirality_report(const SystemConfig& config, SweepSpec spec, const SweepOptions& options,
                                 const json& config_echo) {
    spec.directions = {Direction::Forward, Direction::Backward};
    ChiralityReport report;
    report.spectrum = run_sweep(config, spec, options, config_echo);
    const auto& grid = report.spectrum.detuning_over_kappa_tot;
    std::size_t centre = 0;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (std::abs(grid[i]) < std::abs(grid[centre])) centre = i;
    }
    report.detuning_over_kappa_tot = grid[centre];
    for (const Series& s : report.spectrum.series) {
        if (!s.transmission[centre]) continue;
        auto& side = s.direction == Direction::Forward ? report.forward : report.backward;
        side[s.method] = *s.transmission[centre];
    }
    return report;
}

OutputFormat parse_output_format(std::string_view s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw DomainError("unknown output format '" + std::string(s) + "' (expected csv or json)");
}

namespace {

json diagnostics_to_json(const MasterDiagnostics& d) {
    return {{"residual", d.residual},
            {"trace_deviation", d.physicality.trace_deviation},
            {"hermiticity_deviation", d.physicality.hermiticity_deviation},
            {"min_eigenvalue", d.physicality.min_eigenvalue},
            {"top_fock_population_a", d.physicality.top_fock_population_a},
            {"top_fock_population_b", d.physicality.top_fock_population_b}};
}

MasterDiagnostics diagnostics_from_json(const json& j) {
    MasterDiagnostics d;
    d.residual = j.at("residual").get<double>();
    d.physicality.trace_deviation = j.at("trace_deviation").get<double>();
    d.physicality.hermiticity_deviation = j.at("hermiticity_deviation").get<double>();
    d.physicality.min_eigenvalue = j.at("min_eigenvalue").get<double>();
    d.physicality.top_fock_population_a = j.at("top_fock_population_a").get<double>();
    d.physicality.top_fock_population_b = j.at("top_fock_population_b").get<double>();
    return d;
}

}  // namespace

json to_json(const Spectrum& spectrum) {
    json j;
    j["delta1_over_kappa_tot"] = spectrum.detuning_over_kappa_tot;
    j["kappa_tot_rad_per_s"] = spectrum.kappa_tot;
    j["series"] = json::array();
    for (const Series& s : spectrum.series) {
        json t = json::array();
        for (const auto& v : s.transmission) t.push_back(v ? json(*v) : json(nullptr));
        json entry{{"method", to_string(s.method)}, {"direction", to_string(s.direction)}, {"T", t}};
        if (!s.diagnostics.empty()) {
            json diag = json::array();
            for (const auto& d : s.diagnostics) diag.push_back(d ? diagnostics_to_json(*d) : json(nullptr));
            entry["diagnostics"] = diag;
        }
        j["series"].push_back(entry);
    }
    j["metadata"] = spectrum.metadata;
    return j;
}

Spectrum spectrum_from_json(const json& j) {
    try {
        Spectrum s;
        s.detuning_over_kappa_tot = j.at("delta1_over_kappa_tot").get<std::vector<double>>();
        s.kappa_tot = j.at("kappa_tot_rad_per_s").get<double>();
        for (const json& entry : j.at("series")) {
            Series series;
            series.method = parse_method(entry.at("method").get<std::string>());
            series.direction = parse_direction(entry.at("direction").get<std::string>());
            for (const json& v : entry.at("T")) {
                series.transmission.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
            }
            if (const auto it = entry.find("diagnostics"); it != entry.end()) {
                for (const json& d : *it) {
                    series.diagnostics.push_back(d.is_null() ? std::nullopt
                                                             : std::optional(diagnostics_from_json(d)));
                }
            }
            s.series.push_back(std::move(series));
        }
        s.metadata = j.value("metadata", json::object());
        return s;
    } catch (const json::exception& e) {
        throw DomainError(std::string("malformed spectrum document: ") + e.what());
    }
}

Spectrum read_spectrum_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    try {
        return spectrum_from_json(json::parse(in));
    } catch (const json::parse_error& e) {
        throw IoError("cannot parse " + path.string() + ": " + e.what());
    }
}

void emit(const Spectrum& spectrum, OutputFormat format, std::ostream& out) {
    if (format == OutputFormat::Json) {
        out << to_json(spectrum).dump(2) << "\n";
    } else {
        bool both = false;
        for (const Series& s : spectrum.series) both = both || s.direction != spectrum.series.front().direction;
        out << "delta1_over_kappa_tot";
        for (const Series& s : spectrum.series) {
            out << ',' << column_name(s.method);
            if (both) out << '_' << to_string(s.direction);
        }
        out << '\n';
        for (std::size_t i = 0; i < spectrum.detuning_over_kappa_tot.size(); ++i) {
            out << format_g(spectrum.detuning_over_kappa_tot[i]);
            for (const Series& s : spectrum.series) {
                out << ',';
                if (s.transmission[i]) out << format_g(*s.transmission[i]);
            }
            out << '\n';
        }
    }
    if (!out) throw IoError("failed to write spectrum");
}

void emit(const Spectrum& spectrum, OutputFormat format, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    emit(spectrum, format, out);
    out.close();
    if (!out) throw IoError("failed to write " + path.string());
}

}  // namespace wgm
