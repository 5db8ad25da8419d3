// cli_io.hpp: run configuration, CSV tables and subcommand dispatch
//
// A run is fully described by one JSON document; every subcommand is a pure
// function of it, so reruns produce byte-identical CSV files.

#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "jcladder/error.hpp"
#include "jcladder/nonrwa_coupling.hpp"
#include "jcladder/resonance_finder.hpp"
#include "jcladder/rwa_ladder.hpp"
#include "jcladder/tls_model.hpp"
#include "jcladder/transmon_spectrum.hpp"

namespace jcladder {

// ---------------------------------------------------------------------------
// Tables

enum class ColumnType { Real, Integer, Text };

struct Column {
    std::string name;
    ColumnType type{ColumnType::Real};
};

using Cell = std::variant<double, long long, std::string>;

struct Table {
    std::vector<Column> schema;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

inline std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace detail {

inline std::string quote_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

} // namespace detail

// CSV with a header row, 12 significant digits for reals, '\n' after every row.
inline std::string emit_table(const Table& table) {
    std::string out;
    for (std::size_t c = 0; c < table.schema.size(); ++c) {
        if (c) out += ',';
        out += detail::quote_field(table.schema[c].name);
    }
    out += '\n';
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        if (row.size() != table.schema.size())
            throw InvalidArgument("emit_table: row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                                  " cells, schema has " + std::to_string(table.schema.size()));
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            const Column& col = table.schema[c];
            const Cell& cell = row[c];
            auto mismatch = [&] {
                return InvalidArgument("emit_table: row " + std::to_string(r) + " column '" + col.name +
                                       "' does not match its declared type");
            };
            switch (col.type) {
            case ColumnType::Real: {
                const double* x = std::get_if<double>(&cell);
                if (!x) throw mismatch();
                if (!std::isfinite(*x))
                    throw InvalidArgument("emit_table: non-finite value in row " + std::to_string(r) +
                                          " column '" + col.name + "'");
                out += format_real(*x);
                break;
            }
            case ColumnType::Integer: {
                const long long* i = std::get_if<long long>(&cell);
                if (!i) throw mismatch();
                out += std::to_string(*i);
                break;
            }
            case ColumnType::Text: {
                const std::string* s = std::get_if<std::string>(&cell);
                if (!s) throw mismatch();
                out += detail::quote_field(*s);
                break;
            }
            }
        }
        out += '\n';
    }
    return out;
}

// Column contracts for every artifact.
namespace schema {

inline std::vector<Column> spectrum() {
    return {{"k", ColumnType::Integer}, {"E_k_GHz", ColumnType::Real}, {"omega_k0_GHz", ColumnType::Real}};
}
inline std::vector<Column> stark() {
    return {{"n", ColumnType::Integer}, {"stark_shift_GHz", ColumnType::Real}, {"linear_ref_GHz", ColumnType::Real}};
}
inline std::vector<Column> fan() {
    return {{"n_total", ColumnType::Integer}, {"k", ColumnType::Integer}, {"fan_freq_GHz", ColumnType::Real}};
}
inline std::vector<Column> geff() {
    return {{"omega_10_GHz", ColumnType::Real},
            {"n_res", ColumnType::Integer},
            {"geff_coh_MHz", ColumnType::Real},
            {"geff_incoh_MHz", ColumnType::Real},
            {"transition_tag", ColumnType::Text}};
}
inline std::vector<Column> resonance_sweep() {
    return {{"omega_10_GHz", ColumnType::Real},  {"delta_GHz", ColumnType::Real},
            {"transition_tag", ColumnType::Text}, {"n_star", ColumnType::Real},
            {"n_res", ColumnType::Integer},       {"geff_coh_MHz", ColumnType::Real},
            {"geff_incoh_MHz", ColumnType::Real}, {"n_c", ColumnType::Real}};
}
inline std::vector<Column> tls() {
    return {{"n", ColumnType::Integer},
            {"E_initial_GHz", ColumnType::Real},
            {"E_final_GHz", ColumnType::Real},
            {"n_over_nc", ColumnType::Real}};
}
inline std::vector<Column> tls_summary() {
    return {{"omega_tls_GHz", ColumnType::Real},        {"n_star", ColumnType::Real},
            {"n_res", ColumnType::Integer},              {"n_star_over_nc", ColumnType::Real},
            {"condition_estimate_GHz", ColumnType::Real}, {"exact_crossing_GHz", ColumnType::Real}};
}
inline std::vector<Column> oracle() {
    return {{"transition_tag", ColumnType::Text},        {"n_res", ColumnType::Integer},
            {"lambda", ColumnType::Real},                {"splitting_GHz", ColumnType::Real},
            {"splitting_over_2lambda_MHz", ColumnType::Real}, {"geff_coh_MHz", ColumnType::Real}};
}

} // namespace schema

// ---------------------------------------------------------------------------
// Configuration

enum class DeviceInput { ChargeEnergies, Spectroscopy };

struct SweepRange {
    double start{0.0};
    double stop{0.0};
    int count{1};
};

struct RunConfig {
    DeviceInput device_input{DeviceInput::Spectroscopy};
    DeviceParams device;       // E_C/E_J meaningful only for ChargeEnergies
    double omega_10{0.0};      // Spectroscopy inputs
    double eta{0.0};
    std::optional<SweepRange> sweep;
    std::pair<int, int> n_range{0, 1000};
    std::pair<int, int> n_total_range{0, 120};
    std::vector<TransitionFamily> transitions{parse_transition_tag("nnn-0-to-6"), parse_transition_tag("nn-0-to-3")};
    std::optional<TlsSpec> tls;
    std::vector<double> oracle_lambdas{0.3, 0.1, 0.03};
    StarkConvention stark_convention{StarkConvention::Raw};
    std::string output_dir{"out"};
    std::string output_format{"csv"};
    unsigned threads{1};
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(path.empty() ? "<root>" : path, "must be an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!ok.count(it.key())) throw ConfigError(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
}

inline std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

inline double get_real(const json& obj, const std::string& path, const char* key) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) throw ConfigError(p, "missing required value");
    const json& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(p, "must be a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) throw ConfigError(p, "must be finite");
    return x;
}

inline double get_real(const json& obj, const std::string& path, const char* key, double fallback) {
    return obj.contains(key) ? get_real(obj, path, key) : fallback;
}

inline int get_int(const json& obj, const std::string& path, const char* key) {
    const std::string p = join(path, key);
    if (!obj.contains(key)) throw ConfigError(p, "missing required value");
    const json& v = obj.at(key);
    if (!v.is_number_integer()) throw ConfigError(p, "must be an integer");
    return v.get<int>();
}

inline int get_int(const json& obj, const std::string& path, const char* key, int fallback) {
    return obj.contains(key) ? get_int(obj, path, key) : fallback;
}

inline std::pair<int, int> get_range(const json& obj, const std::string& path, const char* key,
                                     std::pair<int, int> fallback) {
    if (!obj.contains(key)) return fallback;
    const std::string p = join(path, key);
    const json& v = obj.at(key);
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
        throw ConfigError(p, "must be [lo, hi] with integer entries");
    std::pair<int, int> r{v[0].get<int>(), v[1].get<int>()};
    if (r.first < 0) throw ConfigError(p, "lower bound must be >= 0");
    if (r.second < r.first) throw ConfigError(p, "upper bound must be >= lower bound");
    return r;
}

inline void require(bool ok, const std::string& path, const std::string& what) {
    if (!ok) throw ConfigError(path, what);
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    using detail::json;
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError("<root>", std::string("malformed document: ") + e.what());
    }
    detail::reject_unknown(doc, "",
                           {"device", "truncation", "epsilon_sym", "ranges", "sweep", "transitions", "tls", "oracle",
                            "output", "threads"});
    RunConfig cfg;

    // device
    if (!doc.contains("device")) throw ConfigError("device", "missing required block");
    const json& dev = doc.at("device");
    detail::reject_unknown(dev, "device", {"energies", "spectroscopy", "omega_r", "g", "n_g"});
    const bool has_e = dev.contains("energies"), has_s = dev.contains("spectroscopy");
    if (has_e && has_s)
        throw ConfigError("device", "device.energies and device.spectroscopy are mutually exclusive; give one");
    if (!has_e && !has_s) throw ConfigError("device", "one of device.energies or device.spectroscopy is required");
    DeviceParams& p = cfg.device;
    if (has_e) {
        const json& e = dev.at("energies");
        detail::reject_unknown(e, "device.energies", {"E_C", "E_J"});
        cfg.device_input = DeviceInput::ChargeEnergies;
        p.E_C = detail::get_real(e, "device.energies", "E_C");
        p.E_J = detail::get_real(e, "device.energies", "E_J");
        detail::require(p.E_C > 0.0, "device.energies.E_C", "must be > 0");
        detail::require(p.E_J > 0.0, "device.energies.E_J", "must be > 0");
        detail::require(p.E_J / p.E_C >= 10.0, "device.energies", "E_J/E_C must be >= 10 (transmon regime)");
    } else {
        const json& s = dev.at("spectroscopy");
        detail::reject_unknown(s, "device.spectroscopy", {"omega_10", "eta"});
        cfg.device_input = DeviceInput::Spectroscopy;
        cfg.omega_10 = detail::get_real(s, "device.spectroscopy", "omega_10");
        cfg.eta = detail::get_real(s, "device.spectroscopy", "eta");
        detail::require(cfg.omega_10 > 0.0, "device.spectroscopy.omega_10", "must be > 0");
        detail::require(cfg.eta < 0.0, "device.spectroscopy.eta", "must be < 0");
        detail::require(-cfg.eta < cfg.omega_10, "device.spectroscopy.eta", "|eta| must be < omega_10");
    }
    p.omega_r = detail::get_real(dev, "device", "omega_r");
    p.g = detail::get_real(dev, "device", "g");
    p.n_g = detail::get_real(dev, "device", "n_g", 0.0);
    detail::require(p.omega_r > 0.0, "device.omega_r", "must be > 0");
    detail::require(p.g > 0.0, "device.g", "must be > 0");

    // truncation
    if (doc.contains("truncation")) {
        const json& t = doc.at("truncation");
        detail::reject_unknown(t, "truncation", {"k_max", "charge_cutoff"});
        p.k_max = detail::get_int(t, "truncation", "k_max", p.k_max);
        p.charge_cutoff = detail::get_int(t, "truncation", "charge_cutoff", p.charge_cutoff);
    }
    detail::require(p.charge_cutoff >= 15, "truncation.charge_cutoff", "must be >= 15");
    detail::require(p.k_max >= 0 && p.k_max <= p.charge_cutoff, "truncation.k_max", "must lie in [0, charge_cutoff]");

    p.epsilon_sym = detail::get_real(doc, "", "epsilon_sym", 0.0);
    detail::require(p.epsilon_sym >= 0.0, "epsilon_sym", "must be >= 0");

    // ranges
    if (doc.contains("ranges")) {
        const json& r = doc.at("ranges");
        detail::reject_unknown(r, "ranges", {"n", "n_total"});
        cfg.n_range = detail::get_range(r, "ranges", "n", cfg.n_range);
        cfg.n_total_range = detail::get_range(r, "ranges", "n_total", cfg.n_total_range);
    }

    // sweep
    if (doc.contains("sweep")) {
        const json& s = doc.at("sweep");
        detail::reject_unknown(s, "sweep", {"omega_10_start", "omega_10_stop", "count"});
        SweepRange sr;
        sr.start = detail::get_real(s, "sweep", "omega_10_start");
        sr.stop = detail::get_real(s, "sweep", "omega_10_stop");
        sr.count = detail::get_int(s, "sweep", "count");
        detail::require(sr.count >= 1, "sweep.count", "must be >= 1");
        detail::require(sr.start > 0.0, "sweep.omega_10_start", "must be > 0");
        detail::require(sr.stop >= sr.start, "sweep.omega_10_stop", "must be >= omega_10_start");
        cfg.sweep = sr;
    }

    // transitions
    if (doc.contains("transitions")) {
        const json& t = doc.at("transitions");
        detail::require(t.is_array() && !t.empty(), "transitions", "must be a non-empty array of tags");
        cfg.transitions.clear();
        for (std::size_t i = 0; i < t.size(); ++i) {
            const std::string path = "transitions[" + std::to_string(i) + "]";
            detail::require(t[i].is_string(), path, "must be a string");
            try {
                cfg.transitions.push_back(parse_transition_tag(t[i].get<std::string>()));
            } catch (const InvalidArgument& e) {
                throw ConfigError(path, e.what());
            }
            const TransitionFamily& f = cfg.transitions.back();
            detail::require(f.k_f <= p.k_max && f.k_i <= p.k_max, path, "level exceeds truncation.k_max");
        }
    }

    // tls
    if (doc.contains("tls")) {
        const json& t = doc.at("tls");
        detail::reject_unknown(t, "tls", {"omega_tls", "initial_level", "final_level", "photons_absorbed"});
        TlsSpec tls;
        tls.omega_tls = detail::get_real(t, "tls", "omega_tls");
        tls.initial_level = detail::get_int(t, "tls", "initial_level", tls.initial_level);
        tls.final_level = detail::get_int(t, "tls", "final_level", tls.final_level);
        tls.photons_absorbed = detail::get_int(t, "tls", "photons_absorbed", tls.photons_absorbed);
        try {
            validate(tls);
        } catch (const InvalidArgument& e) {
            throw ConfigError("tls", e.what());
        }
        detail::require(tls.final_level <= p.k_max && tls.initial_level <= p.k_max, "tls",
                        "level exceeds truncation.k_max");
        cfg.tls = tls;
    }

    // oracle
    if (doc.contains("oracle")) {
        const json& o = doc.at("oracle");
        detail::reject_unknown(o, "oracle", {"lambdas"});
        if (o.contains("lambdas")) {
            const json& l = o.at("lambdas");
            detail::require(l.is_array() && !l.empty(), "oracle.lambdas", "must be a non-empty array");
            cfg.oracle_lambdas.clear();
            for (std::size_t i = 0; i < l.size(); ++i) {
                const std::string path = "oracle.lambdas[" + std::to_string(i) + "]";
                detail::require(l[i].is_number(), path, "must be a number");
                const double x = l[i].get<double>();
                detail::require(x > 0.0 && x <= 1.0, path, "must lie in (0, 1]");
                cfg.oracle_lambdas.push_back(x);
            }
        }
    }

    // output
    if (doc.contains("output")) {
        const json& o = doc.at("output");
        detail::reject_unknown(o, "output", {"directory", "format", "stark_convention"});
        if (o.contains("directory")) {
            detail::require(o.at("directory").is_string(), "output.directory", "must be a string");
            cfg.output_dir = o.at("directory").get<std::string>();
        }
        if (o.contains("format")) {
            detail::require(o.at("format").is_string(), "output.format", "must be a string");
            cfg.output_format = o.at("format").get<std::string>();
            detail::require(cfg.output_format == "csv", "output.format", "only \"csv\" is supported");
        }
        if (o.contains("stark_convention")) {
            const json& s = o.at("stark_convention");
            detail::require(s.is_string() && (s == "raw" || s == "rezeroed"), "output.stark_convention",
                            "must be \"raw\" or \"rezeroed\"");
            cfg.stark_convention = s == "raw" ? StarkConvention::Raw : StarkConvention::Rezeroed;
        }
    }

    if (doc.contains("threads")) {
        const int t = detail::get_int(doc, "", "threads");
        detail::require(t >= 1, "threads", "must be >= 1");
        cfg.threads = static_cast<unsigned>(t);
    }
    return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path.string(), "cannot open config file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// Device parameters with (E_C, E_J) filled in.
inline DeviceParams resolve_device(const RunConfig& cfg) {
    if (cfg.device_input == DeviceInput::ChargeEnergies) return cfg.device;
    return params_from_spectroscopy(cfg.omega_10, cfg.eta, cfg.device);
}

// ---------------------------------------------------------------------------
// Subcommands

struct Artifact {
    std::string filename;
    Table table;
};

struct SubcommandResult {
    std::vector<Artifact> artifacts;
    std::string summary;
    std::vector<std::string> notes;   // gaps and skipped items, written to the sidecar
};

inline const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names{"spectrum", "stark", "fan", "geff", "resonance-sweep", "tls", "oracle"};
    return names;
}

namespace detail {

inline double mhz(double ghz) { return ghz * 1e3; }

inline SubcommandResult run_spectrum(const RunConfig& cfg) {
    const TransmonSpectrum spec = solve_transmon(resolve_device(cfg));
    Table t{schema::spectrum(), {}};
    for (int k = 0; k <= spec.k_max(); ++k)
        t.add({static_cast<long long>(k), spec.levels[k], spec.levels[k] - spec.levels[0]});
    SubcommandResult r;
    r.summary = "spectrum: " + std::to_string(spec.k_max() + 1) + " levels, omega_10 = " + format_real(spec.omega_10) +
                " GHz, eta = " + format_real(spec.eta) + " GHz";
    if (!spec.all_levels_bound())
        r.notes.push_back("levels above the cosine barrier: " +
                          std::to_string(spec.k_max() + 1 - spec.bound_level_count));
    r.artifacts.push_back({"spectrum.csv", std::move(t)});
    return r;
}

inline SubcommandResult run_stark(const RunConfig& cfg) {
    const LadderModel model(resolve_device(cfg));
    const double chi = dispersive_chi(model.spectrum(), model.params());
    Table t{schema::stark(), {}};
    for (int n = cfg.n_range.first; n <= cfg.n_range.second; ++n)
        t.add({static_cast<long long>(n), stark_shift(model, n, cfg.stark_convention), linear_stark_reference(chi, n)});
    SubcommandResult r;
    r.summary = "stark: " + std::to_string(t.rows.size()) + " rows, chi = " + format_real(mhz(chi)) +
                " MHz, n_c = " + format_real(critical_photon_number(model));
    r.artifacts.push_back({"stark.csv", std::move(t)});
    return r;
}

inline SubcommandResult run_fan(const RunConfig& cfg) {
    const LadderModel model(resolve_device(cfg));
    Table t{schema::fan(), {}};
    for (int N = cfg.n_total_range.first; N <= cfg.n_total_range.second; ++N)
        for (int k = 0; k <= std::min(N, model.k_max()); ++k)
            t.add({static_cast<long long>(N), static_cast<long long>(k), fan_frequency(model, k, N)});
    SubcommandResult r;
    r.summary = "fan: " + std::to_string(t.rows.size()) + " rows";
    r.artifacts.push_back({"fan.csv", std::move(t)});
    return r;
}

inline SubcommandResult run_geff(const RunConfig& cfg) {
    const LadderModel model(resolve_device(cfg));
    Table t{schema::geff(), {}};
    SubcommandResult r;
    for (const auto& fam : cfg.transitions) {
        const auto pt = find_resonant_photon_number(model, fam, cfg.n_range.first, cfg.n_range.second);
        if (!pt) {
            r.notes.push_back(fam.tag() + ": no resonance in n range");
            continue;
        }
        t.add({pt->omega_10, static_cast<long long>(pt->n_res), mhz(pt->coupling.g_eff_coh),
               mhz(pt->coupling.g_eff_incoh), fam.tag()});
    }
    r.summary = "geff: " + std::to_string(t.rows.size()) + " of " + std::to_string(cfg.transitions.size()) +
                " transitions resonant in range";
    r.artifacts.push_back({"geff.csv", std::move(t)});
    return r;
}

inline SubcommandResult run_resonance_sweep(const RunConfig& cfg) {
    if (!cfg.sweep) throw ConfigError("sweep", "resonance-sweep requires a sweep block");
    SweepConfig sc;
    sc.omega_10_grid = linspace(cfg.sweep->start, cfg.sweep->stop, cfg.sweep->count);
    sc.base = cfg.device;
    sc.eta = cfg.device_input == DeviceInput::Spectroscopy ? cfg.eta : solve_transmon(cfg.device).eta;
    sc.families = cfg.transitions;
    sc.n_lo = cfg.n_range.first;
    sc.n_hi = cfg.n_range.second;
    sc.threads = cfg.threads;
    const std::vector<SweepRow> rows = sweep_qubit_frequency(sc);

    Table t{schema::resonance_sweep(), {}};
    SubcommandResult r;
    for (const SweepRow& row : rows) {
        if (!row.error.empty()) {
            r.notes.push_back("gap at omega_10 = " + format_real(row.omega_10) + " (" + row.family.tag() +
                              "): " + row.error);
            continue;
        }
        if (!row.point) {
            r.notes.push_back("no resonance at omega_10 = " + format_real(row.omega_10) + " (" + row.family.tag() + ")");
            continue;
        }
        const ResonancePoint& p = *row.point;
        t.add({p.omega_10, p.delta, row.family.tag(), p.n_star, static_cast<long long>(p.n_res),
               mhz(p.coupling.g_eff_coh), mhz(p.coupling.g_eff_incoh), p.n_c});
    }
    r.summary = "resonance-sweep: " + std::to_string(t.rows.size()) + " resonances over " +
                std::to_string(sc.omega_10_grid.size()) + " grid points, " + std::to_string(r.notes.size()) +
                " gaps/misses";
    r.artifacts.push_back({"resonance_sweep.csv", std::move(t)});
    return r;
}

inline SubcommandResult run_tls(const RunConfig& cfg) {
    if (!cfg.tls) throw ConfigError("tls", "tls subcommand requires a tls block");
    const LadderModel model(resolve_device(cfg));
    const TlsDiagram d = tls_crossing_diagram(model, *cfg.tls, cfg.n_range.first, cfg.n_range.second);
    Table t{schema::tls(), {}};
    for (const auto& row : d.rows) t.add({static_cast<long long>(row.n), row.E_initial, row.E_final, row.n_over_nc});
    Table s{schema::tls_summary(), {}};
    SubcommandResult r;
    if (d.n_star) {
        const double nc = critical_photon_number(model);
        s.add({cfg.tls->omega_tls, *d.n_star, static_cast<long long>(*d.n_res), *d.n_star / nc, d.condition_estimate,
               tls_exact_crossing_frequency(model, *cfg.tls, *d.n_res)});
        r.summary = "tls: crossing at n* = " + format_real(*d.n_star) + " (n*/n_c = " + format_real(*d.n_star / nc) +
                    "), estimate " + format_real(d.condition_estimate) + " GHz";
    } else {
        r.summary = "tls: no crossing in n range, estimate " + format_real(d.condition_estimate) + " GHz";
        r.notes.push_back("no crossing in n range");
    }
    r.artifacts.push_back({"tls.csv", std::move(t)});
    r.artifacts.push_back({"tls_summary.csv", std::move(s)});
    return r;
}

inline SubcommandResult run_oracle(const RunConfig& cfg) {
    const LadderModel model(resolve_device(cfg));
    Table t{schema::oracle(), {}};
    SubcommandResult r;
    for (const auto& fam : cfg.transitions) {
        const auto pt = find_resonant_photon_number(model, fam, cfg.n_range.first, cfg.n_range.second);
        if (!pt) {
            r.notes.push_back(fam.tag() + ": no resonance in n range");
            continue;
        }
        for (double lambda : cfg.oracle_lambdas) {
            try {
                const SplittingResult s = splitting_oracle(model, pt->coupling.transition, lambda);
                t.add({fam.tag(), static_cast<long long>(pt->n_res), lambda, s.splitting,
                       mhz(s.splitting / (2.0 * lambda)), mhz(pt->coupling.g_eff_coh)});
            } catch (const NumericalFailure& e) {
                r.notes.push_back(fam.tag() + " lambda " + format_real(lambda) + ": " + e.what());
            }
        }
    }
    r.summary = "oracle: " + std::to_string(t.rows.size()) + " splittings";
    r.artifacts.push_back({"oracle.csv", std::move(t)});
    return r;
}

inline void write_bytes(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << bytes;
    if (!out) throw Error("write failed for " + path.string());
}

} // namespace detail

// Computes the artifacts of one subcommand without touching the filesystem.
inline SubcommandResult compute_subcommand(const std::string& name, const RunConfig& cfg) {
    if (name == "spectrum") return detail::run_spectrum(cfg);
    if (name == "stark") return detail::run_stark(cfg);
    if (name == "fan") return detail::run_fan(cfg);
    if (name == "geff") return detail::run_geff(cfg);
    if (name == "resonance-sweep") return detail::run_resonance_sweep(cfg);
    if (name == "tls") return detail::run_tls(cfg);
    if (name == "oracle") return detail::run_oracle(cfg);
    throw InvalidArgument("unknown subcommand '" + name + "'");
}

// Writes <out_dir>/<artifact>.csv plus <subcommand>.meta.json and prints the
// summary line. Returns the process exit status.
inline int run_subcommand(const std::string& name, const RunConfig& cfg, const std::filesystem::path& out_dir,
                          std::ostream& out, std::ostream& err) {
    try {
        const SubcommandResult res = compute_subcommand(name, cfg);
        std::filesystem::create_directories(out_dir);
        nlohmann::ordered_json meta;
        meta["subcommand"] = name;
        meta["artifacts"] = nlohmann::ordered_json::array();
        for (const Artifact& a : res.artifacts) {
            detail::write_bytes(out_dir / a.filename, emit_table(a.table));
            meta["artifacts"].push_back({{"file", a.filename}, {"rows", a.table.rows.size()}});
        }
        meta["notes"] = res.notes;
        meta["summary"] = res.summary;
        detail::write_bytes(out_dir / (name + ".meta.json"), meta.dump(2) + "\n");
        out << res.summary << '\n';
        return 0;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
    } catch (const Error& e) {
        err << name << ": " << e.what() << '\n';
    } catch (const std::filesystem::filesystem_error& e) {
        err << name << ": " << e.what() << '\n';
    }
    return 1;
}

} // namespace jcladder
