// resonance_finder.hpp: photon numbers where initial and final dressed levels cross

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <optional>
#include <regex>
#include <string>
#include <thread>
#include <vector>

#include "jcladder/error.hpp"
#include "jcladder/nonrwa_coupling.hpp"
#include "jcladder/rwa_ladder.hpp"
#include "jcladder/transmon_spectrum.hpp"

namespace jcladder {

// |k_i, n>~ -> |k_f, n + k_i - k_f + m>~ for every photon number n.
struct TransitionFamily {
    int k_i{0};
    int k_f{0};
    int m{2};

    TransitionSpec at(int n) const { return make_transition(k_i, n, k_f, m); }
    // Smallest n for which the final state has a non-negative photon number.
    int first_photon_number() const { return std::max(0, k_f - k_i - m); }
    std::string tag() const {
        return std::string(m == 2 ? "nnn-" : "nn-") + std::to_string(k_i) + "-to-" + std::to_string(k_f);
    }
    friend bool operator==(const TransitionFamily&, const TransitionFamily&) = default;
};

// "nnn-0-to-6" (strip offset 2) or "nn-0-to-3" (strip offset 1).
inline TransitionFamily parse_transition_tag(const std::string& tag) {
    static const std::regex re(R"(^(nnn|nn)-(\d+)-to-(\d+)$)");
    std::smatch mt;
    if (!std::regex_match(tag, mt, re))
        throw InvalidArgument("transition tag '" + tag + "' must look like nnn-<ki>-to-<kf> or nn-<ki>-to-<kf>");
    TransitionFamily f;
    f.m = mt[1] == "nnn" ? 2 : 1;
    f.k_i = std::stoi(mt[2]);
    f.k_f = std::stoi(mt[3]);
    return f;
}

// (E_final - E_initial) at initial photon number n, GHz.
inline double energy_mismatch(const LadderModel& model, const TransitionFamily& fam, int n) {
    const TransitionSpec t = fam.at(n);
    if (t.n_f < 0 || n < 0)
        throw IndexOutOfRange("energy_mismatch: final state " + fam.tag() + " absent at n = " + std::to_string(n));
    return dressed_energy(model, t.k_f, t.n_f) - dressed_energy(model, t.k_i, t.n_i);
}

struct ResonancePoint {
    double omega_10{0.0};
    double delta{0.0};
    double n_c{0.0};
    double n_star{0.0};            // linear interpolation inside the sign-change bracket
    int n_res{0};                  // bracketing integer with the smaller |mismatch|
    double mismatch_at_n_res{0.0};
    CouplingResult coupling;       // evaluated at n_res
};

struct ResonanceScan {
    std::vector<ResonancePoint> crossings;  // ordered by n
    bool suspicious{false};                 // more than 5 crossings: mismatch is far from monotone
};

inline ResonanceScan find_resonances(const LadderModel& model, const TransitionFamily& fam, int n_lo, int n_hi) {
    ResonanceScan scan;
    const int lo = std::max(n_lo, fam.first_photon_number());
    if (n_hi < lo) return scan;

    const TransmonSpectrum& spec = model.spectrum();
    const double nc = critical_photon_number(model);
    auto make_point = [&](double n_star, int n_res, double mis) {
        ResonancePoint p;
        p.omega_10 = spec.omega_10;
        p.delta = spec.omega_10 - model.params().omega_r;
        p.n_c = nc;
        p.n_star = n_star;
        p.n_res = n_res;
        p.mismatch_at_n_res = mis;
        p.coupling = evaluate_coupling(model, fam.at(n_res));
        scan.crossings.push_back(std::move(p));
    };

    double prev = energy_mismatch(model, fam, lo);
    for (int n = lo; n < n_hi; ++n) {
        const double next = energy_mismatch(model, fam, n + 1);
        if (prev == 0.0) {
            make_point(n, n, 0.0);
        } else if ((prev < 0.0) != (next < 0.0) && next != 0.0) {
            const double n_star = n + prev / (prev - next);
            const bool left = std::abs(prev) <= std::abs(next);
            make_point(n_star, left ? n : n + 1, left ? prev : next);
        }
        prev = next;
    }
    if (prev == 0.0) make_point(n_hi, n_hi, 0.0);
    scan.suspicious = scan.crossings.size() > 5;
    return scan;
}

inline std::optional<ResonancePoint> find_resonant_photon_number(const LadderModel& model,
                                                                 const TransitionFamily& fam, int n_lo, int n_hi) {
    ResonanceScan scan = find_resonances(model, fam, n_lo, n_hi);
    if (scan.crossings.empty()) return std::nullopt;
    return std::move(scan.crossings.front());
}

inline std::vector<double> linspace(double start, double stop, int count) {
    if (count < 1) throw InvalidArgument("linspace: count must be >= 1");
    std::vector<double> v(count);
    if (count == 1) {
        v[0] = start;
        return v;
    }
    const double step = (stop - start) / (count - 1);
    for (int i = 0; i < count; ++i) v[i] = start + i * step;
    v.back() = stop;
    return v;
}

struct SweepConfig {
    std::vector<double> omega_10_grid;  // GHz
    double eta{-0.2};                   // held fixed across the sweep
    DeviceParams base;                  // omega_r, g, n_g, truncation, epsilon_sym
    std::vector<TransitionFamily> families;
    int n_lo{0};
    int n_hi{1000};
    unsigned threads{1};
};

struct SweepRow {
    double omega_10{0.0};
    TransitionFamily family;
    std::optional<ResonancePoint> point;  // empty: no crossing in range, or a gap
    std::string error;                    // non-empty: the grid point could not be solved
};

// One row per (grid point, family), ordered by omega_10 then family order.
// Grid points are independent jobs; results are merged by index, so the output
// does not depend on the thread count.
inline std::vector<SweepRow> sweep_qubit_frequency(const SweepConfig& cfg) {
    std::vector<double> grid = cfg.omega_10_grid;
    std::stable_sort(grid.begin(), grid.end());
    const std::size_t nf = cfg.families.size();
    std::vector<SweepRow> rows(grid.size() * nf);

    auto solve_point = [&](std::size_t gi) {
        const double w10 = grid[gi];
        std::string error;
        std::optional<LadderModel> model;
        try {
            model.emplace(params_from_spectroscopy(w10, cfg.eta, cfg.base));
        } catch (const Error& e) {
            error = e.what();
        }
        for (std::size_t fi = 0; fi < nf; ++fi) {
            SweepRow& row = rows[gi * nf + fi];
            row.omega_10 = w10;
            row.family = cfg.families[fi];
            if (!model) {
                row.error = error;
                continue;
            }
            try {
                row.point = find_resonant_photon_number(*model, cfg.families[fi], cfg.n_lo, cfg.n_hi);
            } catch (const Error& e) {
                row.error = e.what();
            }
        }
    };

    const unsigned threads = std::max(1u, cfg.threads);
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t gi = next++; gi < grid.size(); gi = next++) solve_point(gi);
    };
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    return rows;
}

} // namespace jcladder
