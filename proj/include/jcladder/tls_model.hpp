// tls_model.hpp: crossings between dressed transmon levels and a spectator TLS
//
// The TLS enters only through its excitation energy: the composite level
// |k_f, n - p>~ |1>_TLS sits at E(|k_f, n - p>~) + omega_tls. The qubit-TLS
// coupling itself is not modeled.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "jcladder/error.hpp"
#include "jcladder/rwa_ladder.hpp"

namespace jcladder {

// |k_i, n>~ |0>_TLS  ->  |k_f, n - photons_absorbed>~ |1>_TLS
struct TlsSpec {
    double omega_tls{10.0};   // GHz
    int initial_level{0};
    int final_level{2};
    int photons_absorbed{3};
};

inline void validate(const TlsSpec& tls) {
    if (!(tls.omega_tls > 0.0)) throw InvalidArgument("TlsSpec: omega_tls must be > 0");
    if (tls.initial_level < 0 || tls.final_level < 0 || tls.photons_absorbed < 0)
        throw InvalidArgument("TlsSpec: levels and photon counts must be >= 0");
    // k_i + n = k_f + (n - p) + 1
    if (tls.initial_level + tls.photons_absorbed != tls.final_level + 1)
        throw InvalidArgument("TlsSpec: process does not conserve excitation number (k_i + p != k_f + 1)");
}

// Bare-energy estimate omega_r + 2|delta| + |eta| for the default |0> -> |2> process.
// Level repulsion puts the true crossing slightly above it.
inline double tls_resonance_condition(const LadderModel& model) {
    const TransmonSpectrum& spec = model.spectrum();
    const double delta = spec.omega_10 - model.params().omega_r;
    return model.params().omega_r + 2.0 * std::abs(delta) + std::abs(spec.eta);
}

struct TlsDiagramRow {
    int n{0};
    double E_initial{0.0};   // GHz
    double E_final{0.0};     // GHz, includes omega_tls
    double n_over_nc{0.0};
};

struct TlsDiagram {
    std::vector<TlsDiagramRow> rows;
    std::optional<double> n_star;   // first crossing, interpolated
    std::optional<int> n_res;       // bracketing integer with smaller |E_final - E_initial|
    double condition_estimate{0.0};
};

// TLS frequency at which the two composite levels are degenerate at photon number n.
inline double tls_exact_crossing_frequency(const LadderModel& model, const TlsSpec& tls, int n) {
    validate(tls);
    if (n - tls.photons_absorbed < 0) throw IndexOutOfRange("tls: n smaller than photons_absorbed");
    return dressed_energy(model, tls.initial_level, n) -
           dressed_energy(model, tls.final_level, n - tls.photons_absorbed);
}

inline TlsDiagram tls_crossing_diagram(const LadderModel& model, const TlsSpec& tls, int n_lo, int n_hi) {
    validate(tls);
    TlsDiagram d;
    d.condition_estimate = tls_resonance_condition(model);
    const double nc = critical_photon_number(model);
    const int lo = std::max(n_lo, tls.photons_absorbed);
    double prev = 0.0;
    for (int n = lo; n <= n_hi; ++n) {
        TlsDiagramRow row;
        row.n = n;
        row.E_initial = dressed_energy(model, tls.initial_level, n);
        row.E_final = dressed_energy(model, tls.final_level, n - tls.photons_absorbed) + tls.omega_tls;
        row.n_over_nc = nc > 0.0 ? n / nc : 0.0;
        const double mis = row.E_final - row.E_initial;
        if (!d.n_star && n > lo) {
            if (prev == 0.0) {
                d.n_star = n - 1;
                d.n_res = n - 1;
            } else if ((prev < 0.0) != (mis < 0.0) && mis != 0.0) {
                d.n_star = (n - 1) + prev / (prev - mis);
                d.n_res = std::abs(prev) <= std::abs(mis) ? n - 1 : n;
            }
        }
        prev = mis;
        d.rows.push_back(row);
    }
    if (!d.n_star && !d.rows.empty() && prev == 0.0) {
        d.n_star = d.rows.back().n;
        d.n_res = d.rows.back().n;
    }
    return d;
}

// c_l^{(0,n)}: bare |l, n - l> amplitude of the dressed |0, n>~.
inline double bare_amplitude(const LadderModel& model, int n, int l) {
    if (n < 0) throw InvalidArgument("bare_amplitude: n must be >= 0");
    const StripEigensystem& s = model.strip(n);
    if (l < 0 || l >= s.dim)
        throw IndexOutOfRange("bare_amplitude: level " + std::to_string(l) + " not in strip " + std::to_string(n));
    return s.coeffs(0, l);
}

} // namespace jcladder
