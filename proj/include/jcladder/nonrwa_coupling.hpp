// nonrwa_coupling.hpp: effective couplings between dressed states of different strips
//
// The counter-rotating terms kept here are
//
//   m = 2:  g_{k,k+1} sqrt(n+1) |k+1, n+1><k, n|  +  g_{k,k+3} sqrt(n) |k+3, n-1><k, n|
//   m = 1:  g_{k,k+2} sqrt(n)   |k+2, n-1><k, n|        (parity-breaking, eps model)
//
// plus Hermitian conjugates. The coherent coupling is the matrix element of these
// terms between two dressed states; expanding both in the bare basis turns it
// into a sum over "paths", one per bare level l of the initial strip.

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "jcladder/error.hpp"
#include "jcladder/rwa_ladder.hpp"
#include "jcladder/transmon_spectrum.hpp"

namespace jcladder {

struct TransitionSpec {
    int k_i{0};
    int n_i{0};
    int k_f{0};
    int n_f{0};

    int initial_strip() const { return k_i + n_i; }
    int final_strip() const { return k_f + n_f; }
    int m() const { return final_strip() - initial_strip(); }
};

// Transition |k_i, n>~ -> |k_f, n + k_i - k_f + m>~.
inline TransitionSpec make_transition(int k_i, int n_i, int k_f, int m) {
    return {k_i, n_i, k_f, n_i + k_i - k_f + m};
}

// Which transmon matrix element carries the inter-strip hop.
enum class PathFamily { Step1, Step2, Step3 };  // g_{l,l+1}, g_{l,l+2}, g_{l,l+3}

inline const char* to_string(PathFamily f) {
    switch (f) {
    case PathFamily::Step1: return "g_l,l+1";
    case PathFamily::Step2: return "g_l,l+2";
    case PathFamily::Step3: return "g_l,l+3";
    }
    return "?";
}

struct PathTerm {
    int l{0};
    PathFamily family{PathFamily::Step1};
    double contribution{0.0};  // GHz, signed
};

struct CouplingResult {
    TransitionSpec transition;
    std::vector<PathTerm> terms;
    double g_eff_coh{0.0};    // GHz, signed
    double g_eff_incoh{0.0};  // GHz
};

namespace detail {

inline void check_transition(const LadderModel& model, const TransitionSpec& t) {
    const int m = t.m();
    if (m != 1 && m != 2)
        throw InvalidArgument("transition: strip offset m = " + std::to_string(m) + " (must be 1 or 2)");
    if (t.n_i < 0 || t.n_f < 0) throw InvalidArgument("transition: photon numbers must be >= 0");
    if (t.k_i < 0 || t.k_i > model.k_max() || t.k_f < 0 || t.k_f > model.k_max())
        throw IndexOutOfRange("transition: level outside 0..k_max");
}

} // namespace detail

// Per-path contributions, ordered by (family, l). `epsilon_sym` sets g_{l,l+2}.
inline std::vector<PathTerm> path_terms(const LadderModel& model, const TransitionSpec& t, double epsilon_sym) {
    detail::check_transition(model, t);
    const TransmonSpectrum& spec = model.spectrum();
    const int Ni = t.initial_strip();
    const StripEigensystem& si = model.strip(Ni);
    const StripEigensystem& sf = model.strip(t.final_strip());
    const auto ci = si.coeffs.row(t.k_i);
    const auto cf = sf.coeffs.row(t.k_f);
    const int top_f = sf.dim - 1;

    std::vector<PathTerm> terms;
    auto add = [&](PathFamily family, int step, auto coupling, auto photons) {
        for (int l = 0; l < si.dim && l + step <= top_f; ++l) {
            const double amp = ci(l) * coupling(l) * std::sqrt(double(photons(l))) * cf(l + step);
            terms.push_back({l, family, amp});
        }
    };
    if (t.m() == 2) {
        // |l, Ni-l> -> |l+1, Ni-l+1>
        add(PathFamily::Step1, 1, [&](int l) { return normalized_charge_coupling(spec, l, l + 1); },
            [&](int l) { return Ni - l + 1; });
        // |l, Ni-l> -> |l+3, Ni-l-1>
        add(PathFamily::Step3, 3, [&](int l) { return normalized_charge_coupling(spec, l, l + 3); },
            [&](int l) { return Ni - l; });
    } else {
        // |l, Ni-l> -> |l+2, Ni-l-1>
        add(PathFamily::Step2, 2, [&](int l) { return broken_symmetry_coupling(spec, l, epsilon_sym); },
            [&](int l) { return Ni - l; });
    }
    std::stable_sort(terms.begin(), terms.end(), [](const PathTerm& a, const PathTerm& b) {
        return a.family != b.family ? a.family < b.family : a.l < b.l;
    });
    return terms;
}

inline std::vector<PathTerm> path_terms(const LadderModel& model, const TransitionSpec& t) {
    return path_terms(model, t, model.params().epsilon_sym);
}

namespace detail {

inline CouplingResult summarize(const TransitionSpec& t, std::vector<PathTerm> terms) {
    CouplingResult r;
    r.transition = t;
    double sum = 0.0, sq = 0.0;
    for (const auto& term : terms) {
        sum += term.contribution;
        sq += term.contribution * term.contribution;
    }
    r.terms = std::move(terms);
    r.g_eff_coh = sum;
    r.g_eff_incoh = std::sqrt(sq);
    return r;
}

} // namespace detail

// Both couplings come from one term list, so coherent and incoherent values are
// always consistent; the two entry points exist for readability at call sites.
inline CouplingResult evaluate_coupling(const LadderModel& model, const TransitionSpec& t, double epsilon_sym) {
    return detail::summarize(t, path_terms(model, t, epsilon_sym));
}

inline CouplingResult evaluate_coupling(const LadderModel& model, const TransitionSpec& t) {
    return evaluate_coupling(model, t, model.params().epsilon_sym);
}

inline CouplingResult geff_coherent(const LadderModel& model, const TransitionSpec& t) {
    return evaluate_coupling(model, t);
}

inline CouplingResult geff_incoherent(const LadderModel& model, const TransitionSpec& t) {
    return evaluate_coupling(model, t);
}

// <l', Nf - l'| H_nonRWA |l, Ni - l> for all bare states of strips Ni and Ni + m.
// Built by applying every operator term to every bare ket and keeping the
// images that land in the target strip; shares no code with path_terms.
inline Eigen::MatrixXd nonrwa_block(const TransmonSpectrum& spec, int Ni, int m, double epsilon_sym) {
    const int kmax = spec.k_max();
    const int Nf = Ni + m;
    const int di = strip_dim(Ni, kmax);
    const int df = strip_dim(Nf, kmax);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(df, di);

    auto g = [&](int a, int b) {  // a < b
        if (b - a == 2) return broken_symmetry_coupling(spec, a, epsilon_sym);
        return normalized_charge_coupling(spec, a, b);
    };
    auto deposit = [&](int k_out, int n_out, int l, double amp) {
        if (k_out < 0 || k_out > kmax || n_out < 0 || k_out + n_out != Nf) return;
        if (k_out >= df) return;
        V(k_out, l) += amp;
    };
    for (int l = 0; l < di; ++l) {
        const int k = l;
        const int n = Ni - l;
        // g_{k,k+1} sqrt(n+1) |k+1,n+1><k,n|  and h.c.
        if (k + 1 <= kmax) deposit(k + 1, n + 1, l, g(k, k + 1) * std::sqrt(n + 1.0));
        if (k - 1 >= 0 && n >= 1) deposit(k - 1, n - 1, l, g(k - 1, k) * std::sqrt(double(n)));
        // g_{k,k+3} sqrt(n) |k+3,n-1><k,n|  and h.c.
        if (k + 3 <= kmax && n >= 1) deposit(k + 3, n - 1, l, g(k, k + 3) * std::sqrt(double(n)));
        if (k - 3 >= 0) deposit(k - 3, n + 1, l, g(k - 3, k) * std::sqrt(n + 1.0));
        // g_{k,k+2} sqrt(n) |k+2,n-1><k,n|  and h.c.
        if (k + 2 <= kmax && n >= 1) deposit(k + 2, n - 1, l, g(k, k + 2) * std::sqrt(double(n)));
        if (k - 2 >= 0) deposit(k - 2, n + 1, l, g(k - 2, k) * std::sqrt(n + 1.0));
    }
    return V;
}

// Dense matrix element <f~| H_nonRWA |i~>; equals g_eff_coh.
inline double direct_matrix_element(const LadderModel& model, const TransitionSpec& t) {
    detail::check_transition(model, t);
    const StripEigensystem& si = model.strip(t.initial_strip());
    const StripEigensystem& sf = model.strip(t.final_strip());
    const Eigen::MatrixXd V =
        nonrwa_block(model.spectrum(), t.initial_strip(), t.m(), model.params().epsilon_sym);
    return sf.coeffs.row(t.k_f).dot(V * si.coeffs.row(t.k_i).transpose());
}

struct SplittingResult {
    double splitting{0.0};   // minimum gap between the two tracked branches, GHz
    double detuning{0.0};    // final-strip shift at the minimum, GHz
    double lambda{0.0};
};

// Avoided-crossing oracle. The two strips' bare bases are joined, the
// non-RWA block is switched on with weight lambda, and the final strip is
// shifted rigidly by a detuning that scans through the crossing. At small
// lambda the minimum gap tends to 2 lambda |g_eff_coh|.
inline SplittingResult splitting_oracle(const LadderModel& model, const TransitionSpec& t, double lambda) {
    detail::check_transition(model, t);
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidArgument("splitting oracle: lambda must be in [0, 1]");
    const TransmonSpectrum& spec = model.spectrum();
    const int Ni = t.initial_strip();
    const int Nf = t.final_strip();
    const StripEigensystem& si = model.strip(Ni);
    const StripEigensystem& sf = model.strip(Nf);
    const int di = si.dim, df = sf.dim;
    const int dim = di + df;

    const double Ei = si.energies[t.k_i];
    const double Ef = sf.energies[t.k_f];
    Eigen::MatrixXd base = Eigen::MatrixXd::Zero(dim, dim);
    base.topLeftCorner(di, di) = strip_hamiltonian(spec, Ni);
    base.topLeftCorner(di, di).diagonal().array() -= Ei;
    base.bottomRightCorner(df, df) = strip_hamiltonian(spec, Nf);
    base.bottomRightCorner(df, df).diagonal().array() -= Ef;
    const Eigen::MatrixXd V = nonrwa_block(spec, Ni, t.m(), model.params().epsilon_sym);
    base.bottomLeftCorner(df, di) = lambda * V;
    base.topRightCorner(di, df) = lambda * V.transpose();

    Eigen::VectorXd vi = Eigen::VectorXd::Zero(dim), vf = Eigen::VectorXd::Zero(dim);
    vi.head(di) = si.coeffs.row(t.k_i).transpose();
    vf.tail(df) = sf.coeffs.row(t.k_f).transpose();

    struct Branches {
        double gap;
        double mix;      // |<i|upper>|^2 - |<f|upper>|^2
        double captured; // weight of i and f inside the two branches, out of 2
    };
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    auto branches = [&](double delta) -> Branches {
        Eigen::MatrixXd H = base;
        H.bottomRightCorner(df, df).diagonal().array() += delta;
        es.compute(H);
        if (es.info() != Eigen::Success) throw NumericalFailure("splitting oracle: eigensolver failed");
        const Eigen::VectorXd wi = (es.eigenvectors().transpose() * vi).cwiseAbs2();
        const Eigen::VectorXd wf = (es.eigenvectors().transpose() * vf).cwiseAbs2();
        const Eigen::VectorXd w = wi + wf;
        int j1 = 0, j2 = -1;
        for (int j = 1; j < dim; ++j)
            if (w(j) > w(j1)) j1 = j;
        for (int j = 0; j < dim; ++j)
            if (j != j1 && (j2 < 0 || w(j) > w(j2))) j2 = j;
        const int up = es.eigenvalues()(j1) >= es.eigenvalues()(j2) ? j1 : j2;
        return {std::abs(es.eigenvalues()(j1) - es.eigenvalues()(j2)), wi(up) - wf(up), w(j1) + w(j2)};
    };

    if (lambda == 0.0) return {branches(0.0).gap, 0.0, 0.0};

    // Scan window: a quarter of the distance to the nearest spectator level.
    double spacing = std::numeric_limits<double>::infinity();
    for (int k = 0; k < di; ++k)
        if (k != t.k_i) spacing = std::min(spacing, std::abs(si.energies[k] - Ei));
    for (int k = 0; k < df; ++k)
        if (k != t.k_f) spacing = std::min(spacing, std::abs(sf.energies[k] - Ef));
    const double window = std::isfinite(spacing) ? 0.25 * spacing : 1.0;

    double lo = -window, hi = window;
    Branches blo = branches(lo), bhi = branches(hi);
    if (!(blo.mix > 0.0 && bhi.mix < 0.0))
        throw NumericalFailure("splitting oracle: branches not identifiable (no character swap in scan window)");
    for (int it = 0; it < 200 && hi - lo > 1e-15 * window; ++it) {
        const double mid = 0.5 * (lo + hi);
        (branches(mid).mix > 0.0 ? lo : hi) = mid;
    }
    const double center = 0.5 * (lo + hi);
    const Branches bc = branches(center);
    if (bc.captured < 1.6)
        throw NumericalFailure("splitting oracle: strong three-state mixing at the crossing; oracle inapplicable");

    const double half = std::max(4.0 * bc.gap, 1e-12);
    auto [dmin, gmin] = boost::math::tools::brent_find_minima(
        [&](double d) { return branches(d).gap; }, center - half, center + half,
        std::numeric_limits<double>::digits / 2);
    if (bc.gap <= gmin) return {bc.gap, center, lambda};
    return {gmin, dmin, lambda};
}

inline double two_strip_splitting_oracle(const LadderModel& model, const TransitionSpec& t, double lambda) {
    return splitting_oracle(model, t, lambda).splitting;
}

} // namespace jcladder
