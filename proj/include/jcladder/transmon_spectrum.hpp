// transmon_spectrum.hpp: isolated transmon levels and charge matrix elements
//
// The transmon is solved as a Cooper-pair box in a truncated charge basis,
//
//     H = 4 E_C (n - n_g)^2 - (E_J / 2) sum_n (|n><n+1| + h.c.),
//
// which has the same spectrum and matrix elements as the Mathieu solution.
// All energies are ordinary frequencies in GHz (E/h), so a coupling "hbar g"
// is just g.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "jcladder/error.hpp"

namespace jcladder {

struct DeviceParams {
    double E_C{0.2};          // charging energy, GHz
    double E_J{10.0};         // Josephson energy, GHz
    double n_g{0.0};          // offset charge
    double omega_r{6.8};      // bare resonator frequency, GHz
    double g{0.087};          // qubit-resonator coupling, GHz
    int k_max{9};             // highest retained transmon level
    int charge_cutoff{30};    // charge basis spans round(n_g) +- cutoff
    double epsilon_sym{0.0};  // g_{0,2} / g, phenomenological parity breaking
};

// Throws InvalidArgument naming the first violated constraint.
inline void validate(const DeviceParams& p) {
    auto fail = [](const std::string& what) { throw InvalidArgument("DeviceParams: " + what); };
    if (!(p.E_C > 0.0)) fail("E_C must be > 0");
    if (!(p.E_J > 0.0)) fail("E_J must be > 0");
    if (!(p.E_J / p.E_C >= 10.0)) fail("E_J/E_C must be >= 10 (transmon regime)");
    if (!std::isfinite(p.n_g)) fail("n_g must be finite");
    if (!(p.omega_r > 0.0)) fail("omega_r must be > 0");
    if (!(p.g > 0.0)) fail("g must be > 0");
    if (p.charge_cutoff < 15) fail("charge_cutoff must be >= 15");
    if (p.k_max < 0 || p.k_max > p.charge_cutoff) fail("k_max must lie in [0, charge_cutoff]");
    if (!(p.epsilon_sym >= 0.0)) fail("epsilon_sym must be >= 0");
}

struct TransmonSpectrum {
    std::vector<double> levels;     // E_k, k = 0..k_max, GHz
    Eigen::MatrixXd charge_elems;   // <k|n - n_g|k'>, (k_max+1) square
    double q01{0.0};                // <0|Q|1>, positive by convention
    double omega_10{0.0};
    double eta{0.0};                // omega_21 - omega_10
    int bound_level_count{0};       // levels below the top of the cosine barrier
    DeviceParams params_used;

    int k_max() const { return static_cast<int>(levels.size()) - 1; }
    double omega(int k, int l) const { return levels.at(k) - levels.at(l); }
    // Levels above the barrier are kept but flagged here rather than dropped.
    bool all_levels_bound() const { return bound_level_count == static_cast<int>(levels.size()); }
};

namespace detail {

// Largest |amplitude| a retained eigenvector may carry on the edge of the
// charge window before the truncation is declared unconverged.
inline constexpr double kEdgeAmplitudeTol = 1e-6;

} // namespace detail

inline TransmonSpectrum solve_transmon(const DeviceParams& params) {
    validate(params);
    const int cutoff = params.charge_cutoff;
    const int dim = 2 * cutoff + 1;
    const double center = std::round(params.n_g);
    // Always solve at least two levels so <0|Q|1> exists for normalization.
    const int nkeep = std::max(params.k_max, 1) + 1;

    Eigen::VectorXd charge(dim);
    for (int i = 0; i < dim; ++i) charge(i) = center + (i - cutoff) - params.n_g;

    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dim; ++i) H(i, i) = 4.0 * params.E_C * charge(i) * charge(i);
    for (int i = 0; i + 1 < dim; ++i) H(i, i + 1) = H(i + 1, i) = -0.5 * params.E_J;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success) throw NumericalFailure("solve_transmon: eigensolver did not converge");

    Eigen::MatrixXd vecs = es.eigenvectors().leftCols(nkeep);
    for (int k = 0; k < nkeep; ++k) {
        const double edge = std::max(std::abs(vecs(0, k)), std::abs(vecs(dim - 1, k)));
        if (edge > detail::kEdgeAmplitudeTol)
            throw NumericalFailure("solve_transmon: level " + std::to_string(k) +
                                   " not converged at charge_cutoff " + std::to_string(cutoff));
    }

    // Phases: ground state's largest component positive, then <k-1|Q|k> > 0.
    {
        Eigen::Index imax;
        vecs.col(0).cwiseAbs().maxCoeff(&imax);
        if (vecs(imax, 0) < 0.0) vecs.col(0) *= -1.0;
    }
    for (int k = 1; k < nkeep; ++k) {
        const double q = vecs.col(k - 1).dot(charge.cwiseProduct(vecs.col(k)));
        if (q < 0.0) vecs.col(k) *= -1.0;
    }

    Eigen::MatrixXd Q = vecs.transpose() * charge.asDiagonal() * vecs;
    Q = 0.5 * (Q + Q.transpose()).eval();

    TransmonSpectrum spec;
    spec.params_used = params;
    const int nlev = params.k_max + 1;
    spec.levels.resize(nlev);
    for (int k = 0; k < nlev; ++k) spec.levels[k] = es.eigenvalues()(k);
    spec.charge_elems = Q.topLeftCorner(nlev, nlev);
    spec.q01 = Q(0, 1);
    spec.omega_10 = es.eigenvalues()(1) - es.eigenvalues()(0);
    if (dim >= 3) spec.eta = (es.eigenvalues()(2) - es.eigenvalues()(1)) - spec.omega_10;
    spec.bound_level_count = static_cast<int>(std::count_if(
        spec.levels.begin(), spec.levels.end(), [&](double e) { return e < params.E_J; }));
    return spec;
}

// g_{k,k'} = g <k|Q|k'> / <0|Q|1>, signed.
inline double normalized_charge_coupling(const TransmonSpectrum& spec, int k, int kp) {
    const int kmax = spec.k_max();
    if (k < 0 || kp < 0 || k > kmax || kp > kmax)
        throw IndexOutOfRange("normalized_charge_coupling: index outside 0.." + std::to_string(kmax));
    return spec.params_used.g * spec.charge_elems(k, kp) / spec.q01;
}

// Weak-anharmonicity expansions of g_{k,k+1} (offset 1) and g_{k,k+3} (offset 3).
inline double asymptotic_coupling(const TransmonSpectrum& spec, int k, int offset) {
    if (offset != 1 && offset != 3)
        throw InvalidArgument("asymptotic_coupling: offset must be 1 or 3");
    if (k < 0 || k + offset > spec.k_max())
        throw IndexOutOfRange("asymptotic_coupling: k + offset exceeds k_max");
    const double g = spec.params_used.g;
    const double ratio = spec.eta / spec.omega_10;
    const double kk = k;
    if (offset == 1) return g * std::sqrt(kk + 1.0) * (1.0 + 0.5 * ratio * kk);
    return g * std::sqrt((kk + 1.0) * (kk + 2.0) * (kk + 3.0)) * (-0.25 * ratio);
}

// Phenomenological parity-violating coupling g_{k,k+2} = eps g sqrt((k+1)(k+2)).
inline double broken_symmetry_coupling(const TransmonSpectrum& spec, int k, double epsilon_sym) {
    if (k < 0 || k + 2 > spec.k_max())
        throw IndexOutOfRange("broken_symmetry_coupling: k + 2 exceeds k_max");
    if (!(epsilon_sym >= 0.0)) throw InvalidArgument("broken_symmetry_coupling: epsilon_sym must be >= 0");
    const double kk = k;
    return epsilon_sym * spec.params_used.g * std::sqrt((kk + 1.0) * (kk + 2.0));
}

struct SpectroscopyFit {
    DeviceParams params;
    std::vector<double> residual_history;  // max-norm residual, GHz, seed first
};

// Inverts solve_transmon: finds (E_C, E_J) reproducing omega_10 and eta. Every
// other field is copied from `base`. Newton iteration with a finite-difference
// Jacobian and a backtracking line search, so the residual never increases.
inline SpectroscopyFit fit_charge_energies(double omega_10, double eta, const DeviceParams& base,
                                           double tol = 1e-11, int max_iter = 60) {
    if (!(omega_10 > 0.0)) throw InvalidArgument("params_from_spectroscopy: omega_10 must be > 0");
    if (!(eta < 0.0)) throw InvalidArgument("params_from_spectroscopy: eta must be < 0");
    if (!(-eta < omega_10)) throw InvalidArgument("params_from_spectroscopy: |eta| must be < omega_10");

    DeviceParams probe = base;
    probe.k_max = 2;

    auto residual = [&](const Eigen::Vector2d& x) -> Eigen::Vector2d {
        probe.E_C = x(0);
        probe.E_J = x(1);
        // Outside the regime the solver refuses to run; report a huge residual
        // so the line search backs off.
        if (!(x(0) > 0.0) || !(x(1) / x(0) >= 10.0)) return Eigen::Vector2d::Constant(1e300);
        const TransmonSpectrum s = solve_transmon(probe);
        return {s.omega_10 - omega_10, s.eta - eta};
    };

    // Seed from omega_10 ~ sqrt(8 E_C E_J) - E_C and E_C ~ -eta.
    Eigen::Vector2d x(-eta, 0.0);
    x(1) = (omega_10 + x(0)) * (omega_10 + x(0)) / (8.0 * x(0));
    if (x(1) / x(0) < 10.0)
        throw InvalidArgument("params_from_spectroscopy: no transmon-regime solution (|eta| too large for omega_10)");

    SpectroscopyFit fit;
    Eigen::Vector2d r = residual(x);
    double rnorm = r.cwiseAbs().maxCoeff();
    fit.residual_history.push_back(rnorm);

    for (int it = 0; it < max_iter && rnorm > tol; ++it) {
        Eigen::Matrix2d J;
        for (int j = 0; j < 2; ++j) {
            Eigen::Vector2d xp = x;
            const double h = 1e-6 * x(j);
            xp(j) += h;
            J.col(j) = (residual(xp) - r) / h;
        }
        const Eigen::Vector2d step = J.fullPivLu().solve(-r);
        double t = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls, t *= 0.5) {
            const Eigen::Vector2d xt = x + t * step;
            const Eigen::Vector2d rt = residual(xt);
            const double nt = rt.cwiseAbs().maxCoeff();
            if (nt < rnorm) {
                x = xt;
                r = rt;
                rnorm = nt;
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
        fit.residual_history.push_back(rnorm);
    }
    // FD Jacobian limits the final accuracy to ~1e-12; anything short of the
    // public 1e-6 GHz contract is a failure.
    if (!(rnorm <= std::max(tol, 1e-9)))
        throw NumericalFailure("params_from_spectroscopy: root finder did not converge (residual " +
                               std::to_string(rnorm) + " GHz)");

    fit.params = base;
    fit.params.E_C = x(0);
    fit.params.E_J = x(1);
    if (fit.params.E_J / fit.params.E_C < 10.0)
        throw InvalidArgument("params_from_spectroscopy: solution outside the transmon regime");
    return fit;
}

inline DeviceParams params_from_spectroscopy(double omega_10, double eta, const DeviceParams& base) {
    return fit_charge_energies(omega_10, eta, base).params;
}

} // namespace jcladder
