// rwa_ladder.hpp: excitation-number strips of H_b + H_RWA and their dressed states
//
// Strip N is spanned by the bare states |l, N - l>, l = 0..min(N, k_max).
// Within a strip the Hamiltonian is symmetric tridiagonal:
//
//     diag:      E_l + (N - l) omega_r
//     off-diag:  g_{l,l+1} sqrt(N - l)
//
// Coefficients follow the bare-basis expansion
//     |k, N-k>~ = sum_l c_l^{(k, N-k)} |l, N - l>,
// stored as coeffs(k, l).

#pragma once

#include <algorithm>
#include <atomic>
#include <functional>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "jcladder/error.hpp"
#include "jcladder/transmon_spectrum.hpp"

namespace jcladder {

// How eigenvectors of a strip are matched to bare labels.
//  Adiabatic:  continuation from g = 0. An irreducible tridiagonal matrix has a
//              simple spectrum, so levels never cross as g is switched on and
//              the label is the energy rank of the bare state.
//  MaxOverlap: optimal assignment maximizing sum_k |c_k^{(k)}|^2.
enum class LabelPolicy { Adiabatic, MaxOverlap };

struct StripEigensystem {
    int N{0};
    int dim{0};
    std::vector<double> energies;             // indexed by dressed label k, GHz
    Eigen::MatrixXd coeffs;                   // (k, l) -> c_l^{(k, N-k)}
    std::vector<double> assignment_quality;   // |c_k^{(k, N-k)}|^2
    bool strongly_mixed{false};               // some eigenvector has two near-equal top overlaps
};

inline int strip_dim(int N, int k_max) { return std::min(N, k_max) + 1; }

inline Eigen::MatrixXd strip_hamiltonian(const TransmonSpectrum& spec, int N) {
    if (N < 0) throw InvalidArgument("strip_hamiltonian: N must be >= 0");
    const int dim = strip_dim(N, spec.k_max());
    const double wr = spec.params_used.omega_r;
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
    for (int l = 0; l < dim; ++l) H(l, l) = spec.levels[l] + (N - l) * wr;
    for (int l = 0; l + 1 < dim; ++l)
        H(l, l + 1) = H(l + 1, l) = normalized_charge_coupling(spec, l, l + 1) * std::sqrt(double(N - l));
    return H;
}

namespace detail {

// Exact assignment by DP over subsets; strips never exceed k_max + 1 <= ~16.
inline std::vector<int> best_assignment(const Eigen::MatrixXd& weight) {
    const int n = static_cast<int>(weight.rows());
    const std::size_t full = std::size_t{1} << n;
    std::vector<double> best(full, -1.0);
    std::vector<int> choice(full, -1);
    best[0] = 0.0;
    // Row r = popcount(mask) is assigned next.
    for (std::size_t mask = 0; mask < full; ++mask) {
        if (best[mask] < 0.0) continue;
        const int r = __builtin_popcountll(mask);
        if (r == n) continue;
        for (int c = 0; c < n; ++c) {
            if (mask & (std::size_t{1} << c)) continue;
            const std::size_t next = mask | (std::size_t{1} << c);
            const double w = best[mask] + weight(r, c);
            if (w > best[next]) {
                best[next] = w;
                choice[next] = c;
            }
        }
    }
    std::vector<int> assign(n);
    std::size_t mask = full - 1;
    for (int r = n - 1; r >= 0; --r) {
        const int c = choice[mask];
        assign[r] = c;
        mask &= ~(std::size_t{1} << c);
    }
    return assign;
}

} // namespace detail

inline StripEigensystem solve_strip(const TransmonSpectrum& spec, int N,
                                    LabelPolicy policy = LabelPolicy::Adiabatic) {
    Eigen::MatrixXd H = strip_hamiltonian(spec, N);
    const int dim = static_cast<int>(H.rows());
    // Work relative to the bare |0, N> energy; keeps large-N strips well scaled.
    const double offset = H(0, 0);
    H.diagonal().array() -= offset;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    if (es.info() != Eigen::Success)
        throw NumericalFailure("solve_strip: eigensolver failed for N = " + std::to_string(N));
    const Eigen::VectorXd& vals = es.eigenvalues();
    const Eigen::MatrixXd& vecs = es.eigenvectors();  // columns

    // label l -> eigen column
    std::vector<int> col_of(dim);
    if (policy == LabelPolicy::Adiabatic) {
        std::vector<int> order(dim);
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return H(a, a) < H(b, b); });
        for (int rank = 0; rank < dim; ++rank) col_of[order[rank]] = rank;
    } else {
        col_of = detail::best_assignment(vecs.cwiseAbs2());
    }

    StripEigensystem s;
    s.N = N;
    s.dim = dim;
    s.energies.resize(dim);
    s.coeffs.resize(dim, dim);
    s.assignment_quality.resize(dim);
    for (int k = 0; k < dim; ++k) {
        Eigen::VectorXd v = vecs.col(col_of[k]);
        double pivot = v(k);
        if (pivot == 0.0) pivot = v(0);  // first component of a Jacobi eigenvector is never zero
        if (pivot < 0.0) v = -v;
        s.energies[k] = vals(col_of[k]) + offset;
        s.coeffs.row(k) = v.transpose();
        s.assignment_quality[k] = v(k) * v(k);
    }
    for (int j = 0; j < dim && !s.strongly_mixed; ++j) {
        Eigen::VectorXd w = vecs.col(j).cwiseAbs2();
        std::sort(w.data(), w.data() + dim, std::greater<>());
        if (dim > 1 && w(0) - w(1) < 1e-6) s.strongly_mixed = true;
    }
    return s;
}

// Transmon spectrum plus a lazily filled, thread-safe strip memo.
class LadderModel {
public:
    explicit LadderModel(TransmonSpectrum spec, LabelPolicy policy = LabelPolicy::Adiabatic)
        : spec_(std::move(spec)), policy_(policy), cache_(std::make_unique<Cache>()) {}

    explicit LadderModel(const DeviceParams& params, LabelPolicy policy = LabelPolicy::Adiabatic)
        : LadderModel(solve_transmon(params), policy) {}

    const TransmonSpectrum& spectrum() const { return spec_; }
    const DeviceParams& params() const { return spec_.params_used; }
    LabelPolicy label_policy() const { return policy_; }
    int k_max() const { return spec_.k_max(); }

    const StripEigensystem& strip(int N) const {
        if (N < 0) throw InvalidArgument("strip: N must be >= 0");
        {
            std::lock_guard lock(cache_->mutex);
            auto it = cache_->strips.find(N);
            if (it != cache_->strips.end()) return it->second;
        }
        StripEigensystem solved = solve_strip(spec_, N, policy_);
        std::lock_guard lock(cache_->mutex);
        return cache_->strips.try_emplace(N, std::move(solved)).first->second;
    }

    // Solves strips [lo, hi] on `threads` workers; results land in the memo.
    void prefetch(int lo, int hi, unsigned threads = std::thread::hardware_concurrency()) const {
        if (hi < lo) return;
        threads = std::max(1u, threads);
        std::atomic<int> next{lo};
        auto work = [&] {
            for (int N = next++; N <= hi; N = next++) strip(N);
        };
        std::vector<std::thread> pool;
        for (unsigned t = 1; t < threads; ++t) pool.emplace_back(work);
        work();
        for (auto& t : pool) t.join();
    }

    std::size_t cached_strip_count() const {
        std::lock_guard lock(cache_->mutex);
        return cache_->strips.size();
    }

    void clear_cache() const {
        std::lock_guard lock(cache_->mutex);
        cache_->strips.clear();
    }

private:
    struct Cache {
        std::mutex mutex;
        std::map<int, StripEigensystem> strips;  // node-based: references stay valid
    };

    TransmonSpectrum spec_;
    LabelPolicy policy_;
    std::unique_ptr<Cache> cache_;
};

inline const StripEigensystem& diagonalize_strip(const LadderModel& model, int N) { return model.strip(N); }

// E of |k, n>~, which lives in strip k + n.
inline double dressed_energy(const LadderModel& model, int k, int n) {
    if (k < 0 || k > model.k_max())
        throw IndexOutOfRange("dressed_energy: level " + std::to_string(k) + " outside 0..k_max");
    if (n < 0) throw InvalidArgument("dressed_energy: photon number must be >= 0");
    return model.strip(k + n).energies[k];
}

// omega_k(N) = E(|k, N - k>~) - N omega_r
inline double fan_frequency(const LadderModel& model, int k, int n_total) {
    if (n_total < 0) throw InvalidArgument("fan_frequency: n_total must be >= 0");
    if (k < 0 || k > std::min(n_total, model.k_max()))
        throw IndexOutOfRange("fan_frequency: level " + std::to_string(k) + " not in strip " +
                              std::to_string(n_total));
    return model.strip(n_total).energies[k] - n_total * model.params().omega_r;
}

enum class StarkConvention {
    Raw,       // (E|1,n> - E|0,n>) - omega_10; nonzero at n = 0
    Rezeroed,  // Raw(n) - Raw(0)
};

inline double stark_shift(const LadderModel& model, int n, StarkConvention conv = StarkConvention::Raw) {
    if (n < 0) throw InvalidArgument("stark_shift: n must be >= 0");
    if (model.k_max() < 1) throw IndexOutOfRange("stark_shift: needs k_max >= 1");
    const double w10 = model.spectrum().omega_10;
    auto raw = [&](int m) { return dressed_energy(model, 1, m) - dressed_energy(model, 0, m) - w10; };
    const double shift = raw(n);
    return conv == StarkConvention::Raw ? shift : shift - raw(0);
}

// Two-level-plus-one dispersive shift with the numeric couplings:
//     chi = g_01^2 / (omega_10 - omega_r) - g_12^2 / (2 (omega_21 - omega_r)).
// The Stark slope per photon is 2 chi.
inline double dispersive_chi(const TransmonSpectrum& spec, const DeviceParams& params) {
    if (spec.k_max() < 2) throw IndexOutOfRange("dispersive_chi: needs k_max >= 2");
    const double delta = spec.omega_10 - params.omega_r;
    const double delta21 = spec.omega(2, 1) - params.omega_r;
    if (std::abs(delta) < 1e-12 || std::abs(delta21) < 1e-12)
        throw InvalidArgument("dispersive_chi: straddling-regime pole (delta = 0 or delta = -eta)");
    const double g01 = params.g;
    const double g12 = params.g * spec.charge_elems(1, 2) / spec.q01;
    return g01 * g01 / delta - g12 * g12 / (2.0 * delta21);
}

// Same expression with g_12 = sqrt(2) g: chi = g^2 eta / (delta (delta + eta)).
inline double dispersive_chi_closed_form(double g, double delta, double eta) {
    if (std::abs(delta) < 1e-12 || std::abs(delta + eta) < 1e-12)
        throw InvalidArgument("dispersive_chi_closed_form: straddling-regime pole");
    return g * g * eta / (delta * (delta + eta));
}

inline double linear_stark_reference(double chi, int n) { return n == 0 ? 0.0 : -2.0 * std::abs(chi) * n; }

// n_c = (delta / 2g)^2
inline double critical_photon_number(const DeviceParams& params, const TransmonSpectrum& spec) {
    if (!(params.g > 0.0)) throw InvalidArgument("critical_photon_number: g must be > 0");
    const double delta = spec.omega_10 - params.omega_r;
    return (delta / (2.0 * params.g)) * (delta / (2.0 * params.g));
}

inline double critical_photon_number(const LadderModel& model) {
    return critical_photon_number(model.params(), model.spectrum());
}

} // namespace jcladder
