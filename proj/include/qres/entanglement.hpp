#ifndef QRES_ENTANGLEMENT_HPP
#define QRES_ENTANGLEMENT_HPP

#include <functional>
#include <map>

#include "qres/channels.hpp"
#include "qres/phase.hpp"

namespace qres {

/// 2 |det A| for the amplitude matrix A of a two-qubit pure state.
inline double concurrence_pure(const PureState& psi) {
    if (psi.dims() != Dims{2, 2})
        throw DimensionError("concurrence_pure: state must be two qubits");
    Mat a(2, 2);
    a << psi.amplitudes()(0), psi.amplitudes()(1), psi.amplitudes()(2), psi.amplitudes()(3);
    return 2.0 * std::abs(a.determinant());
}

/// Wootters concurrence via the Hermitian product sqrt(rho) rho~ sqrt(rho).
inline double concurrence(const DensityMatrix& rho) {
    if (rho.dims() != Dims{2, 2}) throw DimensionError("concurrence: state must be two qubits");
    const Mat yy = tensor(pauli_y(), pauli_y());
    const Mat rho_tilde = yy * rho.matrix().conjugate() * yy;
    const Mat sqrt_rho = matrix_sqrt_psd(rho.matrix());
    Mat m = sqrt_rho * rho_tilde * sqrt_rho;
    m = (m + m.adjoint()) * 0.5;
    auto eg = eigh(m);
    double c = 0.0;
    for (Eigen::Index k = 0; k < eg.eigenvalues.size(); ++k) {
        const double lam = std::sqrt(std::max(0.0, eg.eigenvalues(k)));
        c += (k == 0) ? lam : -lam;
    }
    return std::max(0.0, c);
}

inline double binary_entropy(double x) {
    double acc = 0.0;
    if (x > 0) acc -= x * std::log2(x);
    if (x < 1) acc -= (1 - x) * std::log2(1 - x);
    return acc;
}

inline double eof_from_concurrence(double c) {
    return binary_entropy((1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))) / 2.0);
}

/// Entanglement of formation of a two-qubit state, in bits.
inline double eof(const DensityMatrix& rho) { return eof_from_concurrence(concurrence(rho)); }

/// G-concurrence d * (prod of squared Schmidt coefficients)^(1/d).
inline double g_concurrence_pure(const PureState& psi) {
    if (psi.dims().size() != 2 || psi.dims()[0] != psi.dims()[1])
        throw DimensionError("g_concurrence_pure: state must have equal local dimensions");
    const int d = psi.dims()[0];
    auto sr = schmidt(psi);
    double log_prod = 0.0;
    for (Eigen::Index k = 0; k < sr.coefficients.size(); ++k) {
        const double w = sr.coefficients(k) * sr.coefficients(k);
        if (w <= 0) return 0.0;
        log_prod += std::log(w);
    }
    if (sr.coefficients.size() < d) return 0.0;
    return d * std::exp(log_prod / d);
}

/// G-concurrence of a state that must be pure at threshold tol; the mixed
/// higher-dimensional case has no closed form and is rejected.
inline double g_concurrence_of_state(const DensityMatrix& rho, double purity_tol = 1e-8) {
    if (rho.dims() == Dims{2, 2}) return concurrence(rho);
    auto eg = eigh(rho.matrix());
    if (eg.eigenvalues(0) < 1.0 - purity_tol)
        throw UnsupportedError(
            "g_concurrence_of_state: mixed states beyond two qubits need a convex roof");
    return g_concurrence_pure(PureState(eg.eigenvectors.col(0), rho.dims()));
}

/// Quality factor: G-concurrence of the channel's Choi state. The factor is
/// the one-sided entanglement degradation multiplier.
struct QualityFactor {
    double value;
};

inline QualityFactor quality_factor(const QuantumChannel& s) {
    if (s.dim_in() != s.dim_out())
        throw DimensionError("quality_factor: channel must be endomorphic");
    const int d = s.dim_in();
    DensityMatrix choi_state(choi(s).state().matrix(), Dims{d, d});
    return {g_concurrence_of_state(choi_state)};
}

/// Measure of (S (x) 1)|psi><psi| for a one-sided channel action.
inline double evolved_g_concurrence(const QuantumChannel& s, const PureState& psi) {
    if (psi.dims().size() != 2 || psi.dims()[0] != s.dim_in())
        throw DimensionError("evolved_g_concurrence: dims mismatch");
    const int db = psi.dims()[1];
    auto one_sided = channel_tensor(s, identity_channel({db}));
    DensityMatrix evolved = apply(one_sided, psi.density());
    return g_concurrence_of_state(DensityMatrix(evolved.matrix(), {s.dim_out(), db}));
}

/// Effective state under a product restriction S_A (x) S_B.
inline DensityMatrix effective_state(const DensityMatrix& rho, const QuantumChannel& s_a,
                                     const QuantumChannel& s_b) {
    return apply(channel_tensor(s_a, s_b), rho);
}

// ---------------------------------------------------------------------------
// Superselection-rule sector structure
// ---------------------------------------------------------------------------

/// Particle numbers carried by each local basis state, one list per subsystem.
using LocalNumbers = std::vector<std::vector<int>>;

inline void check_grading(const LocalNumbers& numbers, const Dims& dims) {
    if (numbers.size() != dims.size())
        throw ValidationError("local_numbers: one list per subsystem required");
    for (std::size_t s = 0; s < dims.size(); ++s)
        if (static_cast<int>(numbers[s].size()) != dims[s])
            throw ValidationError("local_numbers: list length must equal subsystem dimension");
}

/// Block decomposition over joint local-particle-number patterns.
struct SSRBlockDecomposition {
    struct Block {
        std::vector<int> pattern;  // per-subsystem particle count
        double weight;
        DensityMatrix state;  // normalized, supported on the sector
    };
    std::vector<Block> blocks;
};

namespace detail {

inline std::map<std::vector<int>, std::vector<int>> sector_indices(const LocalNumbers& numbers,
                                                                   const Dims& dims) {
    std::map<std::vector<int>, std::vector<int>> sectors;
    const int d = dims_product(dims);
    for (int i = 0; i < d; ++i) {
        auto digits = unravel_index(i, dims);
        std::vector<int> pattern(dims.size());
        for (std::size_t s = 0; s < dims.size(); ++s) pattern[s] = numbers[s][digits[s]];
        sectors[pattern].push_back(i);
    }
    return sectors;
}

}  // namespace detail

inline SSRBlockDecomposition ssr_decompose(const DensityMatrix& rho, const LocalNumbers& numbers,
                                           double weight_cutoff = 1e-14) {
    check_grading(numbers, rho.dims());
    SSRBlockDecomposition out;
    for (auto& [pattern, idx] : detail::sector_indices(numbers, rho.dims())) {
        double w = 0.0;
        for (int i : idx) w += std::real(rho.matrix()(i, i));
        if (w <= weight_cutoff) continue;
        Mat block = Mat::Zero(rho.dim(), rho.dim());
        for (int i : idx)
            for (int j : idx) block(i, j) = rho.matrix()(i, j) / w;
        out.blocks.push_back({pattern, w, DensityMatrix(std::move(block), rho.dims())});
    }
    return out;
}

/// The dephased (einselected) state: sum of projected blocks.
inline DensityMatrix ssr_dephase(const DensityMatrix& rho, const LocalNumbers& numbers) {
    check_grading(numbers, rho.dims());
    Mat acc = Mat::Zero(rho.dim(), rho.dim());
    for (auto& [pattern, idx] : detail::sector_indices(numbers, rho.dims()))
        for (int i : idx)
            for (int j : idx) acc(i, j) = rho.matrix()(i, j);
    return DensityMatrix(std::move(acc), rho.dims());
}

struct SSREffectiveEntanglement {
    double value;
    bool is_upper_bound;  // set for mixed inputs
};

/// Sector-weighted measure sum; exact for pure inputs, an upper bound for
/// mixed ones.
inline SSREffectiveEntanglement ssr_effective_entanglement(
    const DensityMatrix& rho, const LocalNumbers& numbers,
    const std::function<double(const DensityMatrix&)>& measure) {
    auto dec = ssr_decompose(rho, numbers);
    double acc = 0.0;
    for (auto& b : dec.blocks) acc += b.weight * measure(b.state);
    const double purity = std::real((rho.matrix() * rho.matrix()).trace());
    return {acc, purity < 1.0 - 1e-9};
}

/// |g| of the reference-frame phase distribution; equals the quality factor
/// of the induced mode channel.
inline double bec_effective_quality(const PhaseDistribution& p) {
    return std::abs(g_from_phase_dist(p));
}

}  // namespace qres

#endif  // QRES_ENTANGLEMENT_HPP
