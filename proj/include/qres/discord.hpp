#ifndef QRES_DISCORD_HPP
#define QRES_DISCORD_HPP

#include "qres/info.hpp"
#include "qres/channels.hpp"
#include "qres/optimize.hpp"

namespace qres {

/// Rank-1 orthonormal complete measurement on one subsystem.
class MeasurementBasis {
  public:
    explicit MeasurementBasis(Mat vectors) : vectors_(std::move(vectors)) {
        if (vectors_.rows() != vectors_.cols())
            throw ValidationError("MeasurementBasis: basis must be complete");
        const Mat gram = vectors_.adjoint() * vectors_;
        if (max_abs(gram - Mat::Identity(vectors_.rows(), vectors_.cols())) > 1e-10)
            throw ValidationError("MeasurementBasis: vectors are not orthonormal");
    }

    /// Bloch angles (theta, phi) for a qubit: first vector
    /// cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>.
    static MeasurementBasis qubit(double theta, double phi) {
        Mat v(2, 2);
        const Complex e = std::exp(Complex(0, phi));
        v(0, 0) = std::cos(theta / 2);
        v(1, 0) = e * std::sin(theta / 2);
        v(0, 1) = -std::conj(e) * std::sin(theta / 2);
        v(1, 1) = std::cos(theta / 2);
        return MeasurementBasis(std::move(v));
    }

    static MeasurementBasis computational(int d) { return MeasurementBasis(Mat::Identity(d, d)); }

    int dim() const { return static_cast<int>(vectors_.rows()); }
    Vec vector(int k) const { return vectors_.col(k); }
    const Mat& vectors() const { return vectors_; }

  private:
    Mat vectors_;
};

namespace detail {

struct MeasuredBipartite {
    // measured subsystem set B collapsed into one factor; A kept in front
    Mat rho;      // reordered so the layout is [A..., B...] flattened to (dA, dB)
    int dim_a;
    int dim_b;
};

/// Reorders rho so that the non-measured subsystems come first.
inline MeasuredBipartite split_for_measurement(const DensityMatrix& rho,
                                               const std::set<int>& part_b) {
    const auto& dims = rho.dims();
    std::vector<int> order;
    for (int s = 0; s < static_cast<int>(dims.size()); ++s)
        if (!part_b.count(s)) order.push_back(s);
    for (int s : part_b) order.push_back(s);
    int da = 1, db = 1;
    for (int s = 0; s < static_cast<int>(dims.size()); ++s)
        (part_b.count(s) ? db : da) *= dims[s];
    const int d = rho.dim();
    std::vector<int> perm(d);
    Dims new_dims;
    for (int s : order) new_dims.push_back(dims[s]);
    for (int i = 0; i < d; ++i) {
        auto digits = unravel_index(i, dims);
        std::vector<int> nd(order.size());
        for (std::size_t s = 0; s < order.size(); ++s) nd[s] = digits[order[s]];
        perm[ravel_index(nd, new_dims)] = i;
    }
    Mat out(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) out(i, j) = rho.matrix()(perm[i], perm[j]);
    return {std::move(out), da, db};
}

}  // namespace detail

/// Average entropy of Alice's conditional state after a rank-1 measurement
/// of B; outcomes with probability below tol_supp contribute zero.
inline double measured_conditional_entropy(const DensityMatrix& rho, const std::set<int>& part_b,
                                           const MeasurementBasis& basis,
                                           double supp = default_tol().supp) {
    auto split = detail::split_for_measurement(rho, part_b);
    if (basis.dim() != split.dim_b)
        throw DimensionError("measured_conditional_entropy: basis does not match subsystem B");
    double acc = 0.0;
    for (int k = 0; k < split.dim_b; ++k) {
        const Vec b = basis.vector(k);
        Mat cond = Mat::Zero(split.dim_a, split.dim_a);
        for (int i = 0; i < split.dim_a; ++i)
            for (int j = 0; j < split.dim_a; ++j) {
                Complex x = 0.0;
                for (int m = 0; m < split.dim_b; ++m)
                    for (int n = 0; n < split.dim_b; ++n)
                        x += std::conj(b(m)) * split.rho(i * split.dim_b + m, j * split.dim_b + n) *
                             b(n);
                cond(i, j) = x;
            }
        const double p = std::real(cond.trace());
        if (p <= supp) continue;
        acc += p * vn_entropy(DensityMatrix(cond / p, {split.dim_a}));
    }
    return acc;
}

/// Basis-dependent discord: measured conditional entropy minus S(A|B).
inline double discord_zurek(const DensityMatrix& rho, const std::set<int>& part_b,
                            const MeasurementBasis& basis) {
    return measured_conditional_entropy(rho, part_b, basis) - conditional_entropy(rho, part_b);
}

struct DiscordResult {
    double value = 0.0;
    double theta = 0.0;  // minimizing basis (qubit parametrization)
    double phi = 0.0;
    int restarts_used = 0;
    int evaluations = 0;
    bool converged = false;
    bool heuristic = false;  // set when d_B > 2 (no global guarantee)
};

/// Minimum of discord_zurek over rank-1 projective bases on B. Exact
/// parametrized search for qubit B (coarse grid + local refinement);
/// d_B > 2 requires allow_heuristic and uses random multistart only.
inline DiscordResult discord(const DensityMatrix& rho, const std::set<int>& part_b,
                             int restarts = 8, std::uint64_t seed = 0,
                             bool allow_heuristic = false) {
    auto split = detail::split_for_measurement(rho, part_b);
    const double base = conditional_entropy(rho, part_b);
    if (split.dim_b == 2) {
        auto objective = [&](const RVec& x) {
            return measured_conditional_entropy(rho, part_b, MeasurementBasis::qubit(x(0), x(1))) -
                   base;
        };
        // coarse grid bounds the optimizer from above
        double best_grid = kInf;
        RVec best_pt(2);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 32; ++j) {
                RVec x(2);
                x << std::numbers::pi * (i + 0.5) / 16, 2 * std::numbers::pi * j / 32;
                const double v = objective(x);
                if (v < best_grid) {
                    best_grid = v;
                    best_pt = x;
                }
            }
        auto sample = [](std::mt19937_64& rng) {
            std::uniform_real_distribution<double> u(0, 1);
            RVec x(2);
            x << std::numbers::pi * u(rng), 2 * std::numbers::pi * u(rng);
            return x;
        };
        auto res = multistart_minimize(objective, sample, std::max(restarts, 8), seed,
                                       {1e-10, 2000, 0.2}, {best_pt});
        DiscordResult out;
        out.value = std::min(res.value, best_grid);
        out.theta = res.x(0);
        out.phi = res.x(1);
        out.restarts_used = res.restarts_used;
        out.evaluations = res.evaluations;
        out.converged = res.converged;
        return out;
    }
    if (!allow_heuristic)
        throw UnsupportedError("discord: d_B > 2 needs the explicit heuristic flag");
    // random-unitary multistart over bases; no global guarantee
    const int db = split.dim_b;
    DiscordResult out;
    out.heuristic = true;
    out.value = kInf;
    for (int r = 0; r < std::max(restarts, 8); ++r) {
        std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(r)));
        std::normal_distribution<double> gauss(0, 1);
        Mat g(db, db);
        for (int i = 0; i < db; ++i)
            for (int j = 0; j < db; ++j) g(i, j) = Complex(gauss(rng), gauss(rng));
        Eigen::HouseholderQR<Mat> qr(g);
        Mat q = qr.householderQ();
        const double v =
            measured_conditional_entropy(rho, part_b, MeasurementBasis(q)) - base;
        out.value = std::min(out.value, v);
        ++out.restarts_used;
    }
    return out;
}

/// Einselected relative entropy of discord S(rho || Gamma(rho)).
inline double einselected_discord(const DensityMatrix& rho, const EinselectionSpec& gamma) {
    DensityMatrix dephased(gamma.apply_raw(rho.matrix()), rho.dims());
    return rel_entropy(rho, dephased);
}

namespace detail {

/// Max over a probe set of || S(Gamma(rho)) - Gamma(S(rho)) ||_max.
inline double commutation_defect(const QuantumChannel& s, const EinselectionSpec& gamma,
                                 int probes, std::uint64_t seed) {
    const int d = s.dim_in();
    double defect = 0.0;
    for (int k = 0; k < probes; ++k) {
        PureState psi = random_pure(d, mix_seed(seed, 1000 + k));
        const Mat rho = psi.amplitudes() * psi.amplitudes().adjoint();
        defect = std::max(defect, max_abs(s.apply_raw(gamma.apply_raw(rho)) -
                                          gamma.apply_raw(s.apply_raw(rho))));
    }
    return defect;
}

}  // namespace detail

/// Superdense-coding capacity gap F(S(rho)) - F(S(Gamma(rho))) for a channel
/// commuting with the one-sided einselection Gamma.
inline double capacity_gap(const QuantumChannel& s, const EinselectionSpec& gamma,
                           const DensityMatrix& rho, const std::set<int>& part_b,
                           std::uint64_t seed = 0) {
    const int d = s.dim_in();
    const double defect = detail::commutation_defect(s, gamma, d * d, seed);
    if (defect > 1e-8)
        throw ValidationError("capacity_gap: channel does not commute with Gamma, defect " +
                              std::to_string(defect));
    auto sender = complement_set(part_b, rho.dims().size());
    DensityMatrix quantum_out = apply(s, rho);
    DensityMatrix classical_in(gamma.apply_raw(rho.matrix()), rho.dims());
    DensityMatrix classical_out = apply(s, classical_in);
    return coding_capacity(quantum_out, sender) - coding_capacity(classical_out, sender);
}

/// Discord of S(|Phi_d><Phi_d|) through the capacity route: the best
/// classically-dephased input is searched over pointer bases on B.
inline double discord_via_capacity(const QuantumChannel& s, int restarts = 8,
                                   std::uint64_t seed = 0) {
    if (s.dims_in().size() != 2 || s.dims_in()[0] != s.dims_in()[1])
        throw DimensionError("discord_via_capacity: channel must act on d x d");
    const int d = s.dims_in()[0];
    if (d != 2) throw UnsupportedError("discord_via_capacity: implemented for qubit sides");
    DensityMatrix phi = max_entangled(d).density();
    const std::set<int> part_b{1};
    const std::set<int> sender{0};
    DensityMatrix quantum_out = apply(s, phi);
    auto objective = [&](const RVec& x) {
        const MeasurementBasis basis = MeasurementBasis::qubit(x(0), x(1));
        EinselectionSpec gamma = EinselectionSpec::one_sided({d, d}, part_b, basis.vectors());
        DensityMatrix dephased(gamma.apply_raw(phi.matrix()), phi.dims());
        return -coding_capacity(apply(s, dephased), sender);
    };
    auto sample = [](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0, 1);
        RVec x(2);
        x << std::numbers::pi * u(rng), 2 * std::numbers::pi * u(rng);
        return x;
    };
    auto res = multistart_minimize(objective, sample, std::max(restarts, 8), seed,
                                   {1e-10, 2000, 0.2});
    return coding_capacity(quantum_out, sender) + res.value;
}

}  // namespace qres

#endif  // QRES_DISCORD_HPP
