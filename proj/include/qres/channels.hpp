#ifndef QRES_CHANNELS_HPP
#define QRES_CHANNELS_HPP

#include <cmath>
#include <numbers>
#include <optional>
#include <utility>

#include "qres/states.hpp"

namespace qres {

/// CPTP map stored as a Kraus-operator list.
class QuantumChannel {
  public:
    QuantumChannel(std::vector<Mat> kraus, Dims dims_in, Dims dims_out,
                   const Tolerances& tol = default_tol())
        : kraus_(std::move(kraus)), dims_in_(std::move(dims_in)), dims_out_(std::move(dims_out)) {
        validate(tol);
    }

    static QuantumChannel endomorphic(std::vector<Mat> kraus, Dims dims) {
        Dims copy = dims;
        return QuantumChannel(std::move(kraus), std::move(dims), std::move(copy));
    }

    const std::vector<Mat>& kraus() const { return kraus_; }
    const Dims& dims_in() const { return dims_in_; }
    const Dims& dims_out() const { return dims_out_; }
    int dim_in() const { return dims_product(dims_in_); }
    int dim_out() const { return dims_product(dims_out_); }

    Mat apply_raw(const Mat& rho) const {
        if (rho.rows() != dim_in() || rho.cols() != dim_in())
            throw DimensionError("QuantumChannel: state dimension mismatch");
        Mat out = Mat::Zero(dim_out(), dim_out());
        for (const Mat& k : kraus_) out += k * rho * k.adjoint();
        return out;
    }

  private:
    void validate(const Tolerances& tol) {
        if (kraus_.empty()) throw ValidationError("QuantumChannel: no Kraus operators");
        const int din = dims_product(dims_in_);
        const int dout = dims_product(dims_out_);
        Mat acc = Mat::Zero(din, din);
        for (const Mat& k : kraus_) {
            if (k.rows() != dout || k.cols() != din)
                throw ValidationError("QuantumChannel: Kraus operator shape mismatch");
            if (!k.allFinite()) throw ValidationError("QuantumChannel: non-finite Kraus entries");
            acc += k.adjoint() * k;
        }
        const double defect = max_abs(acc - Mat::Identity(din, din));
        if (defect > tol.herm)
            throw ValidationError("QuantumChannel: trace preservation defect " + std::to_string(defect));
    }

    std::vector<Mat> kraus_;
    Dims dims_in_;
    Dims dims_out_;
};

inline DensityMatrix apply(const QuantumChannel& s, const DensityMatrix& rho) {
    if (rho.dims() != s.dims_in() && rho.dim() != s.dim_in())
        throw DimensionError("apply: state dims do not match channel input");
    return DensityMatrix(s.apply_raw(rho.matrix()), s.dims_out());
}

/// Normalized Choi state of a CPTP map, on dims_out (x) dims_in.
class ChoiMatrix {
  public:
    explicit ChoiMatrix(DensityMatrix state, Dims dims_in, Dims dims_out)
        : state_(std::move(state)), dims_in_(std::move(dims_in)), dims_out_(std::move(dims_out)) {
        const int din = dims_product(dims_in_);
        const int dout = dims_product(dims_out_);
        if (state_.dim() != din * dout)
            throw ValidationError("ChoiMatrix: state size does not match dims");
        // trace over the output factor (index 0 in the [dout, din] split)
        Mat marginal = partial_trace(state_.matrix(), {dout, din}, {1});
        const double defect = max_abs(marginal - Mat::Identity(din, din) / static_cast<double>(din));
        if (defect > 1e-9)
            throw ValidationError("ChoiMatrix: output marginal deviates from I/d by " +
                                  std::to_string(defect));
    }

    const DensityMatrix& state() const { return state_; }
    const Dims& dims_in() const { return dims_in_; }
    const Dims& dims_out() const { return dims_out_; }

  private:
    DensityMatrix state_;
    Dims dims_in_;
    Dims dims_out_;
};

/// Choi state (1/d normalization): (S (x) 1) |phi_d><phi_d|.
inline ChoiMatrix choi(const QuantumChannel& s) {
    const int din = s.dim_in();
    const int dout = s.dim_out();
    Mat c = Mat::Zero(dout * din, dout * din);
    for (const Mat& k : s.kraus()) {
        // (K (x) 1) |phi_d> has components K_{a i} / sqrt(d) at index (a, i)
        Vec v(dout * din);
        for (int a = 0; a < dout; ++a)
            for (int i = 0; i < din; ++i) v(a * din + i) = k(a, i);
        v /= std::sqrt(static_cast<double>(din));
        c += v * v.adjoint();
    }
    Dims joint = s.dims_out();
    joint.insert(joint.end(), s.dims_in().begin(), s.dims_in().end());
    return ChoiMatrix(DensityMatrix(std::move(c), std::move(joint)), s.dims_in(), s.dims_out());
}

/// Inverse of choi(); Kraus rank equals the Choi rank at threshold supp.
inline QuantumChannel kraus_from_choi(const ChoiMatrix& c, double supp = default_tol().supp) {
    const int din = dims_product(c.dims_in());
    const int dout = dims_product(c.dims_out());
    auto eg = eigh(c.state().matrix());
    if (eg.eigenvalues.minCoeff() < -default_tol().psd)
        throw ValidationError("kraus_from_choi: Choi matrix is not PSD");
    std::vector<Mat> kraus;
    for (Eigen::Index k = 0; k < eg.eigenvalues.size(); ++k) {
        if (eg.eigenvalues(k) <= supp) continue;
        const double w = std::sqrt(eg.eigenvalues(k) * din);
        Mat op(dout, din);
        for (int a = 0; a < dout; ++a)
            for (int i = 0; i < din; ++i) op(a, i) = w * eg.eigenvectors(a * din + i, k);
        kraus.push_back(std::move(op));
    }
    return QuantumChannel(std::move(kraus), c.dims_in(), c.dims_out());
}

/// Stinespring dilation: K_{kl} = sqrt(mu_l) <e_k| U |e_l> with {mu_l, |e_l>}
/// the spectral decomposition of the environment state.
inline QuantumChannel dilation_kraus(const Mat& u, const DensityMatrix& rho_env, Dims sys_dims) {
    const int de = rho_env.dim();
    const int ds = dims_product(sys_dims);
    if (u.rows() != u.cols() || u.rows() != ds * de)
        throw DimensionError("dilation_kraus: U size does not match sys (x) env");
    if (max_abs(u * u.adjoint() - Mat::Identity(u.rows(), u.cols())) > 1e-9)
        throw ValidationError("dilation_kraus: U is not unitary");
    auto eg = eigh(rho_env.matrix());
    std::vector<Mat> kraus;
    for (int l = 0; l < de; ++l) {
        const double mu = std::max(0.0, eg.eigenvalues(l));
        if (mu <= default_tol().supp) continue;
        for (int k = 0; k < de; ++k) {
            Mat op(ds, ds);
            for (int a = 0; a < ds; ++a)
                for (int b = 0; b < ds; ++b) {
                    Complex acc = 0.0;
                    for (int e1 = 0; e1 < de; ++e1)
                        for (int e2 = 0; e2 < de; ++e2)
                            acc += std::conj(eg.eigenvectors(e1, k)) * u(a * de + e1, b * de + e2) *
                                   eg.eigenvectors(e2, l);
                    op(a, b) = std::sqrt(mu) * acc;
                }
            kraus.push_back(std::move(op));
        }
    }
    return QuantumChannel::endomorphic(std::move(kraus), std::move(sys_dims));
}

/// Dual map of a bipartite state applied to sigma:
/// [S_rho(sigma)]_{mn} = sum_{kl} <k m| rho |l n> sigma_{kl}.
inline Mat state_dual_apply(const DensityMatrix& rho, const Mat& sigma) {
    if (rho.dims().size() != 2)
        throw DimensionError("state_dual_apply: rho must be bipartite");
    const int d1 = rho.dims()[0];
    const int d2 = rho.dims()[1];
    if (sigma.rows() != d1 || sigma.cols() != d1)
        throw DimensionError("state_dual_apply: sigma does not match rho's first factor");
    Mat out = Mat::Zero(d2, d2);
    const Mat& r = rho.matrix();
    for (int m = 0; m < d2; ++m)
        for (int n = 0; n < d2; ++n) {
            Complex acc = 0.0;
            for (int k = 0; k < d1; ++k)
                for (int l = 0; l < d1; ++l) acc += r(k * d2 + m, l * d2 + n) * sigma(k, l);
            out(m, n) = acc;
        }
    return out;
}

inline QuantumChannel compose(const QuantumChannel& second, const QuantumChannel& first) {
    if (first.dim_out() != second.dim_in())
        throw DimensionError("compose: inner dimensions do not match");
    std::vector<Mat> kraus;
    kraus.reserve(first.kraus().size() * second.kraus().size());
    for (const Mat& b : second.kraus())
        for (const Mat& a : first.kraus()) kraus.push_back(b * a);
    return QuantumChannel(std::move(kraus), first.dims_in(), second.dims_out());
}

/// Cuts redundant Kraus operators (e.g. after compositions) by rebuilding
/// the minimal set from the Choi spectrum; the action is unchanged.
inline QuantumChannel compressed(const QuantumChannel& s);

inline QuantumChannel channel_tensor(const QuantumChannel& a, const QuantumChannel& b) {
    std::vector<Mat> kraus;
    kraus.reserve(a.kraus().size() * b.kraus().size());
    for (const Mat& ka : a.kraus())
        for (const Mat& kb : b.kraus()) kraus.push_back(tensor(ka, kb));
    Dims din = a.dims_in();
    din.insert(din.end(), b.dims_in().begin(), b.dims_in().end());
    Dims dout = a.dims_out();
    dout.insert(dout.end(), b.dims_out().begin(), b.dims_out().end());
    return QuantumChannel(std::move(kraus), std::move(din), std::move(dout));
}

// ---------------------------------------------------------------------------
// Einselection
// ---------------------------------------------------------------------------

/// Per-subsystem pointer bases defining the dephasing operator; an empty
/// basis entry means the identity is applied on that subsystem.
class EinselectionSpec {
  public:
    struct Entry {
        std::optional<Mat> basis;  // columns are the pointer states; nullopt = identity
    };

    EinselectionSpec(std::vector<Entry> entries, Dims dims)
        : entries_(std::move(entries)), dims_(std::move(dims)) {
        if (entries_.size() != dims_.size())
            throw ValidationError("EinselectionSpec: one entry per subsystem required");
        for (std::size_t s = 0; s < entries_.size(); ++s) {
            if (!entries_[s].basis) continue;
            const Mat& b = *entries_[s].basis;
            if (b.rows() != dims_[s] || b.cols() != dims_[s])
                throw ValidationError("EinselectionSpec: basis is not complete for its subsystem");
            if (max_abs(b.adjoint() * b - Mat::Identity(dims_[s], dims_[s])) > 1e-10)
                throw ValidationError("EinselectionSpec: basis is not orthonormal");
        }
    }

    /// Computational pointer basis on every subsystem.
    static EinselectionSpec computational(const Dims& dims) {
        std::vector<Entry> entries;
        for (int d : dims) entries.push_back({Mat::Identity(d, d)});
        return EinselectionSpec(std::move(entries), dims);
    }

    /// Identity on subsystems not listed in `measured`.
    static EinselectionSpec one_sided(const Dims& dims, const std::set<int>& measured,
                                      std::optional<Mat> basis = std::nullopt) {
        std::vector<Entry> entries(dims.size());
        for (int s : measured) {
            entries[s].basis = basis ? *basis : Mat::Identity(dims[s], dims[s]);
        }
        return EinselectionSpec(std::move(entries), dims);
    }

    const Dims& dims() const { return dims_; }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Kraus list: all tensor products of per-subsystem pointer projectors.
    QuantumChannel channel() const {
        Dims counts;
        for (std::size_t s = 0; s < entries_.size(); ++s)
            counts.push_back(entries_[s].basis ? dims_[s] : 1);
        const int total = dims_product(counts);
        std::vector<Mat> kraus;
        kraus.reserve(total);
        for (int idx = 0; idx < total; ++idx) {
            auto digits = unravel_index(idx, counts);
            Mat op = Mat::Identity(1, 1);
            for (std::size_t s = 0; s < entries_.size(); ++s) {
                if (entries_[s].basis) {
                    Vec col = entries_[s].basis->col(digits[s]);
                    op = tensor(op, Mat(col * col.adjoint()));
                } else {
                    op = tensor(op, Mat(Mat::Identity(dims_[s], dims_[s])));
                }
            }
            kraus.push_back(std::move(op));
        }
        return QuantumChannel::endomorphic(std::move(kraus), dims_);
    }

    Mat apply_raw(const Mat& rho) const { return channel().apply_raw(rho); }

  private:
    std::vector<Entry> entries_;
    Dims dims_;
};

// ---------------------------------------------------------------------------
// Gates
// ---------------------------------------------------------------------------

inline Mat pauli_x() { return (Mat(2, 2) << 0, 1, 1, 0).finished(); }
inline Mat pauli_y() {
    return (Mat(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
}
inline Mat pauli_z() { return (Mat(2, 2) << 1, 0, 0, -1).finished(); }
inline Mat hadamard() {
    return (Mat(2, 2) << 1, 1, 1, -1).finished() / std::sqrt(2.0);
}

/// exp(-i theta sigma_x / 2)
inline Mat rot_x(double theta) {
    const double c = std::cos(theta / 2), s = std::sin(theta / 2);
    return (Mat(2, 2) << c, Complex(0, -s), Complex(0, -s), c).finished();
}

/// exp(-i theta sigma_z / 2)
inline Mat rot_z(double theta) {
    Mat m = Mat::Zero(2, 2);
    m(0, 0) = std::exp(Complex(0, -theta / 2));
    m(1, 1) = std::exp(Complex(0, theta / 2));
    return m;
}

inline Mat cnot() {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
}

/// CNOT controlled in the |+/-> basis of the first qubit.
inline Mat cnot_pm() {
    Mat h1 = tensor(hadamard(), Mat(Mat::Identity(2, 2)));
    return h1 * cnot() * h1;
}

inline Mat swap_gate() {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 2) = m(2, 1) = m(3, 3) = 1;
    return m;
}

inline QuantumChannel unitary_channel(const Mat& u, Dims dims) {
    if (max_abs(u * u.adjoint() - Mat::Identity(u.rows(), u.cols())) > 1e-9)
        throw ValidationError("unitary_channel: matrix is not unitary");
    return QuantumChannel::endomorphic({u}, std::move(dims));
}

// ---------------------------------------------------------------------------
// Named channels
// ---------------------------------------------------------------------------

inline QuantumChannel identity_channel(Dims dims) {
    const int d = dims_product(dims);
    return QuantumChannel::endomorphic({Mat::Identity(d, d)}, std::move(dims));
}

/// E0 = |0><0| + sqrt(1-gamma)|1><1|, E1 = sqrt(gamma)|0><1|
inline QuantumChannel amplitude_damping(double gamma) {
    if (gamma < 0 || gamma > 1) throw ValidationError("amplitude_damping: gamma out of [0,1]");
    Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2);
    e0(0, 0) = 1;
    e0(1, 1) = std::sqrt(1 - gamma);
    e1(0, 1) = std::sqrt(gamma);
    return QuantumChannel::endomorphic({e0, e1}, {2});
}

/// E0 = |0><0| + sqrt(1-lambda)|1><1|, E1 = sqrt(lambda)|1><1|
inline QuantumChannel phase_damping(double lambda) {
    if (lambda < 0 || lambda > 1) throw ValidationError("phase_damping: lambda out of [0,1]");
    Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2);
    e0(0, 0) = 1;
    e0(1, 1) = std::sqrt(1 - lambda);
    e1(1, 1) = std::sqrt(lambda);
    return QuantumChannel::endomorphic({e0, e1}, {2});
}

/// rho -> mu rho + (1-mu) I/d via the Heisenberg-Weyl Kraus set.
inline QuantumChannel depolarizing(double mu, Dims dims) {
    if (mu < 0 || mu > 1) throw ValidationError("depolarizing: mu out of [0,1]");
    const int d = dims_product(dims);
    const Complex omega = std::exp(Complex(0, 2.0 * std::numbers::pi / d));
    std::vector<Mat> kraus;
    for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k) {
            Mat u = Mat::Zero(d, d);
            for (int m = 0; m < d; ++m) u((m + j) % d, m) = std::pow(omega, k * m);
            const double w = (j == 0 && k == 0) ? mu + (1 - mu) / (d * d) : (1 - mu) / (d * d);
            if (w <= 0) continue;
            kraus.push_back(std::sqrt(w) * u);
        }
    return QuantumChannel::endomorphic(std::move(kraus), std::move(dims));
}

/// Reference-frame-limited mode rotation: R_x(omega t) with the phase of g
/// folded into the rotation stage, followed by the (1-|g|,|g|)-weighted
/// number-basis dephasing mixture.
inline QuantumChannel bec_channel(Complex g, double omega_t) {
    const double mag = std::abs(g);
    if (mag > 1 + 1e-12) throw ValidationError("bec_channel: |g| must be <= 1");
    const double arg = (mag > 0) ? std::arg(g) : 0.0;
    const Mat v = rot_z(arg + std::numbers::pi / 2) * rot_x(omega_t);
    Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
    p0(0, 0) = 1;
    p1(1, 1) = 1;
    std::vector<Mat> kraus;
    if (mag > default_tol().supp) kraus.push_back(std::sqrt(std::min(mag, 1.0)) * v);
    if (1 - mag > default_tol().supp) {
        kraus.push_back(std::sqrt(1 - std::min(mag, 1.0)) * (p0 * v));
        kraus.push_back(std::sqrt(1 - std::min(mag, 1.0)) * (p1 * v));
    }
    return QuantumChannel::endomorphic(std::move(kraus), {2});
}

/// The same evolution conjugated back by R_x, leaving only the damping part.
inline QuantumChannel bec_effective_channel(Complex g, double omega_t) {
    const Mat rx_dag = rot_x(omega_t).adjoint();
    return compose(unitary_channel(rx_dag, {2}), bec_channel(g, omega_t));
}

inline QuantumChannel compressed(const QuantumChannel& s) {
    if (static_cast<int>(s.kraus().size()) <= s.dim_in() * s.dim_out()) return s;
    return kraus_from_choi(choi(s));
}

}  // namespace qres

#endif  // QRES_CHANNELS_HPP
