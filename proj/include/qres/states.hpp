#ifndef QRES_STATES_HPP
#define QRES_STATES_HPP

#include <random>
#include <set>

#include "qres/linalg.hpp"

namespace qres {

/// Positive unit-trace Hermitian operator over labeled subsystems.
class DensityMatrix {
  public:
    DensityMatrix(Mat matrix, Dims dims, const Tolerances& tol = default_tol())
        : matrix_(std::move(matrix)), dims_(std::move(dims)) {
        validate(tol);
    }

    const Mat& matrix() const { return matrix_; }
    const Dims& dims() const { return dims_; }
    int dim() const { return static_cast<int>(matrix_.rows()); }

    DensityMatrix reduced(const std::set<int>& keep) const {
        Dims kd;
        for (int s = 0; s < static_cast<int>(dims_.size()); ++s)
            if (keep.count(s)) kd.push_back(dims_[s]);
        return DensityMatrix(partial_trace(matrix_, dims_, keep), kd);
    }

    /// Spectrum, descending, with [-psd_tol, 0] round-off clipped to zero.
    RVec spectrum(const Tolerances& tol = default_tol()) const {
        auto eg = eigh(matrix_, tol.herm);
        RVec lam = eg.eigenvalues;
        for (Eigen::Index k = 0; k < lam.size(); ++k) lam(k) = std::max(0.0, lam(k));
        return lam;
    }

  private:
    void validate(const Tolerances& tol) {
        if (matrix_.rows() != matrix_.cols())
            throw ValidationError("DensityMatrix: matrix is not square");
        if (dims_product(dims_) != matrix_.rows())
            throw ValidationError("DensityMatrix: dims product does not match matrix size");
        if (!matrix_.allFinite()) throw ValidationError("DensityMatrix: non-finite entries");
        if (!is_hermitian(matrix_, tol.herm))
            throw ValidationError("DensityMatrix: not Hermitian within tolerance");
        const double tr_dev = std::abs(matrix_.trace() - Complex(1.0));
        if (tr_dev > tol.trace)
            throw ValidationError("DensityMatrix: trace deviates from 1 by " + std::to_string(tr_dev));
        Eigen::SelfAdjointEigenSolver<Mat> s((matrix_ + matrix_.adjoint()) * 0.5);
        const double min_eig = s.eigenvalues().minCoeff();
        if (min_eig < -tol.psd)
            throw ValidationError("DensityMatrix: negative eigenvalue " + std::to_string(min_eig));
    }

    Mat matrix_;
    Dims dims_;
};

/// Unit-norm state vector over labeled subsystems.
class PureState {
  public:
    PureState(Vec amplitudes, Dims dims, const Tolerances& tol = default_tol())
        : amplitudes_(std::move(amplitudes)), dims_(std::move(dims)) {
        if (dims_product(dims_) != amplitudes_.size())
            throw ValidationError("PureState: dims product does not match vector size");
        if (!amplitudes_.allFinite()) throw ValidationError("PureState: non-finite amplitudes");
        const double dev = std::abs(amplitudes_.norm() - 1.0);
        if (dev > tol.norm)
            throw ValidationError("PureState: norm deviates from 1 by " + std::to_string(dev));
    }

    const Vec& amplitudes() const { return amplitudes_; }
    const Dims& dims() const { return dims_; }
    int dim() const { return static_cast<int>(amplitudes_.size()); }

    DensityMatrix density() const {
        return DensityMatrix(amplitudes_ * amplitudes_.adjoint(), dims_);
    }

  private:
    Vec amplitudes_;
    Dims dims_;
};

inline Mat matrix_log2(const DensityMatrix& rho, double supp = default_tol().supp) {
    return matrix_log2(rho.matrix(), supp);
}

struct SchmidtResult {
    RVec coefficients;  // descending, squares sum to 1
    Mat left_basis;     // columns
    Mat right_basis;    // columns
};

/// Schmidt decomposition of a bipartite pure state.
inline SchmidtResult schmidt(const PureState& psi) {
    if (psi.dims().size() != 2)
        throw DimensionError("schmidt: state must have exactly two subsystems");
    const int da = psi.dims()[0];
    const int db = psi.dims()[1];
    Mat a(da, db);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < db; ++j) a(i, j) = psi.amplitudes()(i * db + j);
    Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    SchmidtResult res;
    res.coefficients = svd.singularValues();
    res.left_basis = svd.matrixU();
    res.right_basis = svd.matrixV().conjugate();
    return res;
}

/// Unit vector from the rotation-invariant distribution; deterministic per seed.
inline PureState random_pure(int d, std::uint64_t seed, Dims dims = {}) {
    if (d < 1) throw DimensionError("random_pure: dimension must be >= 1");
    std::mt19937_64 rng(mix_seed(seed, 0));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec v(d);
    for (int k = 0; k < d; ++k) v(k) = Complex(gauss(rng), gauss(rng));
    v /= v.norm();
    if (dims.empty()) dims = {d};
    return PureState(std::move(v), std::move(dims));
}

inline Vec basis_vector(int d, int k) {
    Vec v = Vec::Zero(d);
    v(k) = 1.0;
    return v;
}

/// |phi_d> = sum_k |kk> / sqrt(d).
inline PureState max_entangled(int d) {
    Vec v = Vec::Zero(d * d);
    for (int k = 0; k < d; ++k) v(k * d + k) = 1.0 / std::sqrt(static_cast<double>(d));
    return PureState(std::move(v), {d, d});
}

inline PureState bell_phi_plus() { return max_entangled(2); }

inline PureState bell_psi_plus() {
    Vec v = Vec::Zero(4);
    v(1) = v(2) = 1.0 / std::sqrt(2.0);
    return PureState(std::move(v), {2, 2});
}

}  // namespace qres

#endif  // QRES_STATES_HPP
