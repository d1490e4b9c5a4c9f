#ifndef QRES_LINALG_HPP
#define QRES_LINALG_HPP

#include <algorithm>
#include <set>

#include "qres/core.hpp"

namespace qres {

/// Kronecker product with subsystem order (a, b).
inline Mat tensor(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Mat tensor(const std::vector<Mat>& factors) {
    if (factors.empty()) throw DimensionError("tensor: no factors");
    Mat out = factors.front();
    for (std::size_t k = 1; k < factors.size(); ++k) out = tensor(out, factors[k]);
    return out;
}

inline Vec tensor(const Vec& a, const Vec& b) {
    Vec out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i)
        out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

/// Reduce a dims-structured operator to the subsystems in `keep`
/// (ascending subsystem order is preserved).
inline Mat partial_trace(const Mat& m, const Dims& dims, const std::set<int>& keep) {
    const int d = dims_product(dims);
    if (m.rows() != d || m.cols() != d)
        throw DimensionError("partial_trace: matrix size does not match dims");
    if (keep.empty()) throw DimensionError("partial_trace: keep set is empty");
    for (int s : keep)
        if (s < 0 || s >= static_cast<int>(dims.size()))
            throw DimensionError("partial_trace: invalid subsystem index " + std::to_string(s));

    Dims keep_dims, rest_dims;
    std::vector<int> keep_idx, rest_idx;
    for (int s = 0; s < static_cast<int>(dims.size()); ++s) {
        if (keep.count(s)) {
            keep_dims.push_back(dims[s]);
            keep_idx.push_back(s);
        } else {
            rest_dims.push_back(dims[s]);
            rest_idx.push_back(s);
        }
    }
    const int dk = dims_product(keep_dims);
    const int dr = rest_dims.empty() ? 1 : dims_product(rest_dims);

    std::vector<int> digits(dims.size(), 0);
    auto joint = [&](const std::vector<int>& kd, const std::vector<int>& rd) {
        for (std::size_t s = 0; s < keep_idx.size(); ++s) digits[keep_idx[s]] = kd[s];
        for (std::size_t s = 0; s < rest_idx.size(); ++s) digits[rest_idx[s]] = rd[s];
        return ravel_index(digits, dims);
    };

    Mat out = Mat::Zero(dk, dk);
    for (int i = 0; i < dk; ++i) {
        auto ki = unravel_index(i, keep_dims);
        for (int j = 0; j < dk; ++j) {
            auto kj = unravel_index(j, keep_dims);
            Complex acc = 0.0;
            for (int r = 0; r < dr; ++r) {
                auto rr = rest_dims.empty() ? std::vector<int>{} : unravel_index(r, rest_dims);
                acc += m(joint(ki, rr), joint(kj, rr));
            }
            out(i, j) = acc;
        }
    }
    return out;
}

struct EighResult {
    RVec eigenvalues;  // descending
    Mat eigenvectors;  // orthonormal columns, matching order
};

/// Hermitian eigendecomposition with eigenvalues sorted descending.
inline EighResult eigh(const Mat& h, double herm_tol = default_tol().herm) {
    if (!is_hermitian(h, herm_tol)) throw ValidationError("eigh: input is not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> solver((h + h.adjoint()) * 0.5);
    if (solver.info() != Eigen::Success) throw std::runtime_error("eigh: solver failed");
    const Eigen::Index n = h.rows();
    EighResult res;
    res.eigenvalues = RVec(n);
    res.eigenvectors = Mat(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        res.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
        res.eigenvectors.col(k) = solver.eigenvectors().col(n - 1 - k);
    }
    return res;
}

/// Applies f to the spectrum of a Hermitian matrix, restricted to
/// eigenvalues strictly above `supp`; the rest are left out of the support.
template <typename F>
inline Mat spectral_apply(const Mat& h, F&& f, double supp) {
    auto eg = eigh(h);
    Mat out = Mat::Zero(h.rows(), h.cols());
    for (Eigen::Index k = 0; k < eg.eigenvalues.size(); ++k) {
        if (eg.eigenvalues(k) > supp)
            out += f(eg.eigenvalues(k)) * (eg.eigenvectors.col(k) * eg.eigenvectors.col(k).adjoint());
    }
    return out;
}

/// Base-2 matrix logarithm on the support (0 log 0 = 0 convention).
inline Mat matrix_log2(const Mat& rho, double supp = default_tol().supp) {
    return spectral_apply(rho, [](double x) { return std::log2(x); }, supp);
}

inline Mat matrix_exp2(const Mat& h) {
    return spectral_apply(h, [](double x) { return std::exp2(x); }, -kInf);
}

/// PSD square root; eigenvalues inside [-psd_tol, 0] are clipped to zero.
inline Mat matrix_sqrt_psd(const Mat& rho, double psd_tol = default_tol().psd) {
    auto eg = eigh(rho);
    if (eg.eigenvalues.minCoeff() < -psd_tol)
        throw ValidationError("matrix_sqrt_psd: input is not positive semidefinite");
    Mat out = Mat::Zero(rho.rows(), rho.cols());
    for (Eigen::Index k = 0; k < eg.eigenvalues.size(); ++k) {
        const double lam = std::max(0.0, eg.eigenvalues(k));
        out += std::sqrt(lam) * (eg.eigenvectors.col(k) * eg.eigenvectors.col(k).adjoint());
    }
    return out;
}

/// Projector onto the eigenspaces with eigenvalue <= supp.
inline Mat kernel_projector(const Mat& h, double supp = default_tol().supp) {
    auto eg = eigh(h);
    Mat out = Mat::Zero(h.rows(), h.cols());
    for (Eigen::Index k = 0; k < eg.eigenvalues.size(); ++k)
        if (eg.eigenvalues(k) <= supp)
            out += eg.eigenvectors.col(k) * eg.eigenvectors.col(k).adjoint();
    return out;
}

}  // namespace qres

#endif  // QRES_LINALG_HPP
