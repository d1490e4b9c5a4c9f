#ifndef QRES_TESTS_SUPPORT_HPP
#define QRES_TESTS_SUPPORT_HPP

#include <random>

#include <qres/channels.hpp>
#include <qres/states.hpp>

namespace qres::testing {

inline Mat random_complex(int rows, int cols, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0, 1);
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    return m;
}

inline Mat random_hermitian(int d, std::mt19937_64& rng) {
    Mat g = random_complex(d, d, rng);
    return (g + g.adjoint()) * 0.5;
}

/// Full-rank random density matrix (Hilbert-Schmidt-ish).
inline DensityMatrix random_density(int d, std::mt19937_64& rng, Dims dims = {}, int rank = 0) {
    if (rank <= 0) rank = d;
    Mat g = random_complex(d, rank, rng);
    Mat rho = g * g.adjoint();
    rho /= rho.trace().real();
    if (dims.empty()) dims = {d};
    return DensityMatrix(std::move(rho), std::move(dims));
}

inline PureState random_pure_state(int d, std::mt19937_64& rng, Dims dims = {}) {
    Vec v = random_complex(d, 1, rng).col(0);
    v /= v.norm();
    if (dims.empty()) dims = {d};
    return PureState(std::move(v), std::move(dims));
}

/// Random CPTP map from a Haar-ish isometry split into Kraus blocks.
inline QuantumChannel random_channel(int d, int n_kraus, std::mt19937_64& rng, Dims dims = {}) {
    Mat stacked = random_complex(n_kraus * d, d, rng);
    Eigen::HouseholderQR<Mat> qr(stacked);
    Mat q = Mat(qr.householderQ()) .leftCols(d);
    std::vector<Mat> kraus;
    for (int k = 0; k < n_kraus; ++k) kraus.push_back(q.middleRows(k * d, d));
    if (dims.empty()) dims = {d};
    return QuantumChannel::endomorphic(std::move(kraus), std::move(dims));
}

inline Mat random_unitary(int d, std::mt19937_64& rng) {
    Mat g = random_complex(d, d, rng);
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    // fix phases so the distribution is Haar
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < d; ++k) {
        Complex diag = r(k, k);
        q.col(k) *= (std::abs(diag) > 0) ? diag / std::abs(diag) : Complex(1.0);
    }
    return q;
}

}  // namespace qres::testing

#endif  // QRES_TESTS_SUPPORT_HPP
