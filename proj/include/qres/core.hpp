#ifndef QRES_CORE_HPP
#define QRES_CORE_HPP

#include <complex>
#include <cstdint>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qres {

using Complex = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Validation failure of a state, channel or spec invariant.
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

/// Dimension/argument mismatch between operands.
struct DimensionError : std::invalid_argument {
    explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

/// A case the toolkit deliberately does not cover (e.g. convex roofs).
struct UnsupportedError : std::runtime_error {
    explicit UnsupportedError(const std::string& what) : std::runtime_error(what) {}
};

/// Numerical tolerances shared by the validation and support logic.
struct Tolerances {
    double herm = 1e-9;   // Hermiticity, max-entry norm
    double trace = 1e-9;  // |Tr - 1|
    double psd = 1e-9;    // most negative admissible eigenvalue
    double norm = 1e-9;   // vector norm deviation
    double supp = 1e-10;  // spectral support threshold
};

inline Tolerances& default_tol() {
    static Tolerances tol;
    return tol;
}

using Dims = std::vector<int>;

inline int dims_product(const Dims& dims) {
    int d = 1;
    for (int x : dims) {
        if (x < 1) throw DimensionError("subsystem dimension must be >= 1");
        d *= x;
    }
    return d;
}

/// Row-major mixed-radix decomposition of a joint basis index.
inline std::vector<int> unravel_index(int idx, const Dims& dims) {
    std::vector<int> digits(dims.size());
    for (int s = static_cast<int>(dims.size()) - 1; s >= 0; --s) {
        digits[s] = idx % dims[s];
        idx /= dims[s];
    }
    return digits;
}

inline int ravel_index(const std::vector<int>& digits, const Dims& dims) {
    int idx = 0;
    for (std::size_t s = 0; s < dims.size(); ++s) idx = idx * dims[s] + digits[s];
    return idx;
}

inline double max_abs(const Mat& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Mat& m, double tol) {
    return m.rows() == m.cols() && max_abs(m - m.adjoint()) <= tol;
}

/// SplitMix64 step; used to derive independent per-restart seeds.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace qres

#endif  // QRES_CORE_HPP
