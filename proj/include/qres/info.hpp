#ifndef QRES_INFO_HPP
#define QRES_INFO_HPP

#include <set>

#include "qres/states.hpp"

namespace qres {

// Entropic quantities in bits. Results are extended reals: +infinity is
// returned as std::numeric_limits<double>::infinity() when supports mismatch.

/// Probability vector; sums to 1 within 1e-9.
class Distribution {
  public:
    explicit Distribution(RVec p) : p_(std::move(p)) {
        double total = 0.0;
        for (Eigen::Index k = 0; k < p_.size(); ++k) {
            if (p_(k) < -1e-12) throw ValidationError("Distribution: negative probability");
            total += p_(k);
        }
        if (std::abs(total - 1.0) > 1e-9)
            throw ValidationError("Distribution: probabilities sum to " + std::to_string(total));
    }
    explicit Distribution(std::initializer_list<double> p)
        : Distribution(RVec(Eigen::Map<const RVec>(p.begin(), static_cast<Eigen::Index>(p.size())))) {}

    const RVec& p() const { return p_; }
    Eigen::Index size() const { return p_.size(); }

  private:
    RVec p_;
};

inline double shannon_entropy(const Distribution& dist) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < dist.size(); ++k) {
        const double p = dist.p()(k);
        if (p > 0) acc -= p * std::log2(p);
    }
    return acc;
}

inline double classical_rel_entropy(const Distribution& pd, const Distribution& qd,
                                    double supp = default_tol().supp) {
    if (pd.size() != qd.size()) throw DimensionError("classical_rel_entropy: length mismatch");
    double acc = 0.0;
    for (Eigen::Index k = 0; k < pd.size(); ++k) {
        const double p = pd.p()(k), q = qd.p()(k);
        if (p <= supp) continue;
        if (q <= supp) return kInf;
        acc += p * (std::log2(p) - std::log2(q));
    }
    return acc;
}

inline double vn_entropy(const DensityMatrix& rho) {
    RVec lam = rho.spectrum();
    double acc = 0.0;
    for (Eigen::Index k = 0; k < lam.size(); ++k)
        if (lam(k) > 0) acc -= lam(k) * std::log2(lam(k));
    return acc;
}

/// S(rho || sigma) on supports; +infinity iff supp(rho) leaks outside
/// supp(sigma) by more than tol_supp.
inline double rel_entropy(const DensityMatrix& rho, const DensityMatrix& sigma,
                          double supp = default_tol().supp) {
    if (rho.dim() != sigma.dim()) throw DimensionError("rel_entropy: dimension mismatch");
    auto eg_sigma = eigh(sigma.matrix());
    double kernel_overlap = 0.0;
    double cross = 0.0;  // Tr[rho log2 sigma] on sigma's support
    for (Eigen::Index k = 0; k < eg_sigma.eigenvalues.size(); ++k) {
        const double s = eg_sigma.eigenvalues(k);
        const Vec v = eg_sigma.eigenvectors.col(k);
        const double weight = std::real(Complex(v.adjoint() * rho.matrix() * v));
        if (s <= supp)
            kernel_overlap += weight;
        else
            cross += weight * std::log2(s);
    }
    if (kernel_overlap > supp) return kInf;
    return -vn_entropy(rho) - cross;
}

inline std::set<int> complement_set(const std::set<int>& part, std::size_t n_subsystems) {
    std::set<int> rest;
    for (int s = 0; s < static_cast<int>(n_subsystems); ++s)
        if (!part.count(s)) rest.insert(s);
    return rest;
}

/// S(A|B) = S(AB) - S(B), with B the given subsystem set.
inline double conditional_entropy(const DensityMatrix& rho, const std::set<int>& part_b) {
    if (part_b.empty() || complement_set(part_b, rho.dims().size()).empty())
        throw DimensionError("conditional_entropy: bipartition is degenerate");
    return vn_entropy(rho) - vn_entropy(rho.reduced(part_b));
}

/// I(A:B) = S(A) + S(B) - S(AB).
inline double mutual_information(const DensityMatrix& rho, const std::set<int>& part_b) {
    auto part_a = complement_set(part_b, rho.dims().size());
    if (part_a.empty() || part_b.empty())
        throw DimensionError("mutual_information: bipartition is degenerate");
    return vn_entropy(rho.reduced(part_a)) + vn_entropy(rho.reduced(part_b)) - vn_entropy(rho);
}

/// Superdense coding capacity log2(d_sender) - S(sender | rest).
inline double coding_capacity(const DensityMatrix& rho, const std::set<int>& sender) {
    auto rest = complement_set(sender, rho.dims().size());
    if (sender.empty() || rest.empty())
        throw DimensionError("coding_capacity: bipartition is degenerate");
    int d_sender = 1;
    for (int s : sender) d_sender *= rho.dims()[s];
    return std::log2(static_cast<double>(d_sender)) - conditional_entropy(rho, rest);
}

}  // namespace qres

#endif  // QRES_INFO_HPP
