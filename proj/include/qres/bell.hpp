#ifndef QRES_BELL_HPP
#define QRES_BELL_HPP

#include "qres/fock.hpp"
#include "qres/optimize.hpp"

namespace qres {

enum class BellKind { CHSH, Svetlichny, BBGL, MABK, ZB };

inline std::string bell_kind_name(BellKind kind) {
    switch (kind) {
        case BellKind::CHSH: return "CHSH";
        case BellKind::Svetlichny: return "Svetlichny";
        case BellKind::BBGL: return "BBGL";
        case BellKind::MABK: return "MABK";
        case BellKind::ZB: return "ZB";
    }
    return "?";
}

/// Multilinear form in per-party dichotomic settings. Product functionals
/// carry an explicit term list; ZB is the sign-summed absolute-value form
/// and is evaluated from the full correlator table. All functionals are
/// scaled so that the enumerated classical bound is 2^(N-1).
class BellFunctional {
  public:
    struct Term {
        double coeff;
        std::vector<int> choices;  // 0 = A, 1 = B, one per party
    };

    static BellFunctional make(BellKind kind, int parties);

    BellKind kind() const { return kind_; }
    int parties() const { return parties_; }
    const std::vector<Term>& terms() const { return terms_; }
    double classical_bound() const { return classical_bound_; }
    double raw_classical_bound() const { return raw_bound_; }
    double scale() const { return scale_; }

    /// Value on a correlator table indexed by the full-choice bitmask
    /// (bit k set means party k uses its B setting).
    double value_from_correlators(const std::vector<double>& corr) const {
        if (static_cast<int>(corr.size()) != (1 << parties_))
            throw DimensionError("BellFunctional: correlator table size mismatch");
        if (kind_ == BellKind::ZB) {
            double acc = 0.0;
            for (int smask = 0; smask < (1 << parties_); ++smask) {
                double inner = 0.0;
                for (int kmask = 0; kmask < (1 << parties_); ++kmask) {
                    // sign = prod_j s_j^(k_j - 1) with s_j = -1 when bit set
                    const int parity = __builtin_popcount(smask & kmask);
                    inner += ((parity % 2) ? -1.0 : 1.0) * corr[kmask];
                }
                acc += std::abs(inner);
            }
            return scale_ * acc;
        }
        double acc = 0.0;
        for (const Term& t : terms_) {
            int mask = 0;
            for (int k = 0; k < parties_; ++k)
                if (t.choices[k]) mask |= 1 << k;
            acc += t.coeff * corr[mask];
        }
        return scale_ * acc;
    }

    /// Which full-choice masks the functional actually reads.
    std::vector<int> needed_masks() const {
        std::vector<int> masks;
        if (kind_ == BellKind::ZB) {
            for (int m = 0; m < (1 << parties_); ++m) masks.push_back(m);
            return masks;
        }
        std::vector<bool> seen(1 << parties_, false);
        for (const Term& t : terms_) {
            int mask = 0;
            for (int k = 0; k < parties_; ++k)
                if (t.choices[k]) mask |= 1 << k;
            if (!seen[mask]) {
                seen[mask] = true;
                masks.push_back(mask);
            }
        }
        return masks;
    }

  private:
    BellFunctional(BellKind kind, int parties, std::vector<Term> terms)
        : kind_(kind), parties_(parties), terms_(std::move(terms)) {
        raw_bound_ = enumerate_bound(1.0);
        if (kind_ == BellKind::MABK || kind_ == BellKind::ZB) {
            scale_ = std::pow(2.0, parties_ - 1) / raw_bound_;
        }
        classical_bound_ = enumerate_bound(scale_);
    }

    /// Exact maximum over deterministic +-1 strategies (the classical bound).
    double enumerate_bound(double scale) const {
        if (parties_ > 6) throw UnsupportedError("classical bound enumeration limited to N <= 6");
        double best = 0.0;
        const int strategies = 1 << (2 * parties_);  // (a_k, b_k) in {+-1}^2 per party
        for (int z = 0; z < strategies; ++z) {
            std::vector<double> corr(1 << parties_, 1.0);
            for (int mask = 0; mask < (1 << parties_); ++mask) {
                double prod = 1.0;
                for (int k = 0; k < parties_; ++k) {
                    const int bit = (mask >> k) & 1;               // setting choice
                    const int sign = (z >> (2 * k + bit)) & 1;     // strategy value
                    prod *= sign ? -1.0 : 1.0;
                }
                corr[mask] = prod;
            }
            // bypass scale_ so the raw and scaled bounds share one code path
            double acc = 0.0;
            if (kind_ == BellKind::ZB) {
                for (int smask = 0; smask < (1 << parties_); ++smask) {
                    double inner = 0.0;
                    for (int kmask = 0; kmask < (1 << parties_); ++kmask) {
                        const int parity = __builtin_popcount(smask & kmask);
                        inner += ((parity % 2) ? -1.0 : 1.0) * corr[kmask];
                    }
                    acc += std::abs(inner);
                }
            } else {
                for (const Term& t : terms_) {
                    int mask = 0;
                    for (int k = 0; k < parties_; ++k)
                        if (t.choices[k]) mask |= 1 << k;
                    acc += t.coeff * corr[mask];
                }
            }
            best = std::max(best, std::abs(scale * acc));
        }
        return best;
    }

    BellKind kind_;
    int parties_;
    std::vector<Term> terms_;
    double classical_bound_ = 0.0;
    double raw_bound_ = 0.0;
    double scale_ = 1.0;
};

namespace detail {

inline std::vector<BellFunctional::Term> chsh_terms() {
    return {{1, {0, 0}}, {1, {0, 1}}, {1, {1, 0}}, {-1, {1, 1}}};
}

/// Base bracket A B + B A + B B - A A, then S_n = A_1 S_{n-1} + B_1 S'_{n-1}
/// with the primed polynomial having all A and B settings interchanged.
inline std::vector<BellFunctional::Term> bbgl_terms(int parties) {
    std::vector<BellFunctional::Term> terms = {
        {1, {0, 1}}, {1, {1, 0}}, {1, {1, 1}}, {-1, {0, 0}}};
    for (int n = 3; n <= parties; ++n) {
        std::vector<BellFunctional::Term> next;
        for (const auto& t : terms) {
            auto head_a = t.choices;
            head_a.insert(head_a.begin(), 0);
            next.push_back({t.coeff, std::move(head_a)});
            auto head_b = t.choices;
            for (int& c : head_b) c ^= 1;
            head_b.insert(head_b.begin(), 1);
            next.push_back({t.coeff, std::move(head_b)});
        }
        terms = std::move(next);
    }
    return terms;
}

/// Expansion of the sign-weighted MABK sum into correlator coefficients.
inline std::vector<BellFunctional::Term> mabk_terms(int parties) {
    std::vector<BellFunctional::Term> terms;
    for (int kmask = 0; kmask < (1 << parties); ++kmask) {
        double coeff = 0.0;
        for (int smask = 0; smask < (1 << parties); ++smask) {
            int sum_s = 0;
            for (int j = 0; j < parties; ++j) sum_s += ((smask >> j) & 1) ? -1 : 1;
            const double weight =
                std::sqrt(2.0) * std::cos(std::numbers::pi / 4.0 * (sum_s - parties - 1));
            const int parity = __builtin_popcount(smask & kmask);
            coeff += ((parity % 2) ? -1.0 : 1.0) * weight;
        }
        if (std::abs(coeff) < 1e-9) continue;
        std::vector<int> choices(parties);
        for (int j = 0; j < parties; ++j) choices[j] = (kmask >> j) & 1;
        terms.push_back({coeff, std::move(choices)});
    }
    return terms;
}

}  // namespace detail

inline BellFunctional BellFunctional::make(BellKind kind, int parties) {
    switch (kind) {
        case BellKind::CHSH:
            if (parties != 2) throw DimensionError("CHSH is a two-party functional");
            return BellFunctional(kind, 2, detail::chsh_terms());
        case BellKind::Svetlichny:
            if (parties != 3) throw DimensionError("Svetlichny: use BBGL for N != 3");
            return BellFunctional(BellKind::BBGL, 3, detail::bbgl_terms(3));
        case BellKind::BBGL:
            if (parties < 2) throw DimensionError("BBGL: need at least two parties");
            return BellFunctional(kind, parties, detail::bbgl_terms(parties));
        case BellKind::MABK:
            if (parties < 2) throw DimensionError("MABK: need at least two parties");
            return BellFunctional(kind, parties, detail::mabk_terms(parties));
        case BellKind::ZB:
            if (parties < 2) throw DimensionError("ZB: need at least two parties");
            return BellFunctional(kind, parties, {});
    }
    throw std::logic_error("BellFunctional::make: unknown kind");
}

/// Signed sum of correlators for per-party setting pairs (A_k, B_k).
inline double bell_value(const BellFunctional& f, const FockState& state,
                         const std::vector<PartySetting>& settings_a,
                         const std::vector<PartySetting>& settings_b) {
    const int n = state.basis().parties();
    if (f.parties() != n) throw DimensionError("bell_value: functional/party mismatch");
    if (static_cast<int>(settings_a.size()) != n || static_cast<int>(settings_b.size()) != n)
        throw DimensionError("bell_value: need one A and one B setting per party");
    CorrelatorEngine engine(state);
    std::vector<std::vector<Mat>> blocks_a, blocks_b;
    for (int k = 0; k < n; ++k) {
        blocks_a.push_back(engine.observable_blocks(settings_a[k]));
        blocks_b.push_back(engine.observable_blocks(settings_b[k]));
    }
    std::vector<double> corr(1 << n, 0.0);
    for (int mask : f.needed_masks()) {
        std::vector<const std::vector<Mat>*> per_party;
        for (int k = 0; k < n; ++k)
            per_party.push_back(((mask >> k) & 1) ? &blocks_b[k] : &blocks_a[k]);
        corr[mask] = engine.correlator_with_blocks(per_party);
    }
    return f.value_from_correlators(corr);
}

struct BellOptimum {
    double value = 0.0;  // |f| at the optimum, re-evaluated by bell_value
    std::vector<PartySetting> settings_a;
    std::vector<PartySetting> settings_b;
    int evaluations = 0;
    int restarts_used = 0;
    bool converged = false;
};

/// Multistart Nelder-Mead over the 4N angles; the returned value is a
/// certified lower bound on the true maximum of |f|.
inline BellOptimum optimize_settings(const BellFunctional& f, const FockState& state,
                                     int restarts = 50, std::uint64_t seed = 0,
                                     const std::vector<RVec>& extra_starts = {}) {
    const int n = state.basis().parties();
    CorrelatorEngine engine(state);
    auto unpack = [n](const RVec& x) {
        std::vector<PartySetting> sa(n), sb(n);
        for (int k = 0; k < n; ++k) {
            sa[k] = {x(4 * k), x(4 * k + 1)};
            sb[k] = {x(4 * k + 2), x(4 * k + 3)};
        }
        return std::make_pair(sa, sb);
    };
    auto objective = [&](const RVec& x) {
        auto [sa, sb] = unpack(x);
        std::vector<std::vector<Mat>> blocks_a, blocks_b;
        for (int k = 0; k < n; ++k) {
            blocks_a.push_back(engine.observable_blocks(sa[k]));
            blocks_b.push_back(engine.observable_blocks(sb[k]));
        }
        std::vector<double> corr(1 << n, 0.0);
        for (int mask : f.needed_masks()) {
            std::vector<const std::vector<Mat>*> per_party;
            for (int k = 0; k < n; ++k)
                per_party.push_back(((mask >> k) & 1) ? &blocks_b[k] : &blocks_a[k]);
            corr[mask] = engine.correlator_with_blocks(per_party);
        }
        return -std::abs(f.value_from_correlators(corr));
    };
    auto sample = [n](std::mt19937_64& rng) {
        std::uniform_real_distribution<double> u(0.0, 2.0 * std::numbers::pi);
        RVec x(4 * n);
        for (int i = 0; i < 4 * n; ++i) x(i) = u(rng);
        return x;
    };
    auto res = multistart_minimize(objective, sample, restarts, seed, {1e-8, 6000, 0.6},
                                   extra_starts);
    BellOptimum out;
    auto [sa, sb] = unpack(res.x);
    out.settings_a = sa;
    out.settings_b = sb;
    out.value = std::abs(bell_value(f, state, sa, sb));
    out.evaluations = res.evaluations;
    out.restarts_used = res.restarts_used;
    out.converged = res.converged;
    return out;
}

}  // namespace qres

#endif  // QRES_BELL_HPP
