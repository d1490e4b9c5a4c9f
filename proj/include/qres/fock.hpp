#ifndef QRES_FOCK_HPP
#define QRES_FOCK_HPP

#include <map>
#include <memory>
#include <numbers>

#include "qres/states.hpp"

namespace qres {

/// Occupation-number basis of a fixed total-particle-number sector across
/// N parties with m modes each. Per-mode occupation is capped by the total,
/// which is exact since particle number is conserved throughout.
class FockBasis {
  public:
    FockBasis(int parties, int modes_per_party, int total)
        : parties_(parties), modes_per_party_(modes_per_party), total_(total) {
        if (parties < 1 || modes_per_party < 1 || total < 0)
            throw DimensionError("FockBasis: invalid shape");
        std::vector<int> current(parties * modes_per_party, 0);
        enumerate(current, 0, total);
        for (int i = 0; i < size(); ++i) index_[tuples_[i]] = i;
    }

    int parties() const { return parties_; }
    int modes_per_party() const { return modes_per_party_; }
    int total() const { return total_; }
    int size() const { return static_cast<int>(tuples_.size()); }
    const std::vector<int>& tuple(int i) const { return tuples_[i]; }

    int index_of(const std::vector<int>& t) const {
        auto it = index_.find(t);
        if (it == index_.end()) throw DimensionError("FockBasis: tuple outside the sector");
        return it->second;
    }

    int party_total(int i, int party) const {
        int s = 0;
        for (int m = 0; m < modes_per_party_; ++m)
            s += tuples_[i][party * modes_per_party_ + m];
        return s;
    }

    std::vector<int> party_pattern(int i) const {
        std::vector<int> pattern(parties_);
        for (int p = 0; p < parties_; ++p) pattern[p] = party_total(i, p);
        return pattern;
    }

    bool operator==(const FockBasis& other) const {
        return parties_ == other.parties_ && modes_per_party_ == other.modes_per_party_ &&
               total_ == other.total_;
    }

  private:
    void enumerate(std::vector<int>& current, std::size_t mode, int remaining) {
        if (mode + 1 == current.size()) {
            current[mode] = remaining;
            tuples_.push_back(current);
            return;
        }
        for (int n = 0; n <= remaining; ++n) {
            current[mode] = n;
            enumerate(current, mode + 1, remaining - n);
        }
        current[mode] = 0;
    }

    int parties_;
    int modes_per_party_;
    int total_;
    std::vector<std::vector<int>> tuples_;
    std::map<std::vector<int>, int> index_;
};

/// Amplitude table over a FockBasis; SSR grading is intrinsic to the sector.
class FockState {
  public:
    FockState(FockBasis basis, Vec amplitudes)
        : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
        if (amplitudes_.size() != basis_.size())
            throw ValidationError("FockState: amplitude count mismatch");
        if (std::abs(amplitudes_.norm() - 1.0) > 1e-10)
            throw ValidationError("FockState: state is not normalized");
    }

    const FockBasis& basis() const { return basis_; }
    const Vec& amplitudes() const { return amplitudes_; }

  private:
    FockBasis basis_;
    Vec amplitudes_;
};

/// (1/sqrt(N)) sum_k a_k^dag |0>: one shared particle over N single-mode parties.
inline FockState w_state(int parties) {
    if (parties < 2) throw DimensionError("w_state: need at least two parties");
    FockBasis basis(parties, 1, 1);
    Vec amp = Vec::Zero(basis.size());
    for (int k = 0; k < parties; ++k) {
        std::vector<int> t(parties, 0);
        t[k] = 1;
        amp(basis.index_of(t)) = 1.0 / std::sqrt(static_cast<double>(parties));
    }
    return FockState(std::move(basis), std::move(amp));
}

/// Equal-weight superposition of all C(N,M) singly-occupied patterns.
inline FockState dicke_state(int parties, int excitations) {
    if (excitations <= 0 || excitations > parties)
        throw DimensionError("dicke_state: excitations must be in [1, parties]");
    FockBasis basis(parties, 1, excitations);
    Vec amp = Vec::Zero(basis.size());
    int count = 0;
    for (int i = 0; i < basis.size(); ++i) {
        bool single = true;
        for (int v : basis.tuple(i)) single = single && v <= 1;
        if (single) ++count;
    }
    for (int i = 0; i < basis.size(); ++i) {
        bool single = true;
        for (int v : basis.tuple(i)) single = single && v <= 1;
        if (single) amp(i) = 1.0 / std::sqrt(static_cast<double>(count));
    }
    return FockState(std::move(basis), std::move(amp));
}

/// (|10,...,10> + |01,...,01>)/sqrt(2) with one particle per party.
inline FockState ghz_dual_rail(int parties) {
    if (parties < 2) throw DimensionError("ghz_dual_rail: need at least two parties");
    FockBasis basis(parties, 2, parties);
    Vec amp = Vec::Zero(basis.size());
    std::vector<int> first(2 * parties, 0), second(2 * parties, 0);
    for (int k = 0; k < parties; ++k) {
        first[2 * k] = 1;
        second[2 * k + 1] = 1;
    }
    amp(basis.index_of(first)) = 1.0 / std::sqrt(2.0);
    amp(basis.index_of(second)) = 1.0 / std::sqrt(2.0);
    return FockState(std::move(basis), std::move(amp));
}

/// Tensor of two copies, re-indexed so party k holds the mode pair
/// (copy-1 mode k, copy-2 mode k); the particle number doubles.
inline FockState two_copies(const FockState& psi) {
    const FockBasis& b = psi.basis();
    if (b.modes_per_party() != 1)
        throw DimensionError("two_copies: input must have one mode per party");
    FockBasis joint(b.parties(), 2, 2 * b.total());
    Vec amp = Vec::Zero(joint.size());
    for (int i = 0; i < b.size(); ++i) {
        if (std::abs(psi.amplitudes()(i)) == 0.0) continue;
        for (int j = 0; j < b.size(); ++j) {
            if (std::abs(psi.amplitudes()(j)) == 0.0) continue;
            std::vector<int> t(2 * b.parties());
            for (int k = 0; k < b.parties(); ++k) {
                t[2 * k] = b.tuple(i)[k];
                t[2 * k + 1] = b.tuple(j)[k];
            }
            amp(joint.index_of(t)) = psi.amplitudes()(i) * psi.amplitudes()(j);
        }
    }
    return FockState(std::move(joint), std::move(amp));
}

/// Beamsplitter mixing parameter and phase for one party.
struct PartySetting {
    double theta = 0.0;
    double phi = 0.0;
};

/// Dichotomic outcome assignment for the output occupations (n~, m~).
inline int binning(int n_out, int m_out) {
    if (n_out < 0 || m_out < 0) throw DimensionError("binning: occupations must be nonnegative");
    const int s = n_out + m_out;
    const int exponent = m_out + (s * (s + 1)) / 2;
    return (exponent % 2 == 0) ? 1 : -1;
}

namespace detail {

inline double fock_factorial(int n) {
    static const double table[] = {1, 1, 2, 6, 24, 120, 720, 5040, 40320, 362880, 3628800};
    if (n < 0 || n > 10) throw DimensionError("fock_factorial: occupation out of range");
    return table[n];
}

inline double binomial(int n, int k) {
    return fock_factorial(n) / (fock_factorial(k) * fock_factorial(n - k));
}

/// <n, m | n~, m~> for the two-mode splitter c = cos(t) a + sin(t) e^{-i p} b,
/// d = sin(t) a - cos(t) e^{-i p} b (particle-number conserving).
inline Complex splitter_overlap(int n, int m, int n_out, int m_out, double theta, double phi) {
    if (n + m != n_out + m_out) return 0.0;
    const Complex eip = std::exp(Complex(0, phi));
    const double c = std::cos(theta), s = std::sin(theta);
    Complex acc = 0.0;
    const int j_lo = std::max(0, n - m_out);
    const int j_hi = std::min(n_out, n);
    for (int j = j_lo; j <= j_hi; ++j) {
        const int l = n - j;  // a-mode particles contributed by d^dag
        Complex term = binomial(n_out, j) * binomial(m_out, l);
        term *= std::pow(c, j) * std::pow(Complex(s) * eip, n_out - j);
        term *= std::pow(s, l) * std::pow(Complex(-c) * eip, m_out - l);
        acc += term;
    }
    return acc * std::sqrt(fock_factorial(n) * fock_factorial(m) /
                           (fock_factorial(n_out) * fock_factorial(m_out)));
}

/// Per-sector transform blocks: block[s] maps input pairs (n, s-n) to output
/// pairs (n~, s-n~), entry [n_out][n] = <n, s-n | n~, s-n~>.
inline std::vector<Mat> splitter_blocks(int max_total, double theta, double phi) {
    std::vector<Mat> blocks;
    for (int s = 0; s <= max_total; ++s) {
        Mat t(s + 1, s + 1);
        for (int n_out = 0; n_out <= s; ++n_out)
            for (int n = 0; n <= s; ++n)
                t(n_out, n) = splitter_overlap(n, s - n, n_out, s - n_out, theta, phi);
        blocks.push_back(std::move(t));
    }
    return blocks;
}

/// Precomputed index moves for replacing one party's (n, m) pair.
class MoveTable {
  public:
    MoveTable(const FockBasis& basis, int party) : basis_(&basis), party_(party) {
        const int t = basis.size();
        offsets_.resize(t + 1, 0);
        for (int i = 0; i < t; ++i) offsets_[i + 1] = offsets_[i] + basis.party_total(i, party) + 1;
        targets_.resize(offsets_[t]);
        for (int i = 0; i < t; ++i) {
            const int s = basis.party_total(i, party);
            std::vector<int> tup = basis.tuple(i);
            for (int n_out = 0; n_out <= s; ++n_out) {
                tup[2 * party] = n_out;
                tup[2 * party + 1] = s - n_out;
                targets_[offsets_[i] + n_out] = basis.index_of(tup);
            }
        }
    }

    int party() const { return party_; }
    int target(int i, int n_out) const { return targets_[offsets_[i] + n_out]; }

  private:
    const FockBasis* basis_;
    int party_;
    std::vector<int> offsets_;
    std::vector<int> targets_;
};

struct PartyTables {
    std::vector<MoveTable> moves;  // one per party
    explicit PartyTables(const FockBasis& basis) {
        for (int p = 0; p < basis.parties(); ++p) moves.emplace_back(basis, p);
    }
};

/// Applies a particle-conserving party-local operator given by per-sector
/// blocks op[s] (entry [out][in] over the a-mode occupation).
inline Vec apply_party_blocks(const FockBasis& basis, const MoveTable& moves, const Vec& amp,
                              const std::vector<Mat>& op) {
    Vec out = Vec::Zero(amp.size());
    for (int i = 0; i < basis.size(); ++i) {
        const Complex a = amp(i);
        if (a == Complex(0.0)) continue;
        const int s = basis.party_total(i, moves.party());
        const int n_in = basis.tuple(i)[2 * moves.party()];
        const Mat& block = op[s];
        for (int n_out = 0; n_out <= s; ++n_out)
            out(moves.target(i, n_out)) += block(n_out, n_in) * a;
    }
    return out;
}

}  // namespace detail

/// Joint outcome probabilities after each party's beamsplitter; entry i is
/// the probability of reading the output occupations basis.tuple(i).
inline std::vector<double> beamsplitter_outcomes(const FockState& state,
                                                 const std::vector<PartySetting>& settings) {
    const FockBasis& basis = state.basis();
    if (basis.modes_per_party() != 2)
        throw DimensionError("beamsplitter_outcomes: two modes per party required");
    if (static_cast<int>(settings.size()) != basis.parties())
        throw DimensionError("beamsplitter_outcomes: one setting per party required");
    detail::PartyTables tables(basis);
    Vec amp = state.amplitudes();
    for (int p = 0; p < basis.parties(); ++p) {
        // <out|psi> contracts with the conjugated overlaps
        auto blocks = detail::splitter_blocks(basis.total(), settings[p].theta, settings[p].phi);
        for (auto& b : blocks) b = b.conjugate().eval();
        amp = detail::apply_party_blocks(basis, tables.moves[p], amp, blocks);
    }
    std::vector<double> probs(basis.size());
    for (int i = 0; i < basis.size(); ++i) probs[i] = std::norm(amp(i));
    return probs;
}

/// Correlation function <prod_k O_k(theta_k, phi_k)> with the +-1 binning.
class CorrelatorEngine {
  public:
    explicit CorrelatorEngine(const FockState& state)
        : state_(state), tables_(state.basis()) {
        if (state.basis().modes_per_party() != 2)
            throw DimensionError("CorrelatorEngine: two modes per party required");
    }

    /// Observable blocks for one party at a given setting, in the input basis.
    std::vector<Mat> observable_blocks(const PartySetting& setting) const {
        auto t = detail::splitter_blocks(state_.basis().total(), setting.theta, setting.phi);
        std::vector<Mat> obs;
        for (int s = 0; s < static_cast<int>(t.size()); ++s) {
            Mat e = Mat::Zero(s + 1, s + 1);
            for (int n_out = 0; n_out <= s; ++n_out) e(n_out, n_out) = binning(n_out, s - n_out);
            obs.push_back(t[s].transpose() * e * t[s].conjugate());
        }
        return obs;
    }

    double correlator_with_blocks(const std::vector<const std::vector<Mat>*>& per_party) const {
        Vec work = state_.amplitudes();
        for (int p = 0; p < state_.basis().parties(); ++p)
            work = detail::apply_party_blocks(state_.basis(), tables_.moves[p], work,
                                              *per_party[p]);
        return std::real(state_.amplitudes().dot(work));
    }

    double correlator(const std::vector<PartySetting>& settings) const {
        std::vector<std::vector<Mat>> blocks;
        std::vector<const std::vector<Mat>*> ptrs;
        for (auto& s : settings) blocks.push_back(observable_blocks(s));
        for (auto& b : blocks) ptrs.push_back(&b);
        return correlator_with_blocks(ptrs);
    }

    const FockState& state() const { return state_; }

  private:
    const FockState& state_;
    detail::PartyTables tables_;
};

inline double correlator(const FockState& state, const std::vector<PartySetting>& settings) {
    if (static_cast<int>(settings.size()) != state.basis().parties())
        throw DimensionError("correlator: one setting per party required");
    return CorrelatorEngine(state).correlator(settings);
}

/// Removes coherences between distinct party-particle-count patterns;
/// idempotent and trace preserving by construction.
inline DensityMatrix ssr_project(const FockBasis& basis, const DensityMatrix& rho) {
    const int t = basis.size();
    if (rho.dim() != t) throw DimensionError("ssr_project: state does not match basis");
    std::map<std::vector<int>, std::vector<int>> sectors;
    for (int i = 0; i < t; ++i) sectors[basis.party_pattern(i)].push_back(i);
    Mat out = Mat::Zero(t, t);
    for (auto& [pattern, idx] : sectors)
        for (int i : idx)
            for (int j : idx) out(i, j) = rho.matrix()(i, j);
    return DensityMatrix(std::move(out), {t});
}

inline DensityMatrix ssr_project(const FockState& psi) {
    DensityMatrix pure(psi.amplitudes() * psi.amplitudes().adjoint(),
                       {psi.basis().size()});
    return ssr_project(psi.basis(), pure);
}

struct NogoReport {
    struct Block {
        std::vector<int> pattern;
        double weight;
        int min_party_count;
    };
    std::vector<Block> blocks;
    bool all_blocks_have_vacuum_party = true;
};

/// Pigeonhole check behind the no-go statement: with fewer particles than
/// parties, every projected block leaves some party in the vacuum.
inline NogoReport nogo_structure_check(const FockState& psi) {
    const FockBasis& basis = psi.basis();
    if (basis.total() >= basis.parties())
        throw UnsupportedError("nogo_structure_check: needs total particles < parties");
    std::map<std::vector<int>, double> weights;
    for (int i = 0; i < basis.size(); ++i)
        weights[basis.party_pattern(i)] += std::norm(psi.amplitudes()(i));
    NogoReport report;
    for (auto& [pattern, w] : weights) {
        if (w <= 1e-14) continue;
        int min_count = pattern[0];
        for (int v : pattern) min_count = std::min(min_count, v);
        report.blocks.push_back({pattern, w, min_count});
        if (min_count != 0) report.all_blocks_have_vacuum_party = false;
    }
    return report;
}

}  // namespace qres

#endif  // QRES_FOCK_HPP
