#ifndef QRES_IO_HPP
#define QRES_IO_HPP

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "qres/channels.hpp"
#include "qres/entanglement.hpp"

namespace qres {

using Json = nlohmann::json;

// ---------------------------------------------------------------------------
// Matrix / vector documents: {"dims":[...], "re":[[...]], "im":[[...]]} for
// matrices, with flat re/im lists for vectors.
// ---------------------------------------------------------------------------

inline Json matrix_to_json(const Mat& m, const Dims& dims) {
    Json j;
    j["dims"] = dims;
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json re_row = Json::array(), im_row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            re_row.push_back(m(r, c).real());
            im_row.push_back(m(r, c).imag());
        }
        re.push_back(std::move(re_row));
        im.push_back(std::move(im_row));
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

inline Mat matrix_from_json(const Json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    const auto rows = re.size();
    if (rows == 0) throw ValidationError("matrix document: empty");
    const auto cols = re.at(0).size();
    Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (re.at(r).size() != cols || im.at(r).size() != cols)
            throw ValidationError("matrix document: ragged rows");
        for (std::size_t c = 0; c < cols; ++c)
            m(r, c) = Complex(re.at(r).at(c).get<double>(), im.at(r).at(c).get<double>());
    }
    return m;
}

inline Json vector_to_json(const Vec& v, const Dims& dims) {
    Json j;
    j["dims"] = dims;
    Json re = Json::array(), im = Json::array();
    for (Eigen::Index k = 0; k < v.size(); ++k) {
        re.push_back(v(k).real());
        im.push_back(v(k).imag());
    }
    j["re"] = std::move(re);
    j["im"] = std::move(im);
    return j;
}

inline Vec vector_from_json(const Json& j) {
    const auto& re = j.at("re");
    const auto& im = j.at("im");
    if (re.size() != im.size()) throw ValidationError("vector document: re/im length mismatch");
    Vec v(re.size());
    for (std::size_t k = 0; k < re.size(); ++k)
        v(k) = Complex(re.at(k).get<double>(), im.at(k).get<double>());
    return v;
}

inline Dims dims_from_json(const Json& j) {
    Dims dims;
    for (const auto& d : j.at("dims")) dims.push_back(d.get<int>());
    return dims;
}

/// A state document holds either a density matrix (nested re) or a pure state
/// (flat re), plus optional "local_numbers" grading metadata.
struct StateDocument {
    std::optional<DensityMatrix> density;
    std::optional<PureState> pure;
    std::optional<LocalNumbers> local_numbers;

    DensityMatrix as_density() const {
        if (density) return *density;
        return pure->density();
    }
};

inline StateDocument state_from_json(const Json& j) {
    StateDocument doc;
    Dims dims = dims_from_json(j);
    if (j.at("re").at(0).is_array())
        doc.density = DensityMatrix(matrix_from_json(j), dims);
    else
        doc.pure = PureState(vector_from_json(j), dims);
    if (j.contains("local_numbers")) {
        LocalNumbers numbers;
        for (const auto& row : j.at("local_numbers"))
            numbers.push_back(row.get<std::vector<int>>());
        check_grading(numbers, dims);
        doc.local_numbers = std::move(numbers);
    }
    return doc;
}

inline StateDocument load_state(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open state file: " + path);
    Json j;
    in >> j;
    return state_from_json(j);
}

// ---------------------------------------------------------------------------
// Channel specs
// ---------------------------------------------------------------------------

/// Parsed channel spec tree; serialization round-trips without loss.
struct ChannelSpec {
    Json doc;

    static ChannelSpec parse(const Json& j) {
        if (!j.contains("kind")) throw ValidationError("channel spec: missing kind");
        return ChannelSpec{j};
    }

    Json to_json() const { return doc; }

    QuantumChannel build() const { return build_node(doc); }

  private:
    static double param(const Json& j, const std::string& name) {
        return j.at("params").at(name).get<double>();
    }

    static QuantumChannel build_node(const Json& j) {
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "kraus") {
            Dims din, dout;
            for (const auto& d : j.at("dims_in")) din.push_back(d.get<int>());
            for (const auto& d : j.at("dims_out")) dout.push_back(d.get<int>());
            std::vector<Mat> ops;
            for (const auto& op : j.at("ops")) ops.push_back(matrix_from_json(op));
            return QuantumChannel(std::move(ops), std::move(din), std::move(dout));
        }
        if (kind == "compose") {
            const auto& stages = j.at("stages");
            if (stages.empty()) throw ValidationError("channel spec: compose needs stages");
            QuantumChannel acc = build_node(stages.at(0));
            for (std::size_t k = 1; k < stages.size(); ++k)
                acc = compose(build_node(stages.at(k)), acc);  // stages listed first-to-last
            return acc;
        }
        if (kind == "tensor") {
            const auto& factors = j.at("factors");
            if (factors.empty()) throw ValidationError("channel spec: tensor needs factors");
            QuantumChannel acc = build_node(factors.at(0));
            for (std::size_t k = 1; k < factors.size(); ++k)
                acc = channel_tensor(acc, build_node(factors.at(k)));
            return acc;
        }
        if (kind == "identity") {
            Dims dims;
            for (const auto& d : j.at("params").at("dims")) dims.push_back(d.get<int>());
            return identity_channel(std::move(dims));
        }
        if (kind == "amplitude_damping") return amplitude_damping(param(j, "gamma"));
        if (kind == "phase_damping") return phase_damping(param(j, "lambda"));
        if (kind == "depolarizing") {
            Dims dims;
            for (const auto& d : j.at("params").at("dims")) dims.push_back(d.get<int>());
            return depolarizing(param(j, "mu"), std::move(dims));
        }
        if (kind == "einselection") {
            Dims dims;
            for (const auto& d : j.at("params").at("dims")) dims.push_back(d.get<int>());
            if (j.at("params").contains("measured")) {
                std::set<int> measured;
                for (const auto& m : j.at("params").at("measured")) measured.insert(m.get<int>());
                return EinselectionSpec::one_sided(dims, measured).channel();
            }
            return EinselectionSpec::computational(dims).channel();
        }
        if (kind == "bec") {
            const Complex g(param(j, "re_g"), param(j, "im_g"));
            return bec_channel(g, param(j, "omega_t"));
        }
        if (kind == "hadamard") return unitary_channel(hadamard(), {2});
        if (kind == "pauli_x") return unitary_channel(pauli_x(), {2});
        if (kind == "pauli_y") return unitary_channel(pauli_y(), {2});
        if (kind == "pauli_z") return unitary_channel(pauli_z(), {2});
        if (kind == "rx") return unitary_channel(rot_x(param(j, "theta")), {2});
        if (kind == "rz") return unitary_channel(rot_z(param(j, "theta")), {2});
        if (kind == "cnot") return unitary_channel(cnot(), {2, 2});
        if (kind == "cnot_pm") return unitary_channel(cnot_pm(), {2, 2});
        if (kind == "swap") return unitary_channel(swap_gate(), {2, 2});
        throw ValidationError("channel spec: unknown kind '" + kind + "'");
    }
};

inline ChannelSpec load_channel_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open channel file: " + path);
    Json j;
    in >> j;
    return ChannelSpec::parse(j);
}

// ---------------------------------------------------------------------------
// Validation reports
// ---------------------------------------------------------------------------

struct CheckResult {
    std::string check;
    bool passed;
    std::string detail;
};

/// Runs every invariant of a state or channel document without further
/// computation; never throws on a bad document.
inline std::vector<CheckResult> validate_document(const Json& j) {
    std::vector<CheckResult> results;
    auto record = [&](const std::string& name, const std::function<void()>& fn) {
        try {
            fn();
            results.push_back({name, true, ""});
        } catch (const std::exception& e) {
            results.push_back({name, false, e.what()});
        }
    };
    if (j.contains("kind")) {
        record("spec parses", [&] { ChannelSpec::parse(j); });
        record("channel builds (CPTP)", [&] { ChannelSpec::parse(j).build(); });
        return results;
    }
    record("dims present", [&] { dims_from_json(j); });
    if (j.contains("re") && j.at("re").size() > 0 && j.at("re").at(0).is_array()) {
        Mat m;
        record("matrix parses", [&] { m = matrix_from_json(j); });
        if (m.size() > 0) {
            Dims dims = dims_from_json(j);
            record("hermitian", [&] {
                if (!is_hermitian(m, default_tol().herm))
                    throw ValidationError("max |rho - rho^dag| = " +
                                          std::to_string(max_abs(m - m.adjoint())));
            });
            record("unit trace", [&] {
                const double dev = std::abs(m.trace() - Complex(1.0));
                if (dev > default_tol().trace)
                    throw ValidationError("|Tr - 1| = " + std::to_string(dev));
            });
            record("positive semidefinite", [&] {
                Eigen::SelfAdjointEigenSolver<Mat> s((m + m.adjoint()) * 0.5);
                if (s.eigenvalues().minCoeff() < -default_tol().psd)
                    throw ValidationError("min eigenvalue = " +
                                          std::to_string(s.eigenvalues().minCoeff()));
            });
            record("dims match size", [&] { DensityMatrix(m, dims); });
        }
    } else {
        record("pure state validates", [&] { state_from_json(j); });
    }
    if (j.contains("local_numbers"))
        record("grading aligns with dims", [&] { state_from_json(j); });
    return results;
}

inline std::vector<CheckResult> validate_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open file: " + path);
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        return {{"json parses", false, e.what()}};
    }
    return validate_document(j);
}

}  // namespace qres

#endif  // QRES_IO_HPP
