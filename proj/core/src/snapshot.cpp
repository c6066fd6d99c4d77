#include "s2spm/snapshot.hpp"

#include <fstream>

#include <json.hpp>

#include "s2spm/errors.hpp"

namespace s2spm {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("tensor is not an array", 0);
    const auto rows = j.size();
    if (rows == 0) return {};
    const auto cols = j.at(0).size();
    Eigen::MatrixXd m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const json& row = j.at(r);
        if (row.size() != cols) throw ParseError("ragged tensor rows", 0);
        for (std::size_t c = 0; c < cols; ++c) {
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                row.at(c).get<double>();
        }
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
    }
    return v;
}

}  // namespace

void save_snapshot(const std::string& path, const Snapshot& snap) {
    const ModelParams& p = snap.params;
    json j;
    j["format"] = "s2spm-snapshot";
    j["version"] = 1;
    j["kind"] = p.kind == ModelKind::two_space ? "two_space" : "single_space";
    j["n_nodes"] = p.n_nodes();
    j["k_pos"] = p.k_pos();
    j["k_neg"] = p.k_neg();
    j["seed"] = snap.seed;
    j["iterations"] = snap.iterations;
    j["z_logits"] = matrix_to_json(p.z_logits);
    j["w_logits"] = matrix_to_json(p.w_logits);
    j["gamma"] = vector_to_json(p.gamma);
    j["delta"] = vector_to_json(p.delta);
    j["r_pos"] = matrix_to_json(p.r_pos);
    j["r_neg"] = matrix_to_json(p.r_neg);
    j["g_pos"] = matrix_to_json(p.g_pos);
    j["g_neg"] = matrix_to_json(p.g_neg);

    std::ofstream out(path);
    if (!out) throw ParseError("cannot write snapshot: " + path, 0);
    out << j.dump(1) << "\n";
}

Snapshot load_snapshot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open snapshot: " + path, 0);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("snapshot is not valid JSON: ") + e.what(), 0);
    }
    if (j.value("format", "") != "s2spm-snapshot" || j.value("version", 0) != 1) {
        throw ParseError("unrecognized snapshot container", 0);
    }

    Snapshot snap;
    ModelParams& p = snap.params;
    p.kind = j.at("kind").get<std::string>() == "single_space" ? ModelKind::single_space
                                                               : ModelKind::two_space;
    p.z_logits = matrix_from_json(j.at("z_logits"));
    p.w_logits = matrix_from_json(j.at("w_logits"));
    p.gamma = vector_from_json(j.at("gamma"));
    p.delta = vector_from_json(j.at("delta"));
    p.r_pos = matrix_from_json(j.at("r_pos"));
    p.r_neg = matrix_from_json(j.at("r_neg"));
    p.g_pos = matrix_from_json(j.at("g_pos"));
    p.g_neg = matrix_from_json(j.at("g_neg"));
    snap.seed = j.at("seed").get<std::uint64_t>();
    snap.iterations = j.at("iterations").get<long>();

    const int n = j.at("n_nodes").get<int>();
    if (p.n_nodes() != n || p.k_pos() != j.at("k_pos").get<int>() ||
        p.k_neg() != j.at("k_neg").get<int>()) {
        throw ParseError("snapshot dimensions disagree with its tensors", 0);
    }
    return snap;
}

}  // namespace s2spm
