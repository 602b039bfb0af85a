#include <fstream>
#include <sstream>

#include "caloron/nahm_data.hpp"

namespace caloron {

using nlohmann::json;

namespace {

cplx parse_complex(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(where + ": complex entries must be [re, im] pairs");
}

Matrix parse_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty() || !v[0].is_array())
        throw ConfigError(where + ": expected a matrix as a list of rows");
    const auto rows = static_cast<Eigen::Index>(v.size());
    const auto cols = static_cast<Eigen::Index>(v[0].size());
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = v[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ConfigError(where + ": ragged matrix rows");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = parse_complex(row[static_cast<std::size_t>(c)], where);
    }
    return m;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(std::move(row));
    }
    return rows;
}

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object() || !obj.contains(key))
        throw ConfigError(where + ": missing field \"" + key + "\"");
    return obj.at(key);
}

} // namespace

namespace {

NahmData parse_document(const json& doc) {
    const int k = require(doc, "k", "config").get<int>();
    const auto lambdas = require(doc, "lambdas", "config").get<std::vector<double>>();
    const json& ivs = require(doc, "intervals", "config");
    const json& qs = require(doc, "Q", "config");
    if (!ivs.is_array() || !qs.is_array()) throw ConfigError("config: intervals and Q must be arrays");

    std::vector<IntervalModel> intervals;
    for (std::size_t a = 0; a < ivs.size(); ++a) {
        const std::string where = "intervals[" + std::to_string(a) + "]";
        IntervalModel model;
        model.degree = require(ivs[a], "degree", where).get<int>();
        const json& T = require(ivs[a], "T", where);
        for (int mu = 0; mu < 4; ++mu) {
            const std::string key = std::to_string(mu);
            if (!T.is_object() || !T.contains(key))
                throw ConfigError(where + ": missing coefficient block T_" + key);
            const json& block = T.at(key);
            if (!block.is_array()) throw ConfigError(where + ": T_" + key + " must be an array");
            const std::string bw = where + ".T." + key;
            if (static_cast<int>(block.size()) != model.degree + 1)
                throw ConfigError(bw + ": expected degree+1 = " + std::to_string(model.degree + 1) +
                                  " coefficient matrices");
            for (std::size_t p = 0; p < block.size(); ++p) {
                Matrix m = parse_matrix(block[p], bw + "[" + std::to_string(p) + "]");
                if (m.rows() != k || m.cols() != k)
                    throw ConfigError(bw + ": coefficient dimension mismatch, expected k x k");
                if ((0.5 * (m - m.adjoint())).norm() > 1e-12)
                    throw ConfigError(bw + ": non-hermitian coefficient");
                model.coeffs[static_cast<std::size_t>(mu)].push_back(0.5 * (m + m.adjoint()));
            }
        }
        intervals.push_back(std::move(model));
    }

    std::vector<JumpData> jumps;
    for (std::size_t a = 0; a < qs.size(); ++a) {
        const std::string where = "Q[" + std::to_string(a) + "]";
        Matrix q = parse_matrix(qs[a], where);
        if (q.rows() != 2 * k)
            throw ConfigError(where + ": dimension mismatch, expected 2k = " + std::to_string(2 * k) +
                              " rows");
        jumps.push_back({std::move(q)});
    }
    std::string description = doc.value("description", std::string{});
    return NahmData(k, lambdas, std::move(intervals), std::move(jumps), std::move(description));
}

} // namespace

NahmData nahm_data_from_json(const json& doc) {
    try {
        return parse_document(doc);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

NahmData load_nahm_data(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": malformed JSON (byte " + std::to_string(e.byte) +
                          "): " + e.what());
    }
    return nahm_data_from_json(doc);
}

json nahm_data_to_json(const NahmData& data) {
    json doc;
    doc["k"] = data.rank();
    doc["lambdas"] = data.lambdas();
    doc["description"] = data.description();
    json ivs = json::array();
    for (const auto& iv : data.intervals()) {
        json T;
        for (int mu = 0; mu < 4; ++mu) {
            json block = json::array();
            for (const auto& c : iv.coeffs[static_cast<std::size_t>(mu)]) block.push_back(matrix_to_json(c));
            T[std::to_string(mu)] = std::move(block);
        }
        ivs.push_back({{"degree", iv.degree}, {"T", std::move(T)}});
    }
    doc["intervals"] = std::move(ivs);
    json qs = json::array();
    for (const auto& j : data.jumps()) qs.push_back(matrix_to_json(j.Q));
    doc["Q"] = std::move(qs);
    return doc;
}

} // namespace caloron
