#include "tpmbm/serialization.hpp"

#include <stdexcept>

namespace tpmbm {

namespace {

Json log_weight_to_json(double lw) { return lw == kNegInf ? Json(nullptr) : Json(lw); }
double log_weight_from_json(const Json& j) { return j.is_null() ? kNegInf : j.get<double>(); }

Json ref_to_json(const MeasurementRef& r) { return Json::array({r.time, r.meas}); }
MeasurementRef ref_from_json(const Json& j) {
    return MeasurementRef{j.at(0).get<Time>(), j.at(1).get<std::uint32_t>()};
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("matrix: expected an array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows > 0 ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Matrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j.at(static_cast<std::size_t>(r));
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
            throw std::invalid_argument("matrix: rows must have equal length");
        }
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

Json vector_to_json(const Vector& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

Vector vector_from_json(const Json& j) {
    if (!j.is_array()) throw std::invalid_argument("vector: expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j.at(i).get<double>();
    return v;
}

Json info_gaussian_to_json(const InfoGaussian& g) {
    const auto b = g.blocks();
    Json j;
    j["diag"] = Json::array();
    j["lower"] = Json::array();
    j["info"] = Json::array();
    for (const auto& m : b.diag) j["diag"].push_back(matrix_to_json(m));
    for (const auto& m : b.lower) j["lower"].push_back(matrix_to_json(m));
    for (const auto& v : b.info) j["info"].push_back(vector_to_json(v));
    return j;
}

InfoGaussian info_gaussian_from_json(const Json& j) {
    InfoBlocks b;
    for (const auto& m : j.at("diag")) b.diag.push_back(matrix_from_json(m));
    for (const auto& m : j.at("lower")) b.lower.push_back(matrix_from_json(m));
    for (const auto& v : j.at("info")) b.info.push_back(vector_from_json(v));
    return InfoGaussian::from_blocks(b);
}

Json mixture_to_json(const TrajectoryMixture& m) {
    Json a = Json::array();
    for (const auto& c : m.components) {
        a.push_back(Json{{"weight", c.weight},
                         {"birth_time", c.birth_time},
                         {"end_time", c.end_time},
                         {"density", info_gaussian_to_json(c.density)}});
    }
    return a;
}

TrajectoryMixture mixture_from_json(const Json& j) {
    TrajectoryMixture m;
    for (const auto& c : j) {
        m.components.push_back(MixtureComponent{c.at("weight").get<double>(), c.at("birth_time").get<Time>(),
                                                c.at("end_time").get<Time>(),
                                                info_gaussian_from_json(c.at("density"))});
    }
    return m;
}

Json trajectory_to_json(const Trajectory& t) {
    Json states = Json::array();
    for (const auto& s : t.states) states.push_back(vector_to_json(s));
    return Json{{"birth_time", t.birth_time}, {"end_time", t.end_time}, {"states", states}};
}

Trajectory trajectory_from_json(const Json& j) {
    Trajectory t;
    t.birth_time = j.at("birth_time").get<Time>();
    t.end_time = j.at("end_time").get<Time>();
    for (const auto& s : j.at("states")) t.states.push_back(vector_from_json(s));
    t.validate();
    return t;
}

Json density_to_json(const PmbmDensity& d) {
    Json j;
    j["time"] = d.time;
    j["undetected"] = mixture_to_json(d.undetected);
    j["tracks"] = Json::array();
    for (const auto& t : d.tracks) {
        Json leaves = Json::array();
        for (const auto& leaf : t.leaves) {
            Json history = Json::array();
            for (const auto& r : leaf.history.entries()) history.push_back(ref_to_json(r));
            leaves.push_back(Json{{"existence", leaf.existence},
                                  {"log_weight", log_weight_to_json(leaf.log_weight)},
                                  {"history", history},
                                  {"density", mixture_to_json(leaf.density)}});
        }
        j["tracks"].push_back(Json{{"origin", ref_to_json(t.origin)}, {"leaves", leaves}});
    }
    j["hypotheses"] = Json::array();
    for (const auto& h : d.hypotheses) {
        j["hypotheses"].push_back(Json{{"log_weight", log_weight_to_json(h.log_weight)}, {"leaves", h.leaves}});
    }
    return j;
}

PmbmDensity density_from_json(const Json& j) {
    PmbmDensity d;
    d.time = j.at("time").get<Time>();
    d.undetected = mixture_from_json(j.at("undetected"));
    for (const auto& t : j.at("tracks")) {
        Track track{ref_from_json(t.at("origin")), {}};
        for (const auto& leaf : t.at("leaves")) {
            std::vector<MeasurementRef> entries;
            for (const auto& r : leaf.at("history")) entries.push_back(ref_from_json(r));
            track.leaves.push_back(Bernoulli{leaf.at("existence").get<double>(),
                                             mixture_from_json(leaf.at("density")),
                                             AssocHistory::from_entries(entries),
                                             log_weight_from_json(leaf.at("log_weight"))});
        }
        d.tracks.push_back(std::move(track));
    }
    for (const auto& h : j.at("hypotheses")) {
        d.hypotheses.push_back(GlobalHypothesis{log_weight_from_json(h.at("log_weight")),
                                                h.at("leaves").get<std::vector<std::uint32_t>>()});
    }
    validate_density(d);
    return d;
}

}  // namespace tpmbm
