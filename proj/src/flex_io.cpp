#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "flexspec/error.hpp"
#include "flexspec/flex.hpp"

namespace flexspec {
namespace {

using nlohmann::json;

json vertices_json(const Eigen::MatrixXd& v) {
    json out = json::array();
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        json p = json::array();
        for (Eigen::Index i = 0; i < v.rows(); ++i) p.push_back(v(i, j));
        out.push_back(std::move(p));
    }
    return out;
}

Eigen::MatrixXd vertices_from(const json& arr, int d) {
    Eigen::MatrixXd v(d, static_cast<Eigen::Index>(arr.size()));
    for (std::size_t j = 0; j < arr.size(); ++j) {
        if (arr[j].size() != static_cast<std::size_t>(d)) {
            throw Error(ErrorKind::io_error, "vertex " + std::to_string(j) + " has wrong coordinate count");
        }
        for (int i = 0; i < d; ++i) v(i, static_cast<Eigen::Index>(j)) = arr[j][static_cast<std::size_t>(i)].get<double>();
    }
    return v;
}

json surface_json(int d, const Eigen::MatrixXd& v, std::span<const Facet> facets) {
    return {{"dimension", d}, {"vertices", vertices_json(v)}, {"facets", std::vector<Facet>(facets.begin(), facets.end())}};
}

SimplicialSurface surface_from(const json& j) {
    const int d = j.at("dimension").get<int>();
    return SimplicialSurface(d, vertices_from(j.at("vertices"), d), j.at("facets").get<std::vector<Facet>>());
}

json family_json(const FlexFamily& f) {
    json j = surface_json(f.dimension(), f.reference(), f.facets());
    switch (f.kind()) {
    case FamilyKind::rigid:
        j["kind"] = "rigid";
        break;
    case FamilyKind::continuation: {
        j["kind"] = "continuation";
        const Driver& dr = f.driver();
        if (dr.kind == Driver::Kind::ridge_angle) {
            j["driver"] = {{"kind", "ridge_angle"}, {"ridge", dr.ridge}};
        } else {
            j["driver"] = {{"kind", "coordinate"}, {"vertex", dr.vertex}, {"axis", dr.axis}};
        }
        j["driver_begin"] = f.driver_begin();
        j["driver_end"] = f.driver_end();
        j["gauge_facet"] = f.gauge_facet();
        break;
    }
    case FamilyKind::attached: {
        j["kind"] = "attached";
        j["base"] = family_json(*f.base());
        j["s_begin"] = f.s_begin();
        j["s_end"] = f.s_end();
        json atts = json::array();
        for (const Attachment& a : f.attachments()) {
            atts.push_back({{"frame", a.frame},
                            {"weights", std::vector<double>(a.weights.data(), a.weights.data() + a.weights.size())},
                            {"offset", a.offset}});
        }
        j["attachments"] = std::move(atts);
        break;
    }
    }
    return j;
}

FlexFamily family_from(const json& j) {
    const std::string kind = j.value("kind", "rigid");
    if (kind == "rigid") return FlexFamily::rigid(surface_from(j));
    if (kind == "continuation") {
        const json& dj = j.at("driver");
        Driver dr;
        if (dj.at("kind").get<std::string>() == "ridge_angle") {
            dr.kind = Driver::Kind::ridge_angle;
            dr.ridge = dj.at("ridge").get<std::vector<int>>();
        } else {
            dr.kind = Driver::Kind::coordinate;
            dr.vertex = dj.at("vertex").get<int>();
            dr.axis = dj.at("axis").get<int>();
        }
        return FlexFamily::continuation(surface_from(j), dr, j.at("driver_end").get<double>(),
                                        j.value("gauge_facet", 0));
    }
    if (kind == "attached") {
        auto base = std::make_shared<const FlexFamily>(family_from(j.at("base")));
        std::vector<Attachment> atts;
        for (const json& aj : j.at("attachments")) {
            Attachment a;
            a.frame = aj.at("frame").get<std::vector<int>>();
            const auto w = aj.at("weights").get<std::vector<double>>();
            a.weights = Eigen::Map<const Eigen::VectorXd>(w.data(), static_cast<Eigen::Index>(w.size()));
            a.offset = aj.at("offset").get<double>();
            atts.push_back(std::move(a));
        }
        return FlexFamily::attached(std::move(base), j.at("s_begin").get<double>(), j.at("s_end").get<double>(),
                                    std::move(atts), j.at("facets").get<std::vector<Facet>>());
    }
    throw Error(ErrorKind::io_error, "unknown family kind '" + kind + "'");
}

template <class F>
auto parse(const std::string& text, F&& build) {
    try {
        return build(json::parse(text));
    } catch (const json::exception& e) {
        throw Error(ErrorKind::io_error, e.what());
    }
}

}  // namespace

std::string family_to_json(const FlexFamily& family) { return family_json(family).dump(2); }

FlexFamily family_from_json(const std::string& text) { return parse(text, family_from); }

std::string surface_to_json(const SimplicialSurface& s) {
    return surface_json(s.dimension(), s.vertices(), s.facets()).dump(2);
}

SimplicialSurface surface_from_json(const std::string& text) { return parse(text, surface_from); }

}  // namespace flexspec
