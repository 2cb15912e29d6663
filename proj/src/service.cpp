#include "platdesign/service.hpp"

#include <httplib.h>

#include <charconv>
#include <optional>

#include "platdesign/errors.hpp"
#include "platdesign/json_io.hpp"

namespace platdesign {

namespace {

HttpResponse json_response(int status, const Json& j) { return {status, j.dump(), "application/json"}; }

HttpResponse error_response(int status, const std::string& message) {
    return json_response(status, Json{{"error", message}, {"status", status}});
}

struct Unprocessable {
    std::string message;
};

std::optional<std::string> param(const QueryParams& q, const std::string& key) {
    const auto it = q.find(key);
    if (it == q.end()) return std::nullopt;
    return it->second;
}

template <typename T>
T parse_value(const std::string& s, const std::string& key) {
    T v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || p != s.data() + s.size()) throw Unprocessable{key + ": malformed value '" + s + "'"};
    return v;
}

template <std::size_t N>
std::array<double, N> parse_list(const std::string& s, const std::string& key) {
    std::array<double, N> out{};
    std::size_t start = 0;
    for (std::size_t i = 0; i < N; ++i) {
        const auto comma = s.find(',', start);
        const bool last = i + 1 == N;
        if (last != (comma == std::string::npos)) {
            throw Unprocessable{key + ": expected " + std::to_string(N) + " comma-separated values"};
        }
        out[i] = parse_value<double>(s.substr(start, last ? std::string::npos : comma - start), key);
        start = comma + 1;
    }
    return out;
}

Thresholds query_thresholds(const AnchorArtifact& a, const QueryParams& q) {
    Thresholds t = a.thresholds;
    if (auto g = param(q, "gamma")) t.gamma = parse_list<3>(*g, "gamma");
    if (auto k = param(q, "kappa1")) t.kappa1 = parse_value<double>(*k, "kappa1");
    if (auto k = param(q, "kappa23")) t.kappa23 = parse_list<2>(*k, "kappa23");
    try {
        t.validate();
    } catch (const std::exception& e) {
        throw Unprocessable{e.what()};
    }
    return t;
}

long query_long(const QueryParams& q, const std::string& key, std::optional<long> fallback = std::nullopt) {
    auto v = param(q, key);
    if (!v) {
        if (fallback) return *fallback;
        throw Unprocessable{key + ": required"};
    }
    return parse_value<long>(*v, key);
}

Json oc_json(const AnchorArtifact& a, long n, const Thresholds& t) {
    const TauSampleSet s = extrapolate(a.models, n);
    const OperatingCharacteristics oc = evaluate(s, t);
    Json j = to_json(oc);
    j["scenario"] = a.models.scenario;
    j["hypothesis"] = to_string(a.models.hypothesis);
    Json warnings = Json::array();
    if (oc.outside_validity_window) warnings.push_back("n outside the anchor validity window");
    if (const auto f = fwer_estimate(s, t); f.warning) warnings.push_back(*f.warning);
    j["warning"] = !warnings.empty();
    j["warnings"] = std::move(warnings);
    return j;
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= path.size()) {
        const auto slash = path.find('/', start);
        const std::string part = path.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
        if (!part.empty()) parts.push_back(part);
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    return parts;
}

}  // namespace

std::string design_summary_json(const std::string& id, const AnchorArtifact& a) {
    const ValidityWindow w = a.models.validity_window();
    Json j{{"id", id},
           {"format_version", a.format_version},
           {"summary",
            {{"scenario", a.models.scenario},
             {"hypothesis", to_string(a.models.hypothesis)},
             {"replicates", a.models.replicates()},
             {"c2", a.models.c2},
             {"method", to_json(a.models.method)},
             {"thresholds", to_json(a.thresholds)},
             {"seed", a.config.seed},
             {"fwer_target_prob", a.config.Gamma0},
             {"power_target_prob", a.config.Gamma1},
             {"search", {{"n_min", a.config.search_lo}, {"n_max", a.config.search_hi}}},
             {"has_null_samples", a.null_samples.has_value()}}},
           {"anchors",
            {{"n_a", a.models.n_a},
             {"n_b", a.models.n_b},
             {"seed_a", a.models.seed_a},
             {"seed_b", a.models.seed_b},
             {"validity_window", {{"lo", w.lo}, {"hi", w.hi}}}}}};
    return j.dump();
}

DesignService::DesignService(std::size_t max_upload, std::string cors_origin)
    : max_upload_(max_upload), cors_origin_(std::move(cors_origin)) {}

std::string DesignService::add(AnchorArtifact artifact) {
    auto ptr = std::make_shared<const AnchorArtifact>(std::move(artifact));
    std::unique_lock lock(mutex_);
    std::string id = "d" + std::to_string(next_id_++);
    designs_.emplace(id, std::move(ptr));
    return id;
}

std::shared_ptr<const AnchorArtifact> DesignService::find(const std::string& id) const {
    std::shared_lock lock(mutex_);
    const auto it = designs_.find(id);
    return it == designs_.end() ? nullptr : it->second;
}

HttpResponse DesignService::handle(const std::string& method, const std::string& path, const QueryParams& query,
                                   const std::string& body) {
    if (method == "OPTIONS") return {204, "", "text/plain"};
    const auto parts = split_path(path);
    if (parts.empty() || parts[0] != "designs") return error_response(404, "not found");
    if (method == "POST") {
        if (parts.size() != 1) return error_response(404, "not found");
        return load(body);
    }
    if (method == "GET") return get(path, query);
    return error_response(405, "method not allowed");
}

HttpResponse DesignService::get(const std::string& path, const QueryParams& query) const {
    const auto parts = split_path(path);
    if (parts.size() == 1) {
        Json ids = Json::array();
        std::shared_lock lock(mutex_);
        for (const auto& [id, a] : designs_) ids.push_back(id);
        return json_response(200, Json{{"designs", std::move(ids)}});
    }
    if (parts.size() == 2) {
        const auto a = find(parts[1]);
        if (!a) return error_response(404, "unknown design id '" + parts[1] + "'");
        return {200, design_summary_json(parts[1], *a), "application/json"};
    }
    if (parts.size() == 3 && parts[2] == "oc") return oc(parts[1], query);
    if (parts.size() == 3 && parts[2] == "curves") return curves(parts[1], query);
    return error_response(404, "not found");
}

HttpResponse DesignService::load(const std::string& body) {
    if (body.size() > max_upload_) return error_response(413, "artifact exceeds upload limit");
    AnchorArtifact artifact;
    try {
        const auto nl = body.find('\n');
        Json first;
        try {
            first = Json::parse(body.substr(0, nl));
        } catch (const Json::exception&) {
            return error_response(400, "body is neither an artifact nor a JSON request");
        }
        if (first.is_object() && first.contains("digest")) {
            artifact = deserialize_artifact(body);
        } else if (first.is_object() && first.contains("path") && first["path"].is_string()) {
            const std::filesystem::path p = first["path"].get<std::string>();
            std::error_code ec;
            const auto size = std::filesystem::file_size(p, ec);
            if (!ec && size > max_upload_) return error_response(413, "artifact exceeds upload limit");
            artifact = read_artifact(p);
        } else {
            return error_response(400, "expected artifact bytes or {\"path\": ...}");
        }
    } catch (const std::exception& e) {
        return error_response(400, std::string("invalid artifact: ") + e.what());
    }
    const std::string id = add(artifact);
    return {201, design_summary_json(id, artifact), "application/json"};
}

HttpResponse DesignService::oc(const std::string& id, const QueryParams& query) const {
    const auto a = find(id);
    if (!a) return error_response(404, "unknown design id '" + id + "'");
    try {
        const Thresholds t = query_thresholds(*a, query);
        const long n = query_long(query, "n", a->models.n_a);
        if (n <= 0) throw Unprocessable{"n: must be positive"};
        return json_response(200, oc_json(*a, n, t));
    } catch (const Unprocessable& u) {
        return error_response(422, u.message);
    }
}

HttpResponse DesignService::curves(const std::string& id, const QueryParams& query) const {
    const auto a = find(id);
    if (!a) return error_response(404, "unknown design id '" + id + "'");
    try {
        const Thresholds t = query_thresholds(*a, query);
        const long lo = query_long(query, "n_min", a->config.grid_lo);
        const long hi = query_long(query, "n_max", a->config.grid_hi);
        const long step = query_long(query, "step", a->config.grid_step);
        if (lo <= 0) throw Unprocessable{"n_min: must be positive"};
        if (hi < lo) throw Unprocessable{"n_max: below n_min"};
        if (step <= 0) throw Unprocessable{"step: must be positive"};
        if ((hi - lo) / step + 1 > static_cast<long>(kMaxCurvePoints)) throw Unprocessable{"step: too many grid points"};

        Json n_interim = Json::array(), n_final = Json::array(), fwer_sum = Json::array(), fwer_any = Json::array(),
             outside = Json::array();
        std::array<Json, 3> power{Json::array(), Json::array(), Json::array()};
        std::array<Json, 4> sets{Json::array(), Json::array(), Json::array(), Json::array()};
        for (long n = lo; n <= hi; n += step) {
            const OperatingCharacteristics oc = evaluate(extrapolate(a->models, n), t);
            n_interim.push_back(oc.n_interim);
            n_final.push_back(oc.n_final);
            for (std::size_t j = 0; j < 3; ++j) power[j].push_back(oc.power[j]);
            fwer_sum.push_back(oc.fwer_sum);
            fwer_any.push_back(oc.fwer_any);
            for (std::size_t s = 0; s < 4; ++s) sets[s].push_back(oc.set_probs[s]);
            outside.push_back(oc.outside_validity_window);
        }
        Json set_probs = Json::object();
        for (std::size_t s = 0; s < 4; ++s) set_probs[ActiveSet::from_index(static_cast<int>(s)).to_string()] = sets[s];
        const ValidityWindow w = a->models.validity_window();
        return json_response(200, Json{{"n_interim", std::move(n_interim)},
                                       {"n_final", std::move(n_final)},
                                       {"power", {{"1", power[0]}, {"2", power[1]}, {"3", power[2]}}},
                                       {"fwer_sum", std::move(fwer_sum)},
                                       {"fwer_any", std::move(fwer_any)},
                                       {"set_probs", std::move(set_probs)},
                                       {"outside_validity_window", std::move(outside)},
                                       {"validity_window", {{"lo", w.lo}, {"hi", w.hi}}},
                                       {"thresholds", to_json(t)},
                                       {"scenario", a->models.scenario},
                                       {"hypothesis", to_string(a->models.hypothesis)}});
    } catch (const Unprocessable& u) {
        return error_response(422, u.message);
    }
}

void serve(DesignService& service, const std::string& host, int port) {
    httplib::Server server;
    server.set_payload_max_length(service.max_upload());
    server.set_pre_routing_handler([&service](const httplib::Request& req, httplib::Response& res) {
        QueryParams q(req.params.begin(), req.params.end());
        const HttpResponse r = service.handle(req.method, req.path, q, req.body);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
        res.set_header("Access-Control-Allow-Origin", service.cors_origin());
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        return httplib::Server::HandlerResponse::Handled;
    });
    if (!server.listen(host, port)) throw IoError("cannot listen on " + host + ":" + std::to_string(port));
}

}  // namespace platdesign
