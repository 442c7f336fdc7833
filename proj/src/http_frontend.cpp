#include <atomic>
#include <cmath>

#include "httplib.h"

#include "deckcraft/deck_json.hpp"
#include "deckcraft/service.hpp"

namespace deckcraft {

namespace {

constexpr const char* kJson = "application/json";

int status_for(Errc code) {
    switch (code) {
    case Errc::unknown_presentation:
    case Errc::unknown_section:
    case Errc::unknown_slide:
    case Errc::unknown_element:
    case Errc::unknown_entry:
    case Errc::unknown_lineage:
    case Errc::unknown_version:
    case Errc::unknown_asset:
    case Errc::not_found: return 404;
    case Errc::revision_conflict:
    case Errc::store_locked: return 409;
    case Errc::provider_error: return 502;
    case Errc::storage_failure:
    case Errc::config_error: return 500;
    default: return 400;
    }
}

void send_json(httplib::Response& res, int status, const Json& body) {
    res.status = status;
    res.set_content(dump(body), kJson);
}

void send_error(httplib::Response& res, const Error& e) {
    send_json(res, status_for(e.code()),
              Json{{"code", code_name(e.code())}, {"message", e.what()}, {"details", e.details()}});
}

Error bad_field(const std::string& field, const std::string& what) {
    return Error(Errc::bad_request, "field '" + field + "' " + what, Json{{"field", field}});
}

Json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return Json::object();
    Json j;
    try {
        j = Json::parse(req.body);
    } catch (const Json::parse_error& e) {
        throw Error(Errc::bad_request, std::string("request body is not JSON: ") + e.what());
    }
    if (!j.is_object()) throw Error(Errc::bad_request, "request body must be a JSON object");
    return j;
}

std::string req_string(const Json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_string()) throw bad_field(key, "must be a string");
    return j[key].get<std::string>();
}

std::optional<std::string> opt_string(const Json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_string()) throw bad_field(key, "must be a string");
    return j[key].get<std::string>();
}

std::optional<long long> opt_int(const Json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    if (!j[key].is_number_integer()) throw bad_field(key, "must be an integer");
    return j[key].get<long long>();
}

std::optional<std::size_t> opt_position(const Json& j, const char* key = "position") {
    auto v = opt_int(j, key);
    if (!v) return std::nullopt;
    if (*v < 0)
        throw Error(Errc::position_out_of_range, "position must not be negative", Json{{"position", *v}});
    return static_cast<std::size_t>(*v);
}

std::optional<Seconds> opt_seconds(const Json& j, const char* key) {
    auto v = opt_int(j, key);
    if (!v) return std::nullopt;
    return Seconds(*v);
}

std::optional<Emphasis> opt_emphasis(const Json& j) {
    auto text = opt_string(j, "emphasis");
    if (!text) return std::nullopt;
    auto e = parse_emphasis(*text);
    if (!e) throw bad_field("emphasis", "must be one of none, low, medium, high");
    return e;
}

AudienceProfile audience_field(const Json& j) {
    try {
        return audience_from_json(j.at("audience"), "/audience");
    } catch (const Error& e) {
        throw Error(Errc::invalid_audience, e.what(), e.details());
    }
}

ElementSpec element_spec(const Json& j, const std::string& pointer) {
    if (!j.is_object()) throw bad_field(pointer, "must be an object");
    ElementSpec spec;
    auto kind = parse_element_kind(req_string(j, "kind"));
    if (!kind) throw bad_field(pointer + "/kind", "must be text or image");
    spec.kind = *kind;
    spec.content = req_string(j, "content");
    if (!j.contains("bounds")) throw bad_field(pointer + "/bounds", "is required");
    spec.bounds = bounds_from_json(j["bounds"], pointer + "/bounds");
    return spec;
}

std::vector<ElementSpec> element_specs(const Json& j, const char* key) {
    std::vector<ElementSpec> out;
    if (!j.contains(key) || j[key].is_null()) return out;
    if (!j[key].is_array()) throw bad_field(key, "must be a list");
    for (std::size_t i = 0; i < j[key].size(); ++i)
        out.push_back(element_spec(j[key][i], std::string("/") + key + "/" + std::to_string(i)));
    return out;
}

std::vector<std::string> string_list(const Json& j, const char* key) {
    std::vector<std::string> out;
    if (!j.contains(key) || j[key].is_null()) return out;
    if (!j[key].is_array()) throw bad_field(key, "must be a list of strings");
    for (const auto& v : j[key]) {
        if (!v.is_string()) throw bad_field(key, "must be a list of strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

std::optional<std::uint64_t> if_match(const httplib::Request& req, const Json& body) {
    std::string tag = req.get_header_value("If-Match");
    if (!tag.empty()) {
        if (tag.size() >= 2 && tag.front() == '"' && tag.back() == '"') tag = tag.substr(1, tag.size() - 2);
        try {
            std::size_t used = 0;
            auto v = std::stoull(tag, &used);
            if (used == tag.size()) return v;
        } catch (const std::exception&) {
        }
        throw Error(Errc::bad_request, "If-Match must carry a revision number");
    }
    if (auto rev = opt_int(body, "revision")) {
        if (*rev < 0) throw bad_field("revision", "must not be negative");
        return static_cast<std::uint64_t>(*rev);
    }
    return std::nullopt;
}

void send_presentation(httplib::Response& res, int status, const Versioned& v) {
    res.set_header("ETag", "\"" + std::to_string(v.revision) + "\"");
    send_json(res, status, to_json(Deck{kDeckSchemaVersion, v.presentation}));
}

Json to_json(const SavedValue& value) {
    return std::visit([](const auto& v) { return deckcraft::to_json(v); }, value);
}

Json timeline_json(const std::vector<TimelineEntry>& entries) {
    Json out = Json::array();
    for (const auto& e : entries)
        out.push_back(Json{{"section_id", e.section_id},
                           {"start_s", e.start.count()},
                           {"end_s", e.end.count()},
                           {"duration_s", e.duration.count()}});
    return Json{{"timeline", out}};
}

} // namespace

HttpFrontend::HttpFrontend(AuthoringService& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
    install_routes();
}

HttpFrontend::~HttpFrontend() { stop(); }

int HttpFrontend::bind(const std::string& host, int port) {
    if (port == 0) {
        int bound = server_->bind_to_any_port(host);
        if (bound < 0) throw Error(Errc::config_error, "cannot bind " + host);
        return bound;
    }
    if (!server_->bind_to_port(host, port))
        throw Error(Errc::config_error, "cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpFrontend::listen() { server_->listen_after_bind(); }

void HttpFrontend::stop() {
    if (server_->is_running()) server_->stop();
}

bool HttpFrontend::running() const { return server_->is_running(); }

void HttpFrontend::install_routes() {
    auto& s = *server_;
    AuthoringService& svc = service_;

    s.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        try {
            std::rethrow_exception(ep);
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const Json::exception& e) {
            send_error(res, Error(Errc::bad_request, e.what()));
        } catch (const std::exception& e) {
            send_error(res, Error(Errc::storage_failure, e.what()));
        }
    });
    s.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (res.status == 404 && res.body.empty())
            send_error(res, Error(Errc::not_found, "no route for " + req.method + " " + req.path));
    });

    s.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
        send_json(res, 200, Json{{"status", "ok"}});
    });

    // ---- presentations ----
    s.Post("/presentations", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        auto total = opt_seconds(b, "total_duration_s");
        if (!total) throw bad_field("total_duration_s", "is required");
        if (!b.contains("audience")) throw bad_field("audience", "is required");
        auto v = svc.create_presentation(req_string(b, "title"), *total, audience_field(b), opt_string(b, "topic"));
        send_presentation(res, 201, v);
    });
    s.Get(R"(/presentations/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        send_presentation(res, 200, svc.presentation(req.matches[1]));
    });
    s.Patch(R"(/presentations/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        PresentationPatch patch;
        patch.title = opt_string(b, "title");
        patch.total_duration = opt_seconds(b, "total_duration_s");
        if (b.contains("audience") && !b["audience"].is_null()) patch.audience = audience_field(b);
        patch.topic = opt_string(b, "topic");
        send_presentation(res, 200, svc.update_presentation(req.matches[1], patch, if_match(req, b)));
    });
    s.Get(R"(/presentations/([^/]+)/conflicts)", [&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, to_json(svc.conflicts(req.matches[1])));
    });
    s.Get(R"(/presentations/([^/]+)/timeline)", [&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, timeline_json(svc.timeline(req.matches[1])));
    });
    s.Get(R"(/presentations/([^/]+)/dirty-slides)", [&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, Json{{"slides", svc.dirty_slides(req.matches[1])}});
    });

    // ---- sections ----
    s.Post(R"(/presentations/([^/]+)/sections)", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        SectionSpec spec{req_string(b, "title"), opt_seconds(b, "duration_s"), opt_emphasis(b), opt_position(b)};
        send_json(res, 201, to_json(svc.add_section(req.matches[1], std::move(spec))));
    });
    s.Put(R"(/presentations/([^/]+)/section-order)", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        if (!b.contains("order")) throw bad_field("order", "is required");
        send_presentation(res, 200,
                          svc.reorder_sections(req.matches[1], string_list(b, "order"), if_match(req, b)));
    });
    s.Patch(R"(/sections/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        SectionPatch patch{opt_string(b, "title"), opt_seconds(b, "duration_s"), opt_emphasis(b)};
        send_json(res, 200, to_json(svc.update_section(req.matches[1], patch, if_match(req, b))));
    });

    // ---- slides ----
    s.Post(R"(/sections/([^/]+)/slides)", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        auto slide = svc.add_slide(req.matches[1], opt_string(b, "title"), element_specs(b, "elements"),
                                   opt_position(b));
        send_json(res, 201, to_json(slide));
    });
    s.Patch(R"(/slides/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        SlidePatch patch;
        if (b.contains("title")) patch.title = opt_string(b, "title");
        if (b.contains("edit_elements")) {
            if (!b["edit_elements"].is_array()) throw bad_field("edit_elements", "must be a list");
            for (std::size_t i = 0; i < b["edit_elements"].size(); ++i) {
                const Json& e = b["edit_elements"][i];
                std::string p = "/edit_elements/" + std::to_string(i);
                if (!e.is_object()) throw bad_field(p, "must be an object");
                ElementEdit edit;
                edit.content = opt_string(e, "content");
                if (e.contains("bounds") && !e["bounds"].is_null())
                    edit.bounds = bounds_from_json(e["bounds"], p + "/bounds");
                patch.edits.emplace_back(req_string(e, "id"), std::move(edit));
            }
        }
        patch.add_elements = element_specs(b, "add_elements");
        patch.remove_elements = string_list(b, "remove_elements");
        send_json(res, 200, to_json(svc.update_slide(req.matches[1], patch, if_match(req, b))));
    });
    s.Put(R"(/slides/([^/]+)/move)", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        auto position = opt_position(b);
        if (!position) throw bad_field("position", "is required");
        send_presentation(res, 200, svc.move_slide(req.matches[1], req_string(b, "section_id"), *position));
    });
    s.Get(R"(/slides/([^/]+)/diff)", [&svc](const httplib::Request& req, httplib::Response& res) {
        send_json(res, 200, to_json(svc.diff(req.matches[1])));
    });
    s.Post(R"(/slides/([^/]+)/sync)", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        send_json(res, 200, to_json(svc.sync(req.matches[1], sync_decision_from_json(b))));
    });
    s.Post(R"(/slides/([^/]+)/jargon-check)", [&svc](const httplib::Request& req, httplib::Response& res) {
        auto report = svc.check_jargon(req.matches[1]);
        send_json(res, 200,
                  Json{{"slide_id", report.slide_id},
                       {"text", report.text},
                       {"audience", to_json(report.audience)},
                       {"terms", to_json(report.terms)}});
    });
    s.Post(R"(/slides/([^/]+)/jargon-hide)", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        HideState state;
        if (b.value("reset", false)) state = svc.hide_jargon(req.matches[1], HideOp::Reset);
        else if (b.value("all", false)) state = svc.hide_jargon(req.matches[1], HideOp::All);
        else state = svc.hide_jargon(req.matches[1], HideOp::Term, req_string(b, "term"));
        send_json(res, 200, to_json(state));
    });

    // ---- repository ----
    s.Post("/repository/save", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        auto g = parse_granularity(req_string(b, "granularity"));
        if (!g) throw bad_field("granularity", "must be presentation, section or slide");
        send_json(res, 201, to_json(svc.save(*g, req_string(b, "id"))));
    });
    s.Get("/repository/search", [&svc](const httplib::Request& req, httplib::Response& res) {
        std::optional<Granularity> g;
        if (req.has_param("granularity") && !req.get_param_value("granularity").empty()) {
            g = parse_granularity(req.get_param_value("granularity"));
            if (!g) throw bad_field("granularity", "must be presentation, section or slide");
        }
        Json hits = Json::array();
        for (const auto& h : svc.search(req.get_param_value("q"), g)) hits.push_back(to_json(h));
        send_json(res, 200, Json{{"hits", hits}});
    });
    s.Post("/repository/import", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        std::optional<std::string> target;
        std::optional<std::size_t> position;
        if (b.contains("target") && b["target"].is_object()) {
            target = req_string(b["target"], "presentation_id");
            position = opt_position(b["target"]);
        } else if (b.contains("target") && !(b["target"].is_string() && b["target"] == "workspace") &&
                   !b["target"].is_null()) {
            throw bad_field("target", "must be \"workspace\" or {presentation_id, position}");
        }
        auto result = svc.import_entry(req_string(b, "entry_id"), target, position);
        Json out{{"granularity", to_string(result.granularity)},
                 {"presentation_id", result.presentation_id ? Json(*result.presentation_id) : Json()},
                 {"value", to_json(result.value)}};
        if (result.revision) res.set_header("ETag", "\"" + std::to_string(*result.revision) + "\"");
        send_json(res, 201, out);
    });
    s.Post("/repository/reuse-slide", [&svc](const httplib::Request& req, httplib::Response& res) {
        Json b = parse_body(req);
        auto version = opt_int(b, "version_index");
        if (!version) throw bad_field("version_index", "is required");
        auto slide = svc.reuse_slide(req_string(b, "lineage_id"), static_cast<int>(*version),
                                     req_string(b, "section_id"), opt_position(b));
        send_json(res, 201, to_json(slide));
    });
    s.Get(R"(/repository/entries/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        auto e = svc.repository().entry(req.matches[1]);
        if (!e) throw Error(Errc::unknown_entry, "no entry '" + std::string(req.matches[1]) + "'");
        send_json(res, 200, to_json(*e));
    });
    s.Get("/repository/entries", [&svc](const httplib::Request&, httplib::Response& res) {
        Json out = Json::array();
        for (const auto& e : svc.repository().entries())
            out.push_back(Json{{"entry_id", e.entry_id},
                               {"granularity", to_string(e.granularity)},
                               {"saved_at", format_timestamp(e.saved_at)}});
        send_json(res, 200, Json{{"entries", out}});
    });
    s.Get("/repository/lineages", [&svc](const httplib::Request&, httplib::Response& res) {
        Json out = Json::array();
        for (const auto& l : svc.repository().lineages())
            out.push_back(Json{{"lineage_id", l.lineage_id}, {"versions", l.size()}});
        send_json(res, 200, Json{{"lineages", out}});
    });
    s.Get(R"(/repository/lineages/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        auto l = svc.repository().lineage(req.matches[1]);
        if (!l) throw Error(Errc::unknown_lineage, "no lineage '" + std::string(req.matches[1]) + "'");
        send_json(res, 200, to_json(*l));
    });

    // ---- assets ----
    s.Post("/assets", [&svc](const httplib::Request& req, httplib::Response& res) {
        auto put = svc.put_asset(req.body);
        send_json(res, put.created ? 201 : 200, Json{{"hash", put.hash}, {"size", req.body.size()}});
    });
    s.Get(R"(/assets/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
        auto bytes = svc.asset(req.matches[1]);
        if (!bytes) throw Error(Errc::unknown_asset, "no asset '" + std::string(req.matches[1]) + "'");
        res.status = 200;
        res.set_content(*bytes, "application/octet-stream");
    });
}

} // namespace deckcraft
