/*
 * Copyright 2026 The Exposition Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "exposition/arena.h"

#include <algorithm>
#include <mutex>
#include <set>

#include "exposition/dispatch.h"
#include "exposition/error.h"
#include "httplib.h"

namespace exposition {
namespace {

constexpr std::uint64_t kDefaultSeed = 42;

Json empty_state() {
  return {{"version", std::string(kStateVersion)},
          {"charts", Json::array()},
          {"pinned", Json::array()},
          {"layout", Json::array()}};
}

Json canonical_params(const Json& params) {
  return params.is_null() ? Json::object() : params;
}

HttpResponse json_response(int status, const Json& body) {
  return {status, body.dump(-1, ' ', false, Json::error_handler_t::replace)};
}

HttpResponse error_response(int status, const std::string& message,
                            Json extra = Json::object()) {
  extra["error"] = message;
  return json_response(status, extra);
}

Json fields_json(const std::map<std::string, std::string>& fields) {
  Json out = Json::object();
  for (const auto& [k, v] : fields) out[k] = v;
  return out;
}

bool is_seed(const Json& value) {
  return value.is_number_unsigned() ||
         (value.is_number_integer() && value.get<long long>() >= 0);
}

}  // namespace

StateConflict::StateConflict(std::vector<std::string> unresolved)
    : Error("StateConflict",
            [&unresolved] {
              std::string message = "state references unknown models:";
              for (const auto& u : unresolved) message += " " + u;
              return message;
            }()),
      unresolved_(std::move(unresolved)) {}

Arena::Arena(std::vector<std::shared_ptr<const Explainer>> explainers)
    : explainers_(std::move(explainers)), state_(empty_state()) {
  if (explainers_.empty()) throw ParameterError("arena needs at least one model");
  std::set<std::string> labels;
  for (const auto& e : explainers_) {
    if (!labels.insert(e->label()).second) {
      throw ParameterError("duplicate model label '" + e->label() + "'");
    }
    if (&e->data() != &explainers_.front()->data()) {
      throw ParameterError("all models must share one dataset");
    }
  }
}

const Explainer* Arena::find(std::string_view label) const {
  for (const auto& e : explainers_) {
    if (e->label() == label) return e.get();
  }
  return nullptr;
}

Json Arena::info() const {
  const Dataset& data = explainers_.front()->data();
  Json models = Json::array();
  for (const auto& e : explainers_) models.push_back(e->label());
  Json columns = Json::array();
  for (const auto& column : data.schema()) {
    Json entry = {{"name", column.name},
                  {"kind", std::string(column_kind_name(column.kind))},
                  {"role", column.name == data.target() ? "target" : "feature"}};
    if (!column.is_numeric()) entry["levels"] = column.levels;
    columns.push_back(std::move(entry));
  }
  Json tasks = Json::object();
  for (const auto& e : explainers_) {
    tasks[e->label()] = std::string(task_name(e->task()));
  }
  return {{"version", std::string(kVersion)},
          {"models", std::move(models)},
          {"tasks", std::move(tasks)},
          {"columns", std::move(columns)},
          {"n_rows", data.n_rows()},
          {"target", data.target() ? Json(*data.target()) : Json(nullptr)},
          {"charts", chart_catalog()}};
}

Json Arena::state() const {
  std::shared_lock lock(state_mutex_);
  return state_;
}

std::size_t Arena::cache_size() const {
  std::shared_lock lock(cache_mutex_);
  return cache_.size();
}

std::string Arena::compute(std::string_view kind, std::string_view label,
                           const Json& raw_params, std::uint64_t seed) {
  const Explainer* explainer = find(label);
  if (explainer == nullptr) throw UnknownModel(std::string(label));
  const Json params = canonical_params(raw_params);
  validate_params(kind, params);

  std::string key = std::string(label);
  key.append(1, '\0').append(kind).append(1, '\0');
  key.append(std::to_string(seed)).append(1, '\0').append(params.dump());

  std::string payload;
  {
    std::shared_lock lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) payload = it->second;
  }
  if (payload.empty()) {
    payload = serialize(compute_explanation(*explainer, kind, params, seed));
    std::unique_lock lock(cache_mutex_);
    cache_.emplace(key, payload);
  }
  record_chart(std::string(kind), std::string(label), params, seed);
  return payload;
}

void Arena::record_chart(const std::string& kind, const std::string& label,
                         const Json& params, std::uint64_t seed) {
  std::unique_lock lock(state_mutex_);
  for (Json& chart : state_["charts"]) {
    if (chart["kind"] == kind && chart["params"] == params &&
        chart["seed"] == seed) {
      Json& models = chart["models"];
      if (std::find(models.begin(), models.end(), label) == models.end()) {
        models.push_back(label);
      }
      return;
    }
  }
  state_["charts"].push_back(
      {{"kind", kind}, {"models", {label}}, {"params", params}, {"seed", seed}});
}

Json Arena::load_state(const Json& document) {
  std::map<std::string, std::string> problems;
  std::vector<std::string> unresolved;
  if (!document.is_object()) {
    throw InvalidParameters(
        std::map<std::string, std::string>{{"state", "must be an object"}});
  }
  const std::size_t n_rows = explainers_.front()->data().n_rows();
  Json out = empty_state();
  for (const auto& [key, value] : document.items()) {
    if (key != "version" && key != "charts" && key != "pinned" &&
        key != "layout") {
      problems[key] = "is not a state field";
    }
  }
  if (document.contains("version") &&
      document["version"] != std::string(kStateVersion)) {
    problems["version"] = "unsupported state version (expected \"" +
                          std::string(kStateVersion) + "\")";
  }

  if (document.contains("charts")) {
    const Json& charts = document["charts"];
    if (!charts.is_array()) {
      problems["charts"] = "must be an array";
    } else {
      for (std::size_t i = 0; i < charts.size(); ++i) {
        const Json& c = charts[i];
        const std::string at = "charts[" + std::to_string(i) + "]";
        if (!c.is_object()) {
          problems[at] = "must be an object";
          continue;
        }
        for (const auto& [key, value] : c.items()) {
          if (key != "kind" && key != "models" && key != "params" &&
              key != "seed") {
            problems[at + "." + key] = "is not a chart field";
          }
        }
        Json chart = {{"params", canonical_params(c.value("params", Json()))},
                      {"seed", kDefaultSeed}};
        if (!c.contains("kind") || !c["kind"].is_string() ||
            !is_chart_kind(c["kind"].get<std::string>())) {
          problems[at + ".kind"] = "must be a chart kind";
        } else {
          chart["kind"] = c["kind"];
          try {
            validate_params(chart["kind"].get<std::string>(), chart["params"]);
            if (chart["params"].contains("instance") &&
                chart["params"]["instance"].get<std::size_t>() >= n_rows) {
              problems[at + ".params.instance"] = "row out of range";
            }
          } catch (const InvalidParameters& e) {
            for (const auto& [field, problem] : e.fields()) {
              problems[at + ".params." + field] = problem;
            }
          }
        }
        if (c.contains("seed")) {
          if (is_seed(c["seed"])) {
            chart["seed"] = c["seed"].get<std::uint64_t>();
          } else {
            problems[at + ".seed"] = "must be a non-negative integer";
          }
        }
        const Json models = c.value("models", Json());
        if (!models.is_array() || models.empty() ||
            !std::all_of(models.begin(), models.end(),
                         [](const Json& m) { return m.is_string(); })) {
          problems[at + ".models"] = "must be a non-empty array of labels";
        } else {
          for (const Json& m : models) {
            const auto label = m.get<std::string>();
            if (find(label) == nullptr &&
                std::find(unresolved.begin(), unresolved.end(), label) ==
                    unresolved.end()) {
              unresolved.push_back(label);
            }
          }
          chart["models"] = models;
        }
        out["charts"].push_back(std::move(chart));
      }
    }
  }

  if (document.contains("pinned")) {
    const Json& pinned = document["pinned"];
    if (!pinned.is_array()) {
      problems["pinned"] = "must be an array";
    } else {
      for (std::size_t i = 0; i < pinned.size(); ++i) {
        const Json& p = pinned[i];
        const std::string at = "pinned[" + std::to_string(i) + "]";
        if (!p.is_object() || !p.contains("row") || !is_seed(p["row"]) ||
            p["row"].get<std::uint64_t>() >= n_rows) {
          problems[at + ".row"] = "must be a valid row index";
          continue;
        }
        const Json overrides = p.value("overrides", Json::object());
        if (!overrides.is_object()) {
          problems[at + ".overrides"] = "must be an object";
          continue;
        }
        try {
          const Explainer& e = *explainers_.front();
          apply_overrides(e, instance_from_row(e, p["row"].get<std::size_t>()),
                          overrides);
        } catch (const Error& e) {
          problems[at + ".overrides"] = e.what();
          continue;
        }
        out["pinned"].push_back({{"row", p["row"]}, {"overrides", overrides}});
      }
    }
  }

  if (document.contains("layout")) {
    if (!document["layout"].is_array()) {
      problems["layout"] = "must be an array";
    } else {
      out["layout"] = document["layout"];
    }
  }

  if (!unresolved.empty()) throw StateConflict(std::move(unresolved));
  if (!problems.empty()) throw InvalidParameters(std::move(problems));
  std::unique_lock lock(state_mutex_);
  state_ = out;
  return out;
}

HttpResponse Arena::handle(std::string_view method, std::string_view path,
                           std::string_view body) {
  auto parse_body = [&body]() -> std::optional<Json> {
    try {
      return Json::parse(body);
    } catch (const Json::exception&) {
      return std::nullopt;
    }
  };
  try {
    if (path == "/api/info") {
      if (method != "GET") return error_response(405, "method not allowed");
      return json_response(200, info());
    }
    if (path == "/api/charts") {
      if (method != "GET") return error_response(405, "method not allowed");
      return json_response(200, chart_catalog());
    }
    if (path == "/api/state") {
      if (method == "GET") return json_response(200, state());
      if (method != "PUT") return error_response(405, "method not allowed");
      const auto document = parse_body();
      if (!document) return error_response(400, "body is not valid JSON");
      return json_response(200, load_state(*document));
    }
    if (path == "/api/compute") {
      if (method != "POST") return error_response(405, "method not allowed");
      const auto request = parse_body();
      if (!request) return error_response(400, "body is not valid JSON");
      if (!request->is_object()) {
        return error_response(400, "request must be a JSON object");
      }
      std::map<std::string, std::string> fields;
      const Json kind = request->value("kind", Json());
      const Json model = request->value("model", Json());
      const Json seed = request->value("seed", Json(kDefaultSeed));
      if (!kind.is_string() || !is_chart_kind(kind.get<std::string>())) {
        fields["kind"] = "must be a chart kind";
      }
      if (!model.is_string()) fields["model"] = "must be a model label";
      if (!is_seed(seed)) fields["seed"] = "must be a non-negative integer";
      for (const auto& [key, value] : request->items()) {
        if (key != "kind" && key != "model" && key != "params" &&
            key != "seed") {
          fields[key] = "is not a request field";
        }
      }
      if (!fields.empty()) throw InvalidParameters(std::move(fields));
      HttpResponse response;
      response.body = compute(kind.get<std::string>(), model.get<std::string>(),
                              request->value("params", Json()),
                              seed.get<std::uint64_t>());
      return response;
    }
    return error_response(404, "no such endpoint");
  } catch (const UnknownModel& e) {
    return error_response(404, e.what());
  } catch (const StateConflict& e) {
    return error_response(409, e.what(), {{"unresolved", e.unresolved()}});
  } catch (const InvalidParameters& e) {
    return error_response(422, e.what(), {{"fields", fields_json(e.fields())}});
  } catch (const TimeoutError& e) {
    return error_response(504, e.what(), {{"kind", e.kind()}});
  } catch (const ProtocolError& e) {
    return error_response(502, e.what(), {{"kind", e.kind()}});
  } catch (const Error& e) {
    return error_response(422, e.what(), {{"kind", e.kind()}});
  } catch (const std::exception& e) {
    return error_response(500, e.what());
  }
}

struct ArenaServer::Impl {
  Arena& arena;
  httplib::Server server;
  explicit Impl(Arena& a) : arena(a) {}
};

ArenaServer::ArenaServer(Arena& arena, std::string ui_dir)
    : impl_(std::make_unique<Impl>(arena)) {
  httplib::Server& server = impl_->server;
  // SO_REUSEADDR only: the library default also sets SO_REUSEPORT, which
  // would let a second service silently share an occupied port.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    ::setsockopt(sock, SOL_SOCKET, SO_REUSEADDR,
                 reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  server.set_default_headers(
      {{"Access-Control-Allow-Origin", "*"},
       {"Access-Control-Allow-Methods", "GET, POST, PUT, OPTIONS"},
       {"Access-Control-Allow-Headers", "Content-Type"}});
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = impl_->arena.handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  for (const char* path :
       {"/api/info", "/api/charts", "/api/compute", "/api/state"}) {
    server.Get(path, route);
    server.Post(path, route);
    server.Put(path, route);
  }
  server.Options(R"(/api/.*)", [](const httplib::Request&,
                                  httplib::Response& res) { res.status = 204; });
  if (!ui_dir.empty() && server.set_mount_point("/", ui_dir)) return;
  server.Get("/", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(
        "<!doctype html><title>exposition</title>"
        "<p>The dashboard UI is not installed. The API is served under "
        "<a href=\"/api/info\">/api/info</a>.</p>",
        "text/html");
  });
}

ArenaServer::~ArenaServer() { stop(); }

int ArenaServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

void ArenaServer::listen() { impl_->server.listen_after_bind(); }

void ArenaServer::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace exposition
