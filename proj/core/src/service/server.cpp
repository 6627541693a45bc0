// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0

#include "climadash/service/server.hpp"

#include <atomic>
#include <charconv>
#include <thread>

#include <httplib.h>

#include "climadash/agent/commands.hpp"
#include "climadash/codegen.hpp"
#include "climadash/dashboard/widget_data.hpp"
#include "climadash/dsl/parser.hpp"
#include "climadash/error.hpp"
#include "climadash/kpi.hpp"
#include "climadash/timeutil.hpp"

namespace climadash::service {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kJson = "application/json";

constexpr std::string_view kPlaceholderPage = R"(<!doctype html>
<html><head><meta charset="utf-8"><title>ClimaDash</title></head>
<body>
<h1>ClimaDash</h1>
<p>The dashboard editor is not bundled with this build. Start the server with
<code>--static DIR</code> to serve it, or use the REST API under
<a href="/api/v1/model">/api/v1/model</a>.</p>
</body></html>
)";

void send(httplib::Response& res, int status, const ordered_json& body) {
  res.status = status;
  res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, const Error& e) {
  ordered_json body;
  body["error"] = to_string(e.kind());
  body["message"] = e.what();
  if (const auto* c = dynamic_cast<const dashboard::ConflictError*>(&e)) {
    body["current"] = dashboard::to_json(*c->current());
  }
  send(res, http_status(e.kind()), body);
}

// Runs a handler and maps failures to status codes.
template <typename Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_error(res, e);
  } catch (const json::exception& e) {
    send_error(res, Error(ErrorKind::kInvalid, e.what()));
  } catch (const std::exception& e) {
    send(res, 500, {{"error", "internal"}, {"message", e.what()}});
  }
}

json body_json(const httplib::Request& req) {
  if (req.body.empty()) return json::object();
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorKind::kInvalid, "request body is not valid JSON");
  return j;
}

std::optional<std::int64_t> query_int(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  auto text = req.get_param_value(name);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw Error(ErrorKind::kInvalid, std::string(name) + " must be an integer");
  }
  return v;
}

// Epoch milliseconds or an RFC 3339 timestamp.
std::optional<EpochMs> query_time(const httplib::Request& req, const char* name) {
  if (!req.has_param(name)) return std::nullopt;
  auto text = req.get_param_value(name);
  EpochMs v = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec == std::errc() && ptr == text.data() + text.size()) return v;
  if (auto t = parse_rfc3339(text)) return t;
  throw Error(ErrorKind::kInvalid,
              std::string(name) + " must be epoch milliseconds or RFC 3339");
}

int expected_version(const httplib::Request& req, const json& body) {
  if (body.is_object() && body.contains("expected_version")) {
    const auto& v = body["expected_version"];
    if (!v.is_number_integer()) throw Error(ErrorKind::kInvalid, "expected_version must be an integer");
    return v.get<int>();
  }
  if (auto v = query_int(req, "expected_version")) return static_cast<int>(*v);
  throw Error(ErrorKind::kInvalid, "expected_version is required");
}

std::optional<std::string> opt_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw Error(ErrorKind::kInvalid, std::string(key) + " must be a string");
  return j[key].get<std::string>();
}

std::optional<int> opt_int(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_number_integer()) {
    throw Error(ErrorKind::kInvalid, std::string(key) + " must be an integer");
  }
  return j[key].get<int>();
}

// PATCH body: flat or with nested "layout" / "config" objects.
dashboard::UpdateWidget update_from_json(std::string widget_id, const json& body) {
  if (!body.is_object()) throw Error(ErrorKind::kInvalid, "body must be an object");
  dashboard::UpdateWidget u;
  u.widget_id = std::move(widget_id);
  const json& layout = body.contains("layout") ? body["layout"] : body;
  const json& config = body.contains("config") ? body["config"] : body;
  if (!layout.is_object() || !config.is_object()) {
    throw Error(ErrorKind::kInvalid, "layout and config must be objects");
  }
  u.x = opt_int(layout, "x");
  u.y = opt_int(layout, "y");
  u.w = opt_int(layout, "w");
  u.h = opt_int(layout, "h");
  if (auto k = opt_string(body, "kind")) {
    u.kind = dashboard::parse_widget_kind(*k);
    if (!u.kind) throw Error(ErrorKind::kInvalid, "unknown widget kind '" + *k + "'");
  }
  u.title = opt_string(config, "title");
  u.color = opt_string(config, "color");
  if (auto w = opt_string(config, "window_override")) {
    u.window_override = dsl::Duration::parse(*w);
    if (!u.window_override) throw Error(ErrorKind::kInvalid, "bad window_override '" + *w + "'");
  }
  u.group_by_override = opt_string(config, "group_by_override");
  return u;
}

ordered_json dashboard_reply(const dashboard::DashboardPtr& d,
                             const std::optional<std::string>& widget_id = {}) {
  ordered_json j = dashboard::to_json(*d);
  if (widget_id) {
    if (const auto* w = d->find_widget(*widget_id)) j["widget"] = dashboard::to_json(*w);
  }
  return j;
}

}  // namespace

nlohmann::ordered_json model_to_json(const dsl::Model& model) {
  ordered_json j;
  j["model_hash"] = codegen::model_hash(model);
  auto entities = ordered_json::array();
  for (const auto& e : model.entities) {
    ordered_json ej;
    ej["name"] = e.name;
    auto fields = ordered_json::array();
    for (const auto& f : e.fields) {
      ordered_json fj;
      fj["name"] = f.name;
      fj["type"] = dsl::to_string(f.type.kind);
      if (f.type.kind == dsl::FieldKind::kEnum) fj["values"] = f.type.enum_values;
      if (f.unit) fj["unit"] = *f.unit;
      fj["optional"] = f.optional;
      fields.push_back(std::move(fj));
    }
    ej["fields"] = std::move(fields);
    auto axis = e.time_axis();
    ej["time_axis"] = axis ? ordered_json(e.fields[*axis].name) : ordered_json();
    entities.push_back(std::move(ej));
  }
  j["entities"] = std::move(entities);

  auto datasources = ordered_json::array();
  for (const auto& d : model.datasources) {
    datasources.push_back({{"name", d.name}, {"entity", d.entity}});
  }
  j["datasources"] = std::move(datasources);

  auto kpis = ordered_json::array();
  for (const auto& k : model.kpis) {
    ordered_json kj;
    kj["name"] = k.name;
    kj["source"] = k.source;
    kj["expr"] = dsl::print_expr(k.expr);
    if (k.window) kj["window"] = k.window->to_string();
    if (k.unit) kj["unit"] = *k.unit;
    if (k.target) kj["target"] = {{"cmp", dsl::to_string(k.target->cmp)}, {"bound", k.target->bound}};
    if (k.baseline) kj["baseline"] = *k.baseline;
    if (k.group_by) kj["group_by"] = *k.group_by;
    kpis.push_back(std::move(kj));
  }
  j["kpis"] = std::move(kpis);

  // Palette for source pickers, with the widget kind a drop would produce.
  auto sources = ordered_json::array();
  auto add_source = [&](const dashboard::SourceRef& ref) {
    auto cfg = dashboard::auto_configure(ref, model);
    sources.push_back({{"source", ref.to_string()}, {"default_kind", dashboard::to_string(cfg.kind)}});
  };
  for (const auto& d : model.datasources) add_source(dashboard::SourceRef::datasource(d.name));
  for (const auto& k : model.kpis) add_source(dashboard::SourceRef::kpi(k.name));
  j["sources"] = std::move(sources);
  return j;
}

struct Server::Impl {
  httplib::Server http;
  std::thread thread;
  int port = -1;
};

Server::Server(std::shared_ptr<const dsl::Model> model, ServiceOptions options)
    : model_(std::move(model)),
      options_(std::move(options)),
      data_(std::make_unique<ingestion::Store>(model_)),
      impl_(std::make_unique<Impl>()) {
  std::optional<fs::path> dash_dir;
  if (options_.data_dir) {
    startup_.replay = data_->open_journal(*options_.data_dir);
    dash_dir = *options_.data_dir / "dashboards";
  }
  dashboards_ = std::make_unique<dashboard::DashboardStore>(model_, dash_dir);
  startup_.dashboards_loaded = dashboards_->load(&startup_.dashboards_skipped);
  if (dashboards_->list().empty()) {
    auto doc = json::parse(codegen::generate_dashboard_config(*model_).content);
    doc.erase("_generator");
    auto d = dashboard::dashboard_from_json(doc);
    dashboards_->create(d.name, d.widgets, d.id);
    startup_.default_dashboard_created = true;
  }

  agent::RetrievalIndex initial;
  if (options_.corpus_dir) {
    initial = agent::RetrievalIndex::build(*options_.corpus_dir);
  } else if (options_.data_dir && fs::exists(*options_.data_dir / "index.json")) {
    initial = agent::RetrievalIndex::load(*options_.data_dir / "index.json");
  }
  startup_.passages = initial.size();
  startup_.index_warnings = initial.warnings();
  index_ = std::make_shared<const agent::RetrievalIndex>(std::move(initial));

  auto& http = impl_->http;
  if (options_.log) {
    http.set_logger([log = options_.log](const httplib::Request& req, const httplib::Response& res) {
      log(req.method + " " + req.path + " " + std::to_string(res.status));
    });
  }

  http.Post(R"(/api/v1/ingest/([^/]+))", [this](const httplib::Request& req,
                                                 httplib::Response& res) {
    guarded(res, [&] {
      const std::string ds = req.matches[1];
      if (!data_->has_datasource(ds)) {
        throw Error(ErrorKind::kNotFound, "no datasource '" + ds + "'");
      }
      ingestion::IngestResult result;
      auto type = req.get_header_value("Content-Type");
      if (type.rfind("text/csv", 0) == 0) {
        result = data_->ingest_csv(ds, req.body);
      } else {
        auto body = body_json(req);
        const json* records = &body;
        if (body.is_object() && body.contains("records")) records = &body["records"];
        if (!records->is_array()) {
          throw Error(ErrorKind::kInvalid, "expected a JSON array of records or {\"records\": [...]}");
        }
        std::vector<json> batch(records->begin(), records->end());
        result = data_->ingest_batch(ds, batch);
      }
      send(res, 200, result.to_json());
    });
  });

  http.Get(R"(/api/v1/data/([^/]+))", [this](const httplib::Request& req,
                                             httplib::Response& res) {
    guarded(res, [&] {
      const std::string ds = req.matches[1];
      ingestion::QueryRange range;
      range.from = query_int(req, "from");
      range.to = query_int(req, "to");
      if (auto limit = query_int(req, "limit")) {
        if (*limit < 0) throw Error(ErrorKind::kInvalid, "limit must not be negative");
        range.limit = static_cast<std::size_t>(*limit);
      }
      auto records = data_->query(ds, range);
      const dsl::Entity& e = *model_->entity_of(ds);
      auto rows = ordered_json::array();
      for (const auto& r : records) {
        auto row = ingestion::record_to_json(e, r);
        if (e.time_axis()) row["_t"] = r.t;
        rows.push_back(std::move(row));
      }
      send(res, 200, {{"datasource", ds}, {"count", records.size()}, {"records", std::move(rows)}});
    });
  });

  http.Get(R"(/api/v1/kpi/([^/]+))", [this](const httplib::Request& req,
                                            httplib::Response& res) {
    guarded(res, [&] {
      const std::string name = req.matches[1];
      const auto* k = model_->find_kpi(name);
      if (!k) throw Error(ErrorKind::kNotFound, "no KPI '" + name + "'");
      kpi::EvalOptions opts;
      opts.at = query_time(req, "at");
      if (req.has_param("window")) {
        opts.window_override = dsl::Duration::parse(req.get_param_value("window"));
        if (!opts.window_override) throw Error(ErrorKind::kInvalid, "bad window");
      }
      if (req.has_param("group_by")) opts.group_by_override = req.get_param_value("group_by");
      send(res, 200, kpi::evaluate_kpi(*k, *data_, opts).to_json());
    });
  });

  http.Get("/api/v1/dashboards", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] {
      auto arr = ordered_json::array();
      for (const auto& d : dashboards_->list()) arr.push_back(dashboard::to_json(*d));
      send(res, 200, {{"dashboards", std::move(arr)}});
    });
  });

  http.Post("/api/v1/dashboards", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto body = body_json(req);
      if (!body.is_object()) throw Error(ErrorKind::kInvalid, "body must be an object");
      std::vector<dashboard::Widget> widgets;
      if (body.contains("widgets")) {
        if (!body["widgets"].is_array()) throw Error(ErrorKind::kInvalid, "widgets must be an array");
        for (const auto& w : body["widgets"]) widgets.push_back(dashboard::widget_from_json(w));
      }
      auto d = dashboards_->create(opt_string(body, "name").value_or(""), std::move(widgets),
                                   opt_string(body, "id"));
      send(res, 201, dashboard_reply(d));
    });
  });

  http.Get(R"(/api/v1/dashboards/([^/]+))", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
    guarded(res, [&] { send(res, 200, dashboard_reply(dashboards_->get(req.matches[1].str()))); });
  });

  http.Put(R"(/api/v1/dashboards/([^/]+))", [this](const httplib::Request& req,
                                                   httplib::Response& res) {
    guarded(res, [&] {
      auto body = body_json(req);
      int expected = expected_version(req, body);
      auto current = dashboards_->get(req.matches[1].str());
      dashboard::ReplaceDashboard m;
      m.name = opt_string(body, "name").value_or(current->name);
      if (body.contains("widgets")) {
        if (!body["widgets"].is_array()) throw Error(ErrorKind::kInvalid, "widgets must be an array");
        for (const auto& w : body["widgets"]) m.widgets.push_back(dashboard::widget_from_json(w));
      } else {
        m.widgets = current->widgets;
      }
      send(res, 200, dashboard_reply(dashboards_->mutate(current->id, expected, m)));
    });
  });

  http.Delete(R"(/api/v1/dashboards/([^/]+))", [this](const httplib::Request& req,
                                                      httplib::Response& res) {
    guarded(res, [&] {
      auto body = body_json(req);
      std::optional<int> expected;
      if (body.contains("expected_version") || req.has_param("expected_version")) {
        expected = expected_version(req, body);
      }
      dashboards_->remove(req.matches[1].str(), expected);
      send(res, 200, {{"deleted", req.matches[1].str()}});
    });
  });

  http.Post(R"(/api/v1/dashboards/([^/]+)/widgets)", [this](const httplib::Request& req,
                                                            httplib::Response& res) {
    guarded(res, [&] {
      auto body = body_json(req);
      int expected = expected_version(req, body);
      dashboard::AddWidget m{dashboard::widget_spec_from_json(body)};
      auto d = dashboards_->mutate(req.matches[1].str(), expected, m);
      send(res, 201, dashboard_reply(d, d->widgets.back().id));
    });
  });

  http.Patch(R"(/api/v1/dashboards/([^/]+)/widgets/([^/]+))",
             [this](const httplib::Request& req, httplib::Response& res) {
               guarded(res, [&] {
                 auto body = body_json(req);
                 int expected = expected_version(req, body);
                 std::string wid = req.matches[2];
                 auto d = dashboards_->mutate(req.matches[1].str(), expected,
                                              update_from_json(wid, body));
                 send(res, 200, dashboard_reply(d, wid));
               });
             });

  http.Delete(R"(/api/v1/dashboards/([^/]+)/widgets/([^/]+))",
              [this](const httplib::Request& req, httplib::Response& res) {
                guarded(res, [&] {
                  auto body = body_json(req);
                  int expected = expected_version(req, body);
                  auto d = dashboards_->mutate(req.matches[1].str(), expected,
                                               dashboard::RemoveWidget{req.matches[2].str()});
                  send(res, 200, dashboard_reply(d));
                });
              });

  http.Get(R"(/api/v1/widgets/([^/]+)/data)", [this](const httplib::Request& req,
                                                     httplib::Response& res) {
    guarded(res, [&] {
      const std::string wid = req.matches[1];
      // Widget ids are unique within a dashboard; ?dashboard= picks one,
      // otherwise the first dashboard (by id) holding the widget answers.
      std::vector<dashboard::DashboardPtr> candidates;
      if (req.has_param("dashboard")) {
        candidates.push_back(dashboards_->get(req.get_param_value("dashboard")));
      } else {
        candidates = dashboards_->list();
      }
      for (const auto& d : candidates) {
        if (const auto* w = d->find_widget(wid)) {
          auto payload = dashboard::widget_data(*w, *data_, query_time(req, "at"));
          payload["dashboard"] = d->id;
          send(res, 200, payload);
          return;
        }
      }
      throw Error(ErrorKind::kNotFound, "no widget '" + wid + "'");
    });
  });

  http.Post("/api/v1/agent/command", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto body = body_json(req);
      auto utterance = opt_string(body, "utterance");
      if (!utterance) throw Error(ErrorKind::kInvalid, "utterance is required");
      auto id = opt_string(body, "dashboard_id").value_or("default");
      std::optional<EpochMs> at;
      if (body.contains("at")) {
        if (body["at"].is_number_integer()) {
          at = body["at"].get<EpochMs>();
        } else if (body["at"].is_string()) {
          at = parse_rfc3339(body["at"].get<std::string>());
        }
        if (!at) throw Error(ErrorKind::kInvalid, "at must be epoch milliseconds or RFC 3339");
      }
      auto reply = agent::run_utterance(*utterance, *dashboards_, id, *data_, at);
      int status = 200;
      if (reply.result && !reply.result->ok && reply.result->error) {
        status = http_status(*reply.result->error);
      }
      send(res, status, reply.to_json());
    });
  });

  http.Post("/api/v1/agent/ask", [this](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      auto body = body_json(req);
      auto question = opt_string(body, "question");
      if (!question) throw Error(ErrorKind::kInvalid, "question is required");
      int k = opt_int(body, "k").value_or(3);
      auto idx = index();
      auto results = idx->answer(*question, k);
      ordered_json out;
      out["question"] = *question;
      out["k"] = k;
      out["answer"] = agent::ExtractiveSynthesizer().synthesize(*question, results);
      out["results"] = agent::to_json(results);
      send(res, 200, out);
    });
  });

  http.Get("/api/v1/model", [this](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send(res, 200, model_to_json(*model_)); });
  });

  if (options_.static_dir) {
    if (!http.set_mount_point("/", options_.static_dir->string())) {
      throw Error(ErrorKind::kIo, "static directory " + options_.static_dir->string() + " not found");
    }
  } else {
    http.Get("/", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(std::string(kPlaceholderPage), "text/html; charset=utf-8");
    });
  }

  http.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
    if (res.status == 404 && res.body.empty()) {
      send(res, 404, {{"error", "not_found"}, {"message", "no route for " + req.method + " " + req.path}});
    }
  });
}

Server::~Server() { stop(); }

int Server::bind(const std::string& host, int port) {
  auto& http = impl_->http;
  bool ok = port == 0 ? (impl_->port = http.bind_to_any_port(host)) > 0
                      : http.bind_to_port(host, port);
  if (!ok) {
    throw Error(ErrorKind::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  if (port != 0) impl_->port = port;
  return impl_->port;
}

void Server::listen() {
  if (impl_->port < 0) throw Error(ErrorKind::kIo, "listen before bind");
  impl_->http.listen_after_bind();
}

int Server::start(const std::string& host, int port) {
  int bound = bind(host, port);
  impl_->thread = std::thread([this] { impl_->http.listen_after_bind(); });
  impl_->http.wait_until_ready();
  return bound;
}

void Server::stop() {
  if (!impl_) return;
  impl_->http.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

std::shared_ptr<const agent::RetrievalIndex> Server::index() const {
  return std::atomic_load(&index_);
}

void Server::set_index(agent::RetrievalIndex index) {
  std::atomic_store(&index_, std::shared_ptr<const agent::RetrievalIndex>(
                                 std::make_shared<const agent::RetrievalIndex>(std::move(index))));
}

}  // namespace climadash::service
