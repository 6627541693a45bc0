// Copyright 2026 The ClimaDash Authors
// SPDX-License-Identifier: Apache-2.0
//
// climadash: check, generate, serve, ingest, kpi, ask, index, agent.
// Exit codes: 0 ok, 1 validation failure, 2 usage error, 3 I/O error.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "climadash/agent/commands.hpp"
#include "climadash/agent/retrieval.hpp"
#include "climadash/codegen.hpp"
#include "climadash/dsl/parser.hpp"
#include "climadash/error.hpp"
#include "climadash/kpi.hpp"
#include "climadash/service/server.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;
using namespace climadash;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

// Raised for bad flag values that CLI11 cannot check by itself.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  bool json = false;
  std::string model_path;
  std::string data_dir;
  std::string corpus_dir;
  std::string addr;
  std::string static_dir;
  std::string out_dir = ".";
  std::string only;
  std::string datasource;
  std::string input_file;
  std::string kpi_name;
  std::string at;
  std::string question;
  int k = 3;
  std::string dashboard_id;
  std::string utterance;
};

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return (v && *v) ? std::string(v) : fallback;
}

// Flag, then environment variable, then default.
std::string pick(const std::string& flag, const char* env, std::string fallback) {
  return flag.empty() ? env_or(env, std::move(fallback)) : flag;
}

int exit_code(ErrorKind kind) { return kind == ErrorKind::kIo ? kExitIo : kExitInvalid; }

void print_json(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

ordered_json diagnostics_json(const dsl::ValidationReport& report) {
  auto arr = ordered_json::array();
  for (const auto& d : report.diagnostics) {
    arr.push_back({{"code", d.code},
                   {"severity", d.severity == dsl::Severity::kError ? "error" : "warning"},
                   {"line", d.loc.line},
                   {"column", d.loc.column},
                   {"message", d.message}});
  }
  return arr;
}

void print_report(const Options& o, const dsl::ValidationReport& report) {
  auto errors = report.error_count();
  if (o.json) {
    print_json({{"file", o.model_path},
                {"valid", errors == 0},
                {"errors", errors},
                {"diagnostics", diagnostics_json(report)}});
    return;
  }
  std::cout << report.format(o.model_path);
  std::cout << errors << (errors == 1 ? " error" : " errors") << '\n';
}

// Loads the model or prints its diagnostics; nullptr means exit 1.
std::shared_ptr<const dsl::Model> load(const Options& o) {
  auto result = dsl::load_model_file(o.model_path);
  if (!result.ok()) {
    print_report(o, result.report);
    return nullptr;
  }
  return std::make_shared<const dsl::Model>(std::move(*result.model));
}

std::optional<EpochMs> parse_at(const std::string& text) {
  if (text.empty()) return std::nullopt;
  auto at = parse_rfc3339(text);
  if (!at) throw UsageError("--at must be an RFC 3339 timestamp, got '" + text + "'");
  return at;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

int cmd_check(const Options& o) {
  auto result = dsl::load_model_file(o.model_path);
  print_report(o, result.report);
  return result.ok() ? kExitOk : kExitInvalid;
}

int cmd_generate(const Options& o) {
  codegen::GenerationSelection selection = codegen::GenerationSelection::all();
  if (!o.only.empty()) {
    try {
      selection = codegen::GenerationSelection::parse(o.only);
    } catch (const Error& e) {
      throw UsageError(std::string("--only: ") + e.what());
    }
  }
  auto model = load(o);
  if (!model) return kExitInvalid;
  auto artifacts = codegen::generate_all(*model, selection);
  auto manifest = codegen::write_artifacts(artifacts, o.out_dir);
  if (o.json) {
    print_json(manifest.to_json());
  } else {
    std::cout << manifest.to_text();
  }
  return kExitOk;
}

service::Server* g_server = nullptr;

extern "C" void on_signal(int) {
  if (g_server) g_server->stop();
}

int cmd_serve(const Options& o) {
  auto model = load(o);
  if (!model) return kExitInvalid;
  std::string addr = pick(o.addr, "CLIMADASH_ADDR", "127.0.0.1:8080");
  auto colon = addr.rfind(':');
  if (colon == std::string::npos) throw UsageError("--addr must be HOST:PORT");
  std::string host = addr.substr(0, colon);
  int port = 0;
  try {
    port = std::stoi(addr.substr(colon + 1));
  } catch (const std::exception&) {
    throw UsageError("--addr must be HOST:PORT");
  }
  if (port < 0 || port > 65535) throw UsageError("port out of range");

  service::ServiceOptions opts;
  opts.data_dir = pick(o.data_dir, "CLIMADASH_DATA", "data");
  if (auto c = pick(o.corpus_dir, "CLIMADASH_CORPUS", ""); !c.empty()) opts.corpus_dir = c;
  if (!o.static_dir.empty()) opts.static_dir = o.static_dir;
  if (!o.json) opts.log = [](const std::string& line) { std::cerr << line << '\n'; };

  service::Server server(model, opts);
  const auto& s = server.startup();
  int bound = server.bind(host, port);
  if (o.json) {
    print_json({{"listening", host + ":" + std::to_string(bound)},
                {"replayed_records", s.replay.records},
                {"skipped_journal_lines", s.replay.skipped_lines},
                {"dashboards", s.dashboards_loaded},
                {"passages", s.passages}});
  } else {
    std::cout << "replayed " << s.replay.records << " records ("
              << s.replay.skipped_lines << " bad lines skipped), " << s.dashboards_loaded
              << " dashboards, " << s.passages << " passages\n";
    for (const auto& skip : s.dashboards_skipped) std::cerr << "skipped dashboard " << skip << '\n';
    for (const auto& w : s.index_warnings) std::cerr << "index: " << w << '\n';
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

int cmd_ingest(const Options& o) {
  auto model = load(o);
  if (!model) return kExitInvalid;
  ingestion::Store store(model);
  store.open_journal(pick(o.data_dir, "CLIMADASH_DATA", "data"));
  std::string text = read_file(o.input_file);
  ingestion::IngestResult result;
  if (fs::path(o.input_file).extension() == ".csv") {
    result = store.ingest_csv(o.datasource, text);
  } else {
    auto doc = nlohmann::json::parse(text, nullptr, false);
    if (doc.is_discarded()) throw Error(ErrorKind::kInvalid, o.input_file + " is not valid JSON");
    const nlohmann::json* records = &doc;
    if (doc.is_object() && doc.contains("records")) records = &doc["records"];
    if (!records->is_array()) throw Error(ErrorKind::kInvalid, "expected a JSON array of records");
    std::vector<nlohmann::json> batch(records->begin(), records->end());
    result = store.ingest_batch(o.datasource, batch);
  }
  if (o.json) {
    print_json(result.to_json());
  } else {
    std::cout << "accepted " << result.accepted << ", rejected " << result.rejected.size() << '\n';
    for (const auto& r : result.rejected) {
      std::cout << "  #" << r.ordinal << " " << r.error.field << ": " << r.error.message << '\n';
    }
  }
  return result.rejected.empty() ? kExitOk : kExitInvalid;
}

int cmd_kpi(const Options& o) {
  auto at = parse_at(o.at);
  auto model = load(o);
  if (!model) return kExitInvalid;
  const auto* k = model->find_kpi(o.kpi_name);
  if (!k) throw Error(ErrorKind::kNotFound, "no KPI '" + o.kpi_name + "'");
  ingestion::Store store(model);
  store.open_journal(pick(o.data_dir, "CLIMADASH_DATA", "data"));
  kpi::EvalOptions opts;
  opts.at = at;
  auto value = kpi::evaluate_kpi(*k, store, opts);
  // Always JSON; --json is accepted for uniformity.
  print_json(value.to_json());
  return value.status == kpi::Status::kError ? kExitInvalid : kExitOk;
}

std::shared_ptr<const agent::RetrievalIndex> open_index(const Options& o) {
  auto corpus = pick(o.corpus_dir, "CLIMADASH_CORPUS", "");
  if (!corpus.empty()) {
    return std::make_shared<const agent::RetrievalIndex>(agent::RetrievalIndex::build(corpus));
  }
  fs::path saved = fs::path(pick(o.data_dir, "CLIMADASH_DATA", "data")) / "index.json";
  if (fs::exists(saved)) {
    return std::make_shared<const agent::RetrievalIndex>(agent::RetrievalIndex::load(saved));
  }
  throw UsageError("no corpus: pass --corpus DIR, set CLIMADASH_CORPUS, or run 'climadash index'");
}

int cmd_ask(const Options& o) {
  if (o.k < 1) throw UsageError("-k must be at least 1");
  auto index = open_index(o);
  for (const auto& w : index->warnings()) std::cerr << "warning: " << w << '\n';
  auto results = index->answer(o.question, o.k);
  if (o.json) {
    print_json({{"question", o.question}, {"results", agent::to_json(results)}});
    return kExitOk;
  }
  if (results.empty()) {
    std::cout << "no matching passages\n";
    return kExitOk;
  }
  int rank = 1;
  for (const auto& r : results) {
    char score[32];
    std::snprintf(score, sizeof score, "%.4f", r.score);
    std::cout << rank++ << ". " << r.passage.doc_id << " #" << r.passage.ordinal << " (score "
              << score << ")\n";
    std::istringstream lines(r.passage.text);
    for (std::string line; std::getline(lines, line);) std::cout << "   " << line << '\n';
  }
  return kExitOk;
}

int cmd_index(const Options& o) {
  auto corpus = pick(o.corpus_dir, "CLIMADASH_CORPUS", "");
  if (corpus.empty()) throw UsageError("index needs --corpus DIR or CLIMADASH_CORPUS");
  auto index = agent::RetrievalIndex::build(corpus);
  fs::path out = fs::path(pick(o.data_dir, "CLIMADASH_DATA", "data")) / "index.json";
  index.save(out);
  if (o.json) {
    print_json({{"index", out.string()},
                {"passages", index.size()},
                {"avgdl", index.avgdl()},
                {"warnings", index.warnings()}});
  } else {
    for (const auto& w : index.warnings()) std::cerr << "warning: " << w << '\n';
    std::cout << "indexed " << index.size() << " passages into " << out.string() << '\n';
  }
  return kExitOk;
}

int cmd_agent(const Options& o) {
  auto at = parse_at(o.at);
  auto model = load(o);
  if (!model) return kExitInvalid;
  fs::path data = pick(o.data_dir, "CLIMADASH_DATA", "data");
  ingestion::Store store(model);
  store.open_journal(data);
  dashboard::DashboardStore dashboards(model, data / "dashboards");
  std::vector<std::string> skipped;
  dashboards.load(&skipped);
  for (const auto& s : skipped) std::cerr << "skipped dashboard " << s << '\n';

  auto reply = agent::run_utterance(o.utterance, dashboards, o.dashboard_id, store, at);
  if (o.json) {
    print_json(reply.to_json());
  } else if (reply.no_match) {
    std::cout << "not understood: " << reply.no_match->reason << '\n';
    for (const auto& s : reply.no_match->suggestions) std::cout << "  try: " << s << '\n';
  } else {
    std::cout << reply.result->message << '\n';
  }
  if (reply.ok()) return kExitOk;
  if (reply.result && reply.result->error) return exit_code(*reply.result->error);
  return kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ClimaDash: model-driven dashboards for city climate data", "climadash"};
  app.set_version_flag("--version", std::string(codegen::kToolVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("--json", o.json, "Machine-readable JSON output");

  auto* check = app.add_subcommand("check", "Validate a model file");
  check->add_option("model", o.model_path, "Model file (.cbm)")->required();

  auto* generate = app.add_subcommand("generate", "Generate schema, API description and dashboard");
  generate->add_option("model", o.model_path, "Model file (.cbm)")->required();
  generate->add_option("--only", o.only, "Comma-separated subset of schema,api,dashboard");
  generate->add_option("--out", o.out_dir, "Output root; files land in <out>/gen/")
      ->capture_default_str();

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("model", o.model_path, "Model file (.cbm)")->required();
  serve->add_option("--addr", o.addr, "HOST:PORT (env CLIMADASH_ADDR, default 127.0.0.1:8080)");
  serve->add_option("--data", o.data_dir, "Data directory (env CLIMADASH_DATA, default data)");
  serve->add_option("--corpus", o.corpus_dir, "Knowledge corpus (env CLIMADASH_CORPUS)");
  serve->add_option("--static", o.static_dir, "Editor bundle served at /");

  auto* ingest = app.add_subcommand("ingest", "Ingest a CSV or JSON file into a datasource");
  ingest->add_option("model", o.model_path, "Model file (.cbm)")->required();
  ingest->add_option("datasource", o.datasource, "Datasource name")->required();
  ingest->add_option("file", o.input_file, "Records (.csv, or .json array)")->required();
  ingest->add_option("--data", o.data_dir, "Data directory (env CLIMADASH_DATA, default data)");

  auto* kpi_cmd = app.add_subcommand("kpi", "Evaluate a KPI and print it as JSON");
  kpi_cmd->add_option("model", o.model_path, "Model file (.cbm)")->required();
  kpi_cmd->add_option("name", o.kpi_name, "KPI name")->required();
  kpi_cmd->add_option("--at", o.at, "Window end, RFC 3339 (default now)");
  kpi_cmd->add_option("--data", o.data_dir, "Data directory (env CLIMADASH_DATA, default data)");

  auto* ask = app.add_subcommand("ask", "Retrieve passages answering a question");
  ask->add_option("question", o.question, "Question text")->required();
  ask->add_option("--corpus", o.corpus_dir, "Knowledge corpus (env CLIMADASH_CORPUS)");
  ask->add_option("-k", o.k, "Number of passages")->capture_default_str();
  ask->add_option("--data", o.data_dir, "Where a saved index.json lives");

  auto* index = app.add_subcommand("index", "Build and save the retrieval index");
  index->add_option("--corpus", o.corpus_dir, "Knowledge corpus (env CLIMADASH_CORPUS)");
  index->add_option("--data", o.data_dir, "Data directory (env CLIMADASH_DATA, default data)");

  auto* agent_cmd = app.add_subcommand("agent", "Apply a natural-language dashboard command");
  agent_cmd->add_option("model", o.model_path, "Model file (.cbm)")->required();
  agent_cmd->add_option("dashboard", o.dashboard_id, "Dashboard id")->required();
  agent_cmd->add_option("utterance", o.utterance, "Command text")->required();
  agent_cmd->add_option("--at", o.at, "Evaluation time for show-value, RFC 3339");
  agent_cmd->add_option("--data", o.data_dir, "Data directory (env CLIMADASH_DATA, default data)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*check) return cmd_check(o);
    if (*generate) return cmd_generate(o);
    if (*serve) return cmd_serve(o);
    if (*ingest) return cmd_ingest(o);
    if (*kpi_cmd) return cmd_kpi(o);
    if (*ask) return cmd_ask(o);
    if (*index) return cmd_index(o);
    if (*agent_cmd) return cmd_agent(o);
  } catch (const UsageError& e) {
    std::cerr << "climadash: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    if (o.json) {
      print_json({{"error", to_string(e.kind())}, {"message", e.what()}});
    } else {
      std::cerr << "climadash: " << e.what() << '\n';
    }
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "climadash: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitUsage;
}
