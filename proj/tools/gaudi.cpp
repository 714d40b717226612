// gaudi: ingest image manifests, search them, generate mood-boards, and serve
// the HTTP API.
//
// Exit codes: 0 ok; 1 bad input, load or config failure; 2 provider failure;
// 3 empty candidate set; 4 no queries parsed; 64 usage error.

#include <atomic>
#include <chrono>
#include <csignal>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <thread>

#include "gaudi/board.hpp"
#include "gaudi/catalog.hpp"
#include "gaudi/config.hpp"
#include "gaudi/providers.hpp"
#include "gaudi/retrieval.hpp"
#include "gaudi/service.hpp"
#include "gaudi/story.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

namespace {

using namespace gaudi;

constexpr int kExitOk = 0;
constexpr int kExitInput = 1;
constexpr int kExitProvider = 2;
constexpr int kExitEmptyCandidates = 3;
constexpr int kExitNoQueries = 4;
constexpr int kExitUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(const Error& e) {
  switch (e.code()) {
    case ErrorCode::ProviderUnavailable:
    case ErrorCode::BadResponse:
    case ErrorCode::AuthFailure:
      return kExitProvider;
    case ErrorCode::EmptyCandidateSet:
      return kExitEmptyCandidates;
    case ErrorCode::NoQueriesFound:
      return kExitNoQueries;
    case ErrorCode::EmptyBriefing:
      return kExitUsage;
    default:
      return kExitInput;
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::InvalidInput, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Options shared by every subcommand; flags override config and env.
struct CommonFlags {
  std::string config_path;
  std::string provider;
  std::string store;
  std::string manifest;

  void add(CLI::App& cmd, bool with_store) {
    cmd.add_option("--config", config_path, "key=value config file");
    cmd.add_option("--provider", provider, "embedding provider")->check(CLI::IsMember({"mock", "remote"}));
    cmd.add_option("--manifest", manifest, "JSON Lines image manifest");
    if (with_store) cmd.add_option("--store", store, "GEMB embedding store");
  }

  Config resolve() const {
    Config c = config_path.empty() ? Config{} : load_config_file(config_path);
    apply_env(c);
    if (!provider.empty()) c.provider = provider;
    if (!store.empty()) c.store_path = store;
    if (!manifest.empty()) c.manifest_path = manifest;
    return c;
  }
};

std::unique_ptr<EmbedProvider> make_embedder(const Config& c, std::size_t dim) {
  if (c.provider == "remote") {
    if (c.embed_url.empty()) throw Error(ErrorCode::InvalidConfig, "remote provider needs GAUDI_EMBED_URL");
    return std::make_unique<RemoteEmbedder>(HttpEndpoint{c.embed_url}, dim);
  }
  return std::make_unique<MockEmbedder>(dim);
}

std::unique_ptr<CompletionProvider> make_completer(const Config& c) {
  if (!c.llm_fixture.empty()) return std::make_unique<MockCompleter>(MockCompleter::always(read_file(c.llm_fixture)));
  if (!c.llm_url.empty()) return std::make_unique<RemoteCompleter>(HttpEndpoint{c.llm_url}, llm_key(c));
  return nullptr;
}

StoryExample load_example(const std::string& path) {
  if (path.empty()) return coffee_brand_example();
  const auto doc = nlohmann::json::parse(read_file(path));
  return {doc.at("briefing").get<std::string>(), doc.at("queries").get<std::vector<std::string>>()};
}

Catalog load_catalog(const Config& c) {
  if (c.store_path.empty() || c.manifest_path.empty()) {
    throw UsageError("--store and --manifest are required");
  }
  const auto manifest = read_manifest_file(c.manifest_path);
  return load_store_file(c.store_path, manifest);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// ---------------------------------------------------------------------------

int run_ingest(const Config& c, std::optional<std::size_t> dim_flag, const std::string& out) {
  if (c.manifest_path.empty() || out.empty()) throw UsageError("--manifest and --out are required");
  const auto dim = dim_flag.value_or(c.dim);
  if (dim == 0) throw UsageError("--dim must be >= 1");
  const auto manifest = read_manifest_file(c.manifest_path);
  const auto embedder = make_embedder(c, dim);
  const auto catalog = ingest(manifest, *embedder);
  const auto bytes = write_store_file(catalog, out);

  nlohmann::ordered_json j;
  j["count"] = catalog.size();
  j["dim"] = catalog.dim();
  j["bytes"] = bytes;
  std::cout << j.dump() << '\n';
  return kExitOk;
}

int run_search(const Config& c, const std::string& text, std::size_t k, const std::string& exclude) {
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) throw UsageError("--text must not be empty");
  const auto catalog = load_catalog(c);
  const auto embedder = make_embedder(c, catalog.dim());
  const auto ids = split_csv(exclude);
  const auto hits = retrieve_text(catalog, embedder->embed_text(text), k, ExclusionSet(ids.begin(), ids.end()));
  for (const auto& h : hits) {
    nlohmann::ordered_json j;
    j["image_id"] = h.image_id;
    j["score"] = round_score(h.score);
    j["rank"] = h.rank;
    std::cout << j.dump() << '\n';
  }
  return kExitOk;
}

int run_board(const Config& c, const std::string& briefing, const std::string& mode,
              const std::string& example_path, std::size_t k_per_query) {
  if (briefing.find_first_not_of(" \t\r\n") == std::string::npos) throw UsageError("--briefing must not be empty");
  const auto llm = make_completer(c);
  if (!llm) throw UsageError("configure llm_url (or GAUDI_LLM_URL) or pass --fixture");
  const auto catalog = load_catalog(c);
  const auto embedder = make_embedder(c, catalog.dim());

  const auto plan = generate_queries(*llm, load_example(example_path), briefing, c.sampling, c.llm_model);
  const auto board = generate_board(catalog, *embedder, plan, parse_board_mode(mode), k_per_query);
  auto doc = board_to_json(board, catalog);
  doc["unfilled"] = board.unfilled;
  doc["plan"]["queries"] = plan.queries;
  doc["plan"]["raw_completion"] = plan.raw_completion;
  std::cout << doc.dump(2) << '\n';
  return kExitOk;
}

thread_local std::chrono::steady_clock::time_point request_start;

int run_serve(Config c, const std::string& bind_flag, const std::string& example_path) {
  if (!bind_flag.empty()) c.bind_addr = bind_flag;
  validate(c);
  const auto addr = parse_bind_addr(c.bind_addr);

  auto catalog = std::make_shared<const Catalog>(load_catalog(c));
  std::shared_ptr<const EmbedProvider> embedder = make_embedder(c, catalog->dim());
  std::shared_ptr<const CompletionProvider> llm = make_completer(c);

  ServiceOptions options;
  options.session_ttl = std::chrono::seconds(c.session_ttl_seconds);
  options.model_id = c.llm_model;
  options.sampling = c.sampling;
  options.example = load_example(example_path);
  options.image_root = !c.image_root.empty()
                           ? c.image_root
                           : std::filesystem::path(c.manifest_path).parent_path().string();
  Service service(embedder, llm, options);
  service.set_catalog(catalog);

  // Handle termination on a dedicated thread; worker threads inherit the mask.
  // A launcher may have set SIGINT to ignored, which would discard it before
  // sigwait sees it.
  std::signal(SIGINT, SIG_DFL);
  std::signal(SIGTERM, SIG_DFL);
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  httplib::Server server;
  // httplib defaults to SO_REUSEPORT, which lets a second server share a busy
  // port silently. Plain SO_REUSEADDR keeps restarts quick and still fails.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  server.set_pre_routing_handler([](const httplib::Request&, httplib::Response&) {
    request_start = std::chrono::steady_clock::now();
    return httplib::Server::HandlerResponse::Unhandled;
  });
  server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
    const auto ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - request_start);
    std::clog << req.method << ' ' << req.path << ' ' << res.status << ' ' << ms.count() << "ms\n";
  });
  service.mount(server);
  if (!c.static_dir.empty() && !server.set_mount_point("/", c.static_dir)) {
    throw Error(ErrorCode::InvalidConfig, "static_dir does not exist: " + c.static_dir);
  }

  errno = 0;
  int port = addr.port;
  bool bound = false;
  if (port == 0) {
    port = server.bind_to_any_port(addr.host);
    bound = port > 0;
  } else {
    bound = server.bind_to_port(addr.host, port);
  }
  if (!bound) {
    std::cerr << "gaudi: cannot bind " << c.bind_addr << ": "
              << (errno != 0 ? std::strerror(errno) : "address unavailable") << '\n';
    return kExitInput;
  }

  std::thread([&server, signals] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.stop();
  }).detach();

  std::cout << "listening on " << addr.host << ':' << port << std::endl;
  server.listen_after_bind();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaudi: cross-modal image search and mood-board generation"};
  app.require_subcommand(1);

  CommonFlags ingest_flags, search_flags, board_flags, serve_flags;

  auto* ingest_cmd = app.add_subcommand("ingest", "embed a manifest into a GEMB store");
  ingest_flags.add(*ingest_cmd, false);
  std::string out_path;
  std::optional<std::size_t> dim;
  ingest_cmd->add_option("--out", out_path, "output store path");
  ingest_cmd->add_option("--dim", dim, "embedding dimension");

  auto* search_cmd = app.add_subcommand("search", "text search; prints hits as JSON Lines");
  search_flags.add(*search_cmd, true);
  std::string text, exclude;
  std::size_t k = 10;
  search_cmd->add_option("--text", text, "query text")->required();
  search_cmd->add_option("-k", k, "number of hits")->check(CLI::PositiveNumber);
  search_cmd->add_option("--exclude", exclude, "comma-separated ids to exclude");

  auto* board_cmd = app.add_subcommand("board", "generate a mood-board from a briefing");
  board_flags.add(*board_cmd, true);
  std::string briefing, mode = "text", fixture, example;
  std::size_t k_per_query = 1;
  board_cmd->add_option("--briefing", briefing, "project briefing")->required();
  board_cmd->add_option("--mode", mode, "text or chain")->check(CLI::IsMember({"text", "chain"}));
  board_cmd->add_option("--fixture", fixture, "completion file used instead of the LLM");
  board_cmd->add_option("--example", example, "JSON {briefing, queries} single-shot example");
  board_cmd->add_option("--k-per-query", k_per_query, "images per query")->check(CLI::PositiveNumber);

  auto* serve_cmd = app.add_subcommand("serve", "run the HTTP API");
  serve_flags.add(*serve_cmd, true);
  std::string bind, serve_fixture, serve_example;
  serve_cmd->add_option("--bind", bind, "host:port");
  serve_cmd->add_option("--fixture", serve_fixture, "completion file used instead of the LLM");
  serve_cmd->add_option("--example", serve_example, "JSON {briefing, queries} single-shot example");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*ingest_cmd) return run_ingest(ingest_flags.resolve(), dim, out_path);
    if (*search_cmd) return run_search(search_flags.resolve(), text, k, exclude);
    if (*board_cmd) {
      auto c = board_flags.resolve();
      if (!fixture.empty()) c.llm_fixture = fixture;
      return run_board(c, briefing, mode, example, k_per_query);
    }
    if (*serve_cmd) {
      if (serve_flags.config_path.empty()) throw UsageError("serve needs --config");
      auto c = serve_flags.resolve();
      if (!serve_fixture.empty()) c.llm_fixture = serve_fixture;
      return run_serve(c, bind, serve_example);
    }
  } catch (const UsageError& e) {
    std::cerr << "gaudi: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "gaudi: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "gaudi: " << e.what() << '\n';
    return kExitInput;
  }
  return kExitUsage;
}
