#include <doctest.h>

#include <atomic>
#include <chrono>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "tir/backend.hpp"
#include "tir/error.hpp"
#include "tir/hashing.hpp"

using tir::ChatMessage;
using tir::Role;

namespace {

std::vector<ChatMessage> ask(std::string text) { return {{Role::user, std::move(text)}}; }

/// httplib server on an ephemeral port, stopped on destruction.
class LocalServer {
 public:
  LocalServer() { port_ = server_.bind_to_any_port("127.0.0.1"); }
  ~LocalServer() {
    server_.stop();
    if (thread_.joinable()) thread_.join();
  }
  httplib::Server& server() { return server_; }
  void start() {
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

 private:
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
};

std::string completion(const std::string& content) {
  return nlohmann::json{{"choices", {{{"message", {{"role", "assistant"}, {"content", content}}}}}}}.dump();
}

}  // namespace

TEST_CASE("mock answers by substring of the last message") {
  tir::MockBackend mock(tir::parse_mock("ON 2+2 REPLY <<<\n\\boxed{4}\n>>>\n"));
  CHECK(mock.chat(ask("what is 2+2?"), {}) == "\\boxed{4}");
  const std::vector<ChatMessage> convo = {{Role::user, "2+2"}, {Role::assistant, "x"}, {Role::tool, "other"}};
  CHECK_THROWS_AS(mock.chat(convo, {}), tir::MockScriptError);
}

TEST_CASE("mock script format") {
  const auto s = tir::parse_mock(
      "# comment\n\nON alpha REPLY <<<\nline 1\n\nline 3\n>>>\nON #2 REPLY <<<\n>>>\n"
      "ON beta ERROR <<<\nquota exceeded\n>>>\n");
  REQUIRE(s.rules.size() == 3);
  CHECK(s.rules[0].pattern == "alpha");
  CHECK(s.rules[0].reply == "line 1\n\nline 3");
  CHECK(s.rules[0].line == 3);
  CHECK(s.rules[1].kind == tir::MockRule::Kind::position);
  CHECK(s.rules[1].position == 2);
  CHECK(s.rules[1].reply.empty());
  CHECK(s.rules[2].error);
  CHECK(tir::parse_mock("").rules.empty());

  const auto line_of = [](const char* text) -> std::size_t {
    try {
      tir::parse_mock(text);
    } catch (const tir::ParseError& e) {
      return e.line();
    }
    return 0;
  };
  CHECK(line_of("ON a REPLY <<<\nx\n") == 1);
  CHECK(line_of("\nON a REPLY <<<\nx\n>>>\nbogus\n") == 5);
  CHECK(line_of("ON  REPLY <<<\n>>>\n") == 1);
  CHECK(line_of("ON #0 REPLY <<<\n>>>\n") == 1);
}

TEST_CASE("mock positions, errors and ambiguity") {
  tir::MockBackend mock(tir::parse_mock(
      "ON #2 REPLY <<<\nsecond\n>>>\nON first REPLY <<<\none\n>>>\nON fail ERROR <<<\nbad gateway\n>>>\n"
      "ON dup REPLY <<<\na\n>>>\nON du REPLY <<<\nb\n>>>\n"));
  CHECK(mock.chat(ask("first"), {}) == "one");
  CHECK(mock.chat(ask("anything"), {}) == "second");
  try {
    mock.chat(ask("fail"), {});
    FAIL("expected a protocol error");
  } catch (const tir::ProtocolError& e) {
    CHECK(e.status() == 500);
    CHECK(e.server_message() == "bad gateway");
  }
  try {
    mock.chat(ask("dup"), {});
    FAIL("expected ambiguity");
  } catch (const tir::MockScriptError& e) {
    const std::string what = e.what();
    CHECK(what.find("'dup' (line 10)") != std::string::npos);
    CHECK(what.find("'du' (line 13)") != std::string::npos);
  }
  CHECK_THROWS_AS(mock.chat(ask("zzz"), {}), tir::MockScriptError);
  CHECK(mock.request_count() == 5);
}

TEST_CASE("empty mock script rejects every request") {
  tir::MockBackend mock(tir::parse_mock(""));
  CHECK_THROWS_AS(mock.chat(ask("x"), {}), tir::MockScriptError);
}

TEST_CASE("chat preconditions") {
  tir::MockBackend mock(tir::parse_mock("ON x REPLY <<<\ny\n>>>\n"));
  CHECK_THROWS_AS(mock.chat({}, {}), tir::PreconditionError);
  const std::vector<ChatMessage> ends_with_assistant = {{Role::user, "x"}, {Role::assistant, "y"}};
  CHECK_THROWS_AS(mock.chat(ends_with_assistant, {}), tir::PreconditionError);
  tir::GenerationParams hot;
  hot.temperature = 2.5;
  CHECK_THROWS_AS(mock.chat(ask("x"), hot), tir::PreconditionError);
  tir::GenerationParams p;
  p.max_tokens = 0;
  CHECK_THROWS_AS(mock.chat(ask("x"), p), tir::PreconditionError);
  CHECK(mock.chat(ask("x"), {}) == mock.chat(ask("x"), {}));
}

TEST_CASE("mock transcripts are deterministic") {
  const auto script = tir::parse_mock(
      "ON apple REPLY <<<\nA\n>>>\nON #3 REPLY <<<\nthird\n>>>\nON pear REPLY <<<\nP\n>>>\n");
  const auto transcript_hash = [&] {
    tir::MockBackend mock(script);
    for (const char* q : {"apple", "pear", "kiwi", "apple pie"}) mock.chat(ask(q), {});
    std::string all;
    for (const auto& e : mock.transcript()) all += std::to_string(e.sequence) + "\x1f" + e.request + "\x1f" + e.reply + "\x1e";
    return tir::sha256_hex(all);
  };
  const std::string first = transcript_hash();
  CHECK(first == transcript_hash());
  CHECK(first.size() == 64);
}

TEST_CASE("http backend speaks chat completions") {
  LocalServer srv;
  nlohmann::json seen;
  std::string auth;
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    seen = nlohmann::json::parse(req.body);
    auth = req.get_header_value("Authorization");
    res.set_content(completion("\\boxed{4}"), "application/json");
  });
  srv.server().Get("/v1/models", [](const httplib::Request&, httplib::Response& res) {
    res.set_content("{\"data\":[]}", "application/json");
  });
  srv.start();

  tir::HttpBackendConfig cfg;
  cfg.url = srv.url();
  cfg.api_key = "sk-test";
  tir::HttpBackend backend(cfg);
  CHECK_NOTHROW(backend.probe());

  tir::GenerationParams params;
  params.model_name = "qwen";
  params.temperature = 0.7;
  params.seed = 11;
  const std::vector<ChatMessage> msgs = {
      {Role::system, "s"}, {Role::user, "u"}, {Role::assistant, "a"}, {Role::tool, "Execution status: ok"}};
  CHECK(backend.chat(msgs, params) == "\\boxed{4}");
  CHECK(seen["model"] == "qwen");
  CHECK(seen["temperature"] == 0.7);
  CHECK(seen["max_tokens"] == 2048);
  CHECK(seen["seed"] == 11);
  REQUIRE(seen["messages"].size() == 4);
  CHECK(seen["messages"][0]["role"] == "system");
  CHECK(seen["messages"][2]["role"] == "assistant");
  CHECK(seen["messages"][3]["role"] == "user");
  CHECK(seen["messages"][3]["content"] == "Execution status: ok");
  CHECK(auth == "Bearer sk-test");
}

TEST_CASE("http backend accepts a full endpoint URL") {
  LocalServer srv;
  srv.server().Post("/api/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(completion("ok"), "application/json");
  });
  srv.start();
  tir::HttpBackendConfig cfg;
  cfg.url = srv.url().substr(0, srv.url().size() - 3) + "/api/chat/completions";
  tir::HttpBackend backend(cfg);
  CHECK(backend.chat(ask("x"), {}) == "ok");
}

TEST_CASE("http protocol errors carry the server message and are not retried") {
  LocalServer srv;
  std::atomic<int> calls{0};
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    ++calls;
    res.status = 429;
    res.set_content(R"({"error":{"message":"rate limited"}})", "application/json");
  });
  srv.start();
  tir::HttpBackendConfig cfg;
  cfg.url = srv.url();
  tir::HttpBackend backend(cfg);
  try {
    backend.chat(ask("x"), {});
    FAIL("expected a protocol error");
  } catch (const tir::ProtocolError& e) {
    CHECK(e.status() == 429);
    CHECK(e.server_message() == "rate limited");
  }
  CHECK(calls == 1);
}

TEST_CASE("malformed completion bodies are protocol errors") {
  LocalServer srv;
  srv.server().Post("/v1/chat/completions", [](const httplib::Request& req, httplib::Response& res) {
    res.set_content(req.body.find("nojson") != std::string::npos ? "<html>" : "{\"choices\":[]}", "text/plain");
  });
  srv.start();
  tir::HttpBackendConfig cfg;
  cfg.url = srv.url();
  tir::HttpBackend backend(cfg);
  CHECK_THROWS_AS(backend.chat(ask("nojson"), {}), tir::ProtocolError);
  CHECK_THROWS_AS(backend.chat(ask("empty"), {}), tir::ProtocolError);
}

TEST_CASE("transport failures are retried with backoff, then reported") {
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }  // closed again: connections are refused
  tir::HttpBackendConfig cfg;
  cfg.url = "http://127.0.0.1:" + std::to_string(port) + "/v1";
  cfg.retries = 2;
  cfg.initial_backoff = std::chrono::milliseconds(50);
  cfg.request_timeout = std::chrono::milliseconds(1000);
  tir::HttpBackend backend(cfg);
  CHECK_THROWS_AS(backend.probe(), tir::TransportError);

  const auto start = std::chrono::steady_clock::now();
  try {
    backend.chat(ask("x"), {});
    FAIL("expected a transport error");
  } catch (const tir::TransportError& e) {
    CHECK(std::string(e.what()).find("3 attempt") != std::string::npos);
  }
  const auto elapsed = std::chrono::steady_clock::now() - start;
  CHECK(elapsed >= std::chrono::milliseconds(150));  // 50 + 100 ms of backoff
  // Connect timeouts are enforced by select(); allow for scheduling jitter.
  CHECK(elapsed <= backend.time_budget() + std::chrono::milliseconds(200));
}

TEST_CASE("a hung server is bounded by the time budget") {
  LocalServer srv;
  srv.server().Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1500));
    res.set_content(completion("late"), "application/json");
  });
  srv.start();
  tir::HttpBackendConfig cfg;
  cfg.url = srv.url();
  cfg.retries = 1;
  cfg.initial_backoff = std::chrono::milliseconds(10);
  cfg.request_timeout = std::chrono::milliseconds(300);
  tir::HttpBackend backend(cfg);
  const auto start = std::chrono::steady_clock::now();
  CHECK_THROWS_AS(backend.chat(ask("x"), {}), tir::TransportError);
  CHECK(std::chrono::steady_clock::now() - start <= backend.time_budget() + std::chrono::milliseconds(200));
}

TEST_CASE("in-flight requests are capped") {
  LocalServer srv;
  std::atomic<int> active{0};
  std::atomic<int> peak{0};
  srv.server().new_task_queue = [] { return new httplib::ThreadPool(8); };
  srv.server().Post("/v1/chat/completions", [&](const httplib::Request&, httplib::Response& res) {
    const int now = ++active;
    int prev = peak.load();
    while (now > prev && !peak.compare_exchange_weak(prev, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(60));
    --active;
    res.set_content(completion("ok"), "application/json");
  });
  srv.start();
  tir::HttpBackendConfig cfg;
  cfg.url = srv.url();
  cfg.max_in_flight = 2;
  tir::HttpBackend backend(cfg);
  std::vector<std::thread> threads;
  for (int i = 0; i < 6; ++i) threads.emplace_back([&] { backend.chat(ask("x"), {}); });
  for (auto& t : threads) t.join();
  CHECK(peak.load() <= 2);
  CHECK(peak.load() >= 1);
}

TEST_CASE("http backend configuration errors") {
  tir::HttpBackendConfig cfg;
  CHECK_THROWS_AS(tir::HttpBackend{cfg}, tir::ConfigError);
  cfg.url = "localhost:8000";
  CHECK_THROWS_AS(tir::HttpBackend{cfg}, tir::ConfigError);
}
