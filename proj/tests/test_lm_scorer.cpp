#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <mutex>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "gecforge/lm_scorer.hpp"
#include "gecforge/ngram_lm.hpp"

using namespace gecforge;
using nlohmann::json;

namespace {

Sentence S(const char* t) { return Sentence::from_text(t); }

/// In-process stand-in for the bridge service. Scores a sentence as
/// -1.5 per whitespace token; rejects batches above `limit` with 413,
/// unparsable bodies with 400, and sentences containing "boom" with 500.
class StubBridge {
 public:
  StubBridge() {
    server_.Get("/health", [this](const httplib::Request&, httplib::Response& res) {
      res.set_content(json{{"model", "stub-lm"}, {"ready", ready.load()}}.dump(), "application/json");
    });
    server_.Post("/score", [this](const httplib::Request& req, httplib::Response& res) {
      {
        std::lock_guard lock(mu_);
        bodies.push_back(req.body);
      }
      json body;
      try {
        body = json::parse(req.body);
        body.at("sentences").get<std::vector<std::string>>();
      } catch (const json::exception&) {
        res.status = 400;
        res.set_content(R"({"error":"bad request"})", "application/json");
        return;
      }
      const auto sentences = body["sentences"].get<std::vector<std::string>>();
      if (sentences.size() > limit) {
        res.status = 413;
        res.set_content(R"({"error":"batch too large"})", "application/json");
        return;
      }
      json out = {{"logprobs", json::array()}};
      for (const auto& s : sentences) {
        if (s.find("boom") != std::string::npos) {
          res.status = 500;
          res.set_content(R"({"error":"model failure"})", "application/json");
          return;
        }
        out["logprobs"].push_back(-1.5 * static_cast<double>(Sentence::from_text(s).size()));
      }
      if (short_reply) out["logprobs"].erase(0);
      res.set_content(out.dump(), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubBridge() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

  std::atomic<bool> ready{true};
  std::size_t limit = 8;
  bool short_reply = false;
  std::vector<std::string> bodies;

 private:
  httplib::Server server_;
  std::thread thread_;
  std::mutex mu_;
  int port_ = 0;
};

}  // namespace

TEST_CASE("golden score request and response") {
  StubBridge stub;
  HttpLmScorer client(stub.url());
  auto lp = client.score_batch({S("He goes to school ."), S("Hi")});
  REQUIRE(stub.bodies.size() == 1);
  CHECK(stub.bodies[0] == R"({"sentences":["He goes to school .","Hi"]})");
  CHECK(lp == std::vector<double>{-7.5, -1.5});
}

TEST_CASE("golden health response") {
  StubBridge stub;
  HttpLmScorer client(stub.url());
  auto h = client.health();
  REQUIRE(h.has_value());
  CHECK(h->model == "stub-lm");
  CHECK(h->ready);
  stub.ready = false;
  CHECK_FALSE(client.health()->ready);
}

TEST_CASE("large batches are split client-side") {
  StubBridge stub;
  HttpLmScorer client(stub.url(), 4);
  std::vector<Sentence> batch;
  for (int i = 0; i < 10; ++i) batch.push_back(Sentence(std::vector<std::string>(static_cast<std::size_t>(i + 1), "w")));
  auto lp = client.score_batch(batch);
  CHECK(stub.bodies.size() == 3);
  REQUIRE(lp.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(lp[static_cast<std::size_t>(i)] == -1.5 * (i + 1));
  CHECK(client.score_batch(batch) == lp);
}

TEST_CASE("error statuses surface as scorer errors") {
  StubBridge stub;
  HttpLmScorer too_big(stub.url(), 64);
  std::vector<Sentence> many(9, S("a"));
  CHECK_THROWS_WITH_AS(too_big.score_batch(many), doctest::Contains("413"), ScorerError);
  HttpLmScorer client(stub.url());
  CHECK_THROWS_WITH_AS(client.score_batch({S("boom")}), doctest::Contains("500"), ScorerError);

  httplib::Client raw("127.0.0.1", std::stoi(stub.url().substr(stub.url().rfind(':') + 1)));
  auto res = raw.Post("/score", "{not json", "application/json");
  REQUIRE(res);
  CHECK(res->status == 400);

  stub.short_reply = true;
  CHECK_THROWS_WITH_AS(client.score_batch({S("a"), S("b")}), doctest::Contains("1 logprobs for 2"), ScorerError);
}

TEST_CASE("unreachable or unready bridges fall back to the local scorer") {
  auto local = std::make_shared<NGramScorer>(NGramModel::train({S("a b")}, 2, 1.0));
  int dead_port = 0;
  {
    StubBridge gone;
    dead_port = std::stoi(gone.url().substr(gone.url().rfind(':') + 1));
  }
  const std::string dead = "http://127.0.0.1:" + std::to_string(dead_port);
  CHECK(connect_scorer(dead, local) == local);
  CHECK_THROWS_AS(connect_scorer(dead, nullptr), ScorerError);

  StubBridge stub;
  stub.ready = false;
  CHECK(connect_scorer(stub.url(), local) == local);
  stub.ready = true;
  auto live = connect_scorer(stub.url(), local);
  CHECK(live != local);
  CHECK(live->name() == "bridge:" + stub.url());
  CHECK(connect_scorer("local", local) == local);
}

TEST_CASE("endpoint parsing and the environment override") {
  auto ep = parse_endpoint("http://example.org:8081/score");
  CHECK(ep.host == "example.org");
  CHECK(ep.port == 8081);
  CHECK(parse_endpoint("localhost").port == 80);
  CHECK_THROWS_AS(parse_endpoint("https://x:1"), std::invalid_argument);
  CHECK_THROWS_AS(parse_endpoint("http://:80"), std::invalid_argument);

  ::unsetenv("GEC_FORGE_SCORER_URL");
  CHECK(resolve_scorer_endpoint("local") == "local");
  ::setenv("GEC_FORGE_SCORER_URL", "http://127.0.0.1:9", 1);
  CHECK(resolve_scorer_endpoint("local") == "http://127.0.0.1:9");
  ::unsetenv("GEC_FORGE_SCORER_URL");
}
