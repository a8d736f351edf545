#include "gecforge/lm_scorer.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>

#include <httplib.h>
#include <json.hpp>

namespace gecforge {

using nlohmann::json;

Endpoint parse_endpoint(const std::string& url) {
  Endpoint ep;
  std::string rest = url;
  if (auto pos = rest.find("://"); pos != std::string::npos) {
    ep.scheme = rest.substr(0, pos);
    rest = rest.substr(pos + 3);
  } else {
    ep.scheme = "http";
  }
  if (ep.scheme != "http") throw std::invalid_argument("unsupported scorer scheme '" + ep.scheme + "'");
  if (auto slash = rest.find('/'); slash != std::string::npos) rest = rest.substr(0, slash);
  if (auto colon = rest.rfind(':'); colon != std::string::npos) {
    try {
      ep.port = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
      throw std::invalid_argument("bad port in scorer url '" + url + "'");
    }
    rest = rest.substr(0, colon);
  }
  if (rest.empty()) throw std::invalid_argument("missing host in scorer url '" + url + "'");
  ep.host = rest;
  return ep;
}

HttpLmScorer::HttpLmScorer(std::string base_url, std::size_t max_batch, double timeout_seconds)
    : base_url_(std::move(base_url)), max_batch_(max_batch == 0 ? 1 : max_batch), timeout_seconds_(timeout_seconds) {
  parse_endpoint(base_url_);
}

std::string HttpLmScorer::name() const { return "bridge:" + base_url_; }

namespace {

httplib::Client make_client(const std::string& url, double timeout_seconds) {
  Endpoint ep = parse_endpoint(url);
  httplib::Client cli(ep.host, ep.port);
  const auto secs = static_cast<time_t>(timeout_seconds);
  const auto usecs = static_cast<time_t>((timeout_seconds - static_cast<double>(secs)) * 1e6);
  cli.set_connection_timeout(secs, usecs);
  cli.set_read_timeout(secs, usecs);
  cli.set_write_timeout(secs, usecs);
  return cli;
}

}  // namespace

std::optional<BridgeHealth> HttpLmScorer::health() const {
  auto cli = make_client(base_url_, timeout_seconds_);
  auto res = cli.Get("/health");
  if (!res || res->status != 200) return std::nullopt;
  try {
    json body = json::parse(res->body);
    return BridgeHealth{body.at("model").get<std::string>(), body.at("ready").get<bool>()};
  } catch (const json::exception&) {
    return std::nullopt;
  }
}

std::vector<double> HttpLmScorer::score_chunk(const std::vector<Sentence>& chunk) const {
  json request;
  request["sentences"] = json::array();
  for (const auto& s : chunk) request["sentences"].push_back(s.str());

  auto cli = make_client(base_url_, timeout_seconds_);
  auto res = cli.Post("/score", request.dump(), "application/json");
  if (!res) throw ScorerError("scorer at " + base_url_ + " unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw ScorerError("scorer at " + base_url_ + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  std::vector<double> logprobs;
  try {
    logprobs = json::parse(res->body).at("logprobs").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ScorerError(std::string("malformed scorer response: ") + e.what());
  }
  if (logprobs.size() != chunk.size()) {
    throw ScorerError("scorer returned " + std::to_string(logprobs.size()) + " logprobs for " +
                      std::to_string(chunk.size()) + " sentences");
  }
  for (double lp : logprobs) {
    if (!std::isfinite(lp)) throw ScorerError("scorer returned a non-finite logprob");
  }
  return logprobs;
}

std::vector<double> HttpLmScorer::score_batch(const std::vector<Sentence>& sentences) {
  std::vector<double> out;
  out.reserve(sentences.size());
  for (std::size_t i = 0; i < sentences.size(); i += max_batch_) {
    const std::size_t end = std::min(sentences.size(), i + max_batch_);
    std::vector<Sentence> chunk(sentences.begin() + static_cast<std::ptrdiff_t>(i),
                                sentences.begin() + static_cast<std::ptrdiff_t>(end));
    auto part = score_chunk(chunk);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

std::string resolve_scorer_endpoint(const std::string& configured) {
  if (const char* env = std::getenv("GEC_FORGE_SCORER_URL"); env != nullptr && *env != '\0') return env;
  return configured;
}

std::shared_ptr<LmScorer> connect_scorer(const std::string& endpoint, std::shared_ptr<LmScorer> fallback) {
  if (endpoint.empty() || endpoint == "local") {
    if (!fallback) throw ScorerError("no scorer endpoint configured and no local fallback");
    return fallback;
  }
  auto client = std::make_shared<HttpLmScorer>(endpoint);
  auto status = client->health();
  if (status && status->ready) return client;
  if (fallback) {
    std::cerr << "warning: scorer at " << endpoint << (status ? " is not ready" : " is unreachable")
              << "; falling back to " << fallback->name() << '\n';
    return fallback;
  }
  throw ScorerError("scorer at " + endpoint + (status ? " is not ready" : " is unreachable"));
}

}  // namespace gecforge
