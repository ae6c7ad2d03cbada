#include <httplib.h>
#include <json.hpp>

#include <thread>

#include "swarmform/image_io.hpp"
#include "swarmform/parallel.hpp"
#include "swarmform/scoring.hpp"

namespace swarmform {

using json = nlohmann::json;

std::string base64_encode(std::span<const std::uint8_t> bytes) {
  static constexpr char kAlphabet[] =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back(kAlphabet[v & 63]);
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = bytes[i] << 16;
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.append("==");
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out.push_back(kAlphabet[(v >> 18) & 63]);
    out.push_back(kAlphabet[(v >> 12) & 63]);
    out.push_back(kAlphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

namespace {

httplib::Client make_http_client(const EmbeddingServiceOptions& options) {
  httplib::Client client(options.endpoint);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  return client;
}

EmbedResult parse_embed_response(const std::string& body) {
  json doc;
  try {
    doc = json::parse(body);
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("embedding service sent invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("embedding") || !doc["embedding"].is_array() ||
      !doc.contains("dim") || !doc["dim"].is_number_unsigned() || !doc.contains("model_id") ||
      !doc["model_id"].is_string()) {
    throw ProtocolError("embedding response lacks embedding/dim/model_id");
  }
  EmbedResult out;
  out.model_id = doc["model_id"].get<std::string>();
  const auto dim = doc["dim"].get<std::size_t>();
  const json& values = doc["embedding"];
  out.embedding.values.reserve(values.size());
  for (const json& v : values) {
    if (!v.is_number()) {
      throw ProtocolError("embedding contains a non-numeric entry");
    }
    out.embedding.values.push_back(v.get<double>());
  }
  if (out.embedding.values.size() != dim) {
    throw ProtocolError("embedding length " + std::to_string(out.embedding.values.size()) +
                        " does not match dim " + std::to_string(dim));
  }
  out.embedding.validate();
  if (doc.contains("truncated") && doc["truncated"].is_boolean()) {
    out.truncated = doc["truncated"].get<bool>();
  }
  return out;
}

}  // namespace

EmbeddingClient::EmbeddingClient(EmbeddingServiceOptions options) : options_(std::move(options)) {
  if (options_.max_attempts < 1) {
    throw std::invalid_argument("max_attempts must be at least 1");
  }
}

std::string EmbeddingClient::post_with_retry(const std::string& path, const std::string& body) const {
  std::string last_error;
  auto backoff = options_.initial_backoff;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    httplib::Client client = make_http_client(options_);
    const httplib::Result res = client.Post(path, body, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
    } else if (res->status == 200) {
      return res->body;
    } else if (res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      throw ProtocolError(path + " rejected request with HTTP " + std::to_string(res->status) + ": " +
                          res->body);
    }
    if (attempt < options_.max_attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw TransportError(options_.endpoint + path + " failed after " +
                       std::to_string(options_.max_attempts) + " attempts (" + last_error + ")");
}

EmbedResult EmbeddingClient::embed_text(std::string_view text) const {
  const json body = {{"text", std::string(text)}};
  return parse_embed_response(post_with_retry("/v1/embed_text", body.dump()));
}

EmbedResult EmbeddingClient::embed_png(std::span<const std::uint8_t> png) const {
  const json body = {{"image", base64_encode(png)}};
  return parse_embed_response(post_with_retry("/v1/embed_image", body.dump()));
}

EmbedResult EmbeddingClient::embed_image(const RasterImage& image) const {
  return embed_png(encode_png(image));
}

ServiceHealth EmbeddingClient::health() const {
  httplib::Client client = make_http_client(options_);
  const httplib::Result res = client.Get("/v1/health");
  if (!res) {
    throw TransportError(options_.endpoint + "/v1/health: " + httplib::to_string(res.error()));
  }
  ServiceHealth out;
  try {
    const json doc = json::parse(res->body);
    out.status = doc.value("status", std::string{});
    out.model_id = doc.value("model_id", std::string{});
    out.dim = doc.value("dim", std::size_t{0});
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("health reply is not valid JSON: ") + e.what());
  }
  if (res->status != 200 && out.status.empty()) {
    out.status = "unavailable";
  }
  return out;
}

EmbeddingScorer::EmbeddingScorer(EmbeddingServiceOptions options, std::string prompt)
    : client_(std::move(options)), prompt_(std::move(prompt)) {}

const Embedding& EmbeddingScorer::prompt_embedding() {
  std::lock_guard lock(mutex_);
  if (!prompt_embedding_) {
    EmbedResult r = client_.embed_text(prompt_);
    model_id_ = r.model_id;
    prompt_embedding_ = std::move(r.embedding);
  }
  return *prompt_embedding_;
}

std::vector<Score> EmbeddingScorer::score_batch(std::span<const RasterImage> images) {
  if (images.empty()) {
    throw std::invalid_argument("score_batch needs at least one image");
  }
  const Embedding& text = prompt_embedding();
  std::vector<Score> scores(images.size());
  parallel_for(images.size(), client_.options().parallelism, [&](std::size_t i) {
    const EmbedResult r = client_.embed_image(images[i]);
    if (r.embedding.values.size() != text.values.size()) {
      throw ProtocolError("image embedding dim " + std::to_string(r.embedding.values.size()) +
                          " differs from text embedding dim " + std::to_string(text.values.size()));
    }
    scores[i] = cosine_similarity(text, r.embedding);
  });
  return scores;
}

std::string EmbeddingScorer::identity() const {
  std::lock_guard lock(mutex_);
  std::string id = "embedding@" + client_.options().endpoint;
  if (!model_id_.empty()) {
    id += "/" + model_id_;
  }
  return id;
}

}  // namespace swarmform
