#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "swarmform/geometry.hpp"
#include "swarmform/renderer.hpp"

namespace swarmform {

// Raw similarity value. Cosine backends return [-1, 1], the template backend
// returns [0, 1]. Never rescaled.
using Score = double;

class ScorerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Service could not be reached after all retries.
class TransportError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

// Service answered with something that breaks the wire contract.
class ProtocolError : public ScorerError {
 public:
  using ScorerError::ScorerError;
};

struct Embedding {
  std::vector<double> values;

  // Throws ProtocolError unless every value is finite and the norm is 1 +- tolerance.
  void validate(double tolerance = 1e-3) const;
};

// Dot product of two unit vectors. Throws std::invalid_argument on length mismatch.
Score cosine_similarity(const Embedding& a, const Embedding& b);

// |mask & target| / |mask | target|, 1.0 when both are empty.
// Throws std::invalid_argument on dimension mismatch.
Score template_iou(const BitMask& mask, const BitMask& target);

class Scorer {
 public:
  virtual ~Scorer() = default;

  // One score per image, same order. Throws ScorerError on backend failure;
  // no partial result is returned.
  virtual std::vector<Score> score_batch(std::span<const RasterImage> images) = 0;

  virtual std::string identity() const = 0;
};

class TemplateScorer final : public Scorer {
 public:
  TemplateScorer(BitMask target, int threshold = 128, unsigned parallelism = 1);

  std::vector<Score> score_batch(std::span<const RasterImage> images) override;
  std::string identity() const override;

  const BitMask& target() const { return target_; }

 private:
  BitMask target_;
  int threshold_;
  unsigned parallelism_;
};

struct TemplateTarget {
  Shape shape = Shape::triangle;
  double fraction = 0.65;  // outline size relative to the smaller workspace side
};

// Finds the first shape keyword in a prompt ("A circle outline" -> circle).
// "inverted triangle" wins over "triangle". Returns nullopt when none matches.
std::optional<Shape> shape_from_prompt(std::string_view prompt);

// The target silhouette: m robots on the shape outline, drawn by the regular
// renderer, thresholded to a mask.
BitMask make_template_mask(const TemplateTarget& target, std::size_t m, const Rect& workspace,
                           const CanvasSpec& canvas, int threshold = 128);

// --- embedding service client ----------------------------------------------

struct EmbeddingServiceOptions {
  std::string endpoint = "http://127.0.0.1:8000";
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::chrono::milliseconds timeout{30000};
  unsigned parallelism = 4;
};

struct ServiceHealth {
  std::string status;
  std::string model_id;
  std::size_t dim = 0;
};

struct EmbedResult {
  Embedding embedding;
  std::string model_id;
  bool truncated = false;
};

std::string base64_encode(std::span<const std::uint8_t> bytes);

// Speaks the /v1 JSON protocol. Stateless; safe to share between threads.
class EmbeddingClient {
 public:
  explicit EmbeddingClient(EmbeddingServiceOptions options);

  EmbedResult embed_text(std::string_view text) const;
  EmbedResult embed_png(std::span<const std::uint8_t> png) const;
  EmbedResult embed_image(const RasterImage& image) const;
  ServiceHealth health() const;

  const EmbeddingServiceOptions& options() const { return options_; }

 private:
  std::string post_with_retry(const std::string& path, const std::string& body) const;

  EmbeddingServiceOptions options_;
};

// Embeds the prompt once (cached for the scorer's lifetime) and scores each
// image by the cosine of its embedding with the prompt embedding.
class EmbeddingScorer final : public Scorer {
 public:
  EmbeddingScorer(EmbeddingServiceOptions options, std::string prompt);

  std::vector<Score> score_batch(std::span<const RasterImage> images) override;
  std::string identity() const override;

 private:
  const Embedding& prompt_embedding();

  EmbeddingClient client_;
  std::string prompt_;
  mutable std::mutex mutex_;
  std::optional<Embedding> prompt_embedding_;
  std::string model_id_;
};

enum class Backend { embedding, template_iou };

std::string_view to_string(Backend backend);
std::optional<Backend> backend_from_string(std::string_view text);

struct ScorerSpec {
  Backend backend = Backend::embedding;
  std::string prompt;
  std::string endpoint = "http://127.0.0.1:8000";
  int threshold = 128;
  double target_fraction = 0.65;
  unsigned parallelism = 4;
  unsigned timeout_ms = 30000;  // per request

  friend bool operator==(const ScorerSpec&, const ScorerSpec&) = default;
};

// Template backend: the prompt must name a shape (see shape_from_prompt).
// Throws std::invalid_argument for an unusable spec.
std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec, const CanvasSpec& canvas, std::size_t m,
                                    const Rect& workspace);

}  // namespace swarmform
