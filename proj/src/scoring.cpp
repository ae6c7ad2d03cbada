#include "swarmform/scoring.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "swarmform/parallel.hpp"

namespace swarmform {

void Embedding::validate(double tolerance) const {
  if (values.empty()) {
    throw ProtocolError("empty embedding");
  }
  double norm2 = 0.0;
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw ProtocolError("embedding has a non-finite component");
    }
    norm2 += v * v;
  }
  const double norm = std::sqrt(norm2);
  if (std::abs(norm - 1.0) > tolerance) {
    throw ProtocolError("embedding is not unit norm (|v| = " + std::to_string(norm) + ")");
  }
}

Score cosine_similarity(const Embedding& a, const Embedding& b) {
  if (a.values.size() != b.values.size()) {
    throw std::invalid_argument("embedding length mismatch: " + std::to_string(a.values.size()) +
                                " vs " + std::to_string(b.values.size()));
  }
  double dot = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
  }
  return dot;
}

Score template_iou(const BitMask& mask, const BitMask& target) {
  if (mask.width_px != target.width_px || mask.height_px != target.height_px ||
      mask.bits.size() != target.bits.size()) {
    throw std::invalid_argument("mask dimension mismatch");
  }
  std::size_t both = 0;
  std::size_t either = 0;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    const bool a = mask.bits[i] != 0;
    const bool b = target.bits[i] != 0;
    both += static_cast<std::size_t>(a && b);
    either += static_cast<std::size_t>(a || b);
  }
  if (either == 0) {
    return 1.0;
  }
  return static_cast<double>(both) / static_cast<double>(either);
}

TemplateScorer::TemplateScorer(BitMask target, int threshold, unsigned parallelism)
    : target_(std::move(target)), threshold_(threshold), parallelism_(std::max(1u, parallelism)) {}

std::vector<Score> TemplateScorer::score_batch(std::span<const RasterImage> images) {
  if (images.empty()) {
    throw std::invalid_argument("score_batch needs at least one image");
  }
  std::vector<Score> scores(images.size());
  parallel_for(images.size(), parallelism_, [&](std::size_t i) {
    scores[i] = template_iou(rasterize_mask(images[i], threshold_), target_);
  });
  return scores;
}

std::string TemplateScorer::identity() const {
  return "template-iou/" + std::to_string(target_.width_px) + "x" + std::to_string(target_.height_px) +
         "/ink=" + std::to_string(target_.count());
}

std::optional<Shape> shape_from_prompt(std::string_view prompt) {
  std::string text;
  text.reserve(prompt.size());
  for (char c : prompt) {
    text.push_back(c == '_' || c == '-' ? ' '
                                        : static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  if (text.find("inverted triangle") != std::string::npos) {
    return Shape::inverted_triangle;
  }
  std::optional<Shape> best;
  std::size_t best_pos = std::string::npos;
  for (Shape s : {Shape::square, Shape::triangle, Shape::circle, Shape::hexagon}) {
    const std::size_t pos = text.find(to_string(s));
    if (pos < best_pos) {
      best_pos = pos;
      best = s;
    }
  }
  return best;
}

BitMask make_template_mask(const TemplateTarget& target, std::size_t m, const Rect& workspace,
                           const CanvasSpec& canvas, int threshold) {
  const Formation f = predefined_formation(target.shape, m, workspace, target.fraction);
  return rasterize_mask(render(f, canvas), threshold);
}

std::string_view to_string(Backend backend) {
  switch (backend) {
    case Backend::embedding: return "embedding";
    case Backend::template_iou: return "template";
  }
  return "unknown";
}

std::optional<Backend> backend_from_string(std::string_view text) {
  if (text == "embedding") {
    return Backend::embedding;
  }
  if (text == "template") {
    return Backend::template_iou;
  }
  return std::nullopt;
}

std::unique_ptr<Scorer> make_scorer(const ScorerSpec& spec, const CanvasSpec& canvas, std::size_t m,
                                    const Rect& workspace) {
  switch (spec.backend) {
    case Backend::template_iou: {
      const std::optional<Shape> shape = shape_from_prompt(spec.prompt);
      if (!shape) {
        throw std::invalid_argument("template backend: prompt \"" + spec.prompt +
                                    "\" names no known shape (square, triangle, circle, "
                                    "inverted triangle, hexagon)");
      }
      if (spec.threshold < 1 || spec.threshold > 256) {
        throw std::invalid_argument("template backend: threshold must lie in [1, 256]");
      }
      const TemplateTarget target{*shape, spec.target_fraction};
      return std::make_unique<TemplateScorer>(
          make_template_mask(target, m, workspace, canvas, spec.threshold), spec.threshold,
          spec.parallelism);
    }
    case Backend::embedding: {
      if (spec.prompt.empty()) {
        throw std::invalid_argument("embedding backend: empty prompt");
      }
      EmbeddingServiceOptions options;
      options.endpoint = spec.endpoint;
      options.parallelism = spec.parallelism;
      options.timeout = std::chrono::milliseconds(spec.timeout_ms);
      return std::make_unique<EmbeddingScorer>(std::move(options), spec.prompt);
    }
  }
  throw std::invalid_argument("unknown scorer backend");
}

}  // namespace swarmform
