#include "annoloop/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "annoloop/error.hpp"
#include "annoloop/random.hpp"

namespace annoloop {
namespace {

constexpr double kMinSide = 1e-3;  // pixels
constexpr double kFpMinFraction = 0.05;
constexpr double kFpMaxFraction = 0.40;

struct DrawnGt {
  double detect, x0, x1, y0, y1, flip, cls, score;
};

DrawnGt draw_gt(std::mt19937_64& rng) {
  DrawnGt d{};
  d.detect = uniform01(rng);
  d.x0 = uniform01(rng);
  d.x1 = uniform01(rng);
  d.y0 = uniform01(rng);
  d.y1 = uniform01(rng);
  d.flip = uniform01(rng);
  d.cls = uniform01(rng);
  d.score = uniform01(rng);
  return d;
}

// Orders, clamps to [0, limit] and keeps a minimal positive extent.
std::pair<double, double> sanitize_span(double a, double b, double limit) {
  if (a > b) std::swap(a, b);
  a = std::clamp(a, 0.0, limit);
  b = std::clamp(b, 0.0, limit);
  if (b - a < kMinSide) {
    b = std::min(limit, a + kMinSide);
    a = b - kMinSide;
  }
  return {a, b};
}

std::size_t pick_index(double u, std::size_t count) {
  return std::min(count - 1, static_cast<std::size_t>(u * static_cast<double>(count)));
}

std::string flipped_class(const std::string& original, double u,
                          std::span<const std::string> classes) {
  std::vector<const std::string*> others;
  for (const auto& c : classes) {
    if (c != original) others.push_back(&c);
  }
  if (others.empty()) return original;
  return *others[pick_index(u, others.size())];
}

}  // namespace

std::string_view to_string(OracleKind k) noexcept {
  switch (k) {
    case OracleKind::perfect: return "perfect";
    case OracleKind::null: return "null";
    case OracleKind::duplicating: return "duplicating";
    case OracleKind::noisy: return "noisy";
    case OracleKind::learning: return "learning";
  }
  return "unknown";
}

std::string_view to_string(Coverage c) noexcept {
  return c == Coverage::global ? "global" : "per_class";
}

OracleKind parse_oracle_kind(std::string_view name) {
  for (auto k : {OracleKind::perfect, OracleKind::null, OracleKind::duplicating, OracleKind::noisy,
                 OracleKind::learning}) {
    if (to_string(k) == name) return k;
  }
  throw ConfigError("unknown oracle \"" + std::string(name) +
                    "\" (expected perfect, null, duplicating, noisy or learning)");
}

Coverage parse_coverage(std::string_view name) {
  if (name == "global") return Coverage::global;
  if (name == "per_class") return Coverage::per_class;
  throw ConfigError("unknown coverage \"" + std::string(name) + "\" (expected global or per_class)");
}

void DetectorOracle::validate() const {
  auto probability = [](double v, const char* name) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must lie in [0, 1]");
  };
  auto non_negative = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string(name) + " must be finite and >= 0");
    }
  };
  probability(p_detect, "p_detect");
  probability(class_flip, "class_flip");
  probability(p_max, "p_max");
  non_negative(jitter, "jitter");
  non_negative(fp_rate, "fp_rate");
  non_negative(lambda0, "lambda0");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be finite and > 0");
}

TrainingProgress TrainingProgress::from_counts(
    std::size_t labeled, std::size_t total,
    const std::map<std::string, std::size_t>& labeled_by_class,
    const std::map<std::string, std::size_t>& total_by_class) {
  TrainingProgress p;
  p.labeled_fraction =
      total == 0 ? 0.0 : static_cast<double>(labeled) / static_cast<double>(total);
  for (const auto& [cls, n] : total_by_class) {
    auto it = labeled_by_class.find(cls);
    const std::size_t k = it == labeled_by_class.end() ? 0 : it->second;
    p.class_fraction[cls] = n == 0 ? 0.0 : static_cast<double>(k) / static_cast<double>(n);
  }
  return p;
}

std::vector<Prediction> oracle_predict(const DetectorOracle& oracle, const ImageRecord& image,
                                       const TrainingProgress& progress,
                                       std::span<const std::string> classes) {
  std::vector<Prediction> out;
  switch (oracle.kind) {
    case OracleKind::null:
      return out;
    case OracleKind::perfect:
    case OracleKind::duplicating: {
      const int copies = oracle.kind == OracleKind::duplicating ? 2 : 1;
      out.reserve(image.objects.size() * copies);
      for (const auto& o : image.objects) {
        for (int c = 0; c < copies; ++c) out.push_back({o.class_name, o.bbox, 1.0});
      }
      return out;
    }
    case OracleKind::noisy:
    case OracleKind::learning:
      break;
  }

  const bool learning = oracle.kind == OracleKind::learning;
  const double global = std::clamp(progress.labeled_fraction, 0.0, 1.0);
  auto detect_probability = [&](const std::string& cls) {
    if (!learning) return oracle.p_detect;
    double f = global;
    if (oracle.coverage == Coverage::per_class) {
      auto it = progress.class_fraction.find(cls);
      f = it == progress.class_fraction.end() ? 0.0 : std::clamp(it->second, 0.0, 1.0);
    }
    return oracle.p_max * (1.0 - std::exp(-f / oracle.tau));
  };
  const double fp_rate = learning ? oracle.lambda0 * std::exp(-global / oracle.tau) : oracle.fp_rate;

  auto rng = keyed_stream(oracle.rng_seed, image.id);
  const double w_img = image.width;
  const double h_img = image.height;

  for (const auto& o : image.objects) {
    // Every gt consumes the same number of draws whether emitted or not, so
    // streams stay aligned across parameter settings.
    const DrawnGt d = draw_gt(rng);
    if (!(d.detect < detect_probability(o.class_name))) continue;
    const double jw = oracle.jitter * o.bbox.width();
    const double jh = oracle.jitter * o.bbox.height();
    auto [x0, x1] = sanitize_span(o.bbox.xmin + (2.0 * d.x0 - 1.0) * jw,
                                  o.bbox.xmax + (2.0 * d.x1 - 1.0) * jw, w_img);
    auto [y0, y1] = sanitize_span(o.bbox.ymin + (2.0 * d.y0 - 1.0) * jh,
                                  o.bbox.ymax + (2.0 * d.y1 - 1.0) * jh, h_img);
    std::string cls = d.flip < oracle.class_flip ? flipped_class(o.class_name, d.cls, classes)
                                                  : o.class_name;
    out.push_back({std::move(cls), BBox{x0, y0, x1, y1}, 0.5 + 0.5 * d.score});
  }

  const std::uint64_t false_positives = poisson_inversion(uniform01(rng), fp_rate);
  if (classes.empty()) return out;
  for (std::uint64_t k = 0; k < false_positives; ++k) {
    const double ux = uniform01(rng);
    const double uy = uniform01(rng);
    const double uw = uniform01(rng);
    const double uh = uniform01(rng);
    const double uc = uniform01(rng);
    const double us = uniform01(rng);
    const double bw = (kFpMinFraction + (kFpMaxFraction - kFpMinFraction) * uw) * w_img;
    const double bh = (kFpMinFraction + (kFpMaxFraction - kFpMinFraction) * uh) * h_img;
    const double x = ux * (w_img - bw);
    const double y = uy * (h_img - bh);
    out.push_back({classes[pick_index(uc, classes.size())], BBox{x, y, x + bw, y + bh}, 0.5 * us});
  }
  return out;
}

std::vector<Prediction> oracle_predict(const DetectorOracle& oracle, const ImageRecord& image,
                                       double labeled_fraction,
                                       std::span<const std::string> classes) {
  TrainingProgress p;
  p.labeled_fraction = labeled_fraction;
  return oracle_predict(oracle, image, p, classes);
}

}  // namespace annoloop
