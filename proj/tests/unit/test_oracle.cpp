#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "annoloop/error.hpp"
#include "annoloop/oracle.hpp"

using namespace annoloop;

namespace {

ImageRecord four_objects(const std::string& id = "img") {
  return {id, {}, 200, 100, {{"a", {0, 0, 40, 40}}, {"b", {50, 0, 90, 40}}, {"a", {100, 50, 150, 90}}, {"c", {160, 10, 199, 99}}}};
}

const std::vector<std::string> kClasses{"a", "b", "c"};

DetectorOracle of_kind(OracleKind k) {
  DetectorOracle o;
  o.kind = k;
  return o;
}

}  // namespace

TEST_CASE("perfect oracle reproduces gt with score 1") {
  const auto img = four_objects();
  const auto p = oracle_predict(of_kind(OracleKind::perfect), img, 0.3, kClasses);
  REQUIRE(p.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(p[i].class_name == img.objects[i].class_name);
    CHECK(p[i].bbox == img.objects[i].bbox);
    CHECK(p[i].score == 1.0);
  }
}

TEST_CASE("null oracle emits nothing") {
  CHECK(oracle_predict(of_kind(OracleKind::null), four_objects(), 0.9, kClasses).empty());
}

TEST_CASE("duplicating oracle emits each gt twice") {
  const auto img = four_objects();
  const auto p = oracle_predict(of_kind(OracleKind::duplicating), img, 0.0, kClasses);
  REQUIRE(p.size() == 8);
  for (const auto& o : img.objects) {
    CHECK(std::count_if(p.begin(), p.end(), [&](const Prediction& q) {
            return q.bbox == o.bbox && q.class_name == o.class_name;
          }) >= 2);
  }
}

TEST_CASE("untrained learning oracle without false positives emits nothing") {
  auto o = of_kind(OracleKind::learning);
  o.lambda0 = 0.0;
  for (std::uint64_t s = 0; s < 50; ++s) {
    o.rng_seed = s;
    CHECK(oracle_predict(o, four_objects("im" + std::to_string(s)), 0.0, kClasses).empty());
  }
}

TEST_CASE("noisy oracle with p_d 1 and no noise is the perfect oracle up to scores") {
  auto o = of_kind(OracleKind::noisy);
  o.p_detect = 1.0;
  o.jitter = 0.0;
  o.class_flip = 0.0;
  const auto img = four_objects();
  const auto p = oracle_predict(o, img, 0.0, kClasses);
  REQUIRE(p.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(p[i].bbox == img.objects[i].bbox);
    CHECK(p[i].class_name == img.objects[i].class_name);
    CHECK(p[i].score >= 0.5);
    CHECK(p[i].score <= 1.0);
  }
}

TEST_CASE("noisy predictions stay valid, inside the image, and use known classes") {
  auto o = of_kind(OracleKind::noisy);
  o.p_detect = 0.7;
  o.jitter = 0.6;
  o.class_flip = 0.5;
  o.fp_rate = 3.0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    o.rng_seed = s;
    const auto img = four_objects();
    for (const auto& p : oracle_predict(o, img, 0.0, kClasses)) {
      CHECK(p.bbox.valid());
      CHECK(p.bbox.xmin >= 0.0);
      CHECK(p.bbox.ymin >= 0.0);
      CHECK(p.bbox.xmax <= img.width);
      CHECK(p.bbox.ymax <= img.height);
      CHECK(std::find(kClasses.begin(), kClasses.end(), p.class_name) != kClasses.end());
      CHECK(p.score >= 0.0);
      CHECK(p.score <= 1.0);
    }
  }
}

TEST_CASE("class flips always pick a different class") {
  auto o = of_kind(OracleKind::noisy);
  o.p_detect = 1.0;
  o.jitter = 0.0;
  o.class_flip = 1.0;
  const auto img = four_objects();
  const auto p = oracle_predict(o, img, 0.0, kClasses);
  REQUIRE(p.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) CHECK(p[i].class_name != img.objects[i].class_name);
}

TEST_CASE("false-positive count tracks the Poisson mean") {
  auto o = of_kind(OracleKind::noisy);
  o.p_detect = 0.0;
  o.fp_rate = 2.0;
  const ImageRecord empty{"", {}, 300, 200, {}};
  double sum = 0.0;
  const int n = 4000;
  for (int i = 0; i < n; ++i) {
    auto img = empty;
    img.id = "fp" + std::to_string(i);
    for (const auto& p : oracle_predict(o, img, 0.0, kClasses)) {
      CHECK(p.bbox.width() >= 0.05 * 300 - 1e-9);
      CHECK(p.bbox.width() <= 0.40 * 300 + 1e-9);
      CHECK(p.bbox.height() >= 0.05 * 200 - 1e-9);
      CHECK(p.bbox.height() <= 0.40 * 200 + 1e-9);
      sum += 1.0;
    }
  }
  // standard error of the mean is sqrt(2 / 4000) ~ 0.022
  CHECK(sum / n == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("learning oracle detection rate follows p_max (1 - exp(-f / tau))") {
  auto o = of_kind(OracleKind::learning);
  o.lambda0 = 0.0;
  o.jitter = 0.0;
  o.class_flip = 0.0;
  const double f = 0.25;
  const double expected = o.p_max * (1.0 - std::exp(-f / o.tau));
  double hits = 0.0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) hits += static_cast<double>(oracle_predict(o, four_objects("l" + std::to_string(i)), f, kClasses).size());
  CHECK(hits / (4.0 * n) == doctest::Approx(expected).epsilon(0.04));
}

TEST_CASE("per-class coverage uses the gt's own class fraction") {
  auto o = of_kind(OracleKind::learning);
  o.lambda0 = 0.0;
  o.coverage = Coverage::per_class;
  TrainingProgress tp;
  tp.labeled_fraction = 0.5;
  tp.class_fraction = {{"a", 0.0}, {"b", 0.0}, {"c", 1.0}};
  for (std::uint64_t s = 0; s < 100; ++s) {
    o.rng_seed = s;
    for (const auto& p : oracle_predict(o, four_objects(), tp, kClasses)) {
      // only the class-c object can be detected
      CHECK(p.bbox.xmin > 140.0);
    }
  }
}

TEST_CASE("training progress from counts") {
  const auto tp = TrainingProgress::from_counts(3, 12, {{"a", 3}}, {{"a", 4}, {"b", 8}});
  CHECK(tp.labeled_fraction == 0.25);
  CHECK(tp.class_fraction.at("a") == 0.75);
  CHECK(tp.class_fraction.at("b") == 0.0);
}

TEST_CASE("predictions depend only on seed and image id") {
  auto o = of_kind(OracleKind::noisy);
  o.p_detect = 0.6;
  o.jitter = 0.2;
  o.fp_rate = 1.5;
  o.rng_seed = 99;
  const auto a = oracle_predict(o, four_objects("x"), 0.0, kClasses);
  oracle_predict(o, four_objects("y"), 0.0, kClasses);
  CHECK(oracle_predict(o, four_objects("x"), 0.0, kClasses) == a);
  bool differs = false;
  for (int i = 0; i < 5; ++i) differs = differs || oracle_predict(o, four_objects("x" + std::to_string(i)), 0.0, kClasses) != a;
  CHECK(differs);
}

TEST_CASE("parameter validation") {
  auto bad = [](auto mutate) {
    DetectorOracle o;
    o.kind = OracleKind::learning;
    mutate(o);
    return o;
  };
  CHECK_NOTHROW(DetectorOracle{}.validate());
  CHECK_THROWS_AS(bad([](auto& o) { o.p_detect = 1.5; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& o) { o.jitter = -0.1; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& o) { o.class_flip = 2; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& o) { o.fp_rate = -1; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& o) { o.tau = 0; }).validate(), ConfigError);
  CHECK_THROWS_AS(bad([](auto& o) { o.lambda0 = -1; }).validate(), ConfigError);
  CHECK_THROWS_AS(parse_oracle_kind("psychic"), ConfigError);
  CHECK_THROWS_AS(parse_coverage("some"), ConfigError);
  CHECK(parse_coverage("per_class") == Coverage::per_class);
}
