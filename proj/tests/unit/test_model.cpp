#include <doctest.h>

#include <random>
#include <sstream>
#include <string>

#include "annoloop/error.hpp"
#include "annoloop/io.hpp"
#include "support/reference.hpp"

using namespace annoloop;

namespace {

std::string error_of(auto&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e.what();
  }
  return {};
}

Dataset parse(const std::string& text) {
  std::istringstream in(text);
  return parse_annotations(in);
}

FeatureMatrix parse_csv(const std::string& text) {
  std::istringstream in(text);
  return parse_features(in);
}

}  // namespace

TEST_CASE("annotations keep file order and default seq to the line index") {
  const auto ds = parse(
      R"({"id": "a", "width": 10, "height": 10, "objects": [{"class": "x", "bbox": [0, 0, 5, 5]}]})"
      "\n"
      R"({"id": "b", "width": 10, "height": 10, "objects": []})"
      "\n");
  REQUIRE(ds.size() == 2);
  CHECK(ds.images()[0].id == "a");
  CHECK(ds.images()[1].id == "b");
  CHECK(ds.images()[0].seq == 0);
  CHECK(ds.images()[1].seq == 1);
  CHECK(ds.class_set() == std::set<std::string>{"x"});
  CHECK(ds.total_objects() == 1);
}

TEST_CASE("explicit seq wins over the line index") {
  const auto ds = parse(R"({"id": "a", "seq": 42, "width": 4, "height": 4})"
                        "\n");
  CHECK(ds.images()[0].seq == 42);
}

TEST_CASE("degenerate bbox is rejected with its line number") {
  const auto msg = error_of([] {
    parse(R"({"id": "ok", "width": 20, "height": 20})"
          "\n"
          R"({"id": "a", "width": 20, "height": 20, "objects": [{"class": "x", "bbox": [5, 5, 5, 9]}]})"
          "\n");
  });
  CHECK(msg.find("degenerate bbox") != std::string::npos);
  CHECK(msg.find("line 2") != std::string::npos);
}

TEST_CASE("empty annotation file is an empty dataset") {
  CHECK(parse("").empty());
  CHECK(parse("\n\n").empty());
}

TEST_CASE("annotation errors") {
  CHECK(error_of([] { parse("{not json\n"); }).find("line 1") != std::string::npos);
  CHECK(error_of([] {
          parse(R"({"id": "a", "width": 4, "height": 4})"
                "\n"
                R"({"id": "a", "width": 4, "height": 4})"
                "\n");
        }).find("duplicate id") != std::string::npos);
  CHECK(error_of([] {
          parse(R"({"id": "a", "width": 4, "height": 4, "objects": [{"class": "x", "bbox": [0, 0, 5, 3]}]})");
        }).find("outside image bounds") != std::string::npos);
  CHECK(error_of([] { parse(R"({"id": "a", "width": 0, "height": 4})"); }).find("width") !=
        std::string::npos);
  CHECK(error_of([] {
          parse(R"({"id": "a", "width": 4, "height": 4, "objects": [{"class": "", "bbox": [0, 0, 1, 1]}]})");
        }).find("class") != std::string::npos);
  CHECK_THROWS_AS(load_annotations("/nonexistent/file.jsonl"), DataError);
}

TEST_CASE("boxes within the bounds tolerance are accepted") {
  const auto ds = parse(
      R"({"id": "a", "width": 4, "height": 4, "objects": [{"class": "x", "bbox": [-0.0000005, 0, 4.0000005, 4]}]})");
  CHECK(ds.total_objects() == 1);
}

TEST_CASE("feature CSV parses header and rows") {
  const auto fm = parse_csv("id,f0,f1\na,0,0\nb,3,4\n");
  CHECK(fm.rows() == 2);
  CHECK(fm.dim() == 2);
  CHECK(fm.ids() == std::vector<std::string>{"a", "b"});
  CHECK(fm.row(1)[0] == 3.0);
  CHECK(fm.row(1)[1] == 4.0);
}

TEST_CASE("feature CSV errors") {
  CHECK(error_of([] { parse_csv("id,f0,f1\na,0,0\nb,1,2,3\n"); }).find("ragged feature rows") !=
        std::string::npos);
  CHECK(error_of([] { parse_csv("id,f0,f1\na,0,0\na,1,2\n"); }).find("duplicate id") !=
        std::string::npos);
  CHECK(error_of([] { parse_csv("id,f0\na,zero\n"); }).find("non-numeric") != std::string::npos);
  CHECK(error_of([] { parse_csv("id,f0\na,inf\n"); }).find("non-finite") != std::string::npos);
  CHECK(error_of([] { parse_csv("name,f0\na,1\n"); }).find("header") != std::string::npos);
  CHECK(error_of([] { parse_csv(""); }).find("header") != std::string::npos);
  CHECK_THROWS_AS(FeatureMatrix({"a", "b"}, {{1.0, 2.0}, {1.0}}), DataError);
}

TEST_CASE("join_check lists missing and extra ids") {
  const auto ds = parse(R"({"id": "a", "width": 4, "height": 4})"
                        "\n"
                        R"({"id": "b", "width": 4, "height": 4})"
                        "\n"
                        R"({"id": "c", "width": 4, "height": 4})"
                        "\n");
  CHECK_NOTHROW(join_check(ds, parse_csv("id,f0\nc,1\nb,2\na,3\n")));
  const auto missing = error_of([&] { join_check(ds, parse_csv("id,f0\na,1\nb,2\n")); });
  CHECK(missing.find("missing from features: c") != std::string::npos);
  const auto extra = error_of([&] { join_check(ds, parse_csv("id,f0\na,1\nb,2\nc,3\nz,4\n")); });
  CHECK(extra.find("extra in features: z") != std::string::npos);
}

TEST_CASE("join_check caps the listed ids at ten") {
  std::string csv = "id,f0\n";
  for (int i = 0; i < 25; ++i) csv += "x" + std::to_string(i) + ",1\n";
  const auto msg = error_of([&] { join_check(Dataset{}, parse_csv(csv)); });
  CHECK(msg.find("x9") != std::string::npos);
  CHECK(msg.find("x10") == std::string::npos);
  CHECK(msg.find("25 total") != std::string::npos);
}

TEST_CASE("property: dataset JSONL round-trip is lossless") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<ImageRecord> images;
    const int n = static_cast<int>(rng() % 8);
    for (int i = 0; i < n; ++i) {
      ImageRecord img;
      img.id = "im\"" + std::to_string(trial) + "_" + std::to_string(i) + "é";
      img.seq = static_cast<std::int64_t>(rng() % 1000) - 500;
      img.width = 1 + static_cast<int>(rng() % 2000);
      img.height = 1 + static_cast<int>(rng() % 2000);
      const int m = static_cast<int>(rng() % 5);
      for (int k = 0; k < m; ++k) {
        img.objects.push_back({"cls" + std::to_string(rng() % 3),
                               testing::random_box(rng, img.width, img.height)});
      }
      images.push_back(std::move(img));
    }
    const Dataset original(std::move(images));
    std::ostringstream out;
    write_annotations(out, original);
    std::istringstream in(out.str());
    CHECK(parse_annotations(in) == original);
  }
}

TEST_CASE("prediction JSONL") {
  std::istringstream in(
      R"({"id": "a", "predictions": [{"class": "x", "bbox": [0, 0, 1, 1], "score": 0.25}]})"
      "\n"
      R"({"id": "b", "predictions": []})"
      "\n");
  const auto preds = parse_predictions(in);
  REQUIRE(preds.size() == 2);
  CHECK(preds.at("a").front().score == 0.25);
  CHECK(preds.at("b").empty());

  std::istringstream bad(R"({"id": "a", "predictions": [{"class": "x", "bbox": [0, 0, 1, 1], "score": 1.5}]})");
  CHECK_THROWS_AS(parse_predictions(bad), DataError);
}
