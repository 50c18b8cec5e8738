#include "annoloop/io.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "annoloop/error.hpp"
#include "annoloop/serialize.hpp"

namespace annoloop {
namespace {

using nlohmann::json;

std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(ws);
  return s.substr(b, e - b + 1);
}

[[noreturn]] void fail_at(std::size_t line_no, const std::string& what) {
  throw DataError("line " + std::to_string(line_no) + ": " + what);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return in;
}

BBox parse_bbox(const json& j) {
  if (!j.is_array() || j.size() != 4) throw DataError("bbox must be an array of 4 numbers");
  double c[4];
  for (std::size_t k = 0; k < 4; ++k) {
    if (!j[k].is_number()) throw DataError("bbox must be an array of 4 numbers");
    c[k] = j[k].get<double>();
  }
  return BBox::checked(c[0], c[1], c[2], c[3]);
}

const std::string& require_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_string()) {
    throw DataError(std::string("missing or non-string \"") + key + "\"");
  }
  return it->get_ref<const std::string&>();
}

ImageRecord parse_image_line(const json& j, std::size_t line_index) {
  if (!j.is_object()) throw DataError("expected a JSON object");
  ImageRecord img;
  img.id = require_string(j, "id");
  if (img.id.empty()) throw DataError("empty image id");
  if (auto it = j.find("seq"); it != j.end() && !it->is_null()) {
    if (!it->is_number_integer()) throw DataError("\"seq\" must be an integer");
    img.seq = it->get<std::int64_t>();
  } else {
    img.seq = static_cast<std::int64_t>(line_index);
  }
  for (const char* key : {"width", "height"}) {
    auto it = j.find(key);
    if (it == j.end() || !it->is_number_integer() || it->get<std::int64_t>() <= 0 ||
        it->get<std::int64_t>() > std::numeric_limits<int>::max()) {
      throw DataError(std::string("\"") + key + "\" must be a positive integer");
    }
  }
  img.width = j["width"].get<int>();
  img.height = j["height"].get<int>();
  if (auto it = j.find("objects"); it != j.end()) {
    if (!it->is_array()) throw DataError("\"objects\" must be an array");
    for (const auto& o : *it) {
      if (!o.is_object()) throw DataError("object entries must be JSON objects");
      ObjectLabel label;
      label.class_name = require_string(o, "class");
      if (label.class_name.empty()) throw DataError("empty class name");
      auto bb = o.find("bbox");
      if (bb == o.end()) throw DataError("object without bbox");
      label.bbox = parse_bbox(*bb);
      const auto& b = label.bbox;
      if (b.xmin < -kBoundsTolerance || b.ymin < -kBoundsTolerance ||
          b.xmax > img.width + kBoundsTolerance || b.ymax > img.height + kBoundsTolerance) {
        throw DataError("bbox outside image bounds");
      }
      img.objects.push_back(std::move(label));
    }
  }
  return img;
}

json bbox_json(const BBox& b) { return json::array({b.xmin, b.ymin, b.xmax, b.ymax}); }

template <typename Fn>
void for_each_json_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t index = 0;
  while (std::getline(in, line)) {
    const std::size_t line_no = ++index;
    if (trim(line).empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      fail_at(line_no, std::string("malformed JSON: ") + e.what());
    }
    try {
      fn(j, line_no - 1);
    } catch (const DataError& e) {
      fail_at(line_no, e.what());
    } catch (const json::exception& e) {
      fail_at(line_no, e.what());
    }
  }
}

std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

}  // namespace

Dataset parse_annotations(std::istream& in) {
  std::vector<ImageRecord> images;
  std::set<std::string> seen;
  for_each_json_line(in, [&](const json& j, std::size_t line_index) {
    ImageRecord img = parse_image_line(j, line_index);
    if (!seen.insert(img.id).second) throw DataError("duplicate id \"" + img.id + "\"");
    images.push_back(std::move(img));
  });
  return Dataset(std::move(images));
}

Dataset load_annotations(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_annotations(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_annotations(std::ostream& out, const Dataset& dataset) {
  for (const auto& img : dataset.images()) {
    json j;
    j["id"] = img.id;
    if (img.seq) j["seq"] = *img.seq;
    j["width"] = img.width;
    j["height"] = img.height;
    json objects = json::array();
    for (const auto& o : img.objects) {
      objects.push_back({{"class", o.class_name}, {"bbox", bbox_json(o.bbox)}});
    }
    j["objects"] = std::move(objects);
    out << j.dump() << '\n';
  }
}

FeatureMatrix parse_features(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  bool have_header = false;
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_csv(line);
    if (!have_header) {
      if (cells.front() != "id" || cells.size() < 2) {
        fail_at(line_no, "feature header must be id,f0,...,f{D-1}");
      }
      dim = cells.size() - 1;
      have_header = true;
      continue;
    }
    if (cells.size() != dim + 1) fail_at(line_no, "ragged feature rows");
    std::string id(cells.front());
    if (id.empty()) fail_at(line_no, "empty image id");
    if (!seen.insert(id).second) fail_at(line_no, "duplicate id \"" + id + "\"");
    std::vector<double> row(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      const auto cell = cells[k + 1];
      const char* first = cell.data();
      const char* last = cell.data() + cell.size();
      if (first != last && *first == '+') ++first;
      auto [ptr, ec] = std::from_chars(first, last, row[k]);
      if (ec != std::errc{} || ptr != last || cell.empty()) {
        fail_at(line_no, "non-numeric feature cell \"" + std::string(cell) + "\"");
      }
      if (!std::isfinite(row[k])) fail_at(line_no, "non-finite feature value");
    }
    ids.push_back(std::move(id));
    rows.push_back(std::move(row));
  }
  if (!have_header) throw DataError("feature file has no header");
  return FeatureMatrix(std::move(ids), std::move(rows));
}

FeatureMatrix load_features(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_features(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_features(std::ostream& out, const FeatureMatrix& features) {
  out << "id";
  for (std::size_t k = 0; k < features.dim(); ++k) out << ",f" << k;
  out << '\n';
  for (std::size_t i = 0; i < features.rows(); ++i) {
    out << features.ids()[i];
    for (double v : features.row(i)) out << ',' << format_double(v);
    out << '\n';
  }
}

void join_check(const Dataset& dataset, const FeatureMatrix& features) {
  constexpr std::size_t kListLimit = 10;
  std::vector<std::string> missing;
  std::vector<std::string> extra;
  std::size_t missing_count = 0;
  std::size_t extra_count = 0;
  for (const auto& img : dataset.images()) {
    if (!features.find(img.id)) {
      if (missing.size() < kListLimit) missing.push_back(img.id);
      ++missing_count;
    }
  }
  for (const auto& id : features.ids()) {
    if (!dataset.find(id)) {
      if (extra.size() < kListLimit) extra.push_back(id);
      ++extra_count;
    }
  }
  if (missing_count == 0 && extra_count == 0) return;

  auto list = [](const std::vector<std::string>& v, std::size_t total) {
    std::string s;
    for (const auto& id : v) s += (s.empty() ? "" : ", ") + id;
    if (total > v.size()) s += ", ... (" + std::to_string(total) + " total)";
    return s;
  };
  std::string msg = "feature ids do not match annotation ids";
  if (missing_count) msg += "; missing from features: " + list(missing, missing_count);
  if (extra_count) msg += "; extra in features: " + list(extra, extra_count);
  throw DataError(msg);
}

PredictionsByImage parse_predictions(std::istream& in) {
  PredictionsByImage out;
  for_each_json_line(in, [&](const json& j, std::size_t) {
    if (!j.is_object()) throw DataError("expected a JSON object");
    std::string id = require_string(j, "id");
    std::vector<Prediction> preds;
    if (auto it = j.find("predictions"); it != j.end()) {
      if (!it->is_array()) throw DataError("\"predictions\" must be an array");
      for (const auto& p : *it) {
        Prediction pred;
        pred.class_name = require_string(p, "class");
        if (pred.class_name.empty()) throw DataError("empty class name");
        auto bb = p.find("bbox");
        if (bb == p.end()) throw DataError("prediction without bbox");
        pred.bbox = parse_bbox(*bb);
        auto sc = p.find("score");
        if (sc == p.end() || !sc->is_number()) throw DataError("prediction without numeric score");
        pred.score = sc->get<double>();
        if (!std::isfinite(pred.score) || pred.score < 0.0 || pred.score > 1.0) {
          throw DataError("score must lie in [0, 1]");
        }
        preds.push_back(std::move(pred));
      }
    }
    if (!out.emplace(id, std::move(preds)).second) throw DataError("duplicate id \"" + id + "\"");
  });
  return out;
}

PredictionsByImage load_predictions(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return parse_predictions(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void write_predictions(std::ostream& out, const PredictionsByImage& predictions) {
  for (const auto& [id, preds] : predictions) {
    json arr = json::array();
    for (const auto& p : preds) {
      arr.push_back({{"class", p.class_name}, {"bbox", bbox_json(p.bbox)}, {"score", p.score}});
    }
    out << json{{"id", id}, {"predictions", std::move(arr)}}.dump() << '\n';
  }
}

}  // namespace annoloop
