#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "annoloop/eval.hpp"
#include "annoloop/types.hpp"

namespace annoloop {

// Annotation JSON Lines:
//   {"id": "...", "seq": 3, "width": 640, "height": 480,
//    "objects": [{"class": "car", "bbox": [xmin, ymin, xmax, ymax]}]}
// `seq` defaults to the zero-based line index. Blank lines are skipped but
// still count towards the line index.
Dataset parse_annotations(std::istream& in);
Dataset load_annotations(const std::filesystem::path& path);
void write_annotations(std::ostream& out, const Dataset& dataset);

// Feature CSV: header `id,f0,...,f{D-1}` then one row per image.
FeatureMatrix parse_features(std::istream& in);
FeatureMatrix load_features(const std::filesystem::path& path);
void write_features(std::ostream& out, const FeatureMatrix& features);

/// Throws DataError unless the dataset and feature ids are the same set.
/// The message lists up to 10 missing and 10 extra ids.
void join_check(const Dataset& dataset, const FeatureMatrix& features);

using PredictionsByImage = std::map<std::string, std::vector<Prediction>>;

// Prediction JSON Lines:
//   {"id": "...", "predictions": [{"class": "...", "bbox": [...], "score": 0.9}]}
PredictionsByImage parse_predictions(std::istream& in);
PredictionsByImage load_predictions(const std::filesystem::path& path);
void write_predictions(std::ostream& out, const PredictionsByImage& predictions);

}  // namespace annoloop
