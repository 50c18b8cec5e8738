#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "annoloop/error.hpp"
#include "annoloop/io.hpp"
#include "annoloop/serialize.hpp"
#include "cli/synthetic.hpp"

int main(int argc, char** argv) {
  CLI::App app{"annoloop-synth: write a clustered synthetic dataset (annotations + features)"};
  annoloop::cli::SyntheticSpec spec;
  std::string output_dir = "synthetic";
  app.add_option("--output_dir", output_dir, "Directory for annotations.jsonl and features.csv");
  app.add_option("--clusters", spec.clusters);
  app.add_option("--images_per_cluster", spec.images_per_cluster);
  app.add_option("--dim", spec.dim);
  app.add_option("--separation", spec.separation);
  app.add_option("--spread", spec.spread);
  app.add_option("--min_objects", spec.min_objects);
  app.add_option("--max_objects", spec.max_objects);
  app.add_option("--majority", spec.majority);
  app.add_option("--seed", spec.seed);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto data = annoloop::cli::make_synthetic(spec);
    std::ostringstream ann;
    annoloop::write_annotations(ann, data.dataset);
    std::ostringstream feat;
    annoloop::write_features(feat, data.features);
    const std::filesystem::path dir(output_dir);
    annoloop::write_file_atomic(dir / "annotations.jsonl", ann.str());
    annoloop::write_file_atomic(dir / "features.csv", feat.str());
    std::cout << "wrote " << data.dataset.size() << " images, " << data.dataset.total_objects()
              << " objects to " << dir.generic_string() << '\n';
  } catch (const annoloop::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const annoloop::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
  return 0;
}
