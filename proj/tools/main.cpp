#include <exception>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "annoloop/error.hpp"
#include "cli/commands.hpp"
#include "cli/run_config.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;

struct Subcommand {
  CLI::App* app = nullptr;
  std::string config_path;
  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
};

void add_config_flags(Subcommand& sub) {
  sub.app->add_option("--config", sub.config_path, "JSON config file; flags override its keys");
  for (const auto& [key, kind] : annoloop::cli::config_keys()) {
    const char* hint = "";
    switch (kind) {
      case annoloop::cli::ValueKind::string: hint = "TEXT"; break;
      case annoloop::cli::ValueKind::integer: hint = "UINT"; break;
      case annoloop::cli::ValueKind::number: hint = "FLOAT"; break;
      case annoloop::cli::ValueKind::boolean: hint = "true|false"; break;
      case annoloop::cli::ValueKind::string_list: hint = "A,B,..."; break;
      case annoloop::cli::ValueKind::number_list: hint = "X,Y,..."; break;
    }
    sub.options[key] = sub.app->add_option("--" + key, sub.values[key])->type_name(hint);
  }
}

annoloop::cli::RunConfig resolve(const Subcommand& sub) {
  std::map<std::string, std::string> overrides;
  for (const auto& [key, opt] : sub.options) {
    if (opt->count() > 0) overrides[key] = sub.values.at(key);
  }
  return annoloop::cli::resolve_config(sub.config_path, overrides);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"annoloop: distance-based image ordering and simulated train-annotate loops"};
  app.require_subcommand(1);

  Subcommand order{app.add_subcommand("order", "Order images and split them into batches")};
  Subcommand simulate{app.add_subcommand("simulate", "Run the train-annotate loop and cost it")};
  Subcommand eval{app.add_subcommand("eval", "Per-class AP and mAP of a prediction file")};
  Subcommand curve{app.add_subcommand("curve", "mAP of the held-out remainder vs labeled fraction")};
  for (Subcommand* sub : {&order, &simulate, &eval, &curve}) add_config_flags(*sub);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (order.app->parsed()) {
      annoloop::cli::cmd_order(resolve(order), std::cout);
    } else if (simulate.app->parsed()) {
      annoloop::cli::cmd_simulate(resolve(simulate), std::cout);
    } else if (eval.app->parsed()) {
      annoloop::cli::cmd_eval(resolve(eval), std::cout);
    } else if (curve.app->parsed()) {
      annoloop::cli::cmd_curve(resolve(curve), std::cout);
    }
  } catch (const annoloop::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const annoloop::DataError& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
