#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "scdmi/error.hpp"

int main(int argc, char** argv) {
  using namespace scdmi::cli;

  CLI::App app{"Shape-color differential moment invariants"};
  app.require_subcommand(1);

  RunConfig config;
  std::string out = ".";
  std::string fault;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--out", out, "Output directory (created if absent)");
    sub->add_option("--seed", config.seed, "Run seed");
  };

  auto* gen = app.add_subcommand("gen", "Write the 50 invariant polynomials, the denominator and a manifest");
  add_common(gen);

  auto* features = app.add_subcommand("features", "Extract feature vectors from PPM images");
  add_common(features);
  features->add_option("images", config.inputs, "P6 PPM files")->required();

  auto* verify = app.add_subcommand("verify", "Run the oracle, color-exactness and scaling suites");
  add_common(verify);
  verify->add_flag("--clamp", config.clamp, "Clamp color-transformed values to [0,1]");
  verify->add_option("--tol-color", config.tol_color, "Color-exactness tolerance");
  verify->add_option("--tol-shape", config.tol_shape, "Scaling-test tolerance");
  verify->add_option("--size", config.size, "Scene size for the color and scaling suites");
  verify->add_option("--inject-fault", fault, "Corrupt polynomial k:id before the oracle suite");

  auto* bench = app.add_subcommand("bench", "Classification accuracy and precision-recall curves");
  add_common(bench);
  bench->add_option("manifest", config.inputs, "Dataset manifest CSV (path,label,split)");
  bench->add_flag("--synthetic", config.synthetic, "Generate the dataset from the seed");
  bench->add_option("--classes", config.classes, "Synthetic classes");
  bench->add_option("--transforms", config.transforms, "Transformed copies per class");
  bench->add_option("--size", config.size, "Synthetic image size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kSuccess : kUsageOrIo;
  }
  config.out = out;
  if (!fault.empty()) config.inject_fault = fault;

  try {
    if (gen->parsed()) return cmd_gen(config, std::cout);
    if (features->parsed()) return cmd_features(config, std::cout);
    if (verify->parsed()) return cmd_verify(config, std::cout);
    return cmd_bench(config, std::cout);
  } catch (const scdmi::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageOrIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageOrIo;
  }
}
