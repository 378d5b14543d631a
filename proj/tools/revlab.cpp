#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "revlab/experiments.hpp"
#include "revlab/spectral.hpp"
#include "revlab/verify.hpp"
#include "revlab/version.hpp"

namespace {

revlab::json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw revlab::ArgumentError("cannot open config file: " + path);
  revlab::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw revlab::ArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  return j;
}

int cmd_run(const std::string& config_path) {
  auto manifest = load_json(config_path);
  auto out = revlab::run_experiment(manifest);
  for (const auto& f : out.files) std::printf("wrote %s\n", f.c_str());
  return 0;
}

int cmd_verify(const std::string& level) {
  auto results = revlab::run_acceptance(level == "full" ? revlab::VerifyLevel::Full
                                                        : revlab::VerifyLevel::Quick);
  return revlab::print_acceptance(results, stdout) == 0 ? 0 : 1;
}

int cmd_spectrum(const std::string& config_path, const std::string& output) {
  auto spec = revlab::build_model_from_config(load_json(config_path));
  auto energies = revlab::full_spectrum(spec);

  std::vector<std::pair<double, long long>> binned;
  for (double e : energies) {
    if (!binned.empty() && e - binned.back().first <= revlab::kEnergyBinTol)
      ++binned.back().second;
    else
      binned.emplace_back(e, 1);
  }
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!output.empty()) {
    file.open(output);
    if (!file) throw revlab::ArgumentError("cannot open output: " + output);
    os = &file;
  }
  *os << "index,energy,weight\n";
  for (std::size_t i = 0; i < binned.size(); ++i)
    *os << i << ',' << revlab::format_double(binned[i].first) << ',' << binned[i].second << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"revlab: local-reversibility laboratory for exactly diagonalizable spin systems"};
  app.set_version_flag("--version", revlab::kVersion);
  app.require_subcommand(1);

  std::string config_path, output;
  std::string level = "quick";

  auto* run = app.add_subcommand("run", "run an experiment manifest");
  run->add_option("config", config_path, "JSON manifest")->required();

  auto* verify = app.add_subcommand("verify", "run the verification suite");
  verify->add_option("--level", level, "quick|full")
      ->check(CLI::IsMember({"quick", "full"}))
      ->capture_default_str();

  auto* model = app.add_subcommand("model", "model utilities");
  auto* spectrum = model->add_subcommand("spectrum", "full spectrum of a model config");
  spectrum->add_option("config", config_path, "JSON model config")->required();
  spectrum->add_option("--output", output, "CSV path (default: stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_path);
    if (verify->parsed()) return cmd_verify(level);
    if (model->parsed() && spectrum->parsed()) return cmd_spectrum(config_path, output);
    std::fprintf(stderr, "no subcommand\n");
    return 2;
  } catch (const revlab::ArgumentError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const revlab::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
