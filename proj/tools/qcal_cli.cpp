#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qcal/commands.hpp"
#include "qcal/config.hpp"
#include "qcal/errors.hpp"

namespace {

int fail(const std::string& command, const char* kind, int code, const std::string& message) {
  nlohmann::json rec = {{"status", "error"}, {"command", command}, {"kind", kind}, {"exit_code", code},
                        {"message", message}};
  std::cerr << rec.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Anisotropic EIT: CEM simulation, quasi-conformal maps and Calderon reconstruction"};
  app.require_subcommand(1);
  app.footer(qcal::config_reference());

  std::string config_path, output_dir;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--output-dir", output_dir, "override output_dir from the config");
  };

  auto* simulate = app.add_subcommand("simulate", "simulate electrode voltages and the DN matrix");
  add_common(simulate);

  auto* map = app.add_subcommand("map", "solve the Beltrami equation for the config's A0");
  add_common(map);

  std::string dn_path, map_bin, map_json;
  auto* reconstruct = app.add_subcommand("reconstruct", "reconstruct a(x) for every truncation radius");
  add_common(reconstruct);
  reconstruct->add_option("--dn", dn_path, "DN matrix JSON from simulate")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--map", map_bin, "QC map binary grid from map")->required()->check(CLI::ExistingFile);
  reconstruct->add_option("--map-meta", map_json, "QC map JSON sidecar")->required()->check(CLI::ExistingFile);

  std::string recon_bin, recon_json;
  auto* evaluate = app.add_subcommand("evaluate", "compare a reconstruction with the true phantom");
  add_common(evaluate);
  evaluate->add_option("--recon", recon_bin, "reconstruction binary grid")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--recon-meta", recon_json, "reconstruction JSON sidecar")->required()->check(CLI::ExistingFile);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail("", "usage", 2, e.what());
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    qcal::RunConfig config = qcal::load_config(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;
    std::vector<std::string> files;
    if (command == "simulate") files = qcal::cmd_simulate(config);
    else if (command == "map") files = qcal::cmd_map(config);
    else if (command == "reconstruct") files = qcal::cmd_reconstruct(config, dn_path, map_bin, map_json);
    else files = qcal::cmd_evaluate(config, recon_bin, recon_json);
    for (const auto& f : files) std::cout << f << '\n';
    return 0;
  } catch (const qcal::ConfigError& e) {
    return fail(command, "config", 2, e.what());
  } catch (const qcal::NumericalError& e) {
    return fail(command, "numerical", 3, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(command, "io", 2, e.what());
  } catch (const std::exception& e) {
    return fail(command, "numerical", 3, e.what());
  }
}
