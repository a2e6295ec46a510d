// kahlerflow identities|ode|lattice [--config file] [--set key=value]... [--output dir] [--seed n]

#include <iostream>

#include "CLI11.hpp"
#include "kahlerflow/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kähler-Ricci flow curvature toolkit"};
  app.require_subcommand(1);

  kflow::CommandLine cl;
  std::string config_path, output_dir;
  std::uint64_t seed = 0;

  for (const char* name : {"identities", "ode", "lattice"}) {
    const char* help = name == std::string("identities") ? "Run the randomized identity suites"
                       : name == std::string("ode")      ? "Cone-preservation ensemble for the reaction ODE"
                                                         : "Potential-level flow on the flat torus";
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--set", cl.overrides, "Override a key, e.g. --set tolerances.excursion=1e-8")
        ->take_all()
        ->allow_extra_args(false);
    sub->add_option("--output", output_dir, "Output directory");
    sub->add_option("--seed", seed, "Random seed");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e) == 0 ? kflow::kExitOk : kflow::kExitConfigError;
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e) == 0 ? kflow::kExitOk : kflow::kExitConfigError;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kflow::kExitConfigError;
  }

  CLI::App* sub = app.get_subcommands().front();
  cl.command = sub->get_name();
  if (sub->count("--config")) cl.config_path = config_path;
  if (sub->count("--output")) cl.output_dir = output_dir;
  if (sub->count("--seed")) cl.seed = seed;
  return kflow::run_command(cl, std::cout, std::cerr);
}
