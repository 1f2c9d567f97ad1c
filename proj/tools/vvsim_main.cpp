#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "vvsim/cli.hpp"

namespace {

using vvsim::ExperimentConfig;

struct Options {
  ExperimentConfig cfg;
  std::vector<int> orders{1, 1};
  std::string bell = "psi-";
  std::string method = "mle";
  double werner_p = -1.0;             // <0 = unset
  double target_concurrence = -1.0;   // <0 = unset
  double polarizer_deg = -1000.0;     // sentinel = unset
};

void finalize(Options& opt) {
  opt.cfg.m1 = opt.orders.at(0);
  opt.cfg.m2 = opt.orders.at(1);
  opt.cfg.bell = vvsim::parse_bell_label(opt.bell);
  if (opt.werner_p >= 0.0 && opt.target_concurrence >= 0.0)
    throw std::invalid_argument("give either --werner-p or --target-concurrence, not both");
  if (opt.werner_p >= 0.0) opt.cfg.werner_p = opt.werner_p;
  if (opt.target_concurrence >= 0.0)
    opt.cfg.werner_p = vvsim::werner_p_from_concurrence(opt.target_concurrence);
  if (opt.method == "mle")
    opt.cfg.method = vvsim::MethodChoice::mle;
  else if (opt.method == "linear")
    opt.cfg.method = vvsim::MethodChoice::linear;
  else if (opt.method == "both")
    opt.cfg.method = vvsim::MethodChoice::both;
  else
    throw std::invalid_argument("unknown method: " + opt.method);
  if (opt.polarizer_deg > -999.0) opt.cfg.polarizer_deg = opt.polarizer_deg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vvsim: simulation and analysis of entangled vector-vortex photon pairs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value configuration file; flags win");
  app.get_config_formatter_base()->comment('#');

  Options opt;

  // Shared options live on the top level so the flat config grammar and
  // every subcommand see the same keys; subcommands pass unknown flags up.
  app.add_option("--orders", opt.orders,
                 "OAM orders m1 m2 (negative = pi-mode encoding)")
      ->expected(2);
  app.add_option("--bell", opt.bell, "Bell label: psi-, psi+, phi-, phi+");
  app.add_option("--werner-p", opt.werner_p, "Werner mixing weight in [1/3, 1]");
  app.add_option("--target-concurrence", opt.target_concurrence,
                 "derive werner-p from a target intersystem concurrence, p = (2C+1)/3");
  auto* dark_opt = app.add_option("--dark-rate", opt.cfg.dark_rate,
                                  "accidental rate per unit exposure");
  app.add_option("--n", opt.cfg.n_per_setting, "expected counts per setting");
  app.add_option("--seed", opt.cfg.seed, "64-bit RNG seed");
  app.add_option("--out", opt.cfg.out_dir, "output directory");
  app.add_option("--method", opt.method, "tomography method: mle, linear or both");
  app.add_option("--state", opt.cfg.state_file,
                 "input state JSON for tomo (default: generate inline)");
  app.add_option("--photon", opt.cfg.projected_photon,
                 "photon to project on in concurrence-dist (1 or 2)");
  app.add_option("--projectors", opt.cfg.projector_file,
                 "projector set file (default: built-in 34 states)");
  app.add_option("--m", opt.cfg.render_m, "render: VV order (nonzero)");
  app.add_option("--mode", opt.cfg.render_mode,
                 "render: radial, azimuthal, pi+ or pi-");
  app.add_option("--polarizer", opt.polarizer_deg,
                 "render: linear polarizer angle in degrees");
  app.add_option("--size", opt.cfg.grid_size, "render: grid pixels per side (>= 64)");
  app.add_option("--extent", opt.cfg.grid_extent,
                 "render: grid half-width in beam waists");

  std::string command;
  const auto subcommand = [&](const char* name, const char* desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->fallthrough();
    cmd->callback([&command, name] { command = name; });
    return cmd;
  };
  subcommand("generate", "build the source state, report concurrence and purity");
  subcommand("tomo", "simulate the 1296-setting tomography and reconstruct");
  subcommand("chsh", "analytic and simulated CHSH test, raw and dark-corrected");
  subcommand("concurrence-dist",
             "conditional concurrence over the 34-state projector set");
  subcommand("render", "sample a VV mode's transverse field and count petals");
  subcommand("reproduce-tables", "run all five order pairs of the reference tables");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  // reproduce-tables defaults to a visible raw-vs-corrected gap.
  if (command == "reproduce-tables" && dark_opt->count() == 0)
    opt.cfg.dark_rate = 0.02;

  try {
    finalize(opt);
    if (command == "generate") vvsim::run_generate(opt.cfg, std::cout);
    else if (command == "tomo") vvsim::run_tomo(opt.cfg, std::cout);
    else if (command == "chsh") vvsim::run_chsh(opt.cfg, std::cout);
    else if (command == "concurrence-dist") vvsim::run_concurrence_dist(opt.cfg, std::cout);
    else if (command == "render") vvsim::run_render(opt.cfg, std::cout);
    else if (command == "reproduce-tables") vvsim::run_reproduce_tables(opt.cfg, std::cout);
  } catch (const vvsim::NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
