#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include "vvsim/optics.hpp"
#include "vvsim/qcore.hpp"
#include "vvsim/tomo.hpp"

// Command implementations behind the vvsim binary. Each run_* call
// validates its configuration, writes its artifacts plus a manifest.json
// into cfg.out_dir and prints a short report; outputs are byte-identical
// across runs for a fixed (config, seed).
namespace vvsim {

inline constexpr const char* kVersion = "0.1.0";

// Raised when a computation fails numerically (e.g. the MLE iteration
// does not converge); the CLI maps it to exit code 2.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class MethodChoice { mle, linear, both };

struct ExperimentConfig {
  int m1 = 1;
  int m2 = 1;
  BellLabel bell = BellLabel::psi_minus;
  std::optional<double> werner_p;  // absent = ideal state
  double dark_rate = 0.0;
  long long n_per_setting = 10000;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  MethodChoice method = MethodChoice::mle;
  std::string state_file;      // optional input for tomo
  std::string projector_file;  // optional override of the built-in 34 set
  int projected_photon = 2;
  // render
  std::string render_mode = "radial";  // radial | azimuthal | pi+ | pi-
  int render_m = 1;
  std::optional<double> polarizer_deg;
  int grid_size = 256;
  double grid_extent = 3.0;
};

// p = (2C + 1)/3: the Werner weight whose intersystem concurrence is C.
double werner_p_from_concurrence(double concurrence);

BellLabel parse_bell_label(const std::string& text);
std::string bell_label_text(BellLabel label);

// The simulated source state: ideal Bell pair or its Werner mixture.
DensityMatrix source_state(const ExperimentConfig& cfg);

// JSON round-trip for density matrices (basis labels + re/im arrays).
std::string state_to_json(const DensityMatrix& rho, const ExperimentConfig& cfg);
DensityMatrix state_from_json_file(const std::string& path);

void run_generate(const ExperimentConfig& cfg, std::ostream& out);
void run_tomo(const ExperimentConfig& cfg, std::ostream& out);
void run_chsh(const ExperimentConfig& cfg, std::ostream& out);
void run_concurrence_dist(const ExperimentConfig& cfg, std::ostream& out);
void run_render(const ExperimentConfig& cfg, std::ostream& out);
void run_reproduce_tables(const ExperimentConfig& cfg, std::ostream& out);

}  // namespace vvsim
