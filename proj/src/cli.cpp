#include "vvsim/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vvsim/measure.hpp"
#include "vvsim/metrics.hpp"
#include "vvsim/render.hpp"
#include "vvsim/rng.hpp"

namespace vvsim {

namespace {

constexpr double kPi = 3.14159265358979323846;

// The five order pairs and intersystem concurrences of the reference
// tables (raw/corrected S only guide the dark-count direction check).
struct TablePair {
  int m1, m2;
  double concurrence;
};
constexpr TablePair kTablePairs[] = {
    {1, 1, 0.949}, {1, 5, 0.906}, {1, 10, 0.863}, {3, 5, 0.908}, {1, -1, 0.914}};

std::string fmt(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.m1 == 0 || cfg.m2 == 0)
    throw std::invalid_argument("config: orders must be nonzero");
  if (cfg.werner_p && (*cfg.werner_p < 1.0 / 3.0 - 1e-12 || *cfg.werner_p > 1.0 + 1e-12))
    throw std::invalid_argument("config: werner_p must lie in [1/3, 1]");
  if (cfg.dark_rate < 0.0)
    throw std::invalid_argument("config: dark_rate must be nonnegative");
  if (cfg.n_per_setting <= 0)
    throw std::invalid_argument("config: n must be positive");
  if (cfg.projected_photon != 1 && cfg.projected_photon != 2)
    throw std::invalid_argument("config: photon must be 1 or 2");
}

// Canonical flat key=value dump of the fields that shape the outputs
// (out_dir excluded so identical runs into different directories hash
// alike).
std::string canonical_config(const ExperimentConfig& cfg) {
  std::ostringstream s;
  s << "bell=" << bell_label_text(cfg.bell) << "\n"
    << "dark_rate=" << fmt_g(cfg.dark_rate) << "\n"
    << "grid_extent=" << fmt_g(cfg.grid_extent) << "\n"
    << "grid_size=" << cfg.grid_size << "\n"
    << "m1=" << cfg.m1 << "\n"
    << "m2=" << cfg.m2 << "\n"
    << "method="
    << (cfg.method == MethodChoice::mle
            ? "mle"
            : cfg.method == MethodChoice::linear ? "linear" : "both")
    << "\n"
    << "n=" << cfg.n_per_setting << "\n"
    << "photon=" << cfg.projected_photon << "\n"
    << "polarizer_deg="
    << (cfg.polarizer_deg ? fmt_g(*cfg.polarizer_deg) : "none") << "\n"
    << "projector_file=" << cfg.projector_file << "\n"
    << "render_m=" << cfg.render_m << "\n"
    << "render_mode=" << cfg.render_mode << "\n"
    << "seed=" << cfg.seed << "\n"
    << "state_file=" << cfg.state_file << "\n"
    << "werner_p=" << (cfg.werner_p ? fmt_g(*cfg.werner_p) : "none") << "\n";
  return s.str();
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

std::filesystem::path prepare_out_dir(const ExperimentConfig& cfg) {
  const std::filesystem::path dir(cfg.out_dir);
  std::filesystem::create_directories(dir);
  return dir;
}

void write_manifest(const ExperimentConfig& cfg, const std::string& command) {
  nlohmann::json doc;
  doc["version"] = kVersion;
  doc["command"] = command;
  doc["seed"] = cfg.seed;
  const std::string canon = canonical_config(cfg);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(command + "\n" + canon)));
  doc["config_hash"] = hash;
  nlohmann::json conf;
  std::istringstream lines(canon);
  std::string line;
  while (std::getline(lines, line)) {
    const auto eq = line.find('=');
    conf[line.substr(0, eq)] = line.substr(eq + 1);
  }
  doc["config"] = conf;
  std::ofstream out(std::filesystem::path(cfg.out_dir) / "manifest.json");
  out << doc.dump(2) << "\n";
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << text;
}

std::vector<ProjectorEntry> projector_set_for(const ExperimentConfig& cfg,
                                              const ModeBasis& basis) {
  if (cfg.projector_file.empty()) return default_projector_set(basis);
  return load_projector_set_file(cfg.projector_file, basis);
}

struct ChshRow {
  CHSHResult analytic, raw, corrected;
};

ChshRow chsh_row(const DensityMatrix& rho, VVOrder m1, VVOrder m2,
                 long long n, double dark_rate, std::uint64_t seed) {
  ChshRow row;
  row.analytic = chsh_s(rho, m1, m2);
  const auto records = simulate_counts(rho, chsh_settings(m1, m2), n, dark_rate, seed);
  row.raw = chsh_s_from_counts(records);
  row.corrected = chsh_s_from_counts(dark_correct(records));
  return row;
}

std::string chsh_csv_header() {
  return "m1,m2,S_analytic,S_raw,sigma_raw,S_corrected,sigma_corrected\n";
}

std::string chsh_csv_row(int m1, int m2, const ChshRow& row) {
  std::ostringstream s;
  s << m1 << "," << m2 << "," << fmt_g(row.analytic.S) << "," << fmt_g(row.raw.S)
    << "," << fmt_g(row.raw.sigma_S) << "," << fmt_g(row.corrected.S) << ","
    << fmt_g(row.corrected.sigma_S) << "\n";
  return s.str();
}

}  // namespace

double werner_p_from_concurrence(double concurrence) {
  if (concurrence < 0.0 || concurrence > 1.0)
    throw std::invalid_argument("target concurrence must lie in [0, 1]");
  return (2.0 * concurrence + 1.0) / 3.0;
}

BellLabel parse_bell_label(const std::string& text) {
  if (text == "psi-") return BellLabel::psi_minus;
  if (text == "psi+") return BellLabel::psi_plus;
  if (text == "phi-") return BellLabel::phi_minus;
  if (text == "phi+") return BellLabel::phi_plus;
  throw std::invalid_argument("unknown Bell label: " + text +
                              " (expected psi-, psi+, phi-, phi+)");
}

std::string bell_label_text(BellLabel label) {
  switch (label) {
    case BellLabel::psi_minus: return "psi-";
    case BellLabel::psi_plus: return "psi+";
    case BellLabel::phi_minus: return "phi-";
    case BellLabel::phi_plus: return "phi+";
  }
  return "?";
}

DensityMatrix source_state(const ExperimentConfig& cfg) {
  const VVOrder m1(cfg.m1), m2(cfg.m2);
  if (cfg.werner_p) return werner_vv(m1, m2, cfg.bell, *cfg.werner_p);
  return projector(bell_vv(m1, m2, cfg.bell));
}

std::string state_to_json(const DensityMatrix& rho, const ExperimentConfig& cfg) {
  nlohmann::json doc;
  doc["orders"] = {cfg.m1, cfg.m2};
  doc["bell"] = bell_label_text(cfg.bell);
  if (cfg.werner_p)
    doc["werner_p"] = *cfg.werner_p;
  else
    doc["werner_p"] = nullptr;
  std::vector<std::string> labels;
  for (int i = 0; i < rho.dim(); ++i) labels.push_back(rho.basis().label_text(i));
  doc["basis"] = labels;
  std::vector<std::vector<double>> re(rho.dim()), im(rho.dim());
  for (int i = 0; i < rho.dim(); ++i)
    for (int j = 0; j < rho.dim(); ++j) {
      re[i].push_back(rho.matrix()(i, j).real());
      im[i].push_back(rho.matrix()(i, j).imag());
    }
  doc["matrix"]["re"] = re;
  doc["matrix"]["im"] = im;
  return doc.dump(2);
}

DensityMatrix state_from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("state file: cannot open " + path);
  nlohmann::json doc;
  in >> doc;
  const auto& orders = doc.at("orders");
  const ModeBasis basis =
      ModeBasis::tensor(ModeBasis::vv_order(std::abs(orders.at(0).get<int>())),
                        ModeBasis::vv_order(std::abs(orders.at(1).get<int>())));
  const auto& re = doc.at("matrix").at("re");
  const auto& im = doc.at("matrix").at("im");
  ComplexMatrix m(basis.dim(), basis.dim());
  for (int i = 0; i < basis.dim(); ++i)
    for (int j = 0; j < basis.dim(); ++j)
      m(i, j) = Complex(re.at(i).at(j).get<double>(), im.at(i).at(j).get<double>());
  return DensityMatrix(basis, std::move(m));
}

void run_generate(const ExperimentConfig& cfg, std::ostream& out) {
  validate(cfg);
  const auto dir = prepare_out_dir(cfg);
  const DensityMatrix rho = source_state(cfg);
  const VVOrder m1(cfg.m1), m2(cfg.m2);

  const IntersystemConcurrence inter = intersystem_concurrence(rho, m1, m2);
  out << "state: orders (" << cfg.m1 << "," << cfg.m2 << ") bell "
      << bell_label_text(cfg.bell)
      << (cfg.werner_p ? " werner_p " + fmt(*cfg.werner_p, 6) : std::string(" ideal"))
      << "\n";
  if (m1.pi_encoded() || m2.pi_encoded())
    out << "note: photon " << (m1.pi_encoded() ? 1 : 2)
        << " uses the pi-mode qubit basis {pi+, pi-}\n";
  out << "intersystem concurrence: " << fmt(inter.report.value, 6)
      << " (subspace weight " << fmt(inter.subspace_weight, 6) << ")\n";
  out << "purity: " << fmt(purity(rho), 6) << "\n";

  write_text_file(dir / "state.json", state_to_json(rho, cfg) + "\n");
  write_manifest(cfg, "generate");
  out << "wrote " << (dir / "state.json").string() << "\n";
}

void run_tomo(const ExperimentConfig& cfg, std::ostream& out) {
  validate(cfg);
  const auto dir = prepare_out_dir(cfg);
  const DensityMatrix rho = cfg.state_file.empty()
                                ? source_state(cfg)
                                : state_from_json_file(cfg.state_file);
  const VVOrder m1(cfg.m1), m2(cfg.m2);

  const auto settings = tomography_settings(m1, m2);
  auto records = simulate_counts(rho, settings, cfg.n_per_setting, cfg.dark_rate,
                                 cfg.seed);
  if (cfg.dark_rate > 0.0) records = dark_correct(records);
  {
    std::ofstream counts(dir / "counts.csv");
    write_counts_csv(counts, records);
  }
  out << "simulated " << records.size() << " settings at n=" << cfg.n_per_setting
      << (cfg.dark_rate > 0.0 ? " (dark-corrected)" : "") << "\n";

  bool mle_failed = false;
  if (cfg.method != MethodChoice::linear) {
    const TomographyResult result = mle_reconstruct(records, rho.basis());
    write_text_file(dir / "tomography_mle.json",
                    tomography_result_json(result, rho) + "\n");
    out << "mle: fidelity " << fmt(fidelity(result.rho, rho), 6) << ", iterations "
        << result.iterations << ", likelihood trace length "
        << result.likelihood_trace.size() << ", converged "
        << (result.converged ? "yes" : "no") << "\n";
    mle_failed = !result.converged;
  }
  if (cfg.method != MethodChoice::mle) {
    const ComplexMatrix raw = linear_inversion(records);
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> eig(raw, Eigen::EigenvaluesOnly);
    const bool unphysical = eig.eigenvalues().minCoeff() < -1e-9;
    TomographyResult result{project_physical(raw, rho.basis()),
                            TomoMethod::linear,
                            {},
                            0,
                            true,
                            log_likelihood(raw, records)};
    write_text_file(dir / "tomography_linear.json",
                    tomography_result_json(result, rho) + "\n");
    out << "linear: fidelity " << fmt(fidelity(result.rho, rho), 6)
        << (unphysical ? " (raw inversion unphysical, projected)" : "") << "\n";
  }
  write_manifest(cfg, "tomo");
  if (mle_failed) throw NumericalError("mle did not converge");
}

void run_chsh(const ExperimentConfig& cfg, std::ostream& out) {
  validate(cfg);
  const auto dir = prepare_out_dir(cfg);
  const DensityMatrix rho = source_state(cfg);
  const VVOrder m1(cfg.m1), m2(cfg.m2);

  const ChshRow row = chsh_row(rho, m1, m2, cfg.n_per_setting, cfg.dark_rate,
                               cfg.seed);
  out << "S analytic:  " << fmt(row.analytic.S, 6) << "\n";
  out << "S raw:       " << fmt(row.raw.S, 6) << " +- " << fmt(row.raw.sigma_S, 6)
      << "\n";
  out << "S corrected: " << fmt(row.corrected.S, 6) << " +- "
      << fmt(row.corrected.sigma_S, 6) << "\n";

  write_text_file(dir / "chsh.csv",
                  chsh_csv_header() + chsh_csv_row(cfg.m1, cfg.m2, row));
  write_manifest(cfg, "chsh");
}

void run_concurrence_dist(const ExperimentConfig& cfg, std::ostream& out) {
  validate(cfg);
  const auto dir = prepare_out_dir(cfg);
  const DensityMatrix rho = source_state(cfg);

  const int projected = cfg.projected_photon;
  const int observed = projected == 1 ? 2 : 1;
  const ModeBasis basis = ModeBasis::vv_order(
      std::abs(projected == 1 ? cfg.m1 : cfg.m2));
  const auto projectors = projector_set_for(cfg, basis);
  const ConcurrenceDistribution dist =
      concurrence_distribution(rho, projectors, projected);

  std::ostringstream csv;
  csv << "label,concurrence,region\n";
  for (const auto& e : dist.entries)
    csv << e.label << "," << fmt_g(e.concurrence) << ","
        << (e.entangled_region ? "entangled" : "separable") << "\n";
  write_text_file(dir / "concurrence_dist.csv", csv.str());

  out << "projected photon " << projected << ", observed photon " << observed
      << ": " << dist.entangled_labels.size() << " entangled, "
      << dist.separable_labels.size() << " separable\n";
  write_manifest(cfg, "concurrence-dist");
}

void run_render(const ExperimentConfig& cfg, std::ostream& out) {
  validate(cfg);
  const auto dir = prepare_out_dir(cfg);
  const VVOrder m(cfg.render_m);
  PureState state = [&]() {
    if (cfg.render_mode == "radial") return vv_state(m, VVKind::radial);
    if (cfg.render_mode == "azimuthal") return vv_state(m, VVKind::azimuthal);
    if (cfg.render_mode == "pi+") return pi_mode(m, PiSign::plus);
    if (cfg.render_mode == "pi-") return pi_mode(m, PiSign::minus);
    throw std::invalid_argument("render: unknown mode " + cfg.render_mode);
  }();

  const FieldGrid field = transverse_field(state, cfg.grid_size, cfg.grid_extent);
  const StokesMap stokes = stokes_map(field);
  write_stokes_csv((dir / "stokes").string(), stokes);

  const ScalarMap intensity =
      cfg.polarizer_deg
          ? polarizer_intensity(field, *cfg.polarizer_deg * kPi / 180.0)
          : total_intensity(field);
  write_ppm((dir / "intensity.ppm").string(), intensity);
  write_angular_profile_csv((dir / "angular_profile.csv").string(),
                            angular_profile(intensity));

  const PetalCount petals = count_petals(intensity);
  out << "mode " << cfg.render_mode << " m=" << cfg.render_m;
  if (cfg.polarizer_deg)
    out << " through polarizer at " << fmt_g(*cfg.polarizer_deg) << " deg";
  out << "\n";
  if (petals.azimuthally_uniform)
    out << "petals: 0 (azimuthally uniform)\n";
  else
    out << "petals: " << petals.count << "\n";
  write_manifest(cfg, "render");
}

void run_reproduce_tables(const ExperimentConfig& cfg, std::ostream& out) {
  validate(cfg);
  const auto dir = prepare_out_dir(cfg);

  std::ostringstream concurrence_csv, chsh_csv;
  concurrence_csv << "m1,m2,target_concurrence,werner_p,model_concurrence,"
                     "subspace_weight\n";
  chsh_csv << chsh_csv_header();

  out << "pair      target_C  model_C   S_ideal   S_analytic  S_raw     "
         "S_corrected\n";
  for (size_t i = 0; i < std::size(kTablePairs); ++i) {
    const TablePair& pair = kTablePairs[i];
    const VVOrder m1(pair.m1), m2(pair.m2);
    const double p = werner_p_from_concurrence(pair.concurrence);

    const DensityMatrix ideal = projector(bell_vv(m1, m2, cfg.bell));
    const double s_ideal = chsh_s(ideal, m1, m2).S;

    const DensityMatrix noisy = werner_vv(m1, m2, cfg.bell, p);
    const IntersystemConcurrence inter = intersystem_concurrence(noisy, m1, m2);
    const ChshRow row = chsh_row(noisy, m1, m2, cfg.n_per_setting, cfg.dark_rate,
                                 stream_seed(cfg.seed, i));

    concurrence_csv << pair.m1 << "," << pair.m2 << "," << fmt_g(pair.concurrence)
                    << "," << fmt_g(p) << "," << fmt_g(inter.report.value) << ","
                    << fmt_g(inter.subspace_weight) << "\n";
    chsh_csv << chsh_csv_row(pair.m1, pair.m2, row);

    char line[160];
    std::snprintf(line, sizeof(line),
                  "(%d,%d)%*s %.4f    %.4f    %.6f  %.6f    %.4f    %.4f\n",
                  pair.m1, pair.m2,
                  static_cast<int>(4 - std::to_string(pair.m1).size() -
                                   std::to_string(pair.m2).size()),
                  "", pair.concurrence, inter.report.value, s_ideal,
                  row.analytic.S, row.raw.S, row.corrected.S);
    out << line;
  }
  write_text_file(dir / "table_concurrence.csv", concurrence_csv.str());
  write_text_file(dir / "table_chsh.csv", chsh_csv.str());
  write_manifest(cfg, "reproduce-tables");
  out << "wrote " << (dir / "table_concurrence.csv").string() << " and "
      << (dir / "table_chsh.csv").string() << "\n";
}

}  // namespace vvsim
