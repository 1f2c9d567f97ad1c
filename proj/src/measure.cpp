#include "vvsim/measure.hpp"

#include <cmath>
#include <map>
#include <sstream>

#include "vvsim/rng.hpp"

namespace vvsim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2Inv = 0.70710678118654752440;

struct NamedQubitState {
  const char* id;
  Eigen::Vector2cd v;
};

// Six Pauli eigenstates of the polarization qubit, circular coordinates.
const std::vector<NamedQubitState>& pol_states() {
  static const std::vector<NamedQubitState> s = {
      {"H", {Complex(kSqrt2Inv, 0), Complex(kSqrt2Inv, 0)}},
      {"V", {Complex(0, kSqrt2Inv), Complex(0, -kSqrt2Inv)}},
      {"D", {Complex(0.5, 0.5), Complex(0.5, -0.5)}},
      {"A", {Complex(0.5, -0.5), Complex(0.5, 0.5)}},
      {"R", {Complex(1, 0), Complex(0, 0)}},
      {"L", {Complex(0, 0), Complex(1, 0)}},
  };
  return s;
}

// Six Pauli eigenstates of the OAM qubit (|+m>, |-m>) coordinates.
const std::vector<NamedQubitState>& oam_states() {
  static const std::vector<NamedQubitState> s = {
      {"O+", {Complex(1, 0), Complex(0, 0)}},
      {"O-", {Complex(0, 0), Complex(1, 0)}},
      {"OD+", {Complex(kSqrt2Inv, 0), Complex(kSqrt2Inv, 0)}},
      {"OD-", {Complex(kSqrt2Inv, 0), Complex(-kSqrt2Inv, 0)}},
      {"OC+", {Complex(kSqrt2Inv, 0), Complex(0, kSqrt2Inv)}},
      {"OC-", {Complex(kSqrt2Inv, 0), Complex(0, -kSqrt2Inv)}},
  };
  return s;
}

PureState photon_projector(const ModeBasis& basis, const NamedQubitState& pol,
                           const NamedQubitState& oam) {
  return PureState::normalized(basis, pol_oam_product(pol.v, oam.v));
}

double correlator_from_probs(const std::array<double, 4>& p) {
  // Order ++, +-, -+, --.
  return p[0] + p[3] - p[1] - p[2];
}

struct CorrelatorCounts {
  // Counts and variances ordered ++, +-, -+, --.
  std::array<double, 4> n{};
  std::array<double, 4> var{};
};

double correlator_from_counts(const CorrelatorCounts& c, double* variance) {
  const double total = c.n[0] + c.n[1] + c.n[2] + c.n[3];
  if (total <= 0.0)
    throw std::domain_error("chsh_s_from_counts: no counts in a basis pair");
  const std::array<double, 4> sign = {1.0, -1.0, -1.0, 1.0};
  double e = 0.0;
  for (int i = 0; i < 4; ++i) e += sign[i] * c.n[i];
  e /= total;
  if (variance) {
    double v = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double d = (sign[i] - e) / total;
      v += d * d * c.var[i];
    }
    *variance = v;
  }
  return e;
}

}  // namespace

std::vector<MeasurementSetting> tomography_settings(VVOrder m1, VVOrder m2) {
  const ModeBasis b1 = ModeBasis::vv_order(m1.magnitude());
  const ModeBasis b2 = ModeBasis::vv_order(m2.magnitude());
  std::vector<MeasurementSetting> out;
  out.reserve(1296);
  for (const auto& p1 : pol_states())
    for (const auto& o1 : oam_states())
      for (const auto& p2 : pol_states())
        for (const auto& o2 : oam_states()) {
          const std::string id1 = std::string(p1.id) + "." + o1.id;
          const std::string id2 = std::string(p2.id) + "." + o2.id;
          out.push_back({photon_projector(b1, p1, o1), photon_projector(b2, p2, o2),
                         id1, id2, id1 + "|" + id2});
        }
  return out;
}

double born_probability(const DensityMatrix& rho, const MeasurementSetting& setting) {
  if (setting.projector_1.dim() * setting.projector_2.dim() != rho.dim())
    throw std::invalid_argument("born_probability: dimension mismatch");
  const ComplexVector v =
      tensor(setting.projector_1.amp(), setting.projector_2.amp());
  const double p = (v.adjoint() * rho.matrix() * v)(0, 0).real();
  return std::clamp(p, 0.0, 1.0);
}

std::vector<CountRecord> simulate_counts(const DensityMatrix& rho,
                                         const std::vector<MeasurementSetting>& settings,
                                         long long n_per_setting, double dark_rate,
                                         std::uint64_t seed) {
  if (n_per_setting <= 0)
    throw std::invalid_argument("simulate_counts: n_per_setting must be positive");
  if (dark_rate < 0.0)
    throw std::invalid_argument("simulate_counts: dark_rate must be nonnegative");
  std::vector<CountRecord> out;
  out.reserve(settings.size());
  for (size_t k = 0; k < settings.size(); ++k) {
    std::mt19937_64 rng = make_stream(seed, k);
    const double p = born_probability(rho, settings[k]);
    const long long signal =
        poisson_sample(rng, static_cast<double>(n_per_setting) * p);
    const long long accidentals =
        poisson_sample(rng, static_cast<double>(n_per_setting) * dark_rate);
    out.push_back({settings[k], signal + accidentals, accidentals,
                   static_cast<double>(n_per_setting), false});
  }
  return out;
}

std::vector<CountRecord> dark_correct(const std::vector<CountRecord>& records) {
  std::vector<CountRecord> out = records;
  for (auto& r : out) {
    r.coincidences = std::max(0LL, r.coincidences - r.accidentals);
    r.corrected = true;
  }
  return out;
}

ChshBases chsh_bases() {
  const auto basis_at = [](double gamma) {
    std::array<Eigen::Vector2cd, 2> b;
    b[0] << std::cos(gamma), std::sin(gamma);
    b[1] << -std::sin(gamma), std::cos(gamma);
    return b;
  };
  ChshBases out;
  out.alice[0] = basis_at(0.0);
  out.alice[1] = basis_at(kPi / 4.0);
  out.bob[0] = basis_at(kPi / 8.0);
  out.bob[1] = basis_at(-kPi / 8.0);
  return out;
}

std::vector<MeasurementSetting> chsh_settings(VVOrder m1, VVOrder m2) {
  const ChshBases bases = chsh_bases();
  const char sign_char[2] = {'+', '-'};
  std::vector<MeasurementSetting> out;
  out.reserve(16);
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) {
          const std::string id1 = "a" + std::to_string(a) + sign_char[s];
          const std::string id2 = "b" + std::to_string(b) + sign_char[t];
          std::string label = "a" + std::to_string(a) + "b" + std::to_string(b) +
                              ":" + sign_char[s] + sign_char[t];
          out.push_back({lift_qubit(m1, bases.alice[a][s]),
                         lift_qubit(m2, bases.bob[b][t]), id1, id2,
                         std::move(label)});
        }
  return out;
}

CHSHResult chsh_s(const DensityMatrix& rho16, VVOrder m1, VVOrder m2) {
  const std::vector<MeasurementSetting> settings = chsh_settings(m1, m2);
  CHSHResult out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      std::array<double, 4> p{};
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t)
          p[s * 2 + t] = born_probability(
              rho16, settings[((a * 2 + b) * 2 + s) * 2 + t]);
      out.correlators[a * 2 + b] = correlator_from_probs({p[0], p[1], p[2], p[3]});
    }
  out.S = std::abs(out.correlators[0 * 2 + 0] + out.correlators[1 * 2 + 0] +
                   out.correlators[0 * 2 + 1] - out.correlators[1 * 2 + 1]);
  out.sigma_S = 0.0;
  return out;
}

CHSHResult chsh_s_from_counts(const std::vector<CountRecord>& records) {
  // Outcome index from the trailing sign of an id: '+' -> 0, '-' -> 1.
  const auto outcome = [](const std::string& id) {
    return id.back() == '+' ? 0 : 1;
  };
  std::array<CorrelatorCounts, 4> grid;
  std::array<std::array<bool, 4>, 4> seen{};
  for (const auto& r : records) {
    const std::string& i1 = r.setting.id_1;
    const std::string& i2 = r.setting.id_2;
    if (i1.size() != 3 || i2.size() != 3 || i1[0] != 'a' || i2[0] != 'b')
      throw std::invalid_argument("chsh_s_from_counts: unrecognized projector ids");
    const int a = i1[1] - '0', b = i2[1] - '0';
    if (a < 0 || a > 1 || b < 0 || b > 1)
      throw std::invalid_argument("chsh_s_from_counts: unrecognized basis index");
    const int cell = outcome(i1) * 2 + outcome(i2);
    if (seen[a * 2 + b][cell])
      throw std::invalid_argument("chsh_s_from_counts: duplicate record " +
                                  r.setting.label);
    seen[a * 2 + b][cell] = true;
    grid[a * 2 + b].n[cell] = static_cast<double>(r.coincidences);
    // Corrected counts are a difference of two Poisson draws.
    grid[a * 2 + b].var[cell] = static_cast<double>(
        r.corrected ? r.coincidences + 2 * r.accidentals : r.coincidences);
  }
  for (const auto& s : seen)
    for (bool cell : s)
      if (!cell)
        throw std::invalid_argument(
            "chsh_s_from_counts: incomplete count set (16 records required)");

  CHSHResult out;
  double var_total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double var = 0.0;
    out.correlators[i] = correlator_from_counts(grid[i], &var);
    var_total += var;
  }
  out.S = std::abs(out.correlators[0] + out.correlators[2] + out.correlators[1] -
                   out.correlators[3]);
  out.sigma_S = std::sqrt(var_total);
  return out;
}

void write_counts_csv(std::ostream& out, const std::vector<CountRecord>& records) {
  out << "label,projector1,projector2,coincidences,accidentals,integration,corrected\n";
  for (const auto& r : records) {
    char integration[32];
    std::snprintf(integration, sizeof(integration), "%.17g", r.integration);
    out << r.setting.label << "," << r.setting.id_1 << "," << r.setting.id_2 << ","
        << r.coincidences << "," << r.accidentals << "," << integration << ","
        << (r.corrected ? 1 : 0) << "\n";
  }
}

std::vector<CountRecord> read_counts_csv(std::istream& in, VVOrder m1, VVOrder m2) {
  std::map<std::pair<std::string, std::string>, MeasurementSetting> by_ids;
  for (auto& s : tomography_settings(m1, m2)) by_ids.insert({{s.id_1, s.id_2}, s});
  for (auto& s : chsh_settings(m1, m2)) by_ids.insert({{s.id_1, s.id_2}, s});

  std::vector<CountRecord> out;
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("counts csv: empty file");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 7)
      throw std::invalid_argument("counts csv: malformed row: " + line);
    const auto it = by_ids.find({fields[1], fields[2]});
    if (it == by_ids.end())
      throw std::invalid_argument("counts csv: unknown projector ids in row: " + line);
    CountRecord r{it->second, std::stoll(fields[3]), std::stoll(fields[4]),
                  std::stod(fields[5]), fields[6] == "1"};
    r.setting.label = fields[0];
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace vvsim
