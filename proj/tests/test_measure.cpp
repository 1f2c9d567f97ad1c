#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "test_support.hpp"
#include "vvsim/measure.hpp"
#include "vvsim/metrics.hpp"
#include "vvsim/rng.hpp"

using namespace vvsim;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTsirelson = 2.0 * 1.41421356237309504880;

DensityMatrix ideal_pair(int m1, int m2) {
  return projector(bell_vv(VVOrder(m1), VVOrder(m2), BellLabel::psi_minus));
}

ModeBasis pair_basis(int m1, int m2) {
  return ModeBasis::tensor(ModeBasis::vv_order(std::abs(m1)),
                           ModeBasis::vv_order(std::abs(m2)));
}

}  // namespace

TEST_SUITE("measure") {

TEST_CASE("tomography settings enumerate the hyper-complete product set") {
  const auto settings = tomography_settings(VVOrder(1), VVOrder(5));
  REQUIRE(settings.size() == 1296);
  for (size_t k = 0; k < settings.size(); k += 97) {
    CHECK(std::abs(settings[k].projector_1.amp().norm() - 1.0) < 1e-12);
    CHECK(std::abs(settings[k].projector_2.amp().norm() - 1.0) < 1e-12);
    // Product across the pol/OAM factorization: the reshaped amplitude
    // matrix has rank one.
    for (const PureState* p : {&settings[k].projector_1, &settings[k].projector_2}) {
      const Eigen::Matrix4cd perm = mode_to_pol_oam();
      const ComplexVector t = perm * p->amp();
      Eigen::Matrix2cd m;
      m << t[0], t[1], t[2], t[3];
      CHECK(Eigen::JacobiSVD<ComplexMatrix>(m).singularValues()[1] < 1e-12);
    }
  }
  CHECK(settings.front().label == "H.O+|H.O+");
  CHECK(settings.back().label == "L.OC-|L.OC-");
}

TEST_CASE("tomography settings are informationally complete (rank 256)") {
  const auto settings = tomography_settings(VVOrder(1), VVOrder(1));
  // Independent rank oracle: the real-parametrized measurement map from
  // Hermitian matrices to probabilities, assembled here from scratch.
  Eigen::MatrixXd a(settings.size(), 256);
  for (size_t k = 0; k < settings.size(); ++k) {
    const ComplexVector v =
        tensor(settings[k].projector_1.amp(), settings[k].projector_2.amp());
    int col = 0;
    for (int i = 0; i < 16; ++i) a(k, col++) = std::norm(v[i]);
    for (int i = 0; i < 16; ++i)
      for (int j = i + 1; j < 16; ++j) {
        const Complex cross = std::conj(v[i]) * v[j];
        a(k, col++) = 2.0 * cross.real();
        a(k, col++) = -2.0 * cross.imag();
      }
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  CHECK(qr.rank() == 256);
}

TEST_CASE("born probabilities for projector, mixed and singlet states") {
  const auto settings = tomography_settings(VVOrder(1), VVOrder(1));
  const MeasurementSetting& first = settings.front();

  const DensityMatrix aligned =
      projector(tensor(first.projector_1, first.projector_2));
  CHECK(born_probability(aligned, first) == doctest::Approx(1.0));

  const DensityMatrix mixed(pair_basis(1, 1),
                            ComplexMatrix::Identity(16, 16) / 16.0);
  CHECK(born_probability(mixed, first) == doctest::Approx(1.0 / 16.0));

  const PureState rad = vv_state(VVOrder(1), VVKind::radial);
  const MeasurementSetting rad_rad{rad, rad, "r", "r", "r|r"};
  CHECK(born_probability(ideal_pair(1, 1), rad_rad) ==
        doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("born probabilities sum to one over a complete product basis") {
  std::mt19937_64 rng(41);
  const DensityMatrix rho(pair_basis(1, 1), vvtest::random_density(rng, 16));
  const ComplexMatrix u1 = vvtest::random_unitary(rng, 4);
  const ComplexMatrix u2 = vvtest::random_unitary(rng, 4);
  double total = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const MeasurementSetting s{
          PureState(ModeBasis::vv_order(1), u1.col(i)),
          PureState(ModeBasis::vv_order(1), u2.col(j)), "", "", ""};
      total += born_probability(rho, s);
    }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("poisson sampler matches theoretical moments") {
  // Moment check at 6 sigma over 2e5 draws per mean, spanning both the
  // inversion and PTRS branches.
  std::mt19937_64 rng = make_stream(99, 0);
  for (double mean : {0.5, 3.0, 9.5, 10.0, 40.0, 12000.0}) {
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = static_cast<double>(poisson_sample(rng, mean));
      sum += x;
      sq += x * x;
    }
    const double sample_mean = sum / n;
    const double sample_var = sq / n - sample_mean * sample_mean;
    CHECK(std::abs(sample_mean - mean) < 6.0 * std::sqrt(mean / n));
    // Var(sample variance) ~ (2 mean^2 + mean)/n for Poisson.
    CHECK(std::abs(sample_var - mean) <
          6.0 * std::sqrt((2.0 * mean * mean + mean) / n));
  }
  CHECK(poisson_sample(rng, 0.0) == 0);
  CHECK_THROWS_AS(poisson_sample(rng, -1.0), std::invalid_argument);
}

TEST_CASE("simulated counts follow the Born rule at large n") {
  const DensityMatrix rho = ideal_pair(1, 1);
  auto settings = tomography_settings(VVOrder(1), VVOrder(1));
  settings.erase(settings.begin() + 8, settings.end());
  const long long n = 1000000;
  const auto records = simulate_counts(rho, settings, n, 0.0, 2024);
  for (size_t k = 0; k < records.size(); ++k) {
    const double expected = n * born_probability(rho, settings[k]);
    CHECK(std::abs(records[k].coincidences - expected) <=
          5.0 * std::sqrt(expected) + 1.0);
    CHECK(records[k].accidentals == 0);
    CHECK(records[k].integration == doctest::Approx(double(n)));
    CHECK(!records[k].corrected);
  }
}

TEST_CASE("zero probability and zero dark rate give exactly zero counts") {
  const DensityMatrix rho = ideal_pair(1, 1);
  const PureState rad = vv_state(VVOrder(1), VVKind::radial);
  const std::vector<MeasurementSetting> settings = {{rad, rad, "r", "r", "r|r"}};
  const auto records = simulate_counts(rho, settings, 100000, 0.0, 7);
  CHECK(records[0].coincidences == 0);
}

TEST_CASE("count simulation is reproducible and order-independent") {
  const DensityMatrix rho = ideal_pair(1, 1);
  auto settings = tomography_settings(VVOrder(1), VVOrder(1));
  settings.erase(settings.begin() + 32, settings.end());
  const auto a = simulate_counts(rho, settings, 5000, 0.01, 321);
  const auto b = simulate_counts(rho, settings, 5000, 0.01, 321);
  for (size_t k = 0; k < a.size(); ++k) {
    CHECK(a[k].coincidences == b[k].coincidences);
    CHECK(a[k].accidentals == b[k].accidentals);
  }
  // Per-setting streams: a subset run reproduces the same records.
  std::vector<MeasurementSetting> head(settings.begin(), settings.begin() + 4);
  const auto c = simulate_counts(rho, head, 5000, 0.01, 321);
  for (size_t k = 0; k < c.size(); ++k)
    CHECK(c[k].coincidences == a[k].coincidences);

  const auto other_seed = simulate_counts(rho, settings, 5000, 0.01, 322);
  int differing = 0;
  for (size_t k = 0; k < a.size(); ++k)
    differing += other_seed[k].coincidences != a[k].coincidences;
  CHECK(differing > 0);
}

TEST_CASE("dark correction subtracts accidentals and never goes negative") {
  const PureState rad = vv_state(VVOrder(1), VVKind::radial);
  const MeasurementSetting s{rad, rad, "x", "y", "x|y"};
  std::vector<CountRecord> records = {{s, 100, 10, 1000.0, false},
                                      {s, 5, 9, 1000.0, false}};
  const auto corrected = dark_correct(records);
  CHECK(corrected[0].coincidences == 90);
  CHECK(corrected[1].coincidences == 0);
  CHECK(corrected[0].corrected);
  CHECK(corrected[1].accidentals == 9);
}

TEST_CASE("chsh bases are orthonormal with the documented first vectors") {
  const ChshBases bases = chsh_bases();
  for (const auto& party : {bases.alice, bases.bob})
    for (const auto& basis : party) {
      CHECK(std::abs(basis[0].norm() - 1.0) < 1e-15);
      CHECK(std::abs(basis[1].norm() - 1.0) < 1e-15);
      CHECK(std::abs(basis[0].dot(basis[1])) < 1e-15);
    }
  CHECK(bases.bob[0][0][0].real() == doctest::Approx(std::cos(kPi / 8.0)));
  CHECK(bases.bob[0][0][1].real() == doctest::Approx(std::sin(kPi / 8.0)));
  // |<a0_0|b0_0>|^2 = cos^2(pi/8).
  const double ov = std::norm(bases.alice[0][0].dot(bases.bob[0][0]));
  CHECK(ov == doctest::Approx(std::cos(kPi / 8.0) * std::cos(kPi / 8.0)));
}

TEST_CASE("analytic chsh reaches the quantum bound on every Bell pair") {
  for (auto [m1, m2] : std::vector<std::pair<int, int>>{
           {1, 1}, {1, 5}, {1, 10}, {3, 5}, {1, -1}}) {
    const CHSHResult r = chsh_s(ideal_pair(m1, m2), VVOrder(m1), VVOrder(m2));
    CHECK(std::abs(r.S - kTsirelson) < 1e-9);
    for (double e : r.correlators) CHECK(std::abs(e) <= 1.0 + 1e-12);
    CHECK(r.sigma_S == 0.0);
  }
}

TEST_CASE("analytic chsh on product and Werner states") {
  const PureState rad = vv_state(VVOrder(1), VVKind::radial);
  const DensityMatrix product = projector(tensor(rad, rad));
  // Fixed-basis correlators for |r>|r>: E00 = E01 = cos(pi/4)/..., the
  // direct evaluation gives S = sqrt2.
  CHECK(chsh_s(product, VVOrder(1), VVOrder(1)).S ==
        doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));

  for (double p : {1.0 / 3.0, 0.7, 0.966}) {
    const DensityMatrix rho = werner_vv(VVOrder(1), VVOrder(1),
                                        BellLabel::psi_minus, p);
    CHECK(chsh_s(rho, VVOrder(1), VVOrder(1)).S ==
          doctest::Approx(kTsirelson * p).epsilon(1e-12));
  }
}

TEST_CASE("tsirelson bound holds for random states, classical bound for products") {
  std::mt19937_64 rng(42);
  const ModeBasis basis = pair_basis(1, 1);
  for (int trial = 0; trial < 200; ++trial) {
    const DensityMatrix rho(basis, vvtest::random_density(rng, 16));
    CHECK(chsh_s(rho, VVOrder(1), VVOrder(1)).S <= kTsirelson + 1e-9);
  }
  for (int trial = 0; trial < 100; ++trial) {
    const ComplexMatrix joint = tensor(vvtest::random_density(rng, 4),
                                       vvtest::random_density(rng, 4));
    const DensityMatrix rho(basis, joint);
    CHECK(chsh_s(rho, VVOrder(1), VVOrder(1)).S <= 2.0 + 1e-9);
  }
}

TEST_CASE("empirical chsh converges to the analytic value") {
  const DensityMatrix rho = werner_vv(VVOrder(1), VVOrder(5),
                                      BellLabel::psi_minus, 0.9);
  const double expected = chsh_s(rho, VVOrder(1), VVOrder(5)).S;
  const auto settings = chsh_settings(VVOrder(1), VVOrder(5));
  REQUIRE(settings.size() == 16);
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL, 4ULL}) {
    const auto records = simulate_counts(rho, settings, 10000, 0.0, seed);
    const CHSHResult r = chsh_s_from_counts(records);
    CHECK(r.sigma_S > 0.0);
    CHECK(std::abs(r.S - expected) < 4.0 * r.sigma_S);
  }
}

TEST_CASE("dark counts drag the raw S below the corrected one") {
  const DensityMatrix rho = ideal_pair(1, 1);
  const auto settings = chsh_settings(VVOrder(1), VVOrder(1));
  const auto records = simulate_counts(rho, settings, 100000, 0.05, 11);
  const CHSHResult raw = chsh_s_from_counts(records);
  const CHSHResult corrected = chsh_s_from_counts(dark_correct(records));
  CHECK(raw.S < corrected.S);
  CHECK(corrected.S == doctest::Approx(kTsirelson).epsilon(0.02));
}

TEST_CASE("chsh count ingestion verifies completeness") {
  const auto settings = chsh_settings(VVOrder(1), VVOrder(1));
  auto records = simulate_counts(ideal_pair(1, 1), settings, 1000, 0.0, 5);
  auto incomplete = records;
  incomplete.pop_back();
  CHECK_THROWS_AS(chsh_s_from_counts(incomplete), std::invalid_argument);

  auto duplicated = records;
  duplicated.push_back(records.back());
  CHECK_THROWS_AS(chsh_s_from_counts(duplicated), std::invalid_argument);

  auto foreign = simulate_counts(
      ideal_pair(1, 1), tomography_settings(VVOrder(1), VVOrder(1)), 10, 0.0, 5);
  foreign.erase(foreign.begin() + 16, foreign.end());
  CHECK_THROWS_AS(chsh_s_from_counts(foreign), std::invalid_argument);
}

TEST_CASE("count records round-trip through csv") {
  const DensityMatrix rho = ideal_pair(1, 1);
  auto settings = tomography_settings(VVOrder(1), VVOrder(1));
  settings.erase(settings.begin() + 24, settings.end());
  auto records = simulate_counts(rho, settings, 2000, 0.02, 77);
  records = dark_correct(records);

  std::stringstream file;
  write_counts_csv(file, records);
  const auto loaded = read_counts_csv(file, VVOrder(1), VVOrder(1));
  REQUIRE(loaded.size() == records.size());
  for (size_t k = 0; k < records.size(); ++k) {
    CHECK(loaded[k].coincidences == records[k].coincidences);
    CHECK(loaded[k].accidentals == records[k].accidentals);
    CHECK(loaded[k].corrected == records[k].corrected);
    CHECK(loaded[k].integration == doctest::Approx(records[k].integration));
    CHECK(loaded[k].setting.id_1 == records[k].setting.id_1);
    CHECK((loaded[k].setting.projector_1.amp() -
           records[k].setting.projector_1.amp())
              .norm() < 1e-12);
  }

  std::stringstream empty;
  CHECK_THROWS_AS(read_counts_csv(empty, VVOrder(1), VVOrder(1)),
                  std::invalid_argument);
}

}  // TEST_SUITE
