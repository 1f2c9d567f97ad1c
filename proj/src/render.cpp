#include "vvsim/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace vvsim {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSqrt2 = 1.41421356237309504880;

double pixel_coord(int index, int size, double extent) {
  const double step = 2.0 * extent / size;
  return -extent + (index + 0.5) * step;
}

void check_map(const ScalarMap& m) {
  if (m.size < 2 || m.extent <= 0.0 ||
      m.values.size() != static_cast<size_t>(m.size) * m.size)
    throw std::invalid_argument("render: malformed intensity map");
}

// Bilinear sample at physical coordinates; zero outside the grid.
double sample(const ScalarMap& m, double x, double y) {
  const double step = 2.0 * m.extent / m.size;
  const double fx = (x + m.extent) / step - 0.5;
  const double fy = (y + m.extent) / step - 0.5;
  const int c0 = static_cast<int>(std::floor(fx));
  const int r0 = static_cast<int>(std::floor(fy));
  const double wx = fx - c0, wy = fy - r0;
  double out = 0.0;
  for (int dr = 0; dr < 2; ++dr)
    for (int dc = 0; dc < 2; ++dc) {
      const int r = r0 + dr, c = c0 + dc;
      if (r < 0 || c < 0 || r >= m.size || c >= m.size) continue;
      const double w = (dr ? wy : 1.0 - wy) * (dc ? wx : 1.0 - wx);
      out += w * m.at(r, c);
    }
  return out;
}

}  // namespace

double lg_envelope(double r, int abs_oam) {
  return std::pow(r * kSqrt2, abs_oam) * std::exp(-r * r);
}

FieldGrid transverse_field(const PureState& state, int size, double extent) {
  if (size < 64) throw std::invalid_argument("transverse_field: size must be >= 64");
  if (extent <= 0.0) throw std::invalid_argument("transverse_field: extent must be positive");
  if (state.basis().photons() != 1)
    throw std::invalid_argument("transverse_field: single-photon state required");
  for (int i = 0; i < state.dim(); ++i)
    if (state.basis().label(i).front().oam == 0)
      throw std::invalid_argument("transverse_field: zero-OAM content is not a VV mode");

  FieldGrid grid{size, extent, {}};
  grid.samples.assign(static_cast<size_t>(size) * size,
                      Eigen::Vector2cd::Zero());
  for (int row = 0; row < size; ++row) {
    const double y = pixel_coord(row, size, extent);
    for (int col = 0; col < size; ++col) {
      const double x = pixel_coord(col, size, extent);
      const double r = std::hypot(x, y);
      const double phi = std::atan2(y, x);
      Eigen::Vector2cd jones = Eigen::Vector2cd::Zero();
      for (int i = 0; i < state.dim(); ++i) {
        const Complex a = state.amp()[i];
        if (a == Complex(0, 0)) continue;
        const ModeLabel& mode = state.basis().label(i).front();
        const Complex field = a * lg_envelope(r, std::abs(mode.oam)) *
                              std::exp(Complex(0.0, mode.oam * phi));
        jones[mode.pol == Pol::R ? 0 : 1] += field;
      }
      grid.samples[static_cast<size_t>(row) * size + col] = jones;
    }
  }
  return grid;
}

StokesMap stokes_map(const FieldGrid& field) {
  StokesMap out{field.size, field.extent, {}, {}, {}, {}};
  const size_t n = field.samples.size();
  out.s0.resize(n);
  out.s1.resize(n);
  out.s2.resize(n);
  out.s3.resize(n);
  const Complex i_unit(0.0, 1.0);
  for (size_t k = 0; k < n; ++k) {
    const Complex er = field.samples[k][0], el = field.samples[k][1];
    // |R> = (|H> - i|V>)/sqrt2.
    const Complex eh = (er + el) / kSqrt2;
    const Complex ev = i_unit * (el - er) / kSqrt2;
    out.s0[k] = std::norm(eh) + std::norm(ev);
    out.s1[k] = std::norm(eh) - std::norm(ev);
    out.s2[k] = 2.0 * (std::conj(eh) * ev).real();
    out.s3[k] = std::norm(er) - std::norm(el);
  }
  return out;
}

ScalarMap polarizer_intensity(const FieldGrid& field, double angle) {
  ScalarMap out{field.size, field.extent, {}};
  out.values.resize(field.samples.size());
  const Complex i_unit(0.0, 1.0);
  const double c = std::cos(angle), s = std::sin(angle);
  for (size_t k = 0; k < field.samples.size(); ++k) {
    const Complex er = field.samples[k][0], el = field.samples[k][1];
    const Complex eh = (er + el) / kSqrt2;
    const Complex ev = i_unit * (el - er) / kSqrt2;
    out.values[k] = std::norm(c * eh + s * ev);
  }
  return out;
}

ScalarMap total_intensity(const FieldGrid& field) {
  ScalarMap out{field.size, field.extent, {}};
  out.values.resize(field.samples.size());
  for (size_t k = 0; k < field.samples.size(); ++k)
    out.values[k] = field.samples[k].squaredNorm();
  return out;
}

std::vector<double> angular_profile(const ScalarMap& intensity, int bins) {
  check_map(intensity);

  // Ring-averaged radial profile to locate the brightest ring.
  const int n_radial = intensity.size / 2;
  std::vector<double> ring_sum(n_radial, 0.0);
  std::vector<int> ring_count(n_radial, 0);
  double total = 0.0;
  for (int row = 0; row < intensity.size; ++row) {
    const double y = pixel_coord(row, intensity.size, intensity.extent);
    for (int col = 0; col < intensity.size; ++col) {
      const double x = pixel_coord(col, intensity.size, intensity.extent);
      const double r = std::hypot(x, y);
      const int bin = static_cast<int>(r / intensity.extent * n_radial);
      if (bin >= n_radial) continue;
      ring_sum[bin] += intensity.at(row, col);
      ring_count[bin] += 1;
      total += intensity.at(row, col);
    }
  }
  if (total <= 0.0)
    throw std::invalid_argument("angular_profile: zero total intensity");

  int best = 0;
  double best_avg = -1.0;
  for (int b = 0; b < n_radial; ++b) {
    if (ring_count[b] == 0) continue;
    const double avg = ring_sum[b] / ring_count[b];
    if (avg > best_avg) {
      best_avg = avg;
      best = b;
    }
  }
  const double r_peak = (best + 0.5) * intensity.extent / n_radial;

  std::vector<double> profile(bins);
  for (int j = 0; j < bins; ++j) {
    const double phi = 2.0 * kPi * j / bins;
    profile[j] = sample(intensity, r_peak * std::cos(phi), r_peak * std::sin(phi));
  }
  return profile;
}

PetalCount count_petals(const ScalarMap& intensity) {
  const std::vector<double> profile = angular_profile(intensity);
  const int n = static_cast<int>(profile.size());
  double pmax = profile[0], pmin = profile[0], mean = 0.0;
  for (double v : profile) {
    pmax = std::max(pmax, v);
    pmin = std::min(pmin, v);
    mean += v;
  }
  mean /= n;
  if (pmax - pmin < 0.01 * mean) return {0, true};

  // Circular local maxima; consecutive candidates merge into one petal.
  std::vector<bool> is_peak(n, false);
  for (int j = 0; j < n; ++j) {
    const double prev = profile[(j + n - 1) % n];
    const double next = profile[(j + 1) % n];
    is_peak[j] = profile[j] >= prev && profile[j] >= next &&
                 profile[j] > 0.5 * pmax;
  }
  int count = 0;
  for (int j = 0; j < n; ++j)
    if (is_peak[j] && !is_peak[(j + n - 1) % n]) ++count;
  if (count == 0 && is_peak[0]) count = 1;  // single all-around plateau
  return {count, false};
}

void write_ppm(const std::string& path, const ScalarMap& intensity) {
  check_map(intensity);
  double peak = 0.0;
  for (double v : intensity.values) peak = std::max(peak, v);
  if (peak <= 0.0) peak = 1.0;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("write_ppm: cannot open " + path);
  out << "P6\n" << intensity.size << " " << intensity.size << "\n255\n";
  // Top image row is the largest y.
  for (int row = intensity.size - 1; row >= 0; --row)
    for (int col = 0; col < intensity.size; ++col) {
      const double v = intensity.at(row, col) / peak;
      const auto byte = static_cast<unsigned char>(
          std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
      const char px[3] = {static_cast<char>(byte), static_cast<char>(byte),
                          static_cast<char>(byte)};
      out.write(px, 3);
    }
}

void write_stokes_csv(const std::string& prefix, const StokesMap& map) {
  const std::vector<const std::vector<double>*> planes = {&map.s0, &map.s1,
                                                          &map.s2, &map.s3};
  for (int p = 0; p < 4; ++p) {
    std::ofstream out(prefix + "_s" + std::to_string(p) + ".csv");
    if (!out) throw std::runtime_error("write_stokes_csv: cannot open output");
    for (int row = 0; row < map.size; ++row) {
      for (int col = 0; col < map.size; ++col) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.9g",
                      (*planes[p])[static_cast<size_t>(row) * map.size + col]);
        out << (col ? "," : "") << buf;
      }
      out << "\n";
    }
  }
}

void write_angular_profile_csv(const std::string& path,
                               const std::vector<double>& profile) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_angular_profile_csv: cannot open " + path);
  out << "angle_rad,intensity\n";
  for (size_t j = 0; j < profile.size(); ++j) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9g,%.9g",
                  2.0 * kPi * j / profile.size(), profile[j]);
    out << buf << "\n";
  }
}

}  // namespace vvsim
