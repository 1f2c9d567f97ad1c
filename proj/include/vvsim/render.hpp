#pragma once

#include <string>
#include <vector>

#include "vvsim/qcore.hpp"

// Transverse-field sampling of VV modes. The radial envelope is the
// p = 0 Laguerre-Gauss profile (r sqrt2 / w)^|l| exp(-r^2/w^2) with unit
// beam waist; only the azimuthal structure carries physics here.
namespace vvsim {

// Square grid of per-pixel Jones vectors in circular (E_R, E_L)
// coordinates. Pixel (row, col) is centered at
// x = -extent + (col + 0.5) * step, y = -extent + (row + 0.5) * step,
// step = 2 * extent / size (row 0 at the bottom).
struct FieldGrid {
  int size = 0;
  double extent = 0.0;
  std::vector<Eigen::Vector2cd> samples;  // row-major, size*size entries

  const Eigen::Vector2cd& at(int row, int col) const {
    return samples[static_cast<size_t>(row) * size + col];
  }
};

struct ScalarMap {
  int size = 0;
  double extent = 0.0;
  std::vector<double> values;  // row-major

  double at(int row, int col) const {
    return values[static_cast<size_t>(row) * size + col];
  }
};

struct StokesMap {
  int size = 0;
  double extent = 0.0;
  std::vector<double> s0, s1, s2, s3;  // row-major planes
};

// Laguerre-Gauss p=0 radial amplitude at unit waist.
double lg_envelope(double r, int abs_oam);

// Samples a single-photon state supported on OAM +-m; requires size >= 64
// and rejects zero-OAM content.
FieldGrid transverse_field(const PureState& state, int size, double extent);

StokesMap stokes_map(const FieldGrid& field);

// |<linear(angle)|Jones>|^2 per pixel.
ScalarMap polarizer_intensity(const FieldGrid& field, double angle);

// Unfiltered intensity |E_R|^2 + |E_L|^2.
ScalarMap total_intensity(const FieldGrid& field);

struct PetalCount {
  int count = 0;
  bool azimuthally_uniform = false;
};

// Angular profile of an intensity map at the radius of maximal
// ring-averaged intensity, sampled over `bins` angles (bilinear).
std::vector<double> angular_profile(const ScalarMap& intensity, int bins = 720);

// Local maxima of the angular profile exceeding half of its global
// maximum; profiles varying by less than 1% of their mean count as
// azimuthally uniform (count 0).
PetalCount count_petals(const ScalarMap& intensity);

// 8-bit binary PPM (grayscale triples), intensities scaled to max = 1.
void write_ppm(const std::string& path, const ScalarMap& intensity);

// One CSV grid per Stokes plane: <prefix>_s0.csv ... <prefix>_s3.csv.
void write_stokes_csv(const std::string& prefix, const StokesMap& map);

// Two columns: angle_rad, intensity.
void write_angular_profile_csv(const std::string& path,
                               const std::vector<double>& profile);

}  // namespace vvsim
