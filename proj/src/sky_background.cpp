#include "qkpc/sky_background.hpp"

#include <array>
#include <cmath>
#include <stdexcept>

#include "qkpc/wiretap.hpp"

namespace qkpc {

namespace {

constexpr double kPlanck = 6.62607015e-34;       // J s
constexpr double kSpeedOfLight = 2.99792458e8;   // m/s

const std::array<SkyConditionRow, 6> kSkyConditions{{
    {"cloudy-daytime", 1.0, 150.0},
    {"hazy-daytime", 1e-1, 15.0},
    {"clear-daytime", 1e-2, 1.5},
    {"full-moon-clear-night", 1e-5, 1.5e-3},
    {"new-moon-clear-night", 1e-6, 1.5e-4},
    {"moonless-clear-night", 1e-7, 1.5e-5},
}};

}  // namespace

double SkyScene::field_of_view_sr() const { return kPi * fov_half_angle * fov_half_angle; }

void SkyScene::validate() const {
  const bool ok = brightness > 0.0 && fov_half_angle > 0.0 && aperture_area > 0.0 &&
                  filter_bandwidth > 0.0 && wavelength > 0.0 && gate_time > 0.0;
  if (!ok) {
    throw std::domain_error("SkyScene: all fields must be strictly positive");
  }
}

double background_power(const SkyScene& scene) {
  scene.validate();
  return scene.brightness * scene.field_of_view_sr() * scene.aperture_area *
         scene.filter_bandwidth;
}

Rate photons_per_pulse(const SkyScene& scene) {
  const double photon_energy = kPlanck * kSpeedOfLight / scene.wavelength;
  return Rate(background_power(scene) * scene.gate_time / photon_energy);
}

double reference_table_aperture_m2() {
  SkyScene scene;
  scene.aperture_area = 1.0;
  const double per_unit_area = photons_per_pulse(scene).value();
  return 7.4 / per_unit_area;
}

std::span<const SkyConditionRow> sky_condition_table() { return kSkyConditions; }

SkyScene sky_condition_scene(const SkyConditionRow& row) {
  SkyScene scene;
  scene.brightness = row.brightness;
  scene.aperture_area = reference_table_aperture_m2();
  return scene;
}

}  // namespace qkpc
