#pragma once

#include <span>

#include "qkpc/photon_stats.hpp"

// Sky-background photon budget: sky brightness and receiver geometry to
// noise photons per pulse, plus the reference table of weather conditions.

namespace qkpc {

struct SkyScene {
  double brightness = 150.0;        // W m^-2 sr^-1 um^-1
  double fov_half_angle = 100e-6;   // radians
  double aperture_area = 1.0;       // m^2
  double filter_bandwidth = 2e-4;   // um
  double wavelength = 850e-9;       // m
  double gate_time = 3e-9;          // s

  // Small-angle solid angle pi * theta^2.
  double field_of_view_sr() const;

  void validate() const;
};

// P_b = H_b * Omega_fov * A_rec * B_filter, in watts.
double background_power(const SkyScene& scene);

// Noise photons per detector gate: P_b * gate_time / (h c / lambda).
Rate photons_per_pulse(const SkyScene& scene);

// The reference table never states the aperture; this is the value implied
// by its cloudy-daytime row (7.4 photons per pulse at brightness 150) under
// the stated 100 urad half-angle, 0.2 nm filter, 850 nm, 3 ns gate.
double reference_table_aperture_m2();

struct SkyConditionRow {
  const char* conditions;
  double relative_brightness;
  double brightness;  // W m^-2 sr^-1 um^-1
};

// The six weather rows, cloudy daytime through moonless clear night.
std::span<const SkyConditionRow> sky_condition_table();

// Scene for one table row: the stated geometry plus the implied aperture.
SkyScene sky_condition_scene(const SkyConditionRow& row);

}  // namespace qkpc
