#pragma once

#include <string>
#include <vector>

#include "satfed/parallel.hpp"

namespace satfed::orbits {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

// Spherical Earth. Circular orbits only; geometry-scale fidelity is all the
// latency model needs, so there is no J2 term and no drag.
struct EarthModel {
  double radius_km = 6371.0;
  double mu_km3_s2 = 398600.4418;
  double rotation_rate_rad_s = 7.2921159e-5;

  void validate() const;
};

// Walker-delta shell. Defaults follow a Kuiper Shell-1-like layout:
// 630 km, 51.9 deg, 34 planes x 34 satellites, phasing 0.
struct ShellConfig {
  double altitude_km = 630.0;
  double inclination_deg = 51.9;
  int num_planes = 34;
  int sats_per_plane = 34;
  int phasing_factor = 0;

  int total_satellites() const { return num_planes * sats_per_plane; }
  void validate() const;
};

struct SatelliteId {
  int plane = 0;
  int slot = 0;
};

struct GroundStation {
  std::string name;
  double latitude_deg = 0.0;
  double longitude_deg = 0.0;
  double min_elevation_deg = 25.0;

  void validate() const;
};

// Earth-centered inertial coordinates, km.
struct Position {
  double x_km = 0.0;
  double y_km = 0.0;
  double z_km = 0.0;
};

double mean_motion_rad_s(const ShellConfig& shell, const EarthModel& earth);
double orbital_period_s(const ShellConfig& shell, const EarthModel& earth);

// Epoch convention: at t=0 the ascending node of plane 0 and the Greenwich
// meridian both lie on the +x axis. Plane p has RAAN p*(360/P) deg; slot s
// starts at in-plane anomaly s*(360/S) + p*phasing*(360/(P*S)) deg and
// advances with mean motion.
Position propagate(const ShellConfig& shell, SatelliteId sat, double t_s,
                   const EarthModel& earth);

Position ground_position(const GroundStation& gs, double t_s, const EarthModel& earth);

double distance_km(const Position& a, const Position& b);

// Angle between the local horizon plane at gs_pos and the gs->sat vector,
// in [-90, 90] degrees.
double elevation_deg(const Position& sat_pos, const Position& gs_pos);

// Elevation at or above the station minimum counts as visible.
bool visible(const Position& sat_pos, const GroundStation& gs, const Position& gs_pos);

// Positions of the whole shell at one instant, indexed
// plane * sats_per_plane + slot. Data-parallel kernel.
std::vector<Position> shell_positions(const ShellConfig& shell, double t_s,
                                      const EarthModel& earth,
                                      par::Mode mode = par::default_mode());

}  // namespace satfed::orbits
