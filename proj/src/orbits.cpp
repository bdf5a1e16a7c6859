#include "satfed/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace satfed::orbits {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

void EarthModel::validate() const {
  require(radius_km > 0.0, "EarthModel.radius_km must be positive");
  require(mu_km3_s2 > 0.0, "EarthModel.mu_km3_s2 must be positive");
  require(rotation_rate_rad_s > 0.0, "EarthModel.rotation_rate_rad_s must be positive");
}

void ShellConfig::validate() const {
  require(altitude_km > 0.0, "ShellConfig.altitude_km must be positive");
  require(inclination_deg >= 0.0 && inclination_deg <= 180.0,
          "ShellConfig.inclination_deg must lie in [0, 180]");
  require(num_planes >= 1, "ShellConfig.num_planes must be >= 1");
  require(sats_per_plane >= 1, "ShellConfig.sats_per_plane must be >= 1");
  require(phasing_factor >= 0 && phasing_factor < num_planes,
          "ShellConfig.phasing_factor must lie in [0, num_planes)");
}

void GroundStation::validate() const {
  require(latitude_deg >= -90.0 && latitude_deg <= 90.0,
          "GroundStation.latitude_deg must lie in [-90, 90]");
  require(longitude_deg >= -180.0 && longitude_deg <= 180.0,
          "GroundStation.longitude_deg must lie in [-180, 180]");
  require(min_elevation_deg >= 0.0 && min_elevation_deg < 90.0,
          "GroundStation.min_elevation_deg must lie in [0, 90)");
}

double mean_motion_rad_s(const ShellConfig& shell, const EarthModel& earth) {
  const double a = earth.radius_km + shell.altitude_km;
  return std::sqrt(earth.mu_km3_s2 / (a * a * a));
}

double orbital_period_s(const ShellConfig& shell, const EarthModel& earth) {
  return 2.0 * kPi / mean_motion_rad_s(shell, earth);
}

Position propagate(const ShellConfig& shell, SatelliteId sat, double t_s,
                   const EarthModel& earth) {
  shell.validate();
  earth.validate();
  require(sat.plane >= 0 && sat.plane < shell.num_planes,
          "SatelliteId.plane out of range for shell");
  require(sat.slot >= 0 && sat.slot < shell.sats_per_plane,
          "SatelliteId.slot out of range for shell");
  require(t_s >= 0.0, "propagate: t_s must be >= 0");

  const double a = earth.radius_km + shell.altitude_km;
  const double n = mean_motion_rad_s(shell, earth);
  const double two_pi = 2.0 * kPi;

  const double raan = sat.plane * (two_pi / shell.num_planes);
  const double phase_offset =
      sat.plane * shell.phasing_factor *
      (two_pi / (static_cast<double>(shell.num_planes) * shell.sats_per_plane));
  const double u = sat.slot * (two_pi / shell.sats_per_plane) + n * t_s + phase_offset;

  const double ci = std::cos(shell.inclination_deg * kDegToRad);
  const double si = std::sin(shell.inclination_deg * kDegToRad);
  const double xp = a * std::cos(u);  // in-plane, x toward the ascending node
  const double yp = a * std::sin(u);
  const double co = std::cos(raan);
  const double so = std::sin(raan);

  return Position{xp * co - yp * ci * so, xp * so + yp * ci * co, yp * si};
}

Position ground_position(const GroundStation& gs, double t_s, const EarthModel& earth) {
  gs.validate();
  earth.validate();
  const double lat = gs.latitude_deg * kDegToRad;
  const double lon = gs.longitude_deg * kDegToRad + earth.rotation_rate_rad_s * t_s;
  const double r = earth.radius_km;
  return Position{r * std::cos(lat) * std::cos(lon), r * std::cos(lat) * std::sin(lon),
                  r * std::sin(lat)};
}

double distance_km(const Position& a, const Position& b) {
  const double dx = a.x_km - b.x_km;
  const double dy = a.y_km - b.y_km;
  const double dz = a.z_km - b.z_km;
  return std::sqrt(dx * dx + dy * dy + dz * dz);
}

double elevation_deg(const Position& sat_pos, const Position& gs_pos) {
  const double gs_norm = std::sqrt(gs_pos.x_km * gs_pos.x_km + gs_pos.y_km * gs_pos.y_km +
                                   gs_pos.z_km * gs_pos.z_km);
  if (gs_norm <= 0.0) throw std::invalid_argument("elevation_deg: |gs_pos| must be > 0");

  const double dx = sat_pos.x_km - gs_pos.x_km;
  const double dy = sat_pos.y_km - gs_pos.y_km;
  const double dz = sat_pos.z_km - gs_pos.z_km;
  const double d_norm = std::sqrt(dx * dx + dy * dy + dz * dz);
  if (d_norm == 0.0) return 90.0;  // satellite exactly at the station

  const double dot = gs_pos.x_km * dx + gs_pos.y_km * dy + gs_pos.z_km * dz;
  const double s = std::clamp(dot / (gs_norm * d_norm), -1.0, 1.0);
  return std::asin(s) * kRadToDeg;
}

bool visible(const Position& sat_pos, const GroundStation& gs, const Position& gs_pos) {
  return elevation_deg(sat_pos, gs_pos) >= gs.min_elevation_deg;
}

std::vector<Position> shell_positions(const ShellConfig& shell, double t_s,
                                      const EarthModel& earth, par::Mode mode) {
  shell.validate();
  earth.validate();
  // validated here so the parallel region below can never throw
  require(t_s >= 0.0, "shell_positions: t_s must be >= 0");
  std::vector<Position> out(static_cast<std::size_t>(shell.total_satellites()));
  const int slots = shell.sats_per_plane;
  par::for_index(out.size(), mode, [&](std::size_t i) {
    const int idx = static_cast<int>(i);
    out[i] = propagate(shell, SatelliteId{idx / slots, idx % slots}, t_s, earth);
  });
  return out;
}

}  // namespace satfed::orbits
