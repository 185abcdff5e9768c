#include "lli/frame.hpp"

#include <cmath>
#include <stdexcept>

#include "lli/constants.hpp"

namespace lli {

Eigen::Matrix3d CTensor::matrix() const {
  // Traceless reconstruction: C_ZZ = -w/3, C_XX = (w/3 + u)/2, C_YY = (w/3 - u)/2
  // with u = C_XX - C_YY and w = C_XX + C_YY - 2 C_ZZ.
  const double czz = -c_zz_combo / 3.0;
  const double cxx = (c_zz_combo / 3.0 + c_x_minus_y) / 2.0;
  const double cyy = (c_zz_combo / 3.0 - c_x_minus_y) / 2.0;
  Eigen::Matrix3d m;
  m << cxx, c_xy, c_xz, c_xy, cyy, c_yz, c_xz, c_yz, czz;
  return m;
}

CTensor CTensor::from_matrix(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d s = 0.5 * (m + m.transpose());
  CTensor c;
  c.c_x_minus_y = s(0, 0) - s(1, 1);
  c.c_xy = s(0, 1);
  c.c_xz = s(0, 2);
  c.c_yz = s(1, 2);
  c.c_zz_combo = s(0, 0) + s(1, 1) - 2.0 * s(2, 2);
  return c;
}

CTensor operator+(const CTensor& a, const CTensor& b) {
  return {a.c_x_minus_y + b.c_x_minus_y, a.c_xy + b.c_xy, a.c_xz + b.c_xz,
          a.c_yz + b.c_yz, a.c_zz_combo + b.c_zz_combo};
}

CTensor operator*(double s, const CTensor& c) {
  return {s * c.c_x_minus_y, s * c.c_xy, s * c.c_xz, s * c.c_yz,
          s * c.c_zz_combo};
}

double most_recent_equinox_before(double window_start_utc) {
  double best = std::numeric_limits<double>::quiet_NaN();
  for (const auto& e : constants::equinox_table) {
    if (e.utc_s <= window_start_utc) best = e.utc_s;
  }
  if (std::isnan(best))
    throw std::invalid_argument("window precedes the equinox table");
  return best;
}

void resolve_equinox_epoch(LabFrame& frame, double window_start_utc) {
  if (std::isnan(frame.equinox_epoch_utc))
    frame.equinox_epoch_utc = most_recent_equinox_before(window_start_utc);
}

Eigen::Vector3d b_direction_sccef(const LabFrame& frame, double utc) {
  if (std::isnan(frame.equinox_epoch_utc))
    throw std::runtime_error("equinox epoch not resolved");
  const double chi = frame.colatitude_rad;
  const double alpha =
      constants::omega_sidereal_rad * (utc - frame.equinox_epoch_utc);
  const double ca = std::cos(alpha), sa = std::sin(alpha);
  const double cc = std::cos(chi), sc = std::sin(chi);
  // Local triad in SCCEF coordinates at Earth angle alpha.
  const Eigen::Vector3d east(-sa, ca, 0.0);
  const Eigen::Vector3d north(-cc * ca, -cc * sa, sc);
  const Eigen::Vector3d up(sc * ca, sc * sa, cc);
  const double az = frame.b_azimuth_rad, el = frame.b_elevation_rad;
  return std::cos(el) * (std::cos(az) * east + std::sin(az) * north) +
         std::sin(el) * up;
}

double c0_lab(const CTensor& c, double utc, const LabFrame& frame) {
  if (std::isnan(frame.equinox_epoch_utc))
    throw std::runtime_error("equinox epoch not resolved");
  if (utc < frame.equinox_epoch_utc)
    throw std::invalid_argument("time precedes the equinox epoch");
  Eigen::Vector3d b = b_direction_sccef(frame, utc);
  return -3.0 * b.dot(c.matrix() * b);
}

}  // namespace lli
