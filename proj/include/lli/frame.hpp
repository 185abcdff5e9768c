#pragma once

#include <Eigen/Dense>
#include <limits>

// Orientation bookkeeping between the sun-centered equatorial frame (SCCEF,
// axes X Y Z with Z along the Earth's rotation axis) and the lab quantization
// axis set by the magnetic field.

namespace lli {

// Symmetric traceless tensor in the SCCEF, stored as the five observable
// combinations.
struct CTensor {
  double c_x_minus_y = 0.0;  // C_XX - C_YY
  double c_xy = 0.0;
  double c_xz = 0.0;
  double c_yz = 0.0;
  double c_zz_combo = 0.0;  // C_XX + C_YY - 2 C_ZZ

  Eigen::Matrix3d matrix() const;
  static CTensor from_matrix(const Eigen::Matrix3d& m);  // symmetrizes, ignores trace
};

CTensor operator+(const CTensor& a, const CTensor& b);
CTensor operator*(double s, const CTensor& c);

// Lab geometry. Azimuth of the field direction is measured from local east
// toward north (68 deg puts the field 22 deg away from due east); elevation
// lifts it out of the horizontal plane.
struct LabFrame {
  double colatitude_rad = 52.1 * 0.017453292519943295;
  double b_azimuth_rad = 68.0 * 0.017453292519943295;
  double b_elevation_rad = 0.0;
  // Unix seconds of the vernal equinox the sidereal phase is referenced to.
  // NaN means "not resolved yet"; resolve_equinox_epoch fills it in.
  double equinox_epoch_utc = std::numeric_limits<double>::quiet_NaN();
};

// Picks the most recent tabulated vernal equinox at or before window_start.
double most_recent_equinox_before(double window_start_utc);

// Fills frame.equinox_epoch_utc from the table if it is NaN.
void resolve_equinox_epoch(LabFrame& frame, double window_start_utc);

// Unit vector of the lab quantization axis expressed in SCCEF coordinates.
Eigen::Vector3d b_direction_sccef(const LabFrame& frame, double utc);

// Lab-frame combination (C_xx + C_yy - 2 C_zz) with lab z along the field;
// for a traceless tensor this is -3 b^T C b. Throws if the epoch is
// unresolved or utc precedes it.
double c0_lab(const CTensor& c, double utc, const LabFrame& frame);

}  // namespace lli
