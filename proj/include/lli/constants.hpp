#pragma once

// Shared physical constants for the D5/2 Lorentz-symmetry test on 40Ca+.
// Frequencies are plain Hz unless a _rad suffix says otherwise.

namespace lli::constants {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

// Bohr magneton over h, Hz per gauss.
inline constexpr double mu_bohr_hz_per_gauss = 1.3996245e6;

// Lande factors of the S1/2 ground and D5/2 metastable manifolds.
inline constexpr double g_s_half = 2.002;
inline constexpr double g_d_five_half = 1.2;

// C0(2) sensitivity of a D5/2 Zeeman level: shift = c0 * (a - b*mJ^2) Hz.
inline constexpr double level_shift_const_hz = 2.16e15;
inline constexpr double level_shift_mj2_hz = 7.42e14;

// Frequency of the |D_1/2 D_-1/2> vs |D_5/2 D_-5/2> branch pair per unit
// C0(2): 2*(shift(5/2) - shift(1/2)) = -12 * level_shift_mj2_hz.
inline constexpr double pair_frequency_hz_per_c0 = -12.0 * level_shift_mj2_hz;

// Sidereal day and angular rate. 23.93 h keeps the signal generator and the
// harmonic analysis on exactly the same frequency grid.
inline constexpr double sidereal_day_s = 23.93 * 3600.0;
inline constexpr double omega_sidereal_rad = two_pi / sidereal_day_s;

// March equinox instants (UTC, unix seconds), 2015..2030, minute accuracy.
// Phase origin for the sidereal time argument.
struct EquinoxEntry {
  int year;
  double utc_s;
};

inline constexpr EquinoxEntry equinox_table[] = {
    {2015, 1426891500.0},  // 2015-03-20 22:45
    {2016, 1458448200.0},  // 2016-03-20 04:30
    {2017, 1490005680.0},  // 2017-03-20 10:28
    {2018, 1521562500.0},  // 2018-03-20 16:15
    {2019, 1553119080.0},  // 2019-03-20 21:58
    {2020, 1584676200.0},  // 2020-03-20 03:50
    {2021, 1616233020.0},  // 2021-03-20 09:37
    {2022, 1647790380.0},  // 2022-03-20 15:33
    {2023, 1679347440.0},  // 2023-03-20 21:24
    {2024, 1710903960.0},  // 2024-03-20 03:06
    {2025, 1742461260.0},  // 2025-03-20 09:01
    {2026, 1774017960.0},  // 2026-03-20 14:46
    {2027, 1805574300.0},  // 2027-03-20 20:25
    {2028, 1837131420.0},  // 2028-03-20 02:17
    {2029, 1868688120.0},  // 2029-03-20 08:02
    {2030, 1900245120.0},  // 2030-03-20 13:52
};

}  // namespace lli::constants
