#pragma once

#include "mlpsens/dataset.hpp"

#include <cstdint>

namespace mlpsens {

inline constexpr Index kSimdataRows = 1500;

/// X1, X2, X3 ~ N(0, 1) i.i.d. and Y = X1^2 - 0.5 X2 + 0.1 eps, eps ~ N(0, 1).
/// Inputs X1..X3, output Y.
Dataset generate_simdata(Index n = kSimdataRows, std::uint64_t seed = 150);

/// Synthetic daily electricity demand starting 2007-07-02, one row per day:
///
///   TEMP = 14 - 11 cos(2 pi (doy - 20) / 365.25) + N(0, 2)      [deg C]
///   WD   = clamp(weekday factor + N(0, 0.02), 0.4, 1.05)
///          factors Mon..Sun = 0.97, 1.0, 1.0, 1.0, 0.96, 0.72, 0.5
///   DEM  = WD (60 + 0.45 (TEMP - 17)^2) + N(0, 1.5)              [GWh]
///
/// Demand is U-shaped in temperature (heating below 17 C, cooling above), so
/// the temperature sensitivity changes sign between winter and summer.
/// Timestamp column DATE; inputs TEMP, WD; output DEM. Requires n_days >= 14.
Dataset generate_seasonal_demand(Index n_days = 730, std::uint64_t seed = 150);

}  // namespace mlpsens
