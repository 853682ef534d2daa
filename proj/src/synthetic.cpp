#include "mlpsens/synthetic.hpp"

#include "mlpsens/error.hpp"
#include "mlpsens/rng.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numbers>

namespace mlpsens {

Dataset generate_simdata(Index n, std::uint64_t seed) {
  if (n < 1) throw ValidationError("simdata needs n >= 1");
  Rng inputs(seed, RngPurpose::data);
  Rng noise(seed, RngPurpose::noise);
  Dataset data;
  data.column_names = {"X1", "X2", "X3", "Y"};
  data.values.resize(n, 4);
  for (Index r = 0; r < n; ++r) {
    const double x1 = inputs.normal();
    const double x2 = inputs.normal();
    const double x3 = inputs.normal();
    data.values.row(r) << x1, x2, x3, x1 * x1 - 0.5 * x2 + 0.1 * noise.normal();
  }
  data.input_columns = {0, 1, 2};
  data.output_columns = {3};
  return data;
}

Dataset generate_seasonal_demand(Index n_days, std::uint64_t seed) {
  using namespace std::chrono;
  if (n_days < 14) throw ValidationError("seasonal demand needs n_days >= 14");

  // Monday first.
  constexpr std::array<double, 7> kWeekday{0.97, 1.0, 1.0, 1.0, 0.96, 0.72, 0.5};
  const sys_days start = year{2007} / July / 2;

  Rng rng(seed, RngPurpose::data);
  Dataset data;
  data.column_names = {"TEMP", "WD", "DEM"};
  data.values.resize(n_days, 3);
  Timestamps ts{"DATE", {}, true};
  for (Index d = 0; d < n_days; ++d) {
    const sys_days day = start + days{d};
    const year_month_day ymd{day};
    const auto doy = static_cast<double>(
        (day - sys_days{ymd.year() / January / 1}).count());
    const unsigned iso_weekday = weekday{day}.iso_encoding();  // Mon = 1

    const double temp =
        14.0 - 11.0 * std::cos(2.0 * std::numbers::pi * (doy - 20.0) / 365.25) +
        2.0 * rng.normal();
    const double wd =
        std::clamp(kWeekday[iso_weekday - 1] + 0.02 * rng.normal(), 0.4, 1.05);
    const double dem =
        wd * (60.0 + 0.45 * (temp - 17.0) * (temp - 17.0)) + 1.5 * rng.normal();
    data.values.row(d) << temp, wd, dem;
    ts.values.push_back(static_cast<double>(day.time_since_epoch().count()) * 86400.0);
  }
  data.input_columns = {0, 1};
  data.output_columns = {2};
  data.timestamp = std::move(ts);
  return data;
}

}  // namespace mlpsens
