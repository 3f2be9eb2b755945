#pragma once

#include <vector>

namespace v2g {

// One contiguous tariff period [from_hour, to_hour) within a day.
struct PricePeriod {
  double from_hour = 0.0;
  double to_hour = 0.0;
  double price = 0.0;  // currency per kWh
};

// Segmented day tariff. Periods must partition [0,24) with positive prices.
struct PricingSchedule {
  std::vector<PricePeriod> periods;

  void validate() const;  // throws std::invalid_argument on violation

  // Shenzhen residential peak/normal/valley tariff.
  static PricingSchedule shenzhen_default();
};

// Price of the period containing hour (t mod 24). t is the step index at
// one-hour granularity.
double price_at(const PricingSchedule& schedule, int t);
double price_at_hour(const PricingSchedule& schedule, double hour);

}  // namespace v2g
