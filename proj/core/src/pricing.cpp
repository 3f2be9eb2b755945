#include "v2g/pricing.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace v2g {

void PricingSchedule::validate() const {
  if (periods.empty())
    throw std::invalid_argument("pricing: no periods");
  auto sorted = periods;
  std::sort(sorted.begin(), sorted.end(),
            [](const PricePeriod& a, const PricePeriod& b) { return a.from_hour < b.from_hour; });
  double cursor = 0.0;
  for (const auto& p : sorted) {
    if (p.price <= 0.0)
      throw std::invalid_argument("pricing: prices must be strictly positive");
    if (p.from_hour != cursor)
      throw std::invalid_argument("pricing: periods must partition [0,24) with no gaps or overlaps");
    if (p.to_hour <= p.from_hour)
      throw std::invalid_argument("pricing: empty or inverted period");
    cursor = p.to_hour;
  }
  if (cursor != 24.0)
    throw std::invalid_argument("pricing: periods must cover up to hour 24");
}

PricingSchedule PricingSchedule::shenzhen_default() {
  PricingSchedule s;
  s.periods = {
      {0.0, 8.0, 0.2486},    // valley
      {8.0, 10.0, 0.6542},   // normal
      {10.0, 12.0, 1.1121},  // peak
      {12.0, 14.0, 0.6542},  // normal
      {14.0, 19.0, 1.1121},  // peak
      {19.0, 24.0, 0.6542},  // normal
  };
  return s;
}

double price_at_hour(const PricingSchedule& schedule, double hour) {
  double h = std::fmod(hour, 24.0);
  if (h < 0.0) h += 24.0;
  for (const auto& p : schedule.periods)
    if (h >= p.from_hour && h < p.to_hour) return p.price;
  throw std::logic_error("pricing: hour not covered (schedule not validated?)");
}

double price_at(const PricingSchedule& schedule, int t) {
  int h = t % 24;
  if (h < 0) h += 24;
  return price_at_hour(schedule, static_cast<double>(h));
}

}  // namespace v2g
