#include <doctest.h>

#include "v2g/pricing.hpp"

using namespace v2g;

TEST_CASE("default tariff matches the published table") {
  const auto s = PricingSchedule::shenzhen_default();
  s.validate();
  CHECK(price_at(s, 11) == doctest::Approx(1.1121).epsilon(0.0));
  CHECK(price_at(s, 3) == doctest::Approx(0.2486).epsilon(0.0));
  CHECK(price_at(s, 20) == doctest::Approx(0.6542).epsilon(0.0));
}

TEST_CASE("price_at wraps by day") {
  const auto s = PricingSchedule::shenzhen_default();
  CHECK(price_at(s, 24 + 11) == price_at(s, 11));
  CHECK(price_at(s, 24 * 5 + 3) == price_at(s, 3));
  // every hour of the day is covered
  for (int h = 0; h < 24; ++h) CHECK(price_at(s, h) > 0.0);
}

TEST_CASE("period boundaries are half-open") {
  const auto s = PricingSchedule::shenzhen_default();
  CHECK(price_at(s, 10) == doctest::Approx(1.1121));  // peak starts at 10
  CHECK(price_at(s, 12) == doctest::Approx(0.6542));  // normal resumes at 12
  CHECK(price_at(s, 19) == doctest::Approx(0.6542));  // peak ends before 19
  CHECK(price_at(s, 8) == doctest::Approx(0.6542));   // valley ends before 8
}

TEST_CASE("validation rejects bad schedules") {
  PricingSchedule gap;
  gap.periods = {{0, 8, 0.2}, {9, 24, 0.6}};
  CHECK_THROWS(gap.validate());

  PricingSchedule overlap;
  overlap.periods = {{0, 10, 0.2}, {8, 24, 0.6}};
  CHECK_THROWS(overlap.validate());

  PricingSchedule negative;
  negative.periods = {{0, 12, -0.1}, {12, 24, 0.6}};
  CHECK_THROWS(negative.validate());

  PricingSchedule short_day;
  short_day.periods = {{0, 20, 0.2}};
  CHECK_THROWS(short_day.validate());

  PricingSchedule empty;
  CHECK_THROWS(empty.validate());
}
