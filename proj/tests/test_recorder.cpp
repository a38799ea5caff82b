#include "doctest.h"

#include <algorithm>

#include "camcrew/recorder.hpp"
#include "camcrew/rng.hpp"

using namespace camcrew;

namespace {

std::vector<std::string> cam_ids(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("C" + std::to_string(10 + i));
  return ids;
}

}  // namespace

TEST_CASE("no requests leaves all channels free") {
  MatrixState m(cam_ids(4));
  StorageLedger ledger;
  const auto events = matrix_tick(m, {}, {}, 0.0, ledger);
  CHECK(events.empty());
  CHECK(m.occupied() == 0);
}

TEST_CASE("nine requests fill eight channels by priority") {
  const auto ids = cam_ids(9);
  MatrixState m(ids);
  StorageLedger ledger;
  std::set<std::string> requested(ids.begin(), ids.end());
  std::map<std::string, double> priority;
  for (int i = 0; i < 9; ++i) priority[ids[std::size_t(i)]] = double(i);  // C10 lowest

  const auto events = matrix_tick(m, requested, priority, 1.0, ledger);
  CHECK(events.size() == 8);
  CHECK(m.occupied() == 8);

  // Sort-and-take-8 oracle.
  std::vector<std::string> expect = ids;
  std::sort(expect.begin(), expect.end(), [&](const std::string& a, const std::string& b) {
    if (priority[a] != priority[b]) return priority[a] > priority[b];
    return a < b;
  });
  for (int i = 0; i < 8; ++i) CHECK(m.channel_of(expect[std::size_t(i)]) >= 0);
  CHECK(m.channel_of("C10") < 0);
  REQUIRE(m.pending.size() == 1);
  CHECK(m.pending[0] == "C10");

  // Deterministic: same inputs, same assignment.
  MatrixState m2(ids);
  StorageLedger l2;
  matrix_tick(m2, requested, priority, 1.0, l2);
  for (const std::string& id : ids) CHECK(m.channel_of(id) == m2.channel_of(id));
}

TEST_CASE("priority ties break by ascending camera id") {
  const auto ids = cam_ids(3);
  MatrixState m(ids, 2);
  StorageLedger ledger;
  std::map<std::string, double> priority{{"C10", 1.0}, {"C11", 1.0}, {"C12", 1.0}};
  matrix_tick(m, {"C10", "C11", "C12"}, priority, 0.0, ledger);
  CHECK(m.channel_of("C10") == 0);
  CHECK(m.channel_of("C11") == 1);
  CHECK(m.channel_of("C12") < 0);
}

TEST_CASE("a pending camera takes over as soon as a channel frees up") {
  const auto ids = cam_ids(3);
  MatrixState m(ids, 2);
  StorageLedger ledger;
  std::map<std::string, double> pr{{"C10", 3.0}, {"C11", 2.0}, {"C12", 1.0}};
  matrix_tick(m, {"C10", "C11", "C12"}, pr, 0.0, ledger);
  CHECK(m.channel_of("C12") < 0);
  // C11 drops out; C12 should be assigned to the freed channel.
  matrix_tick(m, {"C10", "C12"}, pr, 1.0, ledger);
  CHECK(m.channel_of("C12") >= 0);
  CHECK(m.pending.empty());
  REQUIRE(ledger.segments.size() == 1);
  CHECK(ledger.segments[0].camera == "C11");
}

TEST_CASE("no preemption: a recording camera keeps its channel") {
  const auto ids = cam_ids(3);
  MatrixState m(ids, 1);
  StorageLedger ledger;
  matrix_tick(m, {"C12"}, {{"C12", 0.5}}, 0.0, ledger);
  CHECK(m.channel_of("C12") == 0);
  // Higher-priority request arrives; C12 stays put.
  matrix_tick(m, {"C10", "C12"}, {{"C10", 9.0}, {"C12", 0.5}}, 1.0, ledger);
  CHECK(m.channel_of("C12") == 0);
  CHECK(m.channel_of("C10") < 0);
  REQUIRE(m.pending.size() == 1);
  CHECK(m.pending[0] == "C10");
}

TEST_CASE("re-requesting a camera yields two disjoint segments") {
  MatrixState m(cam_ids(2));
  StorageLedger ledger;
  std::map<std::string, double> pr{{"C10", 1.0}, {"C11", 1.0}};
  matrix_tick(m, {"C10"}, pr, 0.0, ledger);
  matrix_tick(m, {}, pr, 5.0, ledger);
  matrix_tick(m, {"C10"}, pr, 8.0, ledger);
  const auto events = close_all(m, 10.0, ledger);
  CHECK(events.size() == 1);
  REQUIRE(ledger.segments.size() == 2);
  CHECK(ledger.segments[0].start == doctest::Approx(0.0));
  CHECK(ledger.segments[0].end == doctest::Approx(5.0));
  CHECK(ledger.segments[1].start == doctest::Approx(8.0));
  CHECK(ledger.segments[1].end == doctest::Approx(10.0));
  CHECK(ledger.recorded_seconds() == doctest::Approx(7.0));
}

TEST_CASE("matrix rejects unknown cameras and missing priorities") {
  MatrixState m(cam_ids(2));
  StorageLedger ledger;
  CHECK_THROWS_AS(matrix_tick(m, {"nope"}, {{"nope", 1.0}}, 0.0, ledger), std::invalid_argument);
  CHECK_THROWS_AS(matrix_tick(m, {"C10"}, {}, 0.0, ledger), std::invalid_argument);
}

TEST_CASE("ledger seconds equal the per-tick channel-count integral") {
  Rng rng(13);
  const auto ids = cam_ids(12);
  MatrixState m(ids);
  StorageLedger ledger;
  const double dt = 0.5;
  double integral = 0.0;
  for (int k = 0; k < 400; ++k) {
    std::set<std::string> requested;
    std::map<std::string, double> pr;
    for (const auto& id : ids) {
      if (rng.next_unit() < 0.4) {
        requested.insert(id);
        pr[id] = rng.next_unit();
      }
    }
    matrix_tick(m, requested, pr, k * dt, ledger);
    integral += m.occupied() * dt;
  }
  close_all(m, 400 * dt, ledger);
  CHECK(ledger.recorded_seconds() == doctest::Approx(integral));
}

TEST_CASE("storage bytes arithmetic") {
  CHECK(storage_bytes(0.0, 102'000'000) == 0);
  // A full day at 102 Mbps.
  CHECK(storage_bytes(86400.0, 102'000'000) == 1'101'600'000'000ull);
  CHECK(storage_bytes(600.0, 102'000'000) == 7'650'000'000ull);
  CHECK(storage_bytes(0.5, 8) == 1);  // fractional duration path
}

TEST_CASE("savings fraction") {
  StorageLedger empty;
  CHECK(savings_fraction(empty, 2400.0) == doctest::Approx(1.0));
  StorageLedger full;
  full.segments = {{"a", 0, 600}, {"b", 0, 600}, {"c", 0, 600}, {"d", 0, 600}};
  CHECK(savings_fraction(full, 2400.0) == doctest::Approx(0.0));
  StorageLedger partial;
  partial.segments = {{"a", 0, 700}, {"b", 100, 760}};
  CHECK(savings_fraction(partial, 2400.0) == doctest::Approx(1.0 - 1360.0 / 2400.0));
}
