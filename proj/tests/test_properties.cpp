#include <doctest.h>

#include "invariants.hpp"

using namespace radlab;

namespace {

constexpr int kInstances = 120;

void check(const invariants::Outcome& o) {
  INFO(o.name << ": worst " << o.worst);
  CHECK(o.instances >= 100);
  CHECK(o.failures == 0);
}

}  // namespace

TEST_CASE("property: cutoff partition") { check(invariants::cutoff_partition(101, kInstances)); }
TEST_CASE("property: A is symmetric on compactly supported functions") {
  check(invariants::a_symmetry(202, kInstances));
}
TEST_CASE("property: Besov duality") { check(invariants::besov_duality(303, kInstances)); }
TEST_CASE("property: first resolvent identity") {
  check(invariants::resolvent_identity(404, kInstances));
}
TEST_CASE("property: Theta bounded, increasing, concave") {
  check(invariants::theta_concavity(505, kInstances));
}
TEST_CASE("property: branch conjugation") { check(invariants::branch_conjugation(606, kInstances)); }
