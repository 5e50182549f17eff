#include <doctest.h>

#include "properties.hpp"

namespace {

void require(const props::Result& r) {
    INFO("first violation: " << r.note << ", worst deviation " << r.worst);
    CHECK(r.cases > 0);
    CHECK(r.ok);
}

}  // namespace

TEST_CASE("property: distributions are normalized") { require(props::normalization()); }

TEST_CASE("property: epsilon floor") { require(props::epsilon_floor()); }

TEST_CASE("property: order invariance at beta = 1") { require(props::order_invariance()); }

TEST_CASE("property: softmax shift invariance") { require(props::softmax_shift()); }

TEST_CASE("property: relabeling symmetry") { require(props::relabeling()); }

TEST_CASE("property: exchangeable collapsed prior") { require(props::exchangeability()); }

TEST_CASE("property: byte-identical re-runs") { require(props::determinism()); }
