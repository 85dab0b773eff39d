#include <catch2/catch_amalgamated.hpp>

#include "invloc/core.hpp"
#include "test_helpers.hpp"

using namespace invloc;
using Catch::Approx;

TEST_CASE("distance matches the three norms") {
    CHECK(distance(NormTag::Euclidean, Point(0, 0), Point(3, 4)) == Approx(5.0));
    CHECK(distance(NormTag::SquaredEuclidean, Point(0, 0), Point(3, 4)) == Approx(25.0));
    CHECK(distance(NormTag::Rectilinear, Point(0, 1), Point(1, 0)) == Approx(2.0));
}

TEST_CASE("distance is symmetric, nonnegative, zero iff equal") {
    testhelp::Rng rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const Point p(rng.uniform(-50, 50), rng.uniform(-50, 50));
        const Point q(rng.uniform(-50, 50), rng.uniform(-50, 50));
        const Point r(rng.uniform(-50, 50), rng.uniform(-50, 50));
        for (NormTag norm : {NormTag::SquaredEuclidean, NormTag::Euclidean, NormTag::Rectilinear}) {
            CHECK(distance(norm, p, q) == Approx(distance(norm, q, p)));
            CHECK(distance(norm, p, q) >= 0.0);
            CHECK(distance(norm, p, p) == 0.0);
        }
        // Triangle inequality for the genuine metrics.
        for (NormTag norm : {NormTag::Euclidean, NormTag::Rectilinear})
            CHECK(distance(norm, p, r) <= distance(norm, p, q) + distance(norm, q, r) + 1e-12);
        const double e = distance(NormTag::Euclidean, p, q);
        CHECK(distance(NormTag::SquaredEuclidean, p, q) == Approx(e * e).epsilon(1e-12));
    }
}

TEST_CASE("objective evaluates the weighted distance sum") {
    const auto inst = testhelp::four_site_instance(NormTag::Rectilinear);
    CHECK(objective(inst, Point(1, 0)) == Approx(38.0));

    std::vector<Site> zero_w{Site(Point(1, 2), 0.0), Site(Point(-3, 4), 0.0)};
    std::vector<CostVector> costs(2);
    const Instance zeros(zero_w, costs, NormTag::Euclidean);
    CHECK(objective(zeros, Point(9, 9)) == 0.0);

    const Instance single({Site(Point(2, 3), 5.0)}, {CostVector()}, NormTag::Euclidean);
    CHECK(objective(single, Point(2, 3)) == 0.0);
    CHECK(objective(single, Point(3, 3)) > 0.0);
}

TEST_CASE("apply shifts coordinates by r - s") {
    const auto inst = testhelp::four_site_instance(NormTag::SquaredEuclidean);
    auto m = Modification::zero(4);
    const auto same = apply(inst, m);
    for (std::size_t i = 0; i < 4; ++i)
        CHECK(same.sites()[i].position == inst.sites()[i].position);

    m.r[0].first = 0.3333;
    const auto moved = apply(inst, m);
    CHECK(moved.sites()[0].position.x == Approx(1.3333));
    CHECK(moved.sites()[0].position.y == Approx(0.0));
    CHECK(inst.sites()[0].position.x == Approx(1.0));  // input untouched

    m.s[0].first = 0.3333;  // cancellation
    const auto cancelled = apply(inst, m);
    CHECK(cancelled.sites()[0].position.x == Approx(1.0));

    auto bad = Modification::zero(3);
    CHECK_THROWS_AS(apply(inst, bad), std::invalid_argument);
}

TEST_CASE("apply followed by the swapped modification restores coordinates") {
    testhelp::Rng rng(11);
    for (int trial = 0; trial < 50; ++trial) {
        const auto inst = testhelp::random_instance(rng, 5, NormTag::Euclidean);
        auto m = Modification::zero(5);
        for (std::size_t i = 0; i < 5; ++i) {
            m.r[i] = {rng.uniform(0, 3), rng.uniform(0, 3)};
            m.s[i] = {rng.uniform(0, 3), rng.uniform(0, 3)};
        }
        Modification inv;
        inv.r = m.s;
        inv.s = m.r;
        const auto restored = apply(apply(inst, m), inv);
        for (std::size_t i = 0; i < 5; ++i) {
            CHECK(restored.sites()[i].position.x ==
                  Approx(inst.sites()[i].position.x).margin(1e-12));
            CHECK(restored.sites()[i].position.y ==
                  Approx(inst.sites()[i].position.y).margin(1e-12));
        }
    }
}

TEST_CASE("modification_cost sums priced movements and is linear") {
    const auto inst = testhelp::four_site_instance(NormTag::SquaredEuclidean);
    auto m = Modification::zero(4);
    CHECK(modification_cost(inst.costs(), m) == 0.0);

    m.r[0].first = 1.0 / 3.0;
    m.r[3].second = 1.0;
    const double expected = std::sqrt(2.0) / 3.0 + 1.0;
    CHECK(modification_cost(inst.costs(), m) == Approx(expected).epsilon(1e-9));
    CHECK(expected == Approx(1.4714).margin(5e-5));

    // Linearity: scaling the modification scales the cost.
    auto doubled = m;
    for (std::size_t i = 0; i < 4; ++i) {
        doubled.r[i] = {2 * m.r[i].first, 2 * m.r[i].second};
        doubled.s[i] = {2 * m.s[i].first, 2 * m.s[i].second};
    }
    CHECK(modification_cost(inst.costs(), doubled) == Approx(2 * expected));

    auto bad = Modification::zero(2);
    CHECK_THROWS_AS(modification_cost(inst.costs(), bad), std::invalid_argument);
}

TEST_CASE("type invariants are enforced") {
    CHECK_THROWS_AS(Point(std::nan(""), 0.0), std::invalid_argument);
    CHECK_THROWS_AS(Site(Point(0, 0), -1.0), std::invalid_argument);
    CHECK_THROWS_AS(CostVector(-1, 0, 0, 0), std::invalid_argument);
    CHECK_THROWS_AS(Instance({}, {}, NormTag::Euclidean), std::invalid_argument);
    CHECK_THROWS_AS(Instance({Site(Point(0, 0), 1.0)}, {}, NormTag::Euclidean),
                    std::invalid_argument);
}
