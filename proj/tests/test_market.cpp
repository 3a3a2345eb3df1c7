#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "curverec/errors.hpp"
#include "curverec/hierarchy.hpp"
#include "curverec/market.hpp"
#include "curverec/rng.hpp"

using namespace curverec;

namespace {

BidLadder supply_two() { return make_ladder(Side::supply, {{10.0, 5.0}, {20.0, 3.0}}); }
BidLadder demand_two() { return make_ladder(Side::demand, {{10.0, 5.0}, {20.0, 3.0}}); }

// Bids on the 0.1 grid with integer volumes, prices within [lo, hi].
BidLadder random_ladder(Side side, std::uint64_t series, double lo, double hi) {
    rng::Stream stream(606, series, 0);
    std::vector<Bid> bids;
    const std::size_t count = 5 + static_cast<std::size_t>(stream.uniform(0) * 20);
    for (std::size_t i = 0; i < count; ++i) {
        const double steps = std::floor(stream.uniform(2 * i + 1) * (hi - lo) * 10.0);
        const double price = lo + steps * 0.1;
        const double volume = std::floor(stream.uniform(2 * i + 2) * 50.0);
        bids.push_back({price, volume});
    }
    return make_ladder(side, bids);
}

double ladder_total(const BidLadder& l) {
    double total = 0.0;
    for (const Bid& b : l.entries) total += b.volume;
    return total;
}

}  // namespace

TEST_CASE("supply step curve accumulates upward") {
    const StepCurve curve = build_step_curve(supply_two());
    REQUIRE(curve.points.size() == 2);
    CHECK(curve.points[0] == std::pair<double, double>{10.0, 5.0});
    CHECK(curve.points[1] == std::pair<double, double>{20.0, 8.0});
}

TEST_CASE("demand step curve accumulates downward") {
    const StepCurve curve = build_step_curve(demand_two());
    CHECK(curve.value_at(5.0) == 8.0);
    CHECK(curve.value_at(10.0) == 8.0);
    CHECK(curve.value_at(10.1) == 3.0);
    CHECK(curve.value_at(20.0) == 3.0);
    CHECK(curve.value_at(20.1) == 0.0);
}

TEST_CASE("duplicate prices merge") {
    const BidLadder merged = make_ladder(Side::supply, {{10.0, 2.0}, {10.0, 3.0}});
    REQUIRE(merged.entries.size() == 1);
    CHECK(merged.entries[0].volume == 5.0);
    const StepCurve curve = build_step_curve(merged);
    CHECK(curve.points[0].second == 5.0);
}

TEST_CASE("ladder validation") {
    CHECK_THROWS_AS(make_ladder(Side::supply, {{10.05, 1.0}}), ValueError);  // off the grid
    CHECK_THROWS_AS(make_ladder(Side::supply, {{3200.0, 1.0}}), ValueError);
    CHECK_THROWS_AS(make_ladder(Side::supply, {{-600.0, 1.0}}), ValueError);
    CHECK_THROWS_AS(make_ladder(Side::supply, {{10.0, -1.0}}), ValueError);
    CHECK_THROWS_AS(build_step_curve(BidLadder{Side::supply, {}}), ValueError);
    // grid snap keeps representable prices
    const BidLadder ok = make_ladder(Side::supply, {{0.1 + 1e-12, 1.0}});
    CHECK(ok.entries[0].price == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("step curves are monotone for arbitrary ladders") {
    for (std::uint64_t series = 0; series < 10; ++series) {
        const StepCurve supply = build_step_curve(random_ladder(Side::supply, series, -50, 150));
        for (std::size_t i = 1; i < supply.points.size(); ++i)
            CHECK(supply.points[i].second >= supply.points[i - 1].second);
        const StepCurve demand =
            build_step_curve(random_ladder(Side::demand, series + 100, -50, 150));
        for (std::size_t i = 1; i < demand.points.size(); ++i)
            CHECK(demand.points[i].second <= demand.points[i - 1].second);
    }
}

TEST_CASE("price classes from equidistant volume targets") {
    const StepCurve curve = build_step_curve(supply_two());
    const PriceClassGrid grid = make_price_classes(curve, 2);
    CHECK(grid.boundaries == std::vector<double>{10.0, 20.0});

    // more classes than distinct steps collapse
    const PriceClassGrid big = make_price_classes(curve, 7);
    CHECK(big.class_count() == 2);

    const StepCurve flat = build_step_curve(make_ladder(Side::supply, {{10.0, 5.0}}));
    CHECK_THROWS_AS(make_price_classes(flat, 2), ValueError);
    CHECK_THROWS_AS(make_price_classes(curve, 1), ValueError);
}

TEST_CASE("binning conserves volume exactly") {
    const PriceClassGrid grid = make_price_classes(build_step_curve(supply_two()), 2);
    const BottomSeries binned = bin_volumes(supply_two(), grid);
    CHECK(binned.values == std::vector<double>{5.0, 3.0});

    // all bids in one class
    const BidLadder narrow = make_ladder(Side::supply, {{9.9, 1.0}, {10.0, 2.0}});
    const BottomSeries one = bin_volumes(narrow, grid);
    CHECK(one.values == std::vector<double>{3.0, 0.0});

    for (std::uint64_t series = 0; series < 12; ++series) {
        const BidLadder ladder = random_ladder(Side::supply, series + 40, 0, 100);
        const StepCurve curve = build_step_curve(ladder);
        if (curve.points.front().second == curve.points.back().second) continue;
        const PriceClassGrid g = make_price_classes(curve, 5);
        if (g.class_count() < 2) continue;
        const BottomSeries b = bin_volumes(ladder, g);
        double total = 0.0;
        for (double v : b.values) total += v;  // integer volumes: exact
        CHECK(total == ladder_total(ladder));
    }
}

TEST_CASE("binning then cumulating equals the curve at the boundaries") {
    for (std::uint64_t series = 0; series < 12; ++series) {
        const BidLadder ladder = random_ladder(Side::supply, series + 90, -20, 80);
        const StepCurve curve = build_step_curve(ladder);
        if (curve.points.front().second == curve.points.back().second) continue;
        const PriceClassGrid grid = make_price_classes(curve, 6);
        if (grid.class_count() < 2) continue;
        const Curve cumulated = aggregate_bottom(bin_volumes(ladder, grid));
        for (std::size_t c = 0; c < grid.class_count(); ++c)
            CHECK(cumulated.values[c] == curve.value_at(grid.boundaries[c]));
    }
}

TEST_CASE("intersection of dense symmetric books") {
    // supply roughly v = p, demand roughly v = 100 - p, on the 0.1 grid
    std::vector<Bid> asks;
    std::vector<Bid> bids;
    for (double p = 0.1; p <= 100.0 + 1e-9; p += 0.1) {
        asks.push_back({p, 0.1});
        bids.push_back({100.0 - p + 0.1, 0.1});
    }
    const StepCurve supply = build_step_curve(make_ladder(Side::supply, asks));
    const StepCurve demand = build_step_curve(make_ladder(Side::demand, bids));
    const Equilibrium eq = intersect(supply, demand);
    CHECK(std::abs(eq.price - 50.0) <= 0.1001);
    CHECK(std::abs(eq.volume - 50.0) <= 0.1001);
}

TEST_CASE("no equilibrium when supply sits above demand") {
    const StepCurve supply = build_step_curve(make_ladder(Side::supply, {{100.0, 5.0}}));
    const StepCurve demand = build_step_curve(make_ladder(Side::demand, {{50.0, 5.0}}));
    CHECK_THROWS_AS(intersect(supply, demand), NoEquilibriumError);
}

TEST_CASE("flat overlap resolves to the midpoint price") {
    // both curves flat at volume 10 over prices [20, 30]
    const StepCurve supply = build_step_curve(make_ladder(Side::supply, {{20.0, 10.0}}));
    const StepCurve demand = build_step_curve(make_ladder(Side::demand, {{30.0, 10.0}}));
    const Equilibrium eq = intersect(supply, demand);
    CHECK(eq.price == doctest::Approx(25.0).epsilon(1e-12));
    CHECK(eq.volume == doctest::Approx(10.0).epsilon(1e-12));
}

TEST_CASE("shared vertical riser resolves to the midpoint volume") {
    // at price 10 supply jumps 0 -> 8 while demand drops 6 -> 0
    const StepCurve supply = build_step_curve(make_ladder(Side::supply, {{10.0, 8.0}}));
    const StepCurve demand = build_step_curve(make_ladder(Side::demand, {{10.0, 6.0}}));
    const Equilibrium eq = intersect(supply, demand);
    CHECK(eq.price == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(eq.volume == doctest::Approx(3.0).epsilon(1e-12));  // midpoint of [0, 6]
}

TEST_CASE("intersection is symmetric under price reflection") {
    for (std::uint64_t series = 0; series < 8; ++series) {
        const BidLadder asks = random_ladder(Side::supply, series + 200, -100, 0);
        const BidLadder bids = random_ladder(Side::demand, series + 300, 0, 100);
        const StepCurve supply = build_step_curve(asks);
        const StepCurve demand = build_step_curve(bids);

        // mirrored market: prices negated, sides exchanged
        std::vector<Bid> mirrored_asks;
        for (const Bid& b : bids.entries) mirrored_asks.push_back({-b.price, b.volume});
        std::vector<Bid> mirrored_bids;
        for (const Bid& b : asks.entries) mirrored_bids.push_back({-b.price, b.volume});
        const StepCurve m_supply = build_step_curve(make_ladder(Side::supply, mirrored_asks));
        const StepCurve m_demand = build_step_curve(make_ladder(Side::demand, mirrored_bids));

        bool crossed = true;
        Equilibrium eq{0, 0};
        try {
            eq = intersect(supply, demand);
        } catch (const NoEquilibriumError&) {
            crossed = false;
        }
        if (!crossed) {
            CHECK_THROWS_AS(intersect(m_supply, m_demand), NoEquilibriumError);
            continue;
        }
        const Equilibrium mirrored = intersect(m_supply, m_demand);
        CHECK(mirrored.price == doctest::Approx(-eq.price).epsilon(1e-9));
        CHECK(mirrored.volume == doctest::Approx(eq.volume).epsilon(1e-9));
    }
}

TEST_CASE("out-of-range bids are rejected during binning") {
    const PriceClassGrid grid{{0.0, 50.0}};
    CHECK_THROWS_AS(bin_volumes(BidLadder{Side::supply, {{5000.0, 1.0}}}, grid), ValueError);
}
