#pragma once

#include <cstddef>
#include <vector>

#include "curverec/hierarchy.hpp"

namespace curverec {

enum class Side { supply, demand };

const char* side_token(Side s) noexcept;

// One bid: a price on the 0.1 EUR/MWh grid inside [-500, 3000] and a
// nonnegative volume in MWh.
struct Bid {
    double price;
    double volume;
};

inline constexpr double kPriceMin = -500.0;
inline constexpr double kPriceMax = 3000.0;
inline constexpr double kPriceStep = 0.1;

// Bids of one auction side, merged by price and sorted ascending.
struct BidLadder {
    Side side;
    std::vector<Bid> entries;
};

// Validates prices (grid, range) and volumes, merges duplicate prices by
// summing their volumes, sorts ascending.
BidLadder make_ladder(Side side, std::vector<Bid> bids);

// A monotone step curve: cumulative volume by price, points sorted by price
// ascending. Supply accumulates upward in price (nondecreasing), demand
// accumulates downward (nonincreasing when read ascending).
struct StepCurve {
    Side side;
    std::vector<std::pair<double, double>> points;  // (price, cumulative volume)

    // Cumulative volume available at price p: for supply the volume offered
    // at prices <= p, for demand the volume wanted at prices >= p.
    double value_at(double price) const noexcept;
};

StepCurve build_step_curve(const BidLadder& bids);

// Price-class boundaries obtained by inverting a step curve on a grid of
// equidistant volumes. Classes partition [-500, 3000]: class c covers
// (boundary_{c-1}, boundary_c], the first class extended down to -500 and
// the last up to 3000. Cumulating class volumes therefore reproduces the
// step curve evaluated at the boundaries.
struct PriceClassGrid {
    std::vector<double> boundaries;  // strictly increasing

    std::size_t class_count() const noexcept { return boundaries.size(); }
    // 1-based class index of a price.
    std::size_t class_of(double price) const noexcept;
};

// Targets v_j = v_min + j (v_max - v_min) / M for j = 0..M-1; boundary_j is
// the smallest price whose cumulative volume reaches v_j (largest for
// demand). Collapsed duplicates reduce the class count.
PriceClassGrid make_price_classes(const StepCurve& curve, std::size_t class_count);

// Volume per price class; the sum over classes equals the ladder total
// exactly.
BottomSeries bin_volumes(const BidLadder& bids, const PriceClassGrid& grid);

struct Equilibrium {
    double price;
    double volume;
};

// Crossing of the two step curves. A crossing segment (flat overlap or
// shared vertical riser) resolves to its midpoint in the free coordinate.
// Throws NoEquilibriumError when the curves do not cross at positive volume.
Equilibrium intersect(const StepCurve& supply, const StepCurve& demand);

}  // namespace curverec
