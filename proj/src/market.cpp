#include "curverec/market.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "curverec/errors.hpp"

namespace curverec {

namespace {

constexpr double kGridSnap = 1e-9;

// Snap a price to the 0.1 grid; reject prices off the grid or out of range.
double checked_price(double price) {
    if (!std::isfinite(price) || price < kPriceMin - kGridSnap || price > kPriceMax + kGridSnap)
        throw ValueError("bid price " + std::to_string(price) + " outside [-500, 3000]");
    const double steps = (price - kPriceMin) / kPriceStep;
    const double snapped = kPriceMin + std::round(steps) * kPriceStep;
    if (std::abs(snapped - price) > kGridSnap)
        throw ValueError("bid price " + std::to_string(price) + " is not on the 0.1 grid");
    return snapped;
}

}  // namespace

const char* side_token(Side s) noexcept { return s == Side::supply ? "supply" : "demand"; }

BidLadder make_ladder(Side side, std::vector<Bid> bids) {
    for (Bid& b : bids) {
        b.price = checked_price(b.price);
        if (!std::isfinite(b.volume) || b.volume < 0.0)
            throw ValueError("bid volume must be nonnegative");
    }
    std::sort(bids.begin(), bids.end(),
              [](const Bid& a, const Bid& b) { return a.price < b.price; });
    std::vector<Bid> merged;
    for (const Bid& b : bids) {
        if (!merged.empty() && merged.back().price == b.price)
            merged.back().volume += b.volume;
        else
            merged.push_back(b);
    }
    return BidLadder{side, std::move(merged)};
}

double StepCurve::value_at(double price) const noexcept {
    if (side == Side::supply) {
        // volume offered at prices <= price
        double v = 0.0;
        for (const auto& [p, cum] : points) {
            if (p > price) break;
            v = cum;
        }
        return v;
    }
    // volume wanted at prices >= price
    for (const auto& [p, cum] : points)
        if (p >= price) return cum;
    return 0.0;
}

StepCurve build_step_curve(const BidLadder& bids) {
    if (bids.entries.empty()) throw ValueError("build_step_curve: empty bid ladder");
    StepCurve curve{bids.side, {}};
    curve.points.reserve(bids.entries.size());
    if (bids.side == Side::supply) {
        double acc = 0.0;
        for (const Bid& b : bids.entries) {
            acc += b.volume;
            curve.points.emplace_back(b.price, acc);
        }
    } else {
        // accumulate over descending prices, report ascending
        double acc = 0.0;
        curve.points.resize(bids.entries.size());
        for (std::size_t i = bids.entries.size(); i-- > 0;) {
            acc += bids.entries[i].volume;
            curve.points[i] = {bids.entries[i].price, acc};
        }
    }
    return curve;
}

std::size_t PriceClassGrid::class_of(double price) const noexcept {
    // smallest boundary >= price; prices above the last boundary fall into
    // the last class
    for (std::size_t i = 0; i < boundaries.size(); ++i)
        if (price <= boundaries[i]) return i + 1;
    return boundaries.size();
}

PriceClassGrid make_price_classes(const StepCurve& curve, std::size_t class_count) {
    if (class_count < 2) throw ValueError("make_price_classes: need at least 2 classes");
    if (curve.points.empty()) throw ValueError("make_price_classes: empty curve");
    double v_min = curve.points.front().second;
    double v_max = v_min;
    for (const auto& [p, cum] : curve.points) {
        v_min = std::min(v_min, cum);
        v_max = std::max(v_max, cum);
    }
    if (v_min == v_max)
        throw ValueError("make_price_classes: degenerate curve, volume range is empty");

    const auto invert = [&curve](double target) {
        if (curve.side == Side::supply) {
            // smallest price whose cumulative volume reaches the target
            for (const auto& [p, cum] : curve.points)
                if (cum >= target) return p;
        } else {
            // mirrored: largest price still reaching the target
            for (std::size_t i = curve.points.size(); i-- > 0;)
                if (curve.points[i].second >= target) return curve.points[i].first;
        }
        return curve.points.back().first;
    };

    std::vector<double> boundaries;
    boundaries.reserve(class_count + 1);
    for (std::size_t j = 0; j < class_count; ++j)
        boundaries.push_back(invert(
            v_min + static_cast<double>(j) * (v_max - v_min) / static_cast<double>(class_count)));
    // close the partition at the full-volume price so the classes cover the
    // whole ladder; it usually coincides with the last target's price
    boundaries.push_back(invert(v_max));
    std::sort(boundaries.begin(), boundaries.end());
    boundaries.erase(std::unique(boundaries.begin(), boundaries.end()), boundaries.end());
    return PriceClassGrid{std::move(boundaries)};
}

BottomSeries bin_volumes(const BidLadder& bids, const PriceClassGrid& grid) {
    if (grid.class_count() < 2) throw ValueError("bin_volumes: grid needs at least 2 classes");
    std::vector<double> volumes(grid.class_count(), 0.0);
    for (const Bid& b : bids.entries) {
        const double price = checked_price(b.price);
        volumes[grid.class_of(price) - 1] += b.volume;
    }
    return BottomSeries(std::move(volumes), 1);
}

Equilibrium intersect(const StepCurve& supply, const StepCurve& demand) {
    if (supply.side != Side::supply || demand.side != Side::demand)
        throw ValueError("intersect: curves passed on the wrong sides");
    if (supply.points.empty() || demand.points.empty())
        throw NoEquilibriumError("intersect: empty curve");

    // Work on the union of step prices. Between grid prices both curves are
    // constant, so the crossing is pinned to a grid price.
    std::vector<double> prices;
    prices.reserve(supply.points.size() + demand.points.size());
    for (const auto& [p, v] : supply.points) prices.push_back(p);
    for (const auto& [p, v] : demand.points) prices.push_back(p);
    std::sort(prices.begin(), prices.end());
    prices.erase(std::unique(prices.begin(), prices.end()), prices.end());

    const std::size_t count = prices.size();
    std::vector<double> s_at(count), d_at(count);
    for (std::size_t i = 0; i < count; ++i) {
        s_at[i] = supply.value_at(prices[i]);
        d_at[i] = demand.value_at(prices[i]);
    }

    // Equality region: prices where the curves sit at the same level with
    // positive volume resolve to the midpoint of the region.
    double eq_first = 0.0, eq_last = 0.0, eq_volume = 0.0;
    bool has_equality = false;
    for (std::size_t i = 0; i < count; ++i) {
        if (s_at[i] == d_at[i] && s_at[i] > 0.0) {
            if (!has_equality) eq_first = prices[i];
            eq_last = prices[i];
            eq_volume = s_at[i];
            has_equality = true;
        }
    }
    if (has_equality) return Equilibrium{0.5 * (eq_first + eq_last), eq_volume};

    // Otherwise walk points and the open intervals between them. Both curves
    // are constant on the open intervals, so excess supply first turns
    // positive either at a grid price or just after one; either way the
    // crossing sits on the vertical risers at that price and resolves to the
    // midpoint of their overlap.
    for (std::size_t i = 0; i < count; ++i) {
        const double d_after = i + 1 < count ? d_at[i + 1] : 0.0;
        const bool above_at_point = s_at[i] > d_at[i];
        const bool above_after = s_at[i] > d_after;
        if (above_at_point || above_after) {
            const double s_before = i == 0 ? 0.0 : s_at[i - 1];
            const double hi = std::min(s_at[i], d_at[i]);
            const double lo = std::max(s_before, d_after);
            const double volume = 0.5 * (lo + hi);
            if (volume <= 0.0 || hi < lo)
                throw NoEquilibriumError("intersect: curves do not overlap at positive volume");
            return Equilibrium{prices[i], volume};
        }
    }
    throw NoEquilibriumError("intersect: supply never reaches demand in [-500, 3000]");
}

}  // namespace curverec
