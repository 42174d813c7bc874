#ifndef MMLAB_TESTS_SCENARIOS_HPP
#define MMLAB_TESTS_SCENARIOS_HPP

// Random matching scenarios executed through both the engine and the
// brute-force reference matcher; equality of the fill sequences is the
// oracle-equivalence property.

#include <random>
#include <string>
#include <vector>

#include "mmlab/exchange.hpp"
#include "support/reference_matcher.hpp"

namespace mmlab::testing {

struct Scenario {
    OrderBookSnapshot snapshot;
    std::vector<std::tuple<OrderSide, Decimal, Decimal>> orders;  // side, price, qty
    std::vector<Trade> trades;
    MatchMode mode = MatchMode::historical_first;
    FillTrigger trigger = FillTrigger::strict_cross;
};

/// <=3 historical levels per side around 100, <=5 injected orders, <=10
/// trades with prices spanning the book so every eligibility branch fires.
inline Scenario random_scenario(std::mt19937_64& rng) {
    auto draw = [&](std::int64_t lo, std::int64_t hi) {
        return static_cast<std::int64_t>(lo + rng() % static_cast<std::uint64_t>(hi - lo + 1));
    };
    auto cents = [&](std::int64_t lo_c, std::int64_t hi_c) {
        return Decimal::from_units(draw(lo_c, hi_c) * 1'000'000);  // hundredths
    };

    Scenario sc;
    sc.snapshot.timestamp = 0;
    int bid_levels = static_cast<int>(draw(0, 3));
    int ask_levels = static_cast<int>(draw(0, 3));
    Decimal bid_top = cents(9'900, 9'999);
    Decimal ask_top = cents(10'000, 10'100);
    for (int i = 0; i < bid_levels; ++i)
        sc.snapshot.bids.push_back(
            {bid_top - Decimal::from_units(i * 50'000'000), cents(10, 300)});
    for (int i = 0; i < ask_levels; ++i)
        sc.snapshot.asks.push_back(
            {ask_top + Decimal::from_units(i * 50'000'000), cents(10, 300)});

    int n_orders = static_cast<int>(draw(0, 5));
    for (int i = 0; i < n_orders; ++i) {
        OrderSide side = draw(0, 1) ? OrderSide::bid : OrderSide::ask;
        // prices overlap the historical book and the trade range on purpose
        Decimal price = cents(9'850, 10'150);
        Decimal qty = cents(10, 200);
        sc.orders.emplace_back(side, price, qty);
    }

    int n_trades = static_cast<int>(draw(1, 10));
    for (int i = 0; i < n_trades; ++i) {
        Trade t;
        t.timestamp = i;
        t.aggressor_side = draw(0, 1) ? TradeSide::buy : TradeSide::sell;
        t.price = cents(9'850, 10'150);
        t.quantity = cents(5, 400);
        sc.trades.push_back(t);
    }
    sc.mode = draw(0, 1) ? MatchMode::historical_first : MatchMode::injected_first;
    sc.trigger = draw(0, 1) ? FillTrigger::strict_cross : FillTrigger::touch;
    return sc;
}

struct FillRecord {
    OrderId order_id;
    Decimal price;
    Decimal quantity;
    friend bool operator==(const FillRecord&, const FillRecord&) = default;
};

/// Runs the scenario through SimEnvironment::step_interval.
inline std::vector<FillRecord> run_engine(const Scenario& sc) {
    SimEnvironment env(Decimal(), sc.mode, sc.trigger);
    env.add_agent("a", Decimal::from_int(100'000), Decimal::from_int(100'000'000));
    for (const auto& [side, price, qty] : sc.orders) env.place_order("a", side, price, qty);
    StepReport report = env.step_interval(sc.snapshot, sc.trades);
    std::vector<FillRecord> fills;
    for (const auto& ev : report.fills)
        fills.push_back({ev.fill.order_id, ev.fill.price, ev.fill.quantity});
    return fills;
}

/// Runs the same scenario through the reference matcher, trade by trade.
inline std::vector<FillRecord> run_reference(const Scenario& sc) {
    RefBook book{sc.snapshot.bids, sc.snapshot.asks};
    std::vector<RefOrder> orders;
    OrderId next_id = 1;  // the engine assigns ids in placement order from 1
    for (const auto& [side, price, qty] : sc.orders)
        orders.push_back({next_id++, side, price, qty});
    std::vector<FillRecord> fills;
    for (const auto& trade : sc.trades)
        for (const auto& f : reference_match(book, orders, trade, sc.mode, sc.trigger))
            fills.push_back({f.order_id, f.price, f.quantity});
    return fills;
}

}  // namespace mmlab::testing

#endif  // MMLAB_TESTS_SCENARIOS_HPP
