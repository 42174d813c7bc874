#include <catch_amalgamated.hpp>

#include "mmlab/agents.hpp"
#include "mmlab/experiment.hpp"
#include "mmlab/synthetic.hpp"

using namespace mmlab;

namespace {

OrderBookSnapshot book_at(const char* mid, const char* half_spread = "0.5") {
    OrderBookSnapshot s;
    Decimal m = dec(mid), h = dec(half_spread);
    s.bids.push_back({m - h, dec("100")});
    s.asks.push_back({m + h, dec("100")});
    return s;
}

struct ViewRig {
    OrderBookSnapshot snap;
    Account account;
    std::vector<Order> open;
    std::vector<FillEvent> fills;
    bool first = false;
    bool last = false;

    MarketView view() const {
        MarketView v;
        v.current = &snap;
        v.now = snap.timestamp;
        v.is_first_refresh = first;
        v.is_last_refresh = last;
        v.account = &account;
        v.open_orders = open;
        v.fills_since_last = fills;
        return v;
    }
};

const AgentParams kParams{2, Decimal::from_int(1), Decimal::from_int(1)};

}  // namespace

TEST_CASE("base agent places one mid-anchored order and sizes all-in") {
    BaseStrategy strat(BaseConfig{dec("0.005"), CancelPolicy::never}, kParams);
    ViewRig rig;
    rig.snap = book_at("100");
    rig.account = Account{"a", Decimal(), Decimal(), dec("1000"), Decimal()};

    AgentAction action = strat.on_refresh(rig.view());
    REQUIRE(action.placements.size() == 1);
    CHECK(action.cancels.empty());
    const auto& req = action.placements[0];
    CHECK(req.side == OrderSide::bid);
    CHECK(req.price == dec("99.5"));
    // full free inventory: quote_free / price
    CHECK(req.quantity == Decimal::div_floor(dec("1000"), dec("99.5")));
    CHECK(req.price * req.quantity <= dec("1000"));
}

TEST_CASE("base 'never' leaves the open order alone") {
    BaseStrategy strat(BaseConfig{dec("0.005"), CancelPolicy::never}, kParams);
    ViewRig rig;
    rig.snap = book_at("100");
    rig.account = Account{"a", Decimal(), Decimal(), dec("1000"), Decimal()};
    auto first = strat.on_refresh(rig.view());
    REQUIRE(first.placements.size() == 1);
    strat.on_placed(first.placements[0], 1);

    rig.account = Account{"a", Decimal(), Decimal(), dec("0.00000062"), dec("999.99999938")};
    rig.open.push_back(Order{1, "a", OrderSide::bid, dec("99.5"),
                             first.placements[0].quantity, Decimal(), OrderStatus::open,
                             dec("999.99999938")});
    AgentAction second = strat.on_refresh(rig.view());
    CHECK(second.empty());
}

TEST_CASE("base 'always' cancels and re-places every refresh") {
    BaseStrategy strat(BaseConfig{dec("0.005"), CancelPolicy::always}, kParams);
    ViewRig rig;
    rig.snap = book_at("100");
    rig.account = Account{"a", Decimal(), Decimal(), dec("1000"), Decimal()};
    auto first = strat.on_refresh(rig.view());
    REQUIRE(first.placements.size() == 1);
    strat.on_placed(first.placements[0], 7);

    rig.account = Account{"a", Decimal(), Decimal(), dec("0.00000062"), dec("999.99999938")};
    rig.open.push_back(Order{7, "a", OrderSide::bid, dec("99.5"),
                             first.placements[0].quantity, Decimal(), OrderStatus::open,
                             dec("999.99999938")});
    AgentAction second = strat.on_refresh(rig.view());
    REQUIRE(second.cancels == std::vector<OrderId>{7});
    REQUIRE(second.placements.size() == 1);
    CHECK(second.placements[0].side == OrderSide::bid);
    CHECK(second.placements[0].price == dec("99.5"));
    // sized from what the cancel releases
    CHECK(second.placements[0].quantity == Decimal::div_floor(dec("1000"), dec("99.5")));
}

TEST_CASE("base 'opposite' cancels only when the move direction flips") {
    BaseStrategy strat(BaseConfig{dec("0.005"), CancelPolicy::opposite}, kParams);
    ViewRig rig;
    rig.snap = book_at("100");
    rig.account = Account{"a", Decimal(), Decimal(), dec("1000"), Decimal()};
    auto first = strat.on_refresh(rig.view());
    REQUIRE(first.placements.size() == 1);
    strat.on_placed(first.placements[0], 3);
    rig.open.push_back(Order{3, "a", OrderSide::bid, first.placements[0].price,
                             first.placements[0].quantity, Decimal(), OrderStatus::open,
                             first.placements[0].price * first.placements[0].quantity});
    rig.account = Account{"a", Decimal(), Decimal(), dec("0.00000062"), dec("999.99999938")};

    // 100 -> 101: only one delta observed, no direction history yet
    rig.snap = book_at("101");
    CHECK(strat.on_refresh(rig.view()).empty());

    // 101 -> 102: same direction, stays put
    rig.snap = book_at("102");
    CHECK(strat.on_refresh(rig.view()).empty());

    // 102 -> 100.5: direction flipped, cancel + replace
    rig.snap = book_at("100.5");
    AgentAction flip = strat.on_refresh(rig.view());
    REQUIRE(flip.cancels == std::vector<OrderId>{3});
    REQUIRE(flip.placements.size() == 1);
    CHECK(flip.placements[0].price == dec("99.99"));  // 100.5 * 0.995 floored to tick
}

TEST_CASE("base agent ping-pongs to the ask after a complete fill") {
    BaseStrategy strat(BaseConfig{dec("0.005"), CancelPolicy::never}, kParams);
    ViewRig rig;
    rig.snap = book_at("100");
    rig.account = Account{"a", Decimal(), Decimal(), dec("1000"), Decimal()};
    auto first = strat.on_refresh(rig.view());
    strat.on_placed(first.placements[0], 1);
    Decimal qty = first.placements[0].quantity;

    // complete fill arrived between refreshes; order no longer open
    rig.account = Account{"a", qty, Decimal(), dec("0.00000062"), Decimal()};
    rig.fills.push_back(FillEvent{"a", OrderSide::bid,
                                  Fill{1, 0, dec("99.5"), qty, Decimal()}, qty, Decimal()});
    AgentAction second = strat.on_refresh(rig.view());
    REQUIRE(second.placements.size() == 1);
    CHECK(second.placements[0].side == OrderSide::ask);
    CHECK(second.placements[0].price == dec("100.5"));
    CHECK(second.placements[0].quantity == qty);
    CHECK(strat.current_side() == OrderSide::ask);
}

TEST_CASE("base agent keeps its side after a boundary cancel") {
    BaseStrategy strat(BaseConfig{dec("0.005"), CancelPolicy::never}, kParams);
    ViewRig rig;
    rig.snap = book_at("100");
    rig.account = Account{"a", Decimal(), Decimal(), dec("1000"), Decimal()};
    auto first = strat.on_refresh(rig.view());
    strat.on_placed(first.placements[0], 1);

    // order vanished without fills (force-cancelled): still a bid next time
    AgentAction second = strat.on_refresh(rig.view());
    REQUIRE(second.placements.size() == 1);
    CHECK(second.placements[0].side == OrderSide::bid);
}

TEST_CASE("skewed agent quotes both sides at its spreads") {
    SkewedStrategy strat(SkewedConfig{dec("0.005"), dec("0.02")}, kParams);
    ViewRig rig;
    rig.snap = book_at("100");
    rig.account = Account{"a", dec("2"), Decimal(), dec("500"), Decimal()};
    AgentAction action = strat.on_refresh(rig.view());
    REQUIRE(action.placements.size() == 2);
    CHECK(action.placements[0].side == OrderSide::bid);
    CHECK(action.placements[0].price == dec("99.5"));
    CHECK(action.placements[1].side == OrderSide::ask);
    CHECK(action.placements[1].price == dec("102"));

    SECTION("a side with no funds is omitted") {
        rig.account = Account{"a", Decimal(), Decimal(), dec("500"), Decimal()};
        AgentAction bid_only = strat.on_refresh(rig.view());
        REQUIRE(bid_only.placements.size() == 1);
        CHECK(bid_only.placements[0].side == OrderSide::bid);
    }
    SECTION("open orders are refreshed away") {
        rig.open.push_back(Order{4, "a", OrderSide::bid, dec("99"), dec("1"), Decimal(),
                                 OrderStatus::open, dec("99")});
        AgentAction refreshed = strat.on_refresh(rig.view());
        CHECK(refreshed.cancels == std::vector<OrderId>{4});
    }
}

TEST_CASE("puremm quotes level percents off mid") {
    ViewRig rig;
    rig.snap = book_at("100");
    rig.account = Account{"a", dec("1"), Decimal(), dec("100"), Decimal()};

    PureMmStrategy strat(PureMmConfig{dec("0.5"), dec("1.3")}, kParams);
    AgentAction action = strat.on_refresh(rig.view());
    REQUIRE(action.placements.size() == 2);
    CHECK(action.placements[0].price == dec("99.5"));
    CHECK(action.placements[1].price == dec("101.3"));

    rig.snap = book_at("200");
    PureMmStrategy wide(PureMmConfig{dec("5.5"), dec("5.5")}, kParams);
    AgentAction wide_action = wide.on_refresh(rig.view());
    REQUIRE(wide_action.placements.size() == 2);
    CHECK(wide_action.placements[0].price == dec("189"));
    CHECK(wide_action.placements[1].price == dec("211"));

    SECTION("dust balances place nothing") {
        rig.account = Account{"a", dec("0.000001"), Decimal(), dec("0.5"), Decimal()};
        CHECK(strat.on_refresh(rig.view()).empty());
    }
}

TEST_CASE("skewed(s,s) and puremm(100s,100s) act identically") {
    ViewRig rig;
    rig.snap = book_at("123.4", "0.7");
    rig.account = Account{"a", dec("3.5"), Decimal(), dec("417"), Decimal()};

    SkewedStrategy skewed(SkewedConfig{dec("0.005"), dec("0.005")}, kParams);
    PureMmStrategy puremm(PureMmConfig{dec("0.5"), dec("0.5")}, kParams);
    AgentAction a = skewed.on_refresh(rig.view());
    AgentAction b = puremm.on_refresh(rig.view());
    REQUIRE(a.placements.size() == b.placements.size());
    for (std::size_t i = 0; i < a.placements.size(); ++i) {
        CHECK(a.placements[i].side == b.placements[i].side);
        CHECK(a.placements[i].price == b.placements[i].price);
        CHECK(a.placements[i].quantity == b.placements[i].quantity);
    }
}

TEST_CASE("hodler acts only at the run edges") {
    HodlerStrategy strat(HodlerConfig{}, kParams);
    ViewRig rig;
    rig.snap = book_at("100");
    rig.account = Account{"h", Decimal(), Decimal(), dec("3000"), Decimal()};

    rig.first = true;
    AgentAction first = strat.on_refresh(rig.view());
    REQUIRE(first.market_orders.size() == 1);
    CHECK(first.market_orders[0] == MarketOrderKind::buy_all);

    rig.first = false;
    CHECK(strat.on_refresh(rig.view()).empty());

    rig.last = true;
    AgentAction last = strat.on_refresh(rig.view());
    REQUIRE(last.market_orders.size() == 1);
    CHECK(last.market_orders[0] == MarketOrderKind::sell_all);
}

TEST_CASE("family grids") {
    CHECK(enumerate_family(Family::puremm).size() == 36);
    CHECK(enumerate_family(Family::skewed).size() == 50);
    CHECK(enumerate_family(Family::base).size() == 15);
    CHECK(enumerate_family(Family::hodler).size() == 1);

    GridSpec single;
    single.base_spreads = {dec("0.005")};
    auto configs = enumerate_family(Family::base, single);
    REQUIRE(configs.size() == 3);  // one spread, three policies
    for (const auto& c : configs) CHECK(std::get<BaseConfig>(c).spread == dec("0.005"));

    GridSpec dup;
    dup.puremm_levels_pct = {dec("0.3"), dec("0.3")};
    CHECK_THROWS_WITH(enumerate_family(Family::puremm, dup),
                      Catch::Matchers::ContainsSubstring("duplicate"));
}

TEST_CASE("base agent never holds two orders over a full run") {
    RegimeSpec spec;
    spec.trend = Trend::flat;
    spec.volatility = Volatility::high;
    spec.duration_intervals = 120;
    spec.seed = 31;
    spec.half_spread = dec("0.003");
    auto ds = generate_synthetic(spec, Granularity::minute);

    SimEnvironment env(dec("0.001"), MatchMode::historical_first, FillTrigger::strict_cross);
    env.add_agent("a", dec("0.05"), dec("5"));
    BaseStrategy strat(BaseConfig{dec("0.001"), CancelPolicy::opposite}, kParams);

    auto ranges = detail::index_trades(ds);
    std::vector<FillEvent> buffer;
    int fills_seen = 0;
    for (std::size_t k = 0; k < ds.snapshots.size(); ++k) {
        MarketView view;
        view.current = &ds.snapshots[k];
        view.now = ds.snapshots[k].timestamp;
        view.account = &env.account("a");
        view.open_orders = env.open_orders("a");
        view.fills_since_last = buffer;
        AgentAction action = strat.on_refresh(view);
        buffer.clear();
        for (OrderId id : action.cancels) env.cancel_order(id);
        for (const auto& req : action.placements)
            strat.on_placed(req, env.place_order("a", req.side, req.price, req.quantity));

        REQUIRE(env.open_orders("a").size() <= 1);

        auto [begin, end] = ranges[k];
        auto report = env.step_interval(
            ds.snapshots[k], std::span<const Trade>(ds.trades.data() + begin, end - begin));
        for (auto& ev : report.fills) {
            buffer.push_back(ev);
            ++fills_seen;
        }
    }
    CHECK(fills_seen > 0);  // the run actually exercised fills
}
