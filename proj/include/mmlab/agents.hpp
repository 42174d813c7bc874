#ifndef MMLAB_AGENTS_HPP
#define MMLAB_AGENTS_HPP

#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "mmlab/decimal.hpp"
#include "mmlab/errors.hpp"
#include "mmlab/exchange.hpp"
#include "mmlab/marketdata.hpp"

namespace mmlab {

/// Read-only world an agent sees at each refresh.
struct MarketView {
    const OrderBookSnapshot* current = nullptr;
    const OrderBookSnapshot* previous = nullptr;
    TimestampMs now = 0;
    bool is_first_refresh = false;
    bool is_last_refresh = false;
    const Account* account = nullptr;
    std::span<const Order> open_orders;
    std::span<const FillEvent> fills_since_last;  // this agent's fills only

    bool has_two_sided_book() const {
        return current && current->best_bid() && current->best_ask();
    }
};

enum class CancelPolicy { never, always, opposite };

inline std::string to_string(CancelPolicy p) {
    switch (p) {
        case CancelPolicy::never: return "never";
        case CancelPolicy::always: return "always";
        default: return "opposite";
    }
}

inline CancelPolicy cancel_policy_from_string(std::string_view s) {
    if (s == "never") return CancelPolicy::never;
    if (s == "always") return CancelPolicy::always;
    if (s == "opposite") return CancelPolicy::opposite;
    throw Error("unknown cancel policy '" + std::string(s) + "'");
}

/// Single resting order, symmetric spread, ping-pong between sides.
struct BaseConfig {
    Decimal spread;  // fraction, e.g. 0.005
    CancelPolicy policy = CancelPolicy::never;
    friend bool operator==(const BaseConfig&, const BaseConfig&) = default;
};

/// Two-sided maker with independently skewed bid/ask spreads.
struct SkewedConfig {
    Decimal bid_spread;  // fraction
    Decimal ask_spread;
    friend bool operator==(const SkewedConfig&, const SkewedConfig&) = default;
};

/// Two-sided maker quoting at percent offsets drawn from a fixed level set.
struct PureMmConfig {
    Decimal bid_level_pct;  // percent, e.g. 0.5 means 0.5%
    Decimal ask_level_pct;
    friend bool operator==(const PureMmConfig&, const PureMmConfig&) = default;
};

/// Buy-and-hold baseline.
struct HodlerConfig {
    friend bool operator==(const HodlerConfig&, const HodlerConfig&) = default;
};

using AgentConfig = std::variant<BaseConfig, SkewedConfig, PureMmConfig, HodlerConfig>;

enum class Family { base, skewed, puremm, hodler };

inline std::string to_string(Family f) {
    switch (f) {
        case Family::base: return "base";
        case Family::skewed: return "skewed";
        case Family::puremm: return "puremm";
        default: return "hodler";
    }
}

inline Family family_from_string(std::string_view s) {
    if (s == "base") return Family::base;
    if (s == "skewed") return Family::skewed;
    if (s == "puremm") return Family::puremm;
    if (s == "hodler") return Family::hodler;
    throw Error("unknown family '" + std::string(s) + "'");
}

inline Family family_of(const AgentConfig& cfg) {
    if (std::holds_alternative<BaseConfig>(cfg)) return Family::base;
    if (std::holds_alternative<SkewedConfig>(cfg)) return Family::skewed;
    if (std::holds_alternative<PureMmConfig>(cfg)) return Family::puremm;
    return Family::hodler;
}

struct OrderRequest {
    OrderSide side = OrderSide::bid;
    Decimal price;
    Decimal quantity;
};

enum class MarketOrderKind { buy_all, sell_all };

/// What an agent wants done this refresh. Cancels execute before placements;
/// placements must be coverable from the balances the cancels release.
struct AgentAction {
    std::vector<OrderId> cancels;
    std::vector<OrderRequest> placements;
    std::vector<MarketOrderKind> market_orders;

    bool empty() const { return cancels.empty() && placements.empty() && market_orders.empty(); }
};

/// Knobs shared by all maker families.
struct AgentParams {
    int price_decimals = 2;
    Decimal min_notional = Decimal::from_int(1);  // orders below this are not placed
    Decimal sizing_fraction = Decimal::from_int(1);
};

namespace detail {

inline Decimal bid_quote_price(Decimal mid, Decimal spread, int dp) {
    return (mid * (Decimal::from_int(1) - spread)).floor_to(dp);
}

inline Decimal ask_quote_price(Decimal mid, Decimal spread, int dp) {
    return (mid * (Decimal::from_int(1) + spread)).ceil_to(dp);
}

/// Sizes a bid from available quote; returns nullopt below the dust floor.
inline std::optional<OrderRequest> make_bid(Decimal mid, Decimal spread, Decimal quote_avail,
                                            const AgentParams& params) {
    Decimal price = bid_quote_price(mid, spread, params.price_decimals);
    if (!price.is_positive()) return std::nullopt;
    Decimal qty = Decimal::div_floor(quote_avail * params.sizing_fraction, price);
    if (!qty.is_positive()) return std::nullopt;
    if (price * qty < params.min_notional) return std::nullopt;
    return OrderRequest{OrderSide::bid, price, qty};
}

/// Sizes an ask from available base.
inline std::optional<OrderRequest> make_ask(Decimal mid, Decimal spread, Decimal base_avail,
                                            const AgentParams& params) {
    Decimal price = ask_quote_price(mid, spread, params.price_decimals);
    if (!price.is_positive()) return std::nullopt;
    Decimal qty = base_avail * params.sizing_fraction;
    if (!qty.is_positive()) return std::nullopt;
    if (price * qty < params.min_notional) return std::nullopt;
    return OrderRequest{OrderSide::ask, price, qty};
}

}  // namespace detail

/// Strategy interface: one action per refresh, driven only by the view and
/// the agent's own bookkeeping, so replays are deterministic. The runner
/// reports each accepted placement back through on_placed.
class Strategy {
  public:
    virtual ~Strategy() = default;
    virtual AgentAction on_refresh(const MarketView& view) = 0;
    virtual void on_placed(const OrderRequest&, OrderId) {}
};

class BaseStrategy final : public Strategy {
  public:
    BaseStrategy(BaseConfig cfg, AgentParams params) : cfg_(cfg), params_(params) {}

    AgentAction on_refresh(const MarketView& view) override {
        AgentAction action;
        if (!view.has_two_sided_book()) return action;
        const Decimal mid = mid_price(*view.current);

        // Completed fill flips the side; a boundary force-cancel does not.
        if (tracked_order_) {
            if (order_completed(view, *tracked_order_)) side_ = opposite(side_);
            if (!order_open(view, *tracked_order_)) tracked_order_.reset();
        }

        bool open = tracked_order_.has_value();
        bool replace = false;
        if (open) {
            switch (cfg_.policy) {
                case CancelPolicy::never:
                    break;
                case CancelPolicy::always:
                    replace = true;
                    break;
                case CancelPolicy::opposite:
                    if (mid_prev_ && mid_prev2_) {
                        int dir_now = sign(mid - *mid_prev_);
                        int dir_prev = sign(*mid_prev_ - *mid_prev2_);
                        replace = dir_now != dir_prev;
                    }
                    break;
            }
            if (replace) {
                action.cancels.push_back(*tracked_order_);
                tracked_order_.reset();
                open = false;
            }
        }

        if (!open) {
            const Account& acct = *view.account;
            std::optional<OrderRequest> req;
            if (side_ == OrderSide::bid) {
                // a cancelled bid's quote is free again once the cancel runs
                Decimal quote_avail = acct.quote_free + (replace ? acct.quote_locked : Decimal());
                req = detail::make_bid(mid, cfg_.spread, quote_avail, params_);
            } else {
                Decimal base_avail = acct.base_free + (replace ? acct.base_locked : Decimal());
                req = detail::make_ask(mid, cfg_.spread, base_avail, params_);
            }
            if (req) action.placements.push_back(*req);
        }

        mid_prev2_ = mid_prev_;
        mid_prev_ = mid;
        return action;
    }

    void on_placed(const OrderRequest& req, OrderId id) override {
        tracked_order_ = id;
        tracked_qty_ = req.quantity;
    }

    OrderSide current_side() const { return side_; }

  private:
    static OrderSide opposite(OrderSide s) {
        return s == OrderSide::bid ? OrderSide::ask : OrderSide::bid;
    }
    static int sign(Decimal d) { return d.is_positive() ? 1 : d.is_negative() ? -1 : 0; }

    static bool order_open(const MarketView& view, OrderId id) {
        for (const auto& o : view.open_orders)
            if (o.id == id) return true;
        return false;
    }

    bool order_completed(const MarketView& view, OrderId id) const {
        if (order_open(view, id)) return false;
        Decimal filled;
        for (const auto& ev : view.fills_since_last)
            if (ev.fill.order_id == id) filled += ev.fill.quantity;
        return tracked_qty_ && filled == *tracked_qty_;
    }

    BaseConfig cfg_;
    AgentParams params_;
    OrderSide side_ = OrderSide::bid;  // ping-pong starts on the bid
    std::optional<OrderId> tracked_order_;
    std::optional<Decimal> tracked_qty_;
    std::optional<Decimal> mid_prev_;
    std::optional<Decimal> mid_prev2_;
};

class SkewedStrategy final : public Strategy {
  public:
    SkewedStrategy(SkewedConfig cfg, AgentParams params) : cfg_(cfg), params_(params) {}

    AgentAction on_refresh(const MarketView& view) override {
        AgentAction action;
        if (!view.has_two_sided_book()) return action;
        const Decimal mid = mid_price(*view.current);
        const Account& acct = *view.account;
        for (const auto& o : view.open_orders) action.cancels.push_back(o.id);
        // after the cancels everything locked is free again
        if (auto bid = detail::make_bid(mid, cfg_.bid_spread,
                                        acct.quote_free + acct.quote_locked, params_))
            action.placements.push_back(*bid);
        if (auto ask = detail::make_ask(mid, cfg_.ask_spread,
                                        acct.base_free + acct.base_locked, params_))
            action.placements.push_back(*ask);
        return action;
    }

  private:
    SkewedConfig cfg_;
    AgentParams params_;
};

class PureMmStrategy final : public Strategy {
  public:
    PureMmStrategy(PureMmConfig cfg, AgentParams params) : cfg_(cfg), params_(params) {}

    AgentAction on_refresh(const MarketView& view) override {
        AgentAction action;
        if (!view.has_two_sided_book()) return action;
        const Decimal mid = mid_price(*view.current);
        const Account& acct = *view.account;
        const Decimal hundred = Decimal::from_int(100);
        for (const auto& o : view.open_orders) action.cancels.push_back(o.id);
        if (auto bid = detail::make_bid(mid, cfg_.bid_level_pct / hundred,
                                        acct.quote_free + acct.quote_locked, params_))
            action.placements.push_back(*bid);
        if (auto ask = detail::make_ask(mid, cfg_.ask_level_pct / hundred,
                                        acct.base_free + acct.base_locked, params_))
            action.placements.push_back(*ask);
        return action;
    }

  private:
    PureMmConfig cfg_;
    AgentParams params_;
};

class HodlerStrategy final : public Strategy {
  public:
    HodlerStrategy(HodlerConfig, AgentParams) {}

    AgentAction on_refresh(const MarketView& view) override {
        AgentAction action;
        if (view.is_first_refresh)
            action.market_orders.push_back(MarketOrderKind::buy_all);
        if (view.is_last_refresh)
            action.market_orders.push_back(MarketOrderKind::sell_all);
        return action;
    }
};

inline std::unique_ptr<Strategy> make_strategy(const AgentConfig& cfg, const AgentParams& params) {
    return std::visit(
        [&](const auto& c) -> std::unique_ptr<Strategy> {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, BaseConfig>)
                return std::make_unique<BaseStrategy>(c, params);
            else if constexpr (std::is_same_v<T, SkewedConfig>)
                return std::make_unique<SkewedStrategy>(c, params);
            else if constexpr (std::is_same_v<T, PureMmConfig>)
                return std::make_unique<PureMmStrategy>(c, params);
            else
                return std::make_unique<HodlerStrategy>(c, params);
        },
        cfg);
}

/// Grid overrides for enumerate_family; empty vectors mean defaults.
struct GridSpec {
    std::vector<Decimal> base_spreads;          // fractions
    std::vector<CancelPolicy> base_policies;
    std::vector<Decimal> skewed_bid_spreads;    // fractions
    std::vector<Decimal> skewed_ask_spreads;
    std::vector<Decimal> puremm_levels_pct;     // percents
};

namespace detail {

inline std::vector<Decimal> parse_all(std::initializer_list<const char*> xs) {
    std::vector<Decimal> out;
    for (const char* x : xs) out.push_back(Decimal::parse(x));
    return out;
}

template <typename T>
inline void require_unique(const std::vector<T>& grid, const char* what) {
    for (std::size_t i = 0; i < grid.size(); ++i)
        for (std::size_t j = i + 1; j < grid.size(); ++j)
            if (grid[i] == grid[j]) throw Error(std::string("duplicate ") + what + " in grid");
}

}  // namespace detail

/// Enumerates a family's configuration grid, defaults:
/// base   5 spreads x 3 cancel policies            = 15
/// skewed 5 bid spreads x 10 ask spreads           = 50
/// puremm 6 levels squared                         = 36
/// hodler                                          = 1
inline std::vector<AgentConfig> enumerate_family(Family family, const GridSpec& grid = {}) {
    std::vector<AgentConfig> out;
    switch (family) {
        case Family::base: {
            auto spreads = grid.base_spreads.empty()
                               ? detail::parse_all({"0.001", "0.002", "0.005", "0.01", "0.02"})
                               : grid.base_spreads;
            auto policies = grid.base_policies.empty()
                                ? std::vector<CancelPolicy>{CancelPolicy::never,
                                                            CancelPolicy::always,
                                                            CancelPolicy::opposite}
                                : grid.base_policies;
            detail::require_unique(spreads, "base spread");
            detail::require_unique(policies, "base policy");
            for (const auto& s : spreads)
                for (const auto& p : policies) out.push_back(BaseConfig{s, p});
            break;
        }
        case Family::skewed: {
            auto bids = grid.skewed_bid_spreads.empty()
                            ? detail::parse_all({"0.001", "0.003", "0.005", "0.01", "0.02"})
                            : grid.skewed_bid_spreads;
            auto asks = grid.skewed_ask_spreads.empty()
                            ? detail::parse_all({"0.001", "0.002", "0.003", "0.005", "0.008",
                                                 "0.01", "0.015", "0.02", "0.03", "0.05"})
                            : grid.skewed_ask_spreads;
            detail::require_unique(bids, "skewed bid spread");
            detail::require_unique(asks, "skewed ask spread");
            for (const auto& b : bids)
                for (const auto& a : asks) out.push_back(SkewedConfig{b, a});
            break;
        }
        case Family::puremm: {
            auto levels = grid.puremm_levels_pct.empty()
                              ? detail::parse_all({"0.3", "0.5", "0.8", "1.3", "3.4", "5.5"})
                              : grid.puremm_levels_pct;
            detail::require_unique(levels, "puremm level");
            for (const auto& b : levels)
                for (const auto& a : levels) out.push_back(PureMmConfig{b, a});
            break;
        }
        case Family::hodler:
            out.push_back(HodlerConfig{});
            break;
    }
    return out;
}

}  // namespace mmlab

#endif  // MMLAB_AGENTS_HPP
