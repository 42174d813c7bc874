#ifndef MMLAB_EXCHANGE_HPP
#define MMLAB_EXCHANGE_HPP

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mmlab/decimal.hpp"
#include "mmlab/errors.hpp"
#include "mmlab/marketdata.hpp"

namespace mmlab {

using OrderId = std::uint64_t;
using AgentId = std::string;

enum class OrderSide { bid, ask };
enum class MatchMode { historical_first, injected_first };
enum class FillTrigger { strict_cross, touch };

inline std::string to_string(OrderSide s) { return s == OrderSide::bid ? "bid" : "ask"; }

inline MatchMode match_mode_from_string(std::string_view s) {
    if (s == "historical_first") return MatchMode::historical_first;
    if (s == "injected_first") return MatchMode::injected_first;
    throw Error("unknown matching_mode '" + std::string(s) + "'");
}

inline FillTrigger fill_trigger_from_string(std::string_view s) {
    if (s == "strict_cross") return FillTrigger::strict_cross;
    if (s == "touch") return FillTrigger::touch;
    throw Error("unknown fill_trigger '" + std::string(s) + "'");
}

enum class OrderStatus { open, filled, cancelled };

struct Order {
    OrderId id = 0;
    AgentId agent_id;
    OrderSide side = OrderSide::bid;
    Decimal price;
    Decimal quantity;
    Decimal filled_quantity;
    OrderStatus status = OrderStatus::open;
    /// Funds still reserved for this order: remaining quote (price*(qty-filled),
    /// maintained by exact telescoping) for bids, remaining base for asks.
    Decimal locked;

    Decimal remaining() const { return quantity - filled_quantity; }
};

struct Account {
    AgentId agent_id;
    Decimal base_free, base_locked;
    Decimal quote_free, quote_locked;

    Decimal total_base() const { return base_free + base_locked; }
    Decimal total_quote() const { return quote_free + quote_locked; }
};

struct Fill {
    OrderId order_id = 0;  // 0 for marketable (non-resting) executions
    TimestampMs timestamp = 0;
    Decimal price;     // the injected order's limit price
    Decimal quantity;  // base amount
    Decimal fee;       // in the received asset
};

/// A fill plus the exact signed balance deltas it applied; ledger
/// reconciliation tests sum these.
struct FillEvent {
    AgentId agent_id;
    OrderSide side = OrderSide::bid;
    Fill fill;
    Decimal base_delta;
    Decimal quote_delta;
};

struct StepReport {
    std::vector<FillEvent> fills;  // grouped by agent in id order, execution order within
};

inline Decimal mid_price(const OrderBookSnapshot& snap) {
    if (!snap.best_bid() || !snap.best_ask())
        throw Error("mid_price: book empty on one side at " + std::to_string(snap.timestamp));
    return (snap.best_bid()->price + snap.best_ask()->price) / Decimal::from_int(2);
}

/// Marked value of an account in quote units at the snapshot mid.
inline Decimal account_value(const Account& acct, const OrderBookSnapshot& snap) {
    return acct.total_base() * mid_price(snap) + acct.total_quote();
}

/// Mutable copy of one snapshot's levels; historical depletion within an
/// interval happens here and is discarded when the next snapshot arrives.
struct WorkingBook {
    std::vector<BookLevel> bids;
    std::vector<BookLevel> asks;
    std::size_t bid_head = 0;
    std::size_t ask_head = 0;

    void reset(const OrderBookSnapshot& snap) {
        bids = snap.bids;
        asks = snap.asks;
        bid_head = ask_head = 0;
    }
};

/// One historical trade replayed against the union of the working book and
/// the given injected orders. Returns (order, quantity) executions in match
/// order; depletes the working book; does not mutate the orders.
///
/// Price priority is strict: better-priced liquidity executes first whether
/// historical or injected. At an equal price the mode decides which side of
/// the union consumes first. The trigger decides whether an injected order
/// needs the trade price to cross it strictly or just touch it. Historical
/// depletion is always bounded by the trade price itself.
struct InjectedExecution {
    Order* order;
    Decimal quantity;
};

inline std::vector<InjectedExecution> match_trade(WorkingBook& book,
                                                  std::span<Order* const> injected,
                                                  const Trade& trade, MatchMode mode,
                                                  FillTrigger trigger) {
    const bool aggressor_buy = trade.aggressor_side == TradeSide::buy;
    const OrderSide maker_side = aggressor_buy ? OrderSide::ask : OrderSide::bid;

    std::vector<Order*> eligible;
    for (Order* o : injected) {
        if (o->side != maker_side || o->status != OrderStatus::open || !o->remaining().is_positive())
            continue;
        bool crossed;
        if (aggressor_buy)
            crossed = trigger == FillTrigger::strict_cross ? o->price < trade.price
                                                           : o->price <= trade.price;
        else
            crossed = trigger == FillTrigger::strict_cross ? o->price > trade.price
                                                           : o->price >= trade.price;
        if (crossed) eligible.push_back(o);
    }
    // (price, order_id) priority; price direction depends on the book side.
    std::sort(eligible.begin(), eligible.end(), [&](const Order* a, const Order* b) {
        if (a->price != b->price)
            return aggressor_buy ? a->price < b->price : a->price > b->price;
        return a->id < b->id;
    });

    auto& levels = aggressor_buy ? book.asks : book.bids;
    auto& head = aggressor_buy ? book.ask_head : book.bid_head;
    auto hist_eligible = [&](const BookLevel& lvl) {
        return aggressor_buy ? lvl.price <= trade.price : lvl.price >= trade.price;
    };
    auto better = [&](Decimal a, Decimal b) { return aggressor_buy ? a < b : a > b; };

    std::vector<InjectedExecution> fills;
    Decimal remaining = trade.quantity;
    std::size_t oi = 0;
    std::vector<Decimal> taken(eligible.size());

    while (remaining.is_positive()) {
        bool have_inj = oi < eligible.size();
        bool have_hist = head < levels.size() && hist_eligible(levels[head]);
        if (!have_inj && !have_hist) break;

        bool use_hist;
        if (!have_inj)
            use_hist = true;
        else if (!have_hist)
            use_hist = false;
        else if (levels[head].price == eligible[oi]->price)
            use_hist = mode == MatchMode::historical_first;
        else
            use_hist = better(levels[head].price, eligible[oi]->price);

        if (use_hist) {
            Decimal take = std::min(remaining, levels[head].quantity);
            levels[head].quantity -= take;
            remaining -= take;
            if (levels[head].quantity.is_zero()) ++head;
        } else {
            Order* o = eligible[oi];
            Decimal take = std::min(remaining, o->remaining() - taken[oi]);
            taken[oi] += take;
            remaining -= take;
            fills.push_back({o, take});
            ++oi;
        }
    }
    return fills;
}

/// The simulated exchange: per-agent accounts and injected limit orders.
///
/// Agents are isolated: within an interval each agent's orders are replayed
/// against its own pristine copy of the snapshot and the full trade flow, so
/// results do not depend on cohort composition and report order is just
/// agent-id order.
class SimEnvironment {
  public:
    SimEnvironment(Decimal fee_rate, MatchMode mode, FillTrigger trigger)
        : fee_rate_(fee_rate), mode_(mode), trigger_(trigger) {
        if (fee_rate_.is_negative() || fee_rate_ >= Decimal::from_int(1))
            throw Error("fee_rate must be in [0, 1)");
    }

    Decimal fee_rate() const { return fee_rate_; }
    MatchMode match_mode() const { return mode_; }
    FillTrigger fill_trigger() const { return trigger_; }

    void add_agent(const AgentId& id, Decimal base, Decimal quote) {
        if (index_of_.count(id)) throw Error("duplicate agent '" + id + "'");
        if (base.is_negative() || quote.is_negative())
            throw Error("initial balances must be >= 0");
        AgentSlot slot;
        slot.account = Account{id, base, Decimal(), quote, Decimal()};
        // keep agents sorted by id so every report order is deterministic
        auto pos = std::lower_bound(agents_.begin(), agents_.end(), id,
                                    [](const AgentSlot& a, const AgentId& v) {
                                        return a.account.agent_id < v;
                                    });
        agents_.insert(pos, std::move(slot));
        reindex();
    }

    bool has_agent(const AgentId& id) const { return index_of_.count(id) != 0; }

    const Account& account(const AgentId& id) const { return slot(id).account; }

    std::span<const Order> open_orders(const AgentId& id) const { return slot(id).orders; }

    std::vector<AgentId> agent_ids() const {
        std::vector<AgentId> ids;
        ids.reserve(agents_.size());
        for (const auto& a : agents_) ids.push_back(a.account.agent_id);
        return ids;
    }

    OrderId place_order(const AgentId& agent_id, OrderSide side, Decimal price, Decimal quantity) {
        if (!price.is_positive()) throw Error("place_order: price must be > 0");
        if (!quantity.is_positive()) throw Error("place_order: quantity must be > 0");
        AgentSlot& s = slot(agent_id);
        Order order;
        order.agent_id = agent_id;
        order.side = side;
        order.price = price;
        order.quantity = quantity;
        if (side == OrderSide::bid) {
            Decimal cost = price * quantity;
            if (s.account.quote_free < cost)
                throw Error("place_order: insufficient quote for " + agent_id + ": need " +
                            cost.str() + ", free " + s.account.quote_free.str());
            s.account.quote_free -= cost;
            s.account.quote_locked += cost;
            order.locked = cost;
        } else {
            if (s.account.base_free < quantity)
                throw Error("place_order: insufficient base for " + agent_id + ": need " +
                            quantity.str() + ", free " + s.account.base_free.str());
            s.account.base_free -= quantity;
            s.account.base_locked += quantity;
            order.locked = quantity;
        }
        order.id = next_order_id_++;
        owner_of_[order.id] = agent_id;
        s.orders.push_back(order);
        return order.id;
    }

    void cancel_order(OrderId id) {
        auto it = owner_of_.find(id);
        if (it == owner_of_.end()) throw Error("cancel_order: unknown or closed order " + std::to_string(id));
        AgentSlot& s = slot(it->second);
        auto oit = std::find_if(s.orders.begin(), s.orders.end(),
                                [&](const Order& o) { return o.id == id; });
        if (oit == s.orders.end())
            throw Error("cancel_order: unknown or closed order " + std::to_string(id));
        release(s.account, *oit);
        owner_of_.erase(it);
        s.orders.erase(oit);
    }

    void cancel_all() {
        for (auto& s : agents_) {
            for (auto& o : s.orders) {
                release(s.account, o);
                owner_of_.erase(o.id);
            }
            s.orders.clear();
        }
    }

    /// Immediate execution against the snapshot for the buy-and-hold agent:
    /// converts as much free quote to base as the ask side absorbs.
    std::vector<FillEvent> market_buy_all(const AgentId& agent_id,
                                          const OrderBookSnapshot& snap) {
        AgentSlot& s = slot(agent_id);
        std::vector<FillEvent> events;
        for (const auto& lvl : snap.asks) {
            Decimal afford = Decimal::div_floor(s.account.quote_free, lvl.price);
            Decimal take = std::min(afford, lvl.quantity);
            if (!take.is_positive()) break;
            Decimal cost = lvl.price * take;
            Decimal fee = fee_rate_ * take;
            s.account.quote_free -= cost;
            s.account.base_free += take - fee;
            events.push_back({agent_id, OrderSide::bid,
                              Fill{0, snap.timestamp, lvl.price, take, fee}, take - fee, -cost});
        }
        return events;
    }

    /// Sells all free base by walking the bid side.
    std::vector<FillEvent> market_sell_all(const AgentId& agent_id,
                                           const OrderBookSnapshot& snap) {
        AgentSlot& s = slot(agent_id);
        std::vector<FillEvent> events;
        for (const auto& lvl : snap.bids) {
            Decimal take = std::min(s.account.base_free, lvl.quantity);
            if (!take.is_positive()) break;
            Decimal proceeds = lvl.price * take;
            Decimal fee = fee_rate_ * proceeds;
            s.account.base_free -= take;
            s.account.quote_free += proceeds - fee;
            events.push_back({agent_id, OrderSide::ask,
                              Fill{0, snap.timestamp, lvl.price, take, fee}, -take,
                              proceeds - fee});
        }
        return events;
    }

    /// Replays one interval of historical trades. Each agent with open orders
    /// gets its own working copy of the snapshot; fills update balances with
    /// exact telescoped lock releases.
    StepReport step_interval(const OrderBookSnapshot& snap, std::span<const Trade> trades) {
        StepReport report;
        std::vector<Order*> open;
        for (auto& s : agents_) {
            if (s.orders.empty()) continue;
            scratch_.reset(snap);
            for (const auto& trade : trades) {
                open.clear();
                for (auto& o : s.orders)
                    if (o.status == OrderStatus::open && o.remaining().is_positive())
                        open.push_back(&o);
                if (open.empty()) break;  // nothing left to fill this interval
                auto executions = match_trade(scratch_, open, trade, mode_, trigger_);
                for (const auto& ex : executions)
                    apply_fill(s, *ex.order, ex.quantity, trade.timestamp, report);
            }
            // drop fully filled orders; their ids are now unknown to cancel_order
            for (auto& o : s.orders)
                if (o.status == OrderStatus::filled) owner_of_.erase(o.id);
            std::erase_if(s.orders, [](const Order& o) { return o.status != OrderStatus::open; });
        }
        return report;
    }

    /// Exact invariant check used by property tests: locked balances equal
    /// the sum over open orders of their reserved funds.
    bool locked_balances_consistent() const {
        for (const auto& s : agents_) {
            Decimal base_lock, quote_lock;
            for (const auto& o : s.orders) {
                if (o.side == OrderSide::bid)
                    quote_lock += o.locked;
                else
                    base_lock += o.locked;
            }
            if (base_lock != s.account.base_locked || quote_lock != s.account.quote_locked)
                return false;
            if (s.account.base_free.is_negative() || s.account.base_locked.is_negative() ||
                s.account.quote_free.is_negative() || s.account.quote_locked.is_negative())
                return false;
        }
        return true;
    }

  private:
    struct AgentSlot {
        Account account;
        std::vector<Order> orders;  // open orders, ascending id
    };

    void reindex() {
        index_of_.clear();
        for (std::size_t i = 0; i < agents_.size(); ++i)
            index_of_[agents_[i].account.agent_id] = i;
    }

    AgentSlot& slot(const AgentId& id) {
        auto it = index_of_.find(id);
        if (it == index_of_.end()) throw Error("unknown agent '" + id + "'");
        return agents_[it->second];
    }
    const AgentSlot& slot(const AgentId& id) const {
        auto it = index_of_.find(id);
        if (it == index_of_.end()) throw Error("unknown agent '" + id + "'");
        return agents_[it->second];
    }

    void release(Account& acct, const Order& order) {
        if (order.side == OrderSide::bid) {
            acct.quote_locked -= order.locked;
            acct.quote_free += order.locked;
        } else {
            acct.base_locked -= order.locked;
            acct.base_free += order.locked;
        }
    }

    void apply_fill(AgentSlot& s, Order& order, Decimal qty, TimestampMs ts, StepReport& report) {
        FillEvent ev;
        ev.agent_id = s.account.agent_id;
        ev.side = order.side;
        if (order.side == OrderSide::bid) {
            // telescoped release keeps quote_locked == price*(qty-filled) exactly
            Decimal locked_after = order.price * (order.remaining() - qty);
            Decimal release = order.locked - locked_after;
            Decimal fee = fee_rate_ * qty;
            s.account.quote_locked -= release;
            s.account.base_free += qty - fee;
            order.locked = locked_after;
            ev.fill = Fill{order.id, ts, order.price, qty, fee};
            ev.base_delta = qty - fee;
            ev.quote_delta = -release;
        } else {
            Decimal proceeds = order.price * qty;
            Decimal fee = fee_rate_ * proceeds;
            s.account.base_locked -= qty;
            s.account.quote_free += proceeds - fee;
            order.locked -= qty;
            ev.fill = Fill{order.id, ts, order.price, qty, fee};
            ev.base_delta = -qty;
            ev.quote_delta = proceeds - fee;
        }
        order.filled_quantity += qty;
        if (order.filled_quantity == order.quantity) order.status = OrderStatus::filled;
        report.fills.push_back(std::move(ev));
    }

    Decimal fee_rate_;
    MatchMode mode_;
    FillTrigger trigger_;
    std::vector<AgentSlot> agents_;
    std::unordered_map<AgentId, std::size_t> index_of_;
    std::unordered_map<OrderId, AgentId> owner_of_;
    WorkingBook scratch_;
    OrderId next_order_id_ = 1;
};

}  // namespace mmlab

#endif  // MMLAB_EXCHANGE_HPP
