#ifndef MMLAB_EXPERIMENT_HPP
#define MMLAB_EXPERIMENT_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mmlab/agents.hpp"
#include "mmlab/decimal.hpp"
#include "mmlab/errors.hpp"
#include "mmlab/exchange.hpp"
#include "mmlab/marketdata.hpp"
#include "mmlab/metrics.hpp"

namespace mmlab {

enum class SelectionPolicy { backtest_only, backtest_and_real };

inline SelectionPolicy selection_policy_from_string(std::string_view s) {
    if (s == "backtest_only") return SelectionPolicy::backtest_only;
    if (s == "backtest_and_real") return SelectionPolicy::backtest_and_real;
    throw Error("unknown selection_policy '" + std::string(s) + "'");
}

enum class EnvKind { real, backtest };

inline std::string to_string(EnvKind e) { return e == EnvKind::real ? "real" : "backtest"; }

/// Per-agent outcome of one period in one environment. Period 0 is the
/// warmup backtest that precedes the first trading period.
struct PeriodResult {
    int period_index = 0;
    AgentId agent_id;
    EnvKind environment = EnvKind::backtest;
    Decimal start_value;
    Decimal end_value;
    Decimal roi_pct;
    Decimal alpha_pct;
};

struct EngineParams {
    Decimal fee_rate = dec("0.001");
    MatchMode matching_mode = MatchMode::historical_first;
    FillTrigger fill_trigger = FillTrigger::strict_cross;
    Decimal min_notional = Decimal::from_int(1);
    Decimal sizing_fraction = Decimal::from_int(1);
};

struct FamilySpec {
    Family family = Family::base;
    GridSpec grid;
};

struct ExperimentConfig {
    Granularity granularity = Granularity::minute;
    int period_days = 1;
    std::vector<FamilySpec> families;
    Decimal initial_base = dec("0.1");
    bool initial_quote_equal_value = true;  // quote credited as initial_base's value at the first mid
    Decimal initial_quote;                  // used only when the flag is off
    EngineParams engine;
    SelectionPolicy selection_policy = SelectionPolicy::backtest_only;
    std::uint64_t seed = 0;  // recorded for provenance; the replay itself is deterministic
    std::optional<TimestampMs> start_time;  // default: data start + one period (warmup)
    std::optional<TimestampMs> end_time;    // default: data end
    bool collect_fills = false;
};

/// Boundary timestamps {start, start+P, ..., end}; the last period is
/// truncated at end_time when the span is not a whole number of periods.
inline std::vector<TimestampMs> period_schedule(TimestampMs start_time, TimestampMs end_time,
                                                int period_days, Granularity granularity) {
    if (period_days < 1) throw Error("period_days must be >= 1");
    const TimestampMs period = static_cast<TimestampMs>(period_days) * 86'400'000;
    const TimestampMs step = interval_ms(granularity);
    if ((end_time - start_time) % step != 0 || start_time % step != 0)
        throw Error("experiment span not aligned to " + to_string(granularity) + " intervals");
    if (end_time - start_time < period)
        throw Error("span [" + std::to_string(start_time) + ", " + std::to_string(end_time) +
                    ") shorter than one period of " + std::to_string(period_days) + " day(s)");
    std::vector<TimestampMs> bounds;
    for (TimestampMs b = start_time; b < end_time; b += period) bounds.push_back(b);
    bounds.push_back(end_time);
    return bounds;
}

/// Agents with positive return AND positive excess return, nothing else.
/// Under backtest_and_real an agent that traded for real in the same period
/// must clear the same bar there too.
inline std::set<AgentId> select_best(const std::vector<PeriodResult>& backtest_results,
                                     const std::vector<PeriodResult>* real_results,
                                     SelectionPolicy policy) {
    std::optional<int> period;
    auto check_period = [&](const PeriodResult& r) {
        if (!period)
            period = r.period_index;
        else if (*period != r.period_index)
            throw Error("select_best: mixed periods " + std::to_string(*period) + " and " +
                        std::to_string(r.period_index));
    };

    std::set<AgentId> selected;
    for (const auto& r : backtest_results) {
        check_period(r);
        if (r.environment != EnvKind::backtest)
            throw Error("select_best: expected backtest results");
        if (r.roi_pct.is_positive() && r.alpha_pct.is_positive()) selected.insert(r.agent_id);
    }
    if (policy == SelectionPolicy::backtest_and_real && real_results) {
        for (const auto& r : *real_results) {
            check_period(r);
            if (!(r.roi_pct.is_positive() && r.alpha_pct.is_positive()))
                selected.erase(r.agent_id);
        }
    }
    return selected;
}

struct Allocation {
    AgentId agent_id;
    Decimal base;
    Decimal quote;
};

/// Evenly splits (base, quote) across the agents at 8-dp precision. The
/// division remainder is handed out one tick at a time starting from the
/// lowest agent id, so allocations differ by at most one tick and always sum
/// exactly to the input. An empty set allocates nothing.
inline std::vector<Allocation> redistribute_inventory(Decimal total_base, Decimal total_quote,
                                                      const std::set<AgentId>& selected) {
    if (total_base.is_negative() || total_quote.is_negative())
        throw Error("redistribute_inventory: totals must be >= 0");
    std::vector<Allocation> out;
    const auto n = static_cast<std::int64_t>(selected.size());
    if (n == 0) return out;
    const std::int64_t base_share = total_base.units() / n;
    const std::int64_t quote_share = total_quote.units() / n;
    std::int64_t base_rem = total_base.units() - base_share * n;
    std::int64_t quote_rem = total_quote.units() - quote_share * n;
    for (const auto& id : selected) {
        Allocation a;
        a.agent_id = id;
        a.base = Decimal::from_units(base_share + (base_rem > 0 ? 1 : 0));
        a.quote = Decimal::from_units(quote_share + (quote_rem > 0 ? 1 : 0));
        if (base_rem > 0) --base_rem;
        if (quote_rem > 0) --quote_rem;
        out.push_back(std::move(a));
    }
    return out;
}

/// Per-agent marked values, locked funds included.
inline std::map<AgentId, Decimal> count_totals(const SimEnvironment& env,
                                               const OrderBookSnapshot& snap) {
    std::map<AgentId, Decimal> totals;
    for (const auto& id : env.agent_ids()) totals[id] = account_value(env.account(id), snap);
    return totals;
}

struct CohortMember {
    AgentId id;
    AgentConfig config;
    bool reference = false;  // buy-and-hold baseline rides along, exempt from selection
};

/// Expands family grids into the agent cohort, ids sorted. The hodler is the
/// alpha baseline itself, so it is flagged as a reference rider: it always
/// trades for real but never enters the selection pool.
inline std::vector<CohortMember> build_cohort(const std::vector<FamilySpec>& families) {
    if (families.empty()) throw Error("experiment: no families configured");
    std::vector<CohortMember> cohort;
    std::set<Family> seen;
    for (const auto& f : families) {
        if (!seen.insert(f.family).second)
            throw Error("experiment: family '" + to_string(f.family) + "' listed twice");
        auto configs = enumerate_family(f.family, f.grid);
        for (std::size_t i = 0; i < configs.size(); ++i) {
            CohortMember m;
            if (f.family == Family::hodler) {
                m.id = "hodler";
                m.reference = true;
            } else {
                std::string idx = std::to_string(i);
                idx.insert(0, 3 - std::min<std::size_t>(3, idx.size()), '0');
                m.id = to_string(f.family) + "-" + idx;
            }
            m.config = configs[i];
            cohort.push_back(std::move(m));
        }
    }
    std::sort(cohort.begin(), cohort.end(),
              [](const CohortMember& a, const CohortMember& b) { return a.id < b.id; });
    return cohort;
}

namespace detail {

/// Trade index ranges per snapshot interval.
inline std::vector<std::pair<std::size_t, std::size_t>> index_trades(const MarketDataset& ds) {
    std::vector<std::pair<std::size_t, std::size_t>> ranges(ds.snapshots.size(), {0, 0});
    std::size_t t = 0;
    const TimestampMs step = ds.interval();
    for (std::size_t k = 0; k < ds.snapshots.size(); ++k) {
        TimestampMs lo = ds.snapshots[k].timestamp;
        TimestampMs hi = lo + step;
        while (t < ds.trades.size() && ds.trades[t].timestamp < lo) ++t;
        std::size_t begin = t;
        while (t < ds.trades.size() && ds.trades[t].timestamp < hi) ++t;
        ranges[k] = {begin, t};
    }
    return ranges;
}

struct FillBuffers {
    std::map<AgentId, std::vector<FillEvent>> since_last_refresh;
};

/// Drives one environment over a slice: refresh every agent, apply actions,
/// replay the interval's trades. first/last refresh flags are based on the
/// given timestamps so a period slice inside a longer run keeps run-scoped
/// hodler semantics.
inline void run_slice(SimEnvironment& env,
                      std::map<AgentId, std::unique_ptr<Strategy>>& strategies,
                      const MarketDataset& slice, TimestampMs first_refresh_ts,
                      TimestampMs last_refresh_ts, FillBuffers& buffers,
                      std::vector<FillEvent>* sink, Decimal* fills_base_delta = nullptr,
                      Decimal* fills_quote_delta = nullptr) {
    auto ranges = index_trades(slice);
    auto record = [&](const FillEvent& ev) {
        if (sink) sink->push_back(ev);
        if (fills_base_delta) *fills_base_delta += ev.base_delta;
        if (fills_quote_delta) *fills_quote_delta += ev.quote_delta;
    };

    const auto ids = env.agent_ids();
    for (std::size_t k = 0; k < slice.snapshots.size(); ++k) {
        const OrderBookSnapshot& snap = slice.snapshots[k];
        for (const auto& id : ids) {
            auto sit = strategies.find(id);
            if (sit == strategies.end()) throw Error("no strategy for agent '" + id + "'");
            Strategy& strat = *sit->second;
            auto& fills = buffers.since_last_refresh[id];

            MarketView view;
            view.current = &snap;
            view.previous = k > 0 ? &slice.snapshots[k - 1] : nullptr;
            view.now = snap.timestamp;
            view.is_first_refresh = snap.timestamp == first_refresh_ts;
            view.is_last_refresh = snap.timestamp == last_refresh_ts;
            view.account = &env.account(id);
            view.open_orders = env.open_orders(id);
            view.fills_since_last = fills;

            AgentAction action = strat.on_refresh(view);
            fills.clear();

            for (OrderId cancel : action.cancels) env.cancel_order(cancel);
            for (MarketOrderKind kind : action.market_orders) {
                auto events = kind == MarketOrderKind::buy_all ? env.market_buy_all(id, snap)
                                                               : env.market_sell_all(id, snap);
                for (const auto& ev : events) record(ev);
            }
            for (const auto& req : action.placements) {
                OrderId oid = env.place_order(id, req.side, req.price, req.quantity);
                strat.on_placed(req, oid);
            }
        }
        auto [begin, end] = ranges[k];
        StepReport report = env.step_interval(
            snap, std::span<const Trade>(slice.trades.data() + begin, end - begin));
        for (const auto& ev : report.fills) {
            buffers.since_last_refresh[ev.agent_id].push_back(ev);
            record(ev);
        }
    }
}

inline Decimal value_of(Decimal base, Decimal quote, const OrderBookSnapshot& snap) {
    return base * mid_price(snap) + quote;
}

}  // namespace detail

/// Runs every cohort agent over the slice in a fresh environment seeded with
/// an even share of (initial_base, initial_quote); returns per-agent ROI and
/// alpha against the buy-and-hold reference of the same slice and share.
inline std::vector<PeriodResult> run_internal_backtest(const std::vector<CohortMember>& cohort,
                                                       const MarketDataset& slice,
                                                       Decimal initial_base, Decimal initial_quote,
                                                       const EngineParams& engine,
                                                       int period_index) {
    if (slice.snapshots.empty()) throw Error("run_internal_backtest: empty slice");
    AgentParams agent_params{slice.price_decimals, engine.min_notional, engine.sizing_fraction};

    std::set<AgentId> ids;
    for (const auto& m : cohort)
        if (!ids.insert(m.id).second) throw Error("duplicate agent id '" + m.id + "'");
    auto shares = redistribute_inventory(initial_base, initial_quote, ids);

    SimEnvironment env(engine.fee_rate, engine.matching_mode, engine.fill_trigger);
    std::map<AgentId, std::unique_ptr<Strategy>> strategies;
    std::map<AgentId, std::pair<Decimal, Decimal>> share_of;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
        const auto& alloc = shares[i];
        env.add_agent(alloc.agent_id, alloc.base, alloc.quote);
        share_of[alloc.agent_id] = {alloc.base, alloc.quote};
    }
    for (const auto& m : cohort) strategies[m.id] = make_strategy(m.config, agent_params);

    detail::FillBuffers buffers;
    detail::run_slice(env, strategies, slice, slice.snapshots.front().timestamp,
                      slice.snapshots.back().timestamp, buffers, nullptr);
    env.cancel_all();

    // the flooring share is the common reference inventory for alpha
    const auto n = static_cast<std::int64_t>(cohort.size());
    Decimal ref_base = Decimal::from_units(initial_base.units() / n);
    Decimal ref_quote = Decimal::from_units(initial_quote.units() / n);
    Decimal hodler_roi = hodler_reference(slice, ref_base, ref_quote, engine.fee_rate);

    const OrderBookSnapshot& first = slice.snapshots.front();
    const OrderBookSnapshot& last = slice.snapshots.back();
    std::vector<PeriodResult> results;
    for (const auto& id : env.agent_ids()) {
        const auto& [sb, sq] = share_of[id];
        PeriodResult r;
        r.period_index = period_index;
        r.agent_id = id;
        r.environment = EnvKind::backtest;
        r.start_value = detail::value_of(sb, sq, first);
        r.end_value = account_value(env.account(id), last);
        r.roi_pct = compute_roi(r.start_value, r.end_value);
        r.alpha_pct = compute_alpha(r.roi_pct, hodler_roi);
        results.push_back(std::move(r));
    }
    return results;
}

/// One row of inventory_history.csv. roi/alpha are empty at the initial
/// boundary for real rows (no period has completed yet).
struct InventoryRecord {
    TimestampMs boundary_ts = 0;
    AgentId agent_id;  // "TOTAL" for the chair summary row
    EnvKind environment = EnvKind::real;
    Decimal value_quote;
    std::optional<Decimal> roi_pct;
    std::optional<Decimal> alpha_pct;
    bool selected = false;
};

/// Exact (base, quote) pool bookkeeping per boundary; conservation tests
/// reconcile consecutive rows against the recorded fill deltas.
struct BoundaryLedger {
    TimestampMs boundary_ts = 0;
    Decimal pool_base;
    Decimal pool_quote;
    Decimal fills_base_delta;   // over the period ending at this boundary
    Decimal fills_quote_delta;
};

struct ExperimentResult {
    std::vector<TimestampMs> boundaries;
    std::vector<InventoryRecord> history;
    std::vector<PeriodResult> period_results;  // both environments, all periods
    std::vector<std::set<AgentId>> selections;  // chosen at each boundary except the last
    std::vector<BoundaryLedger> ledger;
    Decimal chair_start_value;
    Decimal chair_end_value;
    Decimal chair_roi_pct;
    Decimal chair_alpha_pct;  // vs buy-and-hold over the full run
    std::vector<FillEvent> real_fills;  // only when collect_fills is set
};

/// The chair agent's full loop: warmup backtest selects the first cohort,
/// then each period the selected agents trade for real while every agent is
/// re-backtested on the same window; at boundaries everything is cancelled,
/// valued, re-selected and inventory re-shared evenly.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, const MarketDataset& ds) {
    if (ds.granularity != cfg.granularity)
        throw Error("experiment: dataset granularity is " + to_string(ds.granularity) +
                    ", config says " + to_string(cfg.granularity));
    const TimestampMs period = static_cast<TimestampMs>(cfg.period_days) * 86'400'000;
    const TimestampMs start = cfg.start_time.value_or(ds.span_start() + period);
    const TimestampMs end = cfg.end_time.value_or(ds.span_end());
    const auto boundaries = period_schedule(start, end, cfg.period_days, cfg.granularity);

    if (start - period < ds.span_start())
        throw Error("experiment: data does not cover the warmup window [" +
                    std::to_string(start - period) + ", " + std::to_string(start) + ")");
    MarketDataset run_slice_ds = slice_dataset(ds, start - period, end);
    {
        auto report = validate_dataset(run_slice_ds);
        if (!report.ok())
            throw Error("experiment: dataset invalid: " + report.findings.front().message +
                        (report.findings.size() > 1
                             ? " (+" + std::to_string(report.findings.size() - 1) + " more)"
                             : ""));
    }

    const auto cohort = build_cohort(cfg.families);
    std::set<AgentId> pool_ids;  // the selectable (non-reference) agents
    std::set<AgentId> reference_ids;
    for (const auto& m : cohort) (m.reference ? reference_ids : pool_ids).insert(m.id);

    const MarketDataset run_window = slice_dataset(ds, start, end);
    const Decimal mid0 = mid_price(run_window.snapshots.front());
    const Decimal initial_base = cfg.initial_base;
    const Decimal initial_quote =
        cfg.initial_quote_equal_value ? initial_base * mid0 : cfg.initial_quote;
    if (!initial_base.is_positive() && !initial_quote.is_positive())
        throw Error("experiment: initial inventory is empty");

    AgentParams agent_params{ds.price_decimals, cfg.engine.min_notional,
                             cfg.engine.sizing_fraction};

    ExperimentResult result;
    result.boundaries = boundaries;
    result.chair_start_value = detail::value_of(initial_base, initial_quote,
                                                run_window.snapshots.front());

    // warmup backtest selects the first real cohort
    MarketDataset warmup = slice_dataset(ds, start - period, start);
    auto warmup_results = run_internal_backtest(cohort, warmup, initial_base, initial_quote,
                                                cfg.engine, 0);
    std::vector<PeriodResult> pool_warmup;
    for (const auto& r : warmup_results)
        if (pool_ids.count(r.agent_id)) pool_warmup.push_back(r);
    std::set<AgentId> selected = select_best(pool_warmup, nullptr, SelectionPolicy::backtest_only);
    for (const auto& r : warmup_results) result.period_results.push_back(r);
    result.selections.push_back(selected);

    // persistent strategies for the real environment
    std::map<AgentId, std::unique_ptr<Strategy>> strategies;
    for (const auto& m : cohort) strategies[m.id] = make_strategy(m.config, agent_params);
    detail::FillBuffers real_buffers;

    std::set<AgentId> active = selected;
    for (const auto& id : reference_ids) active.insert(id);
    auto allocations = redistribute_inventory(initial_base, initial_quote, active);
    Decimal remainder_base = initial_base;
    Decimal remainder_quote = initial_quote;
    for (const auto& a : allocations) {
        remainder_base -= a.base;
        remainder_quote -= a.quote;
    }

    auto record_boundary_ledger = [&](TimestampMs ts, Decimal pool_base, Decimal pool_quote,
                                      Decimal db, Decimal dq) {
        result.ledger.push_back({ts, pool_base, pool_quote, db, dq});
    };
    record_boundary_ledger(start, initial_base, initial_quote, Decimal(), Decimal());

    // initial history record: shares as placed, warmup backtest values
    for (const auto& a : allocations) {
        InventoryRecord rec;
        rec.boundary_ts = start;
        rec.agent_id = a.agent_id;
        rec.environment = EnvKind::real;
        rec.value_quote = detail::value_of(a.base, a.quote, run_window.snapshots.front());
        rec.selected = true;
        result.history.push_back(rec);
    }
    for (const auto& r : warmup_results) {
        InventoryRecord rec;
        rec.boundary_ts = start;
        rec.agent_id = r.agent_id;
        rec.environment = EnvKind::backtest;
        rec.value_quote = r.end_value;
        rec.roi_pct = r.roi_pct;
        rec.alpha_pct = r.alpha_pct;
        rec.selected = active.count(r.agent_id) != 0;
        result.history.push_back(rec);
    }
    {
        InventoryRecord total;
        total.boundary_ts = start;
        total.agent_id = "TOTAL";
        total.environment = EnvKind::real;
        total.value_quote = result.chair_start_value;
        total.selected = !selected.empty();
        result.history.push_back(total);
    }

    const TimestampMs step = interval_ms(cfg.granularity);
    const TimestampMs last_refresh_ts = end - step;

    for (std::size_t j = 1; j < boundaries.size(); ++j) {
        const TimestampMs period_start = boundaries[j - 1];
        const TimestampMs period_end = boundaries[j];
        MarketDataset period_slice = slice_dataset(ds, period_start, period_end);
        const OrderBookSnapshot& first_snap = period_slice.snapshots.front();
        const OrderBookSnapshot& last_snap = period_slice.snapshots.back();

        // what the chair pot holds going into this period
        Decimal pool_start_base = remainder_base;
        Decimal pool_start_quote = remainder_quote;
        for (const auto& a : allocations) {
            pool_start_base += a.base;
            pool_start_quote += a.quote;
        }

        // real trading for the active set
        SimEnvironment real_env(cfg.engine.fee_rate, cfg.engine.matching_mode,
                                cfg.engine.fill_trigger);
        std::map<AgentId, Decimal> start_values;
        for (const auto& a : allocations) {
            real_env.add_agent(a.agent_id, a.base, a.quote);
            start_values[a.agent_id] = detail::value_of(a.base, a.quote, first_snap);
        }
        Decimal fills_base, fills_quote;
        detail::run_slice(real_env, strategies, period_slice, start, last_refresh_ts,
                          real_buffers, cfg.collect_fills ? &result.real_fills : nullptr,
                          &fills_base, &fills_quote);
        real_env.cancel_all();

        // period results, real environment; alpha against the buy-and-hold
        // reference seeded with the same even share the agents got
        std::vector<PeriodResult> real_results;
        if (!active.empty()) {
            const auto n_active = static_cast<std::int64_t>(active.size());
            Decimal share_b = Decimal::from_units(pool_start_base.units() / n_active);
            Decimal share_q = Decimal::from_units(pool_start_quote.units() / n_active);
            Decimal period_hodler =
                hodler_reference(period_slice, share_b, share_q, cfg.engine.fee_rate);
            for (const auto& id : real_env.agent_ids()) {
                PeriodResult r;
                r.period_index = static_cast<int>(j);
                r.agent_id = id;
                r.environment = EnvKind::real;
                r.start_value = start_values[id];
                r.end_value = account_value(real_env.account(id), last_snap);
                r.roi_pct = compute_roi(r.start_value, r.end_value);
                r.alpha_pct = compute_alpha(r.roi_pct, period_hodler);
                real_results.push_back(r);
                result.period_results.push_back(r);
            }
        }

        // internal backtest of the full cohort on the same window
        auto bt_results = run_internal_backtest(cohort, period_slice, initial_base, initial_quote,
                                                cfg.engine, static_cast<int>(j));
        for (const auto& r : bt_results) result.period_results.push_back(r);

        // pool everything the real env holds (locked funds were released)
        Decimal pool_base = remainder_base;
        Decimal pool_quote = remainder_quote;
        for (const auto& id : real_env.agent_ids()) {
            pool_base += real_env.account(id).total_base();
            pool_quote += real_env.account(id).total_quote();
        }
        record_boundary_ledger(period_end, pool_base, pool_quote, fills_base, fills_quote);

        const bool is_final = j + 1 == boundaries.size();
        std::set<AgentId> selected_next;
        if (!is_final) {
            std::vector<PeriodResult> pool_bt;
            for (const auto& r : bt_results)
                if (pool_ids.count(r.agent_id)) pool_bt.push_back(r);
            std::vector<PeriodResult> pool_real;
            for (const auto& r : real_results)
                if (pool_ids.count(r.agent_id)) pool_real.push_back(r);
            selected_next = select_best(pool_bt, pool_real.empty() ? nullptr : &pool_real,
                                        cfg.selection_policy);
            result.selections.push_back(selected_next);
        }
        std::set<AgentId> active_next = selected_next;
        if (!is_final)
            for (const auto& id : reference_ids) active_next.insert(id);

        // history rows for this boundary
        for (const auto& r : real_results) {
            InventoryRecord rec;
            rec.boundary_ts = period_end;
            rec.agent_id = r.agent_id;
            rec.environment = EnvKind::real;
            rec.value_quote = r.end_value;
            rec.roi_pct = r.roi_pct;
            rec.alpha_pct = r.alpha_pct;
            rec.selected = active_next.count(r.agent_id) != 0;
            result.history.push_back(rec);
        }
        for (const auto& r : bt_results) {
            InventoryRecord rec;
            rec.boundary_ts = period_end;
            rec.agent_id = r.agent_id;
            rec.environment = EnvKind::backtest;
            rec.value_quote = r.end_value;
            rec.roi_pct = r.roi_pct;
            rec.alpha_pct = r.alpha_pct;
            rec.selected = active_next.count(r.agent_id) != 0;
            result.history.push_back(rec);
        }

        Decimal chair_value = detail::value_of(pool_base, pool_quote, last_snap);
        {
            InventoryRecord total;
            total.boundary_ts = period_end;
            total.agent_id = "TOTAL";
            total.environment = EnvKind::real;
            total.value_quote = chair_value;
            Decimal period_start_value =
                detail::value_of(pool_start_base, pool_start_quote, first_snap);
            if (period_start_value.is_positive()) {
                total.roi_pct = compute_roi(period_start_value, chair_value);
                total.alpha_pct = compute_alpha(
                    *total.roi_pct, hodler_reference(period_slice, pool_start_base,
                                                     pool_start_quote, cfg.engine.fee_rate));
            }
            total.selected = !selected_next.empty();
            result.history.push_back(total);
        }

        if (is_final) {
            result.chair_end_value = chair_value;
        } else {
            active = active_next;
            allocations = redistribute_inventory(pool_base, pool_quote, active);
            remainder_base = pool_base;
            remainder_quote = pool_quote;
            for (const auto& a : allocations) {
                remainder_base -= a.base;
                remainder_quote -= a.quote;
            }
        }
    }

    result.chair_roi_pct = compute_roi(result.chair_start_value, result.chair_end_value);
    Decimal run_hodler = hodler_reference(run_window, initial_base, initial_quote,
                                          cfg.engine.fee_rate);
    result.chair_alpha_pct = compute_alpha(result.chair_roi_pct, run_hodler);
    return result;
}

/// inventory_history.csv text: per boundary, real rows then backtest rows
/// then the TOTAL row, agents in id order.
inline std::string render_inventory_history(const ExperimentResult& result) {
    std::string out = "boundary_ts,agent_id,env,value_quote,roi_pct,alpha_pct,selected\n";
    for (const auto& rec : result.history) {
        out += std::to_string(rec.boundary_ts) + ',' + rec.agent_id + ',' +
               to_string(rec.environment) + ',' + rec.value_quote.str() + ',' +
               (rec.roi_pct ? rec.roi_pct->str() : "") + ',' +
               (rec.alpha_pct ? rec.alpha_pct->str() : "") + ',' + (rec.selected ? "1" : "0") +
               '\n';
    }
    return out;
}

}  // namespace mmlab

#endif  // MMLAB_EXPERIMENT_HPP
