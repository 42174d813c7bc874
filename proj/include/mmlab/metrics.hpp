#ifndef MMLAB_METRICS_HPP
#define MMLAB_METRICS_HPP

#include <algorithm>
#include <map>
#include <string>
#include <vector>

#include "mmlab/decimal.hpp"
#include "mmlab/errors.hpp"
#include "mmlab/exchange.hpp"
#include "mmlab/marketdata.hpp"

namespace mmlab {

/// 100 * (end - start) / start, exact decimal arithmetic.
inline Decimal compute_roi(Decimal start_value, Decimal end_value) {
    if (!start_value.is_positive())
        throw Error("compute_roi: start value must be > 0, got " + start_value.str());
    return (end_value - start_value) * Decimal::from_int(100) / start_value;
}

/// Excess return over the buy-and-hold reference, in percentage points.
inline Decimal compute_alpha(Decimal agent_roi_pct, Decimal hodler_roi_pct) {
    return agent_roi_pct - hodler_roi_pct;
}

/// Buy-and-hold ROI over a slice: convert all quote to base by walking the
/// first snapshot's asks, hold, sell everything into the last snapshot's
/// bids. Fees come out of the received asset. The starting value is the
/// initial inventory marked at the first mid.
inline Decimal hodler_reference(const MarketDataset& slice, Decimal initial_base,
                                Decimal initial_quote, Decimal fee_rate) {
    if (slice.snapshots.empty()) throw Error("hodler_reference: empty slice");
    const OrderBookSnapshot& first = slice.snapshots.front();
    const OrderBookSnapshot& last = slice.snapshots.back();

    Decimal start_value = initial_base * mid_price(first) + initial_quote;
    if (!start_value.is_positive())
        throw Error("hodler_reference: initial inventory has no value");

    Decimal base = initial_base;
    Decimal quote = initial_quote;
    for (const auto& lvl : first.asks) {
        Decimal afford = Decimal::div_floor(quote, lvl.price);
        Decimal take = std::min(afford, lvl.quantity);
        if (!take.is_positive()) break;
        quote -= lvl.price * take;
        base += take - fee_rate * take;
    }
    // anything beyond rounding dust left unconverted means the asks ran out
    bool buy_absorbed = !quote.is_positive() ||
                        (!first.asks.empty() &&
                         !Decimal::div_floor(quote, first.asks.back().price).is_positive());
    if (!buy_absorbed)
        throw Error("hodler_reference: insufficient ask depth at snapshot " +
                    std::to_string(first.timestamp));

    for (const auto& lvl : last.bids) {
        Decimal take = std::min(base, lvl.quantity);
        if (!take.is_positive()) break;
        Decimal proceeds = lvl.price * take;
        base -= take;
        quote += proceeds - fee_rate * proceeds;
    }
    if (base.is_positive())
        throw Error("hodler_reference: bid depth exhausted at snapshot " +
                    std::to_string(last.timestamp));

    return compute_roi(start_value, quote);
}

/// One cell of the experiment matrix.
struct ReportRow {
    std::string market;
    std::string family;
    int period_days = 0;
    Granularity granularity = Granularity::minute;
    Decimal roi_pct;
    Decimal alpha_pct;
};

struct CellKey {
    std::string market;
    std::string family;
    int period_days;
    Granularity granularity;
    friend auto operator<=>(const CellKey&, const CellKey&) = default;
};

/// Renders results.csv: one row per cell in (market, family, period,
/// granularity) order, percentages at 2 dp. `expected` lists the cells the
/// caller planned; a missing one is an error naming it.
inline std::string emit_report(std::vector<ReportRow> rows, const std::vector<CellKey>& expected) {
    std::map<CellKey, const ReportRow*> by_key;
    for (const auto& r : rows) by_key[{r.market, r.family, r.period_days, r.granularity}] = &r;
    std::string missing;
    for (const auto& key : expected) {
        if (!by_key.count(key)) {
            if (!missing.empty()) missing += ", ";
            missing += key.market + "/" + key.family + "/" + std::to_string(key.period_days) +
                       "d/" + to_string(key.granularity);
        }
    }
    if (!missing.empty()) throw Error("emit_report: missing cells: " + missing);

    std::string out = "market,family,period_days,granularity,roi_pct,alpha_pct\n";
    for (const auto& [key, row] : by_key) {
        out += key.market + ',' + key.family + ',' + std::to_string(key.period_days) + ',' +
               to_string(key.granularity) + ',' + row->roi_pct.fixed(2) + ',' +
               row->alpha_pct.fixed(2) + '\n';
    }
    return out;
}

/// Pivots result rows into one table per (family, granularity): a row per
/// period, ROI / alpha / implied buy-and-hold ROI columns per market.
inline std::map<std::string, std::string> pivot_tables(const std::vector<ReportRow>& rows) {
    std::map<std::string, std::string> tables;  // name -> csv text
    std::map<std::pair<std::string, Granularity>, std::vector<const ReportRow*>> groups;
    for (const auto& r : rows) groups[{r.family, r.granularity}].push_back(&r);

    for (const auto& [group, members] : groups) {
        std::vector<std::string> markets;
        std::vector<int> periods;
        for (const auto* r : members) {
            if (std::find(markets.begin(), markets.end(), r->market) == markets.end())
                markets.push_back(r->market);
            if (std::find(periods.begin(), periods.end(), r->period_days) == periods.end())
                periods.push_back(r->period_days);
        }
        std::sort(markets.begin(), markets.end());
        std::sort(periods.begin(), periods.end());

        std::string csv = "period_days";
        for (const auto& m : markets)
            csv += "," + m + "_roi," + m + "_alpha," + m + "_hold";
        csv += '\n';
        for (int p : periods) {
            csv += std::to_string(p);
            for (const auto& m : markets) {
                const ReportRow* cell = nullptr;
                for (const auto* r : members)
                    if (r->market == m && r->period_days == p) cell = r;
                if (cell)
                    csv += ',' + cell->roi_pct.fixed(2) + ',' + cell->alpha_pct.fixed(2) + ',' +
                           (cell->roi_pct - cell->alpha_pct).fixed(2);
                else
                    csv += ",,,";
            }
            csv += '\n';
        }
        tables["table_" + group.first + "_" + to_string(group.second) + ".csv"] = csv;
    }
    return tables;
}

}  // namespace mmlab

#endif  // MMLAB_METRICS_HPP
