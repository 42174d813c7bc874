#ifndef MMLAB_CONFIG_HPP
#define MMLAB_CONFIG_HPP

#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "mmlab/agents.hpp"
#include "mmlab/experiment.hpp"
#include "mmlab/synthetic.hpp"

namespace mmlab {

/// Dataset file names, relative to the --data-dir.
struct DataFiles {
    std::string trades;
    std::string book;
    std::optional<std::string> ohlcv;
};

/// One market cell source: either CSV files or a synthetic regime.
struct MarketSpec {
    std::string label;
    std::optional<DataFiles> data;
    std::optional<RegimeSpec> regime;
    bool regime_seed_explicit = false;
};

/// Parsed experiment suite: the cross product of markets x period_days x
/// families (or one combined cohort per market) at one granularity.
struct SuiteConfig {
    Granularity granularity = Granularity::minute;
    std::vector<int> period_days;
    std::vector<FamilySpec> families;
    bool combined_cohort = false;
    EngineParams engine;
    SelectionPolicy selection_policy = SelectionPolicy::backtest_only;
    Decimal initial_base = dec("0.1");
    bool initial_quote_equal_value = true;
    Decimal initial_quote;
    std::uint64_t seed = 0;
    std::optional<TimestampMs> start_time;
    std::optional<TimestampMs> end_time;
    std::vector<MarketSpec> markets;
};

namespace cfg_detail {

using nlohmann::json;

/// Wraps a json object and fails loudly on keys nobody consumed, so config
/// typos never silently fall back to defaults.
class Strict {
  public:
    Strict(const json& j, std::string where) : j_(j), where_(std::move(where)) {
        if (!j_.is_object()) throw Error(where_ + ": expected an object");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key);
    }

    const json& at(const std::string& key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw Error(where_ + ": missing required key '" + key + "'");
        return j_.at(key);
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_.at(key) : nullptr;
    }

    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key()))
                throw Error(where_ + ": unknown key '" + it.key() + "'");
    }

    const std::string& where() const { return where_; }

  private:
    const json& j_;
    std::string where_;
    std::set<std::string> seen_;
};

/// Decimals must be JSON strings or integers; floats would smuggle binary
/// rounding into exact arithmetic.
inline Decimal as_decimal(const json& j, const std::string& where) {
    if (j.is_string()) return Decimal::parse(j.get<std::string>());
    if (j.is_number_integer()) return Decimal::from_int(j.get<std::int64_t>());
    throw Error(where + ": decimal values must be strings (e.g. \"0.1\") or integers");
}

inline std::string as_string(const json& j, const std::string& where) {
    if (!j.is_string()) throw Error(where + ": expected a string");
    return j.get<std::string>();
}

inline std::int64_t as_int(const json& j, const std::string& where) {
    if (!j.is_number_integer()) throw Error(where + ": expected an integer");
    return j.get<std::int64_t>();
}

inline bool as_bool(const json& j, const std::string& where) {
    if (!j.is_boolean()) throw Error(where + ": expected a boolean");
    return j.get<bool>();
}

inline std::vector<Decimal> percent_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw Error(where + ": expected an array");
    std::vector<Decimal> out;
    for (const auto& item : j) out.push_back(as_decimal(item, where));
    return out;
}

inline std::vector<Decimal> fractions_from_percents(std::vector<Decimal> percents) {
    for (auto& p : percents) p = p / Decimal::from_int(100);
    return percents;
}

inline FamilySpec parse_family(const json& j, const std::string& where) {
    FamilySpec spec;
    if (j.is_string()) {
        spec.family = family_from_string(j.get<std::string>());
        return spec;
    }
    Strict obj(j, where);
    spec.family = family_from_string(as_string(obj.at("family"), where + ".family"));
    switch (spec.family) {
        case Family::base:
            if (const auto* v = obj.find("spreads_pct"))
                spec.grid.base_spreads =
                    fractions_from_percents(percent_list(*v, where + ".spreads_pct"));
            if (const auto* v = obj.find("policies")) {
                if (!v->is_array()) throw Error(where + ".policies: expected an array");
                for (const auto& p : *v)
                    spec.grid.base_policies.push_back(
                        cancel_policy_from_string(as_string(p, where + ".policies")));
            }
            break;
        case Family::skewed:
            if (const auto* v = obj.find("bid_spreads_pct"))
                spec.grid.skewed_bid_spreads =
                    fractions_from_percents(percent_list(*v, where + ".bid_spreads_pct"));
            if (const auto* v = obj.find("ask_spreads_pct"))
                spec.grid.skewed_ask_spreads =
                    fractions_from_percents(percent_list(*v, where + ".ask_spreads_pct"));
            break;
        case Family::puremm:
            if (const auto* v = obj.find("levels_pct"))
                spec.grid.puremm_levels_pct = percent_list(*v, where + ".levels_pct");
            break;
        case Family::hodler:
            break;
    }
    obj.done();
    return spec;
}

inline RegimeSpec parse_regime(const json& j, const std::string& where, Granularity granularity,
                               bool& seed_explicit) {
    Strict obj(j, where);
    RegimeSpec spec;
    spec.trend = trend_from_string(as_string(obj.at("trend"), where + ".trend"));
    spec.volatility =
        volatility_from_string(as_string(obj.at("volatility"), where + ".volatility"));
    spec.start_price = as_decimal(obj.at("start_price"), where + ".start_price");
    if (const auto* v = obj.find("duration_days")) {
        std::int64_t days = as_int(*v, where + ".duration_days");
        spec.duration_intervals = days * (granularity == Granularity::minute ? 1440 : 24);
    }
    if (const auto* v = obj.find("duration_intervals"))
        spec.duration_intervals = as_int(*v, where + ".duration_intervals");
    if (spec.duration_intervals < 1)
        throw Error(where + ": duration_days or duration_intervals required");
    seed_explicit = false;
    if (const auto* v = obj.find("seed")) {
        spec.seed = static_cast<std::uint64_t>(as_int(*v, where + ".seed"));
        seed_explicit = true;
    }
    if (const auto* v = obj.find("half_spread_pct"))
        spec.half_spread = as_decimal(*v, where + ".half_spread_pct") / Decimal::from_int(100);
    if (const auto* v = obj.find("level_qty"))
        spec.level_qty = as_decimal(*v, where + ".level_qty");
    if (const auto* v = obj.find("drift_pct"))
        spec.drift_override = as_decimal(*v, where + ".drift_pct") / Decimal::from_int(100);
    if (const auto* v = obj.find("noise_pct"))
        spec.noise_override = as_decimal(*v, where + ".noise_pct") / Decimal::from_int(100);
    if (const auto* v = obj.find("trades_per_interval"))
        spec.trades_per_interval = static_cast<int>(as_int(*v, where + ".trades_per_interval"));
    if (const auto* v = obj.find("trade_qty")) spec.trade_qty = as_decimal(*v, where + ".trade_qty");
    if (const auto* v = obj.find("price_decimals"))
        spec.price_decimals = static_cast<int>(as_int(*v, where + ".price_decimals"));
    obj.done();
    return spec;
}

}  // namespace cfg_detail

inline SuiteConfig parse_suite_config(const nlohmann::json& root) {
    using namespace cfg_detail;
    Strict obj(root, "config");
    SuiteConfig cfg;

    cfg.granularity = granularity_from_string(as_string(obj.at("granularity"), "granularity"));

    {
        const auto& pd = obj.at("period_days");
        if (pd.is_array())
            for (const auto& p : pd)
                cfg.period_days.push_back(static_cast<int>(as_int(p, "period_days")));
        else
            cfg.period_days.push_back(static_cast<int>(as_int(pd, "period_days")));
        if (cfg.period_days.empty()) throw Error("period_days: empty list");
        for (int p : cfg.period_days)
            if (p < 1) throw Error("period_days: must be >= 1");
    }

    {
        const auto& fams = obj.at("families");
        if (!fams.is_array() || fams.empty()) throw Error("families: expected a non-empty array");
        for (std::size_t i = 0; i < fams.size(); ++i)
            cfg.families.push_back(parse_family(fams[i], "families[" + std::to_string(i) + "]"));
    }

    if (const auto* v = obj.find("family_mode")) {
        std::string mode = as_string(*v, "family_mode");
        if (mode == "combined")
            cfg.combined_cohort = true;
        else if (mode != "separate")
            throw Error("family_mode: expected 'separate' or 'combined'");
    }

    if (const auto* v = obj.find("fee_rate")) cfg.engine.fee_rate = as_decimal(*v, "fee_rate");
    if (const auto* v = obj.find("matching_mode"))
        cfg.engine.matching_mode = match_mode_from_string(as_string(*v, "matching_mode"));
    if (const auto* v = obj.find("fill_trigger"))
        cfg.engine.fill_trigger = fill_trigger_from_string(as_string(*v, "fill_trigger"));
    if (const auto* v = obj.find("min_notional"))
        cfg.engine.min_notional = as_decimal(*v, "min_notional");
    if (const auto* v = obj.find("sizing_fraction"))
        cfg.engine.sizing_fraction = as_decimal(*v, "sizing_fraction");
    if (const auto* v = obj.find("selection_policy"))
        cfg.selection_policy = selection_policy_from_string(as_string(*v, "selection_policy"));
    if (const auto* v = obj.find("initial_base")) cfg.initial_base = as_decimal(*v, "initial_base");
    if (const auto* v = obj.find("initial_quote_equal_value"))
        cfg.initial_quote_equal_value = as_bool(*v, "initial_quote_equal_value");
    if (const auto* v = obj.find("initial_quote"))
        cfg.initial_quote = as_decimal(*v, "initial_quote");
    if (const auto* v = obj.find("seed")) cfg.seed = static_cast<std::uint64_t>(as_int(*v, "seed"));
    if (const auto* v = obj.find("start_time_ms")) cfg.start_time = as_int(*v, "start_time_ms");
    if (const auto* v = obj.find("end_time_ms")) cfg.end_time = as_int(*v, "end_time_ms");

    {
        const auto& markets = obj.at("markets");
        if (!markets.is_array() || markets.empty())
            throw Error("markets: expected a non-empty array");
        for (std::size_t i = 0; i < markets.size(); ++i) {
            std::string where = "markets[" + std::to_string(i) + "]";
            Strict m(markets[i], where);
            MarketSpec spec;
            spec.label = as_string(m.at("label"), where + ".label");
            if (spec.label.empty() || spec.label.find_first_of(",/\\ ") != std::string::npos)
                throw Error(where + ".label: must be non-empty, no spaces, commas or slashes");
            if (const auto* d = m.find("data")) {
                Strict data(*d, where + ".data");
                DataFiles files;
                files.trades = as_string(data.at("trades"), where + ".data.trades");
                files.book = as_string(data.at("book"), where + ".data.book");
                if (const auto* o = data.find("ohlcv"))
                    files.ohlcv = as_string(*o, where + ".data.ohlcv");
                data.done();
                spec.data = files;
            }
            if (const auto* r = m.find("regime")) {
                bool seed_explicit = false;
                spec.regime = parse_regime(*r, where + ".regime", cfg.granularity, seed_explicit);
                spec.regime_seed_explicit = seed_explicit;
            }
            m.done();
            if (spec.data.has_value() == spec.regime.has_value())
                throw Error(where + ": exactly one of 'data' or 'regime' is required");
            for (const auto& prev : cfg.markets)
                if (prev.label == spec.label)
                    throw Error(where + ": duplicate market label '" + spec.label + "'");
            cfg.markets.push_back(std::move(spec));
        }
    }

    obj.done();

    // regimes without an explicit seed derive one from the suite seed
    for (std::size_t i = 0; i < cfg.markets.size(); ++i)
        if (cfg.markets[i].regime && !cfg.markets[i].regime_seed_explicit)
            cfg.markets[i].regime->seed = cfg.seed * 1000 + i;
    return cfg;
}

inline SuiteConfig load_suite_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config " + path);
    nlohmann::json root;
    try {
        root = nlohmann::json::parse(in);
    } catch (const std::exception& e) {
        throw Error(path + ": " + e.what());
    }
    try {
        return parse_suite_config(root);
    } catch (const Error& e) {
        throw Error(path + ": " + e.what());
    }
}

}  // namespace mmlab

#endif  // MMLAB_CONFIG_HPP
