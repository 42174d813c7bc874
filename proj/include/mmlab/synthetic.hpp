#ifndef MMLAB_SYNTHETIC_HPP
#define MMLAB_SYNTHETIC_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "mmlab/marketdata.hpp"

namespace mmlab {

enum class Trend { bull, bear, flat };
enum class Volatility { low, high };

inline std::string to_string(Trend t) {
    switch (t) {
        case Trend::bull: return "bull";
        case Trend::bear: return "bear";
        default: return "flat";
    }
}

inline Trend trend_from_string(std::string_view s) {
    if (s == "bull") return Trend::bull;
    if (s == "bear") return Trend::bear;
    if (s == "flat") return Trend::flat;
    throw Error("unknown trend '" + std::string(s) + "'");
}

inline Volatility volatility_from_string(std::string_view s) {
    if (s == "low") return Volatility::low;
    if (s == "high") return Volatility::high;
    throw Error("unknown volatility '" + std::string(s) + "'");
}

/// Parameters of one synthetic market regime.
///
/// The mid path is a linear drift from start_price to start_price*(1+drift)
/// with seeded noise on interior points only, so the first and last mids are
/// exact. Trend and volatility pick the default drift/noise; both can be
/// overridden (a zero noise override gives a fully deterministic path).
struct RegimeSpec {
    Trend trend = Trend::flat;
    Volatility volatility = Volatility::low;
    Decimal start_price = Decimal::from_int(100);
    std::int64_t duration_intervals = 1;
    std::uint64_t seed = 0;
    Decimal half_spread = dec("0.002");     // fraction of mid per side
    Decimal level_qty = Decimal::from_int(1);
    std::optional<Decimal> drift_override;  // total fractional move over the span
    std::optional<Decimal> noise_override;  // interior noise amplitude, fraction of start
    std::optional<Decimal> sweep_override;  // max trade-price penetration past the touch
    int trades_per_interval = 10;
    Decimal trade_qty = dec("0.05");        // base size scale of generated trades
    int price_decimals = 2;

    Decimal drift() const {
        if (drift_override) return *drift_override;
        switch (trend) {
            case Trend::bull: return dec("0.10");
            case Trend::bear: return dec("-0.20");
            default: return Decimal();
        }
    }

    Decimal noise_amplitude() const {
        if (noise_override) return *noise_override;
        return volatility == Volatility::high ? dec("0.02") : dec("0.002");
    }

    /// How far past the touch an aggressive trade may print. This is what
    /// lets historical flow intercept resting maker quotes.
    Decimal trade_sweep() const {
        if (sweep_override) return *sweep_override;
        return half_spread * Decimal::from_int(4) + noise_amplitude();
    }

    void validate() const {
        if (duration_intervals < 1) throw Error("regime: duration must be >= 1 interval");
        if (!start_price.is_positive()) throw Error("regime: start_price must be > 0");
        if (half_spread.is_negative()) throw Error("regime: half_spread must be >= 0");
        if (!level_qty.is_positive()) throw Error("regime: level_qty must be > 0");
        if (trades_per_interval < 0) throw Error("regime: trades_per_interval must be >= 0");
        if (trades_per_interval > 0 && !trade_qty.is_positive())
            throw Error("regime: trade_qty must be > 0");
        if (price_decimals < 2 || price_decimals > Decimal::kFracDigits)
            throw Error("regime: price_decimals must be in [2, 8]");
        Decimal d = drift();
        Decimal a = noise_amplitude();
        if (a.is_negative()) throw Error("regime: noise amplitude must be >= 0");
        if (trade_sweep().is_negative()) throw Error("regime: trade sweep must be >= 0");
        Decimal worst = (d.is_negative() ? d : Decimal()) - a - half_spread - trade_sweep();
        if (Decimal::from_int(1) + worst <= dec("0.02"))
            throw Error("regime: drift/noise/spread would drive prices near or below zero");
        // The drift sign is the regime's definition; a contradictory override
        // is rejected rather than silently relabelled.
        if (trend == Trend::bull && !d.is_positive())
            throw Error("regime: bull trend requires positive drift");
        if (trend == Trend::bear && !d.is_negative())
            throw Error("regime: bear trend requires negative drift");
        if (trend == Trend::flat && !d.is_zero())
            throw Error("regime: flat trend requires zero drift");
    }
};

namespace detail {

/// Seeded draws mapped to scaled integers; avoids std distributions so the
/// byte stream is identical on every platform.
class SyntheticRng {
  public:
    explicit SyntheticRng(std::uint64_t seed) : gen_(seed) {}

    /// Uniform Decimal in [-1, 1] at 8 dp.
    Decimal unit() {
        std::int64_t r = static_cast<std::int64_t>(gen_() % (2 * Decimal::kScale + 1));
        return Decimal::from_units(r - Decimal::kScale);
    }

    /// Uniform Decimal in [0.5, 1.5] at 8 dp.
    Decimal size_multiplier() {
        std::int64_t r = static_cast<std::int64_t>(gen_() % (Decimal::kScale + 1));
        return Decimal::from_units(r + Decimal::kScale / 2);
    }

  private:
    std::mt19937_64 gen_;
};

}  // namespace detail

/// Generates a dataset for the regime: one snapshot per interval starting at
/// t = 0, evenly spaced trades inside each interval (aggressor side follows
/// the mid move: buys at the ask on up-moves, sells at the bid on down-moves),
/// and per-interval candles derived from those trades.
inline MarketDataset generate_synthetic(const RegimeSpec& spec, Granularity granularity) {
    spec.validate();
    const std::int64_t n = spec.duration_intervals;
    const TimestampMs step = interval_ms(granularity);
    const Decimal one = Decimal::from_int(1);
    const int dp = spec.price_decimals;

    detail::SyntheticRng rng(spec.seed);
    const Decimal amp = spec.noise_amplitude();
    const Decimal drift = spec.drift();

    std::vector<Decimal> mids;
    mids.reserve(n);
    for (std::int64_t k = 0; k < n; ++k) {
        Decimal frac;  // fractional offset from start at interval k
        if (n > 1) frac = (drift * Decimal::from_int(k)) / Decimal::from_int(n - 1);
        if (k > 0 && k < n - 1 && amp.is_positive()) frac += amp * rng.unit();
        mids.push_back(spec.start_price * (one + frac));
    }

    MarketDataset ds;
    ds.granularity = granularity;
    ds.price_decimals = dp;
    ds.snapshots.reserve(n);

    // Level spacing: ~0.05% of the start price, at least one tick, fixed for
    // the whole dataset.
    Decimal tick = Decimal::from_units(Decimal::kScale);
    for (int k = 0; k < dp; ++k) tick = Decimal::from_units(tick.units() / 10);
    Decimal level_step = (spec.start_price * dec("0.0005")).floor_to(dp);
    if (level_step < tick) level_step = tick;

    for (std::int64_t k = 0; k < n; ++k) {
        OrderBookSnapshot snap;
        snap.timestamp = k * step;
        Decimal bid1 = (mids[k] * (one - spec.half_spread)).floor_to(dp);
        Decimal ask1 = (mids[k] * (one + spec.half_spread)).ceil_to(dp);
        if (!bid1.is_positive()) throw Error("regime: price path reached zero bid");
        snap.bids.reserve(detail::kMaxLevels);
        snap.asks.reserve(detail::kMaxLevels);
        for (int lvl = 0; lvl < detail::kMaxLevels; ++lvl) {
            Decimal off = level_step * Decimal::from_int(lvl);
            Decimal bp = bid1 - off;
            if (!bp.is_positive())
                throw Error("regime: start_price too small for 50 book levels at tick " +
                            tick.str());
            snap.bids.push_back({bp, spec.level_qty});
            snap.asks.push_back({ask1 + off, spec.level_qty});
        }
        ds.snapshots.push_back(std::move(snap));
    }

    const int tpi = spec.trades_per_interval;
    ds.trades.reserve(static_cast<std::size_t>(n) * tpi);
    ds.candles.reserve(n);
    for (std::int64_t k = 0; k < n; ++k) {
        Decimal move;  // mid move this interval decides the majority side
        if (k + 1 < n) move = mids[k + 1] - mids[k];
        int buys;
        if (move.is_positive())
            buys = (tpi * 7 + 5) / 10;
        else if (move.is_negative())
            buys = (tpi * 3 + 5) / 10;
        else
            buys = tpi / 2;

        Candle candle;
        candle.timestamp = k * step;
        bool first_trade = true;
        int buys_emitted = 0;
        for (int j = 0; j < tpi; ++j) {
            // Bresenham spread of `buys` buy trades across the interval.
            bool is_buy = (j + 1) * buys / tpi > buys_emitted;
            if (is_buy) ++buys_emitted;
            Trade t;
            t.timestamp = k * step + static_cast<TimestampMs>(j + 1) * step / (tpi + 1);
            t.aggressor_side = is_buy ? TradeSide::buy : TradeSide::sell;
            t.price = is_buy ? ds.snapshots[k].asks.front().price
                             : ds.snapshots[k].bids.front().price;
            t.quantity = spec.trade_qty * rng.size_multiplier();
            ds.trades.push_back(t);
            if (first_trade) {
                candle.open = candle.high = candle.low = candle.close = t.price;
                first_trade = false;
            } else {
                candle.high = std::max(candle.high, t.price);
                candle.low = std::min(candle.low, t.price);
                candle.close = t.price;
            }
            candle.volume += t.quantity;
        }
        if (first_trade) {
            Decimal m = mids[k].floor_to(dp);
            if (!m.is_positive()) m = tick;
            candle.open = candle.high = candle.low = candle.close = m;
        }
        ds.candles.push_back(candle);
    }
    return ds;
}

}  // namespace mmlab

#endif  // MMLAB_SYNTHETIC_HPP
