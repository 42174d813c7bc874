#ifndef MMLAB_MARKETDATA_HPP
#define MMLAB_MARKETDATA_HPP

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "mmlab/csv.hpp"
#include "mmlab/decimal.hpp"
#include "mmlab/errors.hpp"

namespace mmlab {

using TimestampMs = std::int64_t;

enum class Granularity { minute, hour };

inline TimestampMs interval_ms(Granularity g) {
    return g == Granularity::minute ? 60'000 : 3'600'000;
}

inline std::string to_string(Granularity g) {
    return g == Granularity::minute ? "minute" : "hour";
}

inline Granularity granularity_from_string(std::string_view s) {
    if (s == "minute") return Granularity::minute;
    if (s == "hour") return Granularity::hour;
    throw Error("unknown granularity '" + std::string(s) + "'");
}

enum class TradeSide { buy, sell };

inline std::string to_string(TradeSide s) { return s == TradeSide::buy ? "buy" : "sell"; }

struct Trade {
    TimestampMs timestamp = 0;
    Decimal price;
    Decimal quantity;
    TradeSide aggressor_side = TradeSide::buy;
};

struct BookLevel {
    Decimal price;
    Decimal quantity;
    friend bool operator==(const BookLevel&, const BookLevel&) = default;
};

/// One book snapshot: bids descending, asks ascending, at most 50 per side.
/// A zero-width book (best bid == best ask) is accepted; only a bid above the
/// ask is treated as crossed. Zero-spread synthetic datasets rely on this.
struct OrderBookSnapshot {
    TimestampMs timestamp = 0;
    std::vector<BookLevel> bids;
    std::vector<BookLevel> asks;

    const BookLevel* best_bid() const { return bids.empty() ? nullptr : &bids.front(); }
    const BookLevel* best_ask() const { return asks.empty() ? nullptr : &asks.front(); }
};

struct Candle {
    TimestampMs timestamp = 0;
    Decimal open, high, low, close;
    Decimal volume;
};

struct MarketDataset {
    Granularity granularity = Granularity::minute;
    int price_decimals = 2;  // placement tick; inferred from files, set by the generator
    std::vector<OrderBookSnapshot> snapshots;
    std::vector<Trade> trades;
    std::vector<Candle> candles;

    TimestampMs interval() const { return interval_ms(granularity); }
    /// Covered span is [span_start, span_end): one interval per snapshot.
    TimestampMs span_start() const { return snapshots.empty() ? 0 : snapshots.front().timestamp; }
    TimestampMs span_end() const {
        return snapshots.empty() ? 0 : snapshots.back().timestamp + interval();
    }
    std::size_t interval_count() const { return snapshots.size(); }
};

namespace detail {

constexpr int kMaxLevels = 50;

inline Decimal parse_positive(csv::Reader& r, std::string_view cell, const char* what) {
    Decimal d;
    try {
        d = Decimal::parse(cell);
    } catch (const Error& e) {
        r.fail(std::string(what) + ": " + e.what());
    }
    if (!d.is_positive()) r.fail(std::string(what) + " must be > 0, got '" + std::string(cell) + "'");
    return d;
}

inline int frac_digits(std::string_view cell) {
    auto dot = cell.find('.');
    if (dot == std::string_view::npos) return 0;
    int n = static_cast<int>(cell.size() - dot - 1);
    while (n > 0 && cell[dot + n] == '0') --n;
    return n;
}

inline std::string book_header() {
    std::string h = "timestamp_ms";
    for (int side = 0; side < 2; ++side) {
        const char* tag = side == 0 ? "bid" : "ask";
        for (int i = 1; i <= kMaxLevels; ++i) {
            h += ",";
            h += tag;
            h += "_px_" + std::to_string(i);
            h += ",";
            h += tag;
            h += "_qty_" + std::to_string(i);
        }
    }
    return h;
}

}  // namespace detail

/// Loads trades.csv / book.csv / optional ohlcv.csv into a dataset.
///
/// Structural problems (bad column counts, unparseable numbers, timestamp
/// regressions, crossed or unsorted books) are hard errors naming file and
/// line. Coverage-style problems (interval gaps, out-of-span trades, candle
/// shape) are left to validate_dataset, which reports findings instead.
inline MarketDataset load_dataset(const std::string& trades_path,
                                  const std::string& snapshots_path,
                                  const std::optional<std::string>& candles_path,
                                  Granularity granularity) {
    MarketDataset ds;
    ds.granularity = granularity;
    int max_price_digits = 0;

    {
        csv::Reader r(trades_path);
        r.expect_header("timestamp_ms,price,qty,side");
        std::string line;
        TimestampMs prev_ts = INT64_MIN;
        while (r.next_line(line)) {
            auto cells = csv::split(line);
            if (cells.size() != 4) r.fail("expected 4 columns, got " + std::to_string(cells.size()));
            Trade t;
            try {
                t.timestamp = std::stoll(std::string(cells[0]));
            } catch (...) {
                r.fail("bad timestamp '" + std::string(cells[0]) + "'");
            }
            if (t.timestamp < prev_ts) r.fail("timestamp regression");
            prev_ts = t.timestamp;
            t.price = detail::parse_positive(r, cells[1], "price");
            t.quantity = detail::parse_positive(r, cells[2], "qty");
            if (cells[3] == "buy")
                t.aggressor_side = TradeSide::buy;
            else if (cells[3] == "sell")
                t.aggressor_side = TradeSide::sell;
            else
                r.fail("side must be buy or sell, got '" + std::string(cells[3]) + "'");
            max_price_digits = std::max(max_price_digits, detail::frac_digits(cells[1]));
            ds.trades.push_back(t);
        }
    }

    {
        csv::Reader r(snapshots_path);
        r.expect_header(detail::book_header());
        std::string line;
        TimestampMs prev_ts = INT64_MIN;
        while (r.next_line(line)) {
            auto cells = csv::split(line);
            if (cells.size() != 1 + 4 * detail::kMaxLevels)
                r.fail("expected " + std::to_string(1 + 4 * detail::kMaxLevels) +
                       " columns, got " + std::to_string(cells.size()));
            OrderBookSnapshot snap;
            try {
                snap.timestamp = std::stoll(std::string(cells[0]));
            } catch (...) {
                r.fail("bad timestamp '" + std::string(cells[0]) + "'");
            }
            if (snap.timestamp <= prev_ts) r.fail("timestamp regression");
            prev_ts = snap.timestamp;
            for (int side = 0; side < 2; ++side) {
                auto& levels = side == 0 ? snap.bids : snap.asks;
                std::size_t base = 1 + side * 2 * detail::kMaxLevels;
                for (int i = 0; i < detail::kMaxLevels; ++i) {
                    std::string_view px = cells[base + 2 * i];
                    std::string_view qty = cells[base + 2 * i + 1];
                    if (px.empty() != qty.empty()) r.fail("level with price but no qty (or vice versa)");
                    if (px.empty()) continue;
                    BookLevel lvl;
                    lvl.price = detail::parse_positive(r, px, "price");
                    lvl.quantity = detail::parse_positive(r, qty, "qty");
                    max_price_digits = std::max(max_price_digits, detail::frac_digits(px));
                    if (!levels.empty()) {
                        bool ok = side == 0 ? lvl.price < levels.back().price
                                            : lvl.price > levels.back().price;
                        if (!ok)
                            r.fail(side == 0 ? "bids not strictly descending"
                                             : "asks not strictly ascending");
                    }
                    levels.push_back(lvl);
                }
            }
            if (snap.best_bid() && snap.best_ask() &&
                snap.best_bid()->price > snap.best_ask()->price)
                r.fail("crossed book: best bid " + snap.best_bid()->price.str() + " > best ask " +
                       snap.best_ask()->price.str());
            ds.snapshots.push_back(std::move(snap));
        }
        if (ds.snapshots.empty()) throw Error(snapshots_path + ": no snapshots");
    }

    if (candles_path) {
        csv::Reader r(*candles_path);
        r.expect_header("timestamp_ms,open,high,low,close,volume");
        std::string line;
        TimestampMs prev_ts = INT64_MIN;
        while (r.next_line(line)) {
            auto cells = csv::split(line);
            if (cells.size() != 6) r.fail("expected 6 columns, got " + std::to_string(cells.size()));
            Candle c;
            try {
                c.timestamp = std::stoll(std::string(cells[0]));
            } catch (...) {
                r.fail("bad timestamp '" + std::string(cells[0]) + "'");
            }
            if (c.timestamp <= prev_ts) r.fail("timestamp regression");
            prev_ts = c.timestamp;
            c.open = detail::parse_positive(r, cells[1], "open");
            c.high = detail::parse_positive(r, cells[2], "high");
            c.low = detail::parse_positive(r, cells[3], "low");
            c.close = detail::parse_positive(r, cells[4], "close");
            try {
                c.volume = Decimal::parse(cells[5]);
            } catch (const Error& e) {
                r.fail(std::string("volume: ") + e.what());
            }
            if (c.volume.is_negative()) r.fail("volume must be >= 0");
            ds.candles.push_back(c);
        }
    }

    ds.price_decimals = std::clamp(max_price_digits, 2, Decimal::kFracDigits);
    return ds;
}

struct DatasetPaths {
    std::string trades;
    std::string book;
    std::string ohlcv;
};

inline DatasetPaths dataset_paths(const std::string& dir) {
    namespace fs = std::filesystem;
    return {(fs::path(dir) / "trades.csv").string(), (fs::path(dir) / "book.csv").string(),
            (fs::path(dir) / "ohlcv.csv").string()};
}

/// Writes the canonical CSV form (trailing-zero-trimmed decimals, LF line
/// endings). load -> write reproduces canonical files byte for byte.
inline void write_dataset(const MarketDataset& ds, const DatasetPaths& paths) {
    {
        std::ofstream out(paths.trades, std::ios::binary);
        if (!out) throw Error("cannot write " + paths.trades);
        out << "timestamp_ms,price,qty,side\n";
        for (const auto& t : ds.trades)
            out << t.timestamp << ',' << t.price.str() << ',' << t.quantity.str() << ','
                << to_string(t.aggressor_side) << '\n';
    }
    {
        std::ofstream out(paths.book, std::ios::binary);
        if (!out) throw Error("cannot write " + paths.book);
        out << detail::book_header() << '\n';
        for (const auto& s : ds.snapshots) {
            out << s.timestamp;
            for (int side = 0; side < 2; ++side) {
                const auto& levels = side == 0 ? s.bids : s.asks;
                for (int i = 0; i < detail::kMaxLevels; ++i) {
                    if (i < static_cast<int>(levels.size()))
                        out << ',' << levels[i].price.str() << ',' << levels[i].quantity.str();
                    else
                        out << ",,";
                }
            }
            out << '\n';
        }
    }
    if (!ds.candles.empty()) {
        std::ofstream out(paths.ohlcv, std::ios::binary);
        if (!out) throw Error("cannot write " + paths.ohlcv);
        out << "timestamp_ms,open,high,low,close,volume\n";
        for (const auto& c : ds.candles)
            out << c.timestamp << ',' << c.open.str() << ',' << c.high.str() << ','
                << c.low.str() << ',' << c.close.str() << ',' << c.volume.str() << '\n';
    }
}

struct Finding {
    std::string rule;     // short machine-readable rule name
    std::string message;  // human detail, names interval index or timestamp
};

struct ValidationReport {
    std::vector<Finding> findings;
    bool ok() const { return findings.empty(); }
};

/// Checks every dataset invariant and reports findings instead of failing:
/// snapshot alignment and gaps, level ordering, crossed books, trade span
/// and ordering, candle shape.
inline ValidationReport validate_dataset(const MarketDataset& ds) {
    ValidationReport report;
    auto add = [&](std::string rule, std::string message) {
        report.findings.push_back({std::move(rule), std::move(message)});
    };

    if (ds.snapshots.empty()) {
        add("no_snapshots", "dataset has no snapshots");
        return report;
    }
    const TimestampMs step = ds.interval();
    const TimestampMs start = ds.snapshots.front().timestamp;
    if (start % step != 0)
        add("misaligned", "first snapshot timestamp " + std::to_string(start) +
                              " not aligned to " + to_string(ds.granularity) + " boundary");
    std::int64_t expected_index = 0;
    for (std::size_t i = 0; i < ds.snapshots.size(); ++i) {
        const auto& s = ds.snapshots[i];
        std::int64_t offset = s.timestamp - start;
        if (offset % step != 0) {
            add("misaligned", "snapshot at " + std::to_string(s.timestamp) + " off the interval grid");
            continue;
        }
        std::int64_t index = offset / step;
        for (; expected_index < index; ++expected_index)
            add("gap", "gap at interval " + std::to_string(expected_index));
        expected_index = index + 1;

        for (int side = 0; side < 2; ++side) {
            const auto& levels = side == 0 ? s.bids : s.asks;
            if (levels.size() > detail::kMaxLevels)
                add("too_many_levels", "interval " + std::to_string(index) + ": more than 50 levels");
            for (std::size_t k = 0; k < levels.size(); ++k) {
                if (!levels[k].price.is_positive() || !levels[k].quantity.is_positive())
                    add("bad_level", "interval " + std::to_string(index) + ": non-positive level");
                if (k > 0) {
                    bool ok = side == 0 ? levels[k].price < levels[k - 1].price
                                        : levels[k].price > levels[k - 1].price;
                    if (!ok)
                        add("unsorted_levels", "interval " + std::to_string(index) +
                                                   (side == 0 ? ": bids not strictly descending"
                                                              : ": asks not strictly ascending"));
                }
            }
        }
        if (s.best_bid() && s.best_ask() && s.best_bid()->price > s.best_ask()->price)
            add("crossed_book", "interval " + std::to_string(index) + ": best bid above best ask");
    }

    const TimestampMs span_end = ds.span_end();
    TimestampMs prev_trade = INT64_MIN;
    for (const auto& t : ds.trades) {
        if (t.timestamp < prev_trade) {
            add("trade_order", "trade at " + std::to_string(t.timestamp) + " out of order");
        }
        prev_trade = t.timestamp;
        if (t.timestamp < start || t.timestamp >= span_end)
            add("trade_out_of_span", "trade at " + std::to_string(t.timestamp) + " outside covered span");
        if (!t.price.is_positive() || !t.quantity.is_positive())
            add("bad_trade", "trade at " + std::to_string(t.timestamp) + " non-positive price or qty");
    }

    for (const auto& c : ds.candles) {
        Decimal lo = std::min(c.open, c.close);
        Decimal hi = std::max(c.open, c.close);
        if (c.low > lo || c.high < hi || c.low > c.high)
            add("candle_shape", "candle at " + std::to_string(c.timestamp) +
                                    " violates low <= open,close <= high");
        if (c.volume.is_negative())
            add("candle_volume", "candle at " + std::to_string(c.timestamp) + " negative volume");
    }
    return report;
}

/// Returns the sub-dataset covering exactly [t0, t1).
inline MarketDataset slice_dataset(const MarketDataset& ds, TimestampMs t0, TimestampMs t1) {
    const TimestampMs step = ds.interval();
    if (t0 >= t1) throw Error("slice: t0 must be < t1");
    if ((t0 - ds.span_start()) % step != 0 || (t1 - ds.span_start()) % step != 0)
        throw Error("slice: bounds not aligned to " + to_string(ds.granularity) + " intervals");
    if (t0 < ds.span_start() || t1 > ds.span_end())
        throw Error("slice: [" + std::to_string(t0) + ", " + std::to_string(t1) +
                    ") outside dataset span [" + std::to_string(ds.span_start()) + ", " +
                    std::to_string(ds.span_end()) + ")");

    MarketDataset out;
    out.granularity = ds.granularity;
    out.price_decimals = ds.price_decimals;
    for (const auto& s : ds.snapshots)
        if (s.timestamp >= t0 && s.timestamp < t1) out.snapshots.push_back(s);
    for (const auto& t : ds.trades)
        if (t.timestamp >= t0 && t.timestamp < t1) out.trades.push_back(t);
    for (const auto& c : ds.candles)
        if (c.timestamp >= t0 && c.timestamp < t1) out.candles.push_back(c);
    return out;
}

}  // namespace mmlab

#endif  // MMLAB_MARKETDATA_HPP
