#ifndef MMLAB_CLI_HPP
#define MMLAB_CLI_HPP

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mmlab/config.hpp"
#include "mmlab/experiment.hpp"
#include "mmlab/metrics.hpp"
#include "mmlab/synthetic.hpp"

namespace mmlab::cli {

namespace fs = std::filesystem;

struct Invocation {
    std::string subcommand;  // run | datagen | validate | report
    std::string config_path;
    std::string data_dir;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    int verbosity = 0;
};

namespace detail {

/// Writes atomically: temp file in the target directory, then rename.
inline void write_file(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw Error("cannot write " + tmp.string());
        out << content;
    }
    fs::rename(tmp, path);
}

inline std::string cell_dir_name(const std::string& market, const std::string& family,
                                 int period_days, Granularity g) {
    return market + "_" + family + "_" + std::to_string(period_days) + "d_" + to_string(g);
}

/// Resolves a market's dataset: CSV files under data_dir, or the generated
/// regime (cached per label so every cell of a matrix sees identical data).
class DatasetCache {
  public:
    DatasetCache(const SuiteConfig& cfg, std::string data_dir)
        : cfg_(cfg), data_dir_(std::move(data_dir)) {}

    const MarketDataset& get(const MarketSpec& market) {
        auto it = cache_.find(market.label);
        if (it != cache_.end()) return it->second;
        MarketDataset ds;
        if (market.regime) {
            ds = generate_synthetic(*market.regime, cfg_.granularity);
        } else {
            const auto& files = *market.data;
            auto resolve = [&](const std::string& rel) {
                return (fs::path(data_dir_) / rel).string();
            };
            std::optional<std::string> ohlcv;
            if (files.ohlcv) ohlcv = resolve(*files.ohlcv);
            ds = load_dataset(resolve(files.trades), resolve(files.book), ohlcv,
                              cfg_.granularity);
        }
        return cache_.emplace(market.label, std::move(ds)).first->second;
    }

  private:
    const SuiteConfig& cfg_;
    std::string data_dir_;
    std::map<std::string, MarketDataset> cache_;
};

inline std::string render_fills_log(const std::vector<FillEvent>& fills) {
    std::string out = "timestamp_ms,agent_id,order_id,side,price,qty,fee\n";
    for (const auto& ev : fills)
        out += std::to_string(ev.fill.timestamp) + ',' + ev.agent_id + ',' +
               std::to_string(ev.fill.order_id) + ',' + to_string(ev.side) + ',' +
               ev.fill.price.str() + ',' + ev.fill.quantity.str() + ',' + ev.fill.fee.str() +
               '\n';
    return out;
}

/// Experiment windows per market: all periods share one evaluation window,
/// warmed up by the longest period, so the buy-and-hold ROI column is the
/// same for every period row of a market.
inline std::pair<TimestampMs, TimestampMs> experiment_window(const SuiteConfig& cfg,
                                                             const MarketDataset& ds) {
    int max_period = *std::max_element(cfg.period_days.begin(), cfg.period_days.end());
    TimestampMs start = cfg.start_time.value_or(
        ds.span_start() + static_cast<TimestampMs>(max_period) * 86'400'000);
    TimestampMs end = cfg.end_time.value_or(ds.span_end());
    return {start, end};
}

struct Cell {
    const MarketSpec* market;
    int period_days;
    std::string family_label;
    std::vector<FamilySpec> families;
};

inline std::vector<Cell> enumerate_cells(const SuiteConfig& cfg) {
    std::vector<Cell> cells;
    for (const auto& market : cfg.markets) {
        for (int period : cfg.period_days) {
            if (cfg.combined_cohort) {
                cells.push_back({&market, period, "combined", cfg.families});
            } else {
                for (const auto& fam : cfg.families)
                    cells.push_back({&market, period, to_string(fam.family), {fam}});
            }
        }
    }
    return cells;
}

inline int cmd_run(const SuiteConfig& cfg, const Invocation& inv, std::ostream& out) {
    DatasetCache cache(cfg, inv.data_dir);
    std::vector<ReportRow> rows;
    std::vector<CellKey> expected;

    for (const auto& cell : enumerate_cells(cfg)) {
        const MarketDataset& ds = cache.get(*cell.market);
        auto [start, end] = experiment_window(cfg, ds);

        ExperimentConfig ecfg;
        ecfg.granularity = cfg.granularity;
        ecfg.period_days = cell.period_days;
        ecfg.families = cell.families;
        ecfg.initial_base = cfg.initial_base;
        ecfg.initial_quote_equal_value = cfg.initial_quote_equal_value;
        ecfg.initial_quote = cfg.initial_quote;
        ecfg.engine = cfg.engine;
        ecfg.selection_policy = cfg.selection_policy;
        ecfg.seed = cfg.seed;
        ecfg.start_time = start;
        ecfg.end_time = end;
        ecfg.collect_fills = inv.verbosity > 0;

        ExperimentResult result = run_experiment(ecfg, ds);

        std::string dir = cell_dir_name(cell.market->label, cell.family_label, cell.period_days,
                                        cfg.granularity);
        write_file(fs::path(inv.out_dir) / dir / "inventory_history.csv",
                   render_inventory_history(result));
        if (inv.verbosity > 0)
            write_file(fs::path(inv.out_dir) / dir / "fills.csv",
                       render_fills_log(result.real_fills));

        ReportRow row;
        row.market = cell.market->label;
        row.family = cell.family_label;
        row.period_days = cell.period_days;
        row.granularity = cfg.granularity;
        row.roi_pct = result.chair_roi_pct;
        row.alpha_pct = result.chair_alpha_pct;
        rows.push_back(row);
        expected.push_back({row.market, row.family, row.period_days, row.granularity});

        if (inv.verbosity > 0)
            out << dir << ": roi " << result.chair_roi_pct.fixed(2) << "% alpha "
                << result.chair_alpha_pct.fixed(2) << "%\n";
    }

    write_file(fs::path(inv.out_dir) / "results.csv", emit_report(rows, expected));
    out << "wrote " << (fs::path(inv.out_dir) / "results.csv").string() << " (" << rows.size()
        << " rows)\n";
    return 0;
}

inline int cmd_datagen(const SuiteConfig& cfg, const Invocation& inv, std::ostream& out) {
    int generated = 0;
    for (const auto& market : cfg.markets) {
        if (!market.regime) continue;
        MarketDataset ds = generate_synthetic(*market.regime, cfg.granularity);
        fs::path dir = fs::path(inv.out_dir) / market.label;
        fs::create_directories(dir);
        // via temp names so a matrix run never sees half-written files
        DatasetPaths tmp{(dir / "trades.csv.tmp").string(), (dir / "book.csv.tmp").string(),
                         (dir / "ohlcv.csv.tmp").string()};
        write_dataset(ds, tmp);
        fs::rename(tmp.trades, dir / "trades.csv");
        fs::rename(tmp.book, dir / "book.csv");
        if (!ds.candles.empty()) fs::rename(tmp.ohlcv, dir / "ohlcv.csv");
        out << "wrote " << dir.string() << " (" << ds.snapshots.size() << " intervals, "
            << ds.trades.size() << " trades)\n";
        ++generated;
    }
    if (generated == 0) throw Error("datagen: no regime markets in config");
    return 0;
}

inline int cmd_validate(const SuiteConfig& cfg, const Invocation& inv, std::ostream& out) {
    DatasetCache cache(cfg, inv.data_dir);
    int total_findings = 0;
    for (const auto& market : cfg.markets) {
        const MarketDataset& ds = cache.get(market);
        ValidationReport report = validate_dataset(ds);
        out << market.label << ": " << report.findings.size() << " finding(s)\n";
        for (const auto& f : report.findings) out << "  [" << f.rule << "] " << f.message << '\n';
        total_findings += static_cast<int>(report.findings.size());
    }
    return total_findings == 0 ? 0 : 1;
}

inline int cmd_report(const Invocation& inv, std::ostream& out) {
    fs::path in_path = fs::path(inv.data_dir);
    if (fs::is_directory(in_path)) in_path /= "results.csv";
    csv::Reader reader(in_path.string());
    reader.expect_header("market,family,period_days,granularity,roi_pct,alpha_pct");
    std::vector<ReportRow> rows;
    std::string line;
    while (reader.next_line(line)) {
        auto cells = csv::split(line);
        if (cells.size() != 6) reader.fail("expected 6 columns");
        ReportRow row;
        row.market = std::string(cells[0]);
        row.family = std::string(cells[1]);
        row.period_days = std::stoi(std::string(cells[2]));
        row.granularity = granularity_from_string(cells[3]);
        row.roi_pct = Decimal::parse(cells[4]);
        row.alpha_pct = Decimal::parse(cells[5]);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("report: no result rows in " + in_path.string());
    for (const auto& [name, text] : pivot_tables(rows)) {
        write_file(fs::path(inv.out_dir) / name, text);
        out << "wrote " << (fs::path(inv.out_dir) / name).string() << '\n';
    }
    return 0;
}

}  // namespace detail

/// Dispatches one CLI invocation. Returns the process exit status; all
/// errors surface as a single "error: ..." line on err.
inline int run_cli(const Invocation& inv, std::ostream& out, std::ostream& err) {
    try {
        if (inv.subcommand == "report") return detail::cmd_report(inv, out);
        SuiteConfig cfg = load_suite_config(inv.config_path);
        if (inv.seed) {
            cfg.seed = *inv.seed;
            for (std::size_t i = 0; i < cfg.markets.size(); ++i)
                if (cfg.markets[i].regime && !cfg.markets[i].regime_seed_explicit)
                    cfg.markets[i].regime->seed = cfg.seed * 1000 + i;
        }
        if (inv.subcommand == "run") return detail::cmd_run(cfg, inv, out);
        if (inv.subcommand == "datagen") return detail::cmd_datagen(cfg, inv, out);
        if (inv.subcommand == "validate") return detail::cmd_validate(cfg, inv, out);
        throw Error("unknown subcommand '" + inv.subcommand + "'");
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: internal: " << e.what() << '\n';
        return 2;
    }
}

}  // namespace mmlab::cli

#endif  // MMLAB_CLI_HPP
