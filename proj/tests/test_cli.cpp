#include <catch_amalgamated.hpp>

#include <sstream>

#include "mmlab/cli.hpp"
#include "support/fixtures.hpp"

using namespace mmlab;
using namespace mmlab::testing;

namespace {

struct CliResult {
    int status;
    std::string out;
    std::string err;
};

CliResult invoke(const cli::Invocation& inv) {
    std::ostringstream out, err;
    int status = cli::run_cli(inv, out, err);
    return {status, out.str(), err.str()};
}

std::string hodler_only_config_json() {
    return R"({
  "granularity": "hour",
  "period_days": 1,
  "families": ["hodler"],
  "fee_rate": "0",
  "seed": 9,
  "markets": [
    {"label": "calm", "regime": {
      "trend": "flat", "volatility": "low", "start_price": "100",
      "duration_days": 2, "noise_pct": "0.4", "half_spread_pct": "0"}}
  ]
})";
}

}  // namespace

TEST_CASE("datagen writes byte-identical files for the same seed") {
    TempDir dir;
    write_text(dir.file("config.json"), hodler_only_config_json());

    cli::Invocation inv;
    inv.subcommand = "datagen";
    inv.config_path = dir.file("config.json");
    inv.out_dir = dir.file("out1");
    REQUIRE(invoke(inv).status == 0);
    inv.out_dir = dir.file("out2");
    REQUIRE(invoke(inv).status == 0);

    for (const char* name : {"trades.csv", "book.csv", "ohlcv.csv"}) {
        auto a = read_text((fs::path(dir.file("out1")) / "calm" / name).string());
        auto b = read_text((fs::path(dir.file("out2")) / "calm" / name).string());
        REQUIRE_FALSE(a.empty());
        CHECK(a == b);
    }

    SECTION("a different seed changes derived regime data") {
        inv.out_dir = dir.file("out3");
        inv.seed = 123;
        REQUIRE(invoke(inv).status == 0);
        CHECK(read_text((fs::path(dir.file("out1")) / "calm" / "trades.csv").string()) !=
              read_text((fs::path(dir.file("out3")) / "calm" / "trades.csv").string()));
    }
}

TEST_CASE("run on a hodler-only config emits one row matching the engine") {
    TempDir dir;
    write_text(dir.file("config.json"), hodler_only_config_json());

    cli::Invocation inv;
    inv.subcommand = "run";
    inv.config_path = dir.file("config.json");
    inv.out_dir = dir.file("out");
    auto run = invoke(inv);
    CAPTURE(run.err);
    REQUIRE(run.status == 0);

    std::string results = read_text((fs::path(dir.file("out")) / "results.csv").string());
    REQUIRE(std::count(results.begin(), results.end(), '\n') == 2);  // header + 1 row
    CHECK(results.find("market,family,period_days,granularity,roi_pct,alpha_pct\n") == 0);

    // reproduce the engine run: same derived regime seed, same window
    SuiteConfig cfg = load_suite_config(dir.file("config.json"));
    MarketDataset ds = generate_synthetic(*cfg.markets[0].regime, cfg.granularity);
    MarketDataset window = slice_dataset(ds, ds.span_start() + 86'400'000, ds.span_end());
    Decimal hold = hodler_reference(window, cfg.initial_base,
                                    cfg.initial_base * mid_price(window.snapshots.front()),
                                    Decimal());
    std::string expected_row = "calm,hodler,1,hour," + hold.fixed(2) + "," + dec("0").fixed(2);
    CHECK(results.find(expected_row) != std::string::npos);

    std::string history = read_text(
        (fs::path(dir.file("out")) / "calm_hodler_1d_hour" / "inventory_history.csv").string());
    CHECK(history.find("boundary_ts,agent_id,env,value_quote,roi_pct,alpha_pct,selected\n") == 0);
    CHECK(history.find("TOTAL") != std::string::npos);
}

TEST_CASE("unknown config keys are hard errors") {
    TempDir dir;
    write_text(dir.file("config.json"), R"({
  "granularity": "hour",
  "period_days": 1,
  "families": ["hodler"],
  "typo_key": true,
  "markets": [{"label": "m", "regime": {
    "trend": "flat", "volatility": "low", "start_price": "100", "duration_days": 2}}]
})");
    cli::Invocation inv;
    inv.subcommand = "run";
    inv.config_path = dir.file("config.json");
    inv.out_dir = dir.file("out");
    auto run = invoke(inv);
    CHECK(run.status == 2);
    CHECK(run.err.find("error: ") == 0);
    CHECK(run.err.find("unknown key 'typo_key'") != std::string::npos);
}

TEST_CASE("validate reports findings and sets the exit status") {
    TempDir dir;

    SECTION("clean generated data passes") {
        write_text(dir.file("config.json"), hodler_only_config_json());
        cli::Invocation inv;
        inv.subcommand = "validate";
        inv.config_path = dir.file("config.json");
        auto run = invoke(inv);
        CHECK(run.status == 0);
        CHECK(run.out.find("calm: 0 finding(s)") != std::string::npos);
    }
    SECTION("a gap in file-backed data is found") {
        RegimeSpec spec;
        spec.duration_intervals = 6;
        auto ds = generate_synthetic(spec, Granularity::hour);
        ds.snapshots.erase(ds.snapshots.begin() + 3);
        ds.candles.erase(ds.candles.begin() + 3);
        fs::create_directories(dir.file("data"));
        write_dataset(ds, dataset_paths(dir.file("data")));

        write_text(dir.file("config.json"), R"({
  "granularity": "hour",
  "period_days": 1,
  "families": ["hodler"],
  "markets": [{"label": "gappy", "data": {
    "trades": "trades.csv", "book": "book.csv", "ohlcv": "ohlcv.csv"}}]
})");
        cli::Invocation inv;
        inv.subcommand = "validate";
        inv.config_path = dir.file("config.json");
        inv.data_dir = dir.file("data");
        auto run = invoke(inv);
        CHECK(run.status == 1);
        CHECK(run.out.find("gap at interval 3") != std::string::npos);
    }
}

TEST_CASE("report pivots results.csv into per-family tables") {
    TempDir dir;
    write_text(dir.file("results.csv"),
               "market,family,period_days,granularity,roi_pct,alpha_pct\n"
               "bear,puremm,1,minute,26.46,45.56\n"
               "bear,puremm,2,minute,40.11,59.21\n"
               "bull,puremm,1,minute,-3.46,-16.36\n"
               "bull,puremm,2,minute,4.99,-7.91\n");
    cli::Invocation inv;
    inv.subcommand = "report";
    inv.data_dir = dir.path().string();
    inv.out_dir = dir.file("tables");
    auto run = invoke(inv);
    CAPTURE(run.err);
    REQUIRE(run.status == 0);
    std::string table = read_text((fs::path(dir.file("tables")) / "table_puremm_minute.csv").string());
    CHECK(table.find("period_days,bear_roi,bear_alpha,bear_hold,bull_roi,bull_alpha,bull_hold") ==
          0);
    CHECK(table.find("\n1,26.46,45.56,-19.10,-3.46,-16.36,12.90") != std::string::npos);
}

TEST_CASE("a three-regime four-period three-family matrix yields 36 rows") {
    TempDir dir;
    write_text(dir.file("config.json"), R"({
  "granularity": "hour",
  "period_days": [1, 2, 3, 5],
  "families": ["base", "skewed", "puremm"],
  "seed": 21,
  "markets": [
    {"label": "bull_calm", "regime": {
      "trend": "bull", "volatility": "low", "start_price": "100", "duration_days": 10}},
    {"label": "bull_wild", "regime": {
      "trend": "bull", "volatility": "high", "start_price": "100", "duration_days": 10}},
    {"label": "bear", "regime": {
      "trend": "bear", "volatility": "low", "start_price": "100", "duration_days": 10}}
  ]
})");
    cli::Invocation inv;
    inv.subcommand = "run";
    inv.config_path = dir.file("config.json");
    inv.out_dir = dir.file("out");
    auto run = invoke(inv);
    CAPTURE(run.err);
    REQUIRE(run.status == 0);
    std::string results = read_text((fs::path(dir.file("out")) / "results.csv").string());
    CHECK(std::count(results.begin(), results.end(), '\n') == 37);  // header + 36 cells
}
