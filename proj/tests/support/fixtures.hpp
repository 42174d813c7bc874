#ifndef MMLAB_TESTS_FIXTURES_HPP
#define MMLAB_TESTS_FIXTURES_HPP

#include <atomic>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <unistd.h>
#include <vector>

#include "mmlab/marketdata.hpp"

namespace mmlab::testing {

namespace fs = std::filesystem;

class TempDir {
  public:
    TempDir() {
        static std::atomic<int> counter{0};
        path_ = fs::temp_directory_path() /
                ("mmlab_test_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    const fs::path& path() const { return path_; }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    fs::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Minimal dataset: one-level books at the given mids (bid = mid - spread,
/// ask = mid + spread), no trades unless added by the caller.
inline MarketDataset tiny_dataset(Granularity g, const std::vector<std::string>& mids,
                                  const std::string& half_spread = "0.5",
                                  const std::string& level_qty = "100") {
    MarketDataset ds;
    ds.granularity = g;
    Decimal spread = Decimal::parse(half_spread);
    Decimal qty = Decimal::parse(level_qty);
    for (std::size_t k = 0; k < mids.size(); ++k) {
        OrderBookSnapshot snap;
        snap.timestamp = static_cast<TimestampMs>(k) * interval_ms(g);
        Decimal mid = Decimal::parse(mids[k]);
        snap.bids.push_back({mid - spread, qty});
        snap.asks.push_back({mid + spread, qty});
        ds.snapshots.push_back(std::move(snap));
    }
    return ds;
}

}  // namespace mmlab::testing

#endif  // MMLAB_TESTS_FIXTURES_HPP
