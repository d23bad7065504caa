#pragma once

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>
#include <string>
#include <vector>

#include "tabaudit/dataset.hpp"

namespace fixture {

inline std::filesystem::path source_dir() { return TABAUDIT_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "tests" / "data"; }

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::filesystem::create_directories(p.parent_path());
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << text;
}

inline tabaudit::TabularDataset load(const std::string& file, std::string name = {}) {
    return tabaudit::load_csv_file(data_dir() / file, std::move(name));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("tabaudit-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    [[nodiscard]] const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline std::string decimal(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

// 500 rows x 8 numeric features, each cell uniform on [0, 1) with six
// decimals.
inline std::string synthetic_csv(std::uint64_t seed = 42, std::size_t rows = 500, std::size_t features = 8) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::string out;
    for (std::size_t f = 0; f < features; ++f) out += (f ? ",x" : "x") + std::to_string(f + 1);
    out += "\n";
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t f = 0; f < features; ++f) out += (f ? "," : "") + decimal(unit(rng), 6);
        out += "\n";
    }
    return out;
}

inline tabaudit::TabularDataset synthetic(std::uint64_t seed = 42) {
    return tabaudit::load_csv(synthetic_csv(seed), "d_syn");
}

// 1000 rows: five features loading 0.8 on one latent factor (population
// correlation 0.64 between any two), one decimal each, plus a near-unique
// integer column independent of the rest.
inline std::string correlated_csv(std::uint64_t seed = 7, std::size_t rows = 1000) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> weight(100000, 999999);
    std::string out = "f1,f2,f3,f4,f5,weight\n";
    for (std::size_t r = 0; r < rows; ++r) {
        const double z = normal(rng);
        for (int f = 0; f < 5; ++f) {
            const double x = 50.0 + 10.0 * (0.8 * z + 0.6 * normal(rng));
            out += decimal(x, 1) + ",";
        }
        out += std::to_string(weight(rng)) + "\n";
    }
    return out;
}

inline tabaudit::TabularDataset correlated(std::uint64_t seed = 7) {
    return tabaudit::load_csv(correlated_csv(seed), "d_corr");
}

}  // namespace fixture
