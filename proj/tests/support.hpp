#pragma once
// Helpers and independent oracles shared by the unit and acceptance tests.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include <unistd.h>

namespace testing {

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("tg_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary);
    f << text;
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

using WeightedEdges = std::vector<std::tuple<std::uint32_t, std::uint32_t, double>>;

// CPM value straight from the definition: intra-class weight minus gamma * n_c(n_c - 1)/2, unit node sizes.
inline double cpm_oracle(std::size_t n, const WeightedEdges& edges, const std::vector<std::uint32_t>& cls,
                         double gamma) {
    double w = 0.0;
    for (auto [a, b, x] : edges)
        if (cls[a] == cls[b]) w += x;
    std::vector<double> sizes(n, 0.0);
    for (std::size_t v = 0; v < n; ++v) sizes[cls[v]] += 1.0;
    double pairs = 0.0;
    for (double s : sizes) pairs += s * (s - 1.0) / 2.0;
    return w - gamma * pairs;
}

// Visits every set partition of {0..n-1} as a restricted growth string.
inline void for_each_partition(std::size_t n, const std::function<void(const std::vector<std::uint32_t>&)>& f) {
    std::vector<std::uint32_t> a(n, 0);
    std::function<void(std::size_t, std::uint32_t)> rec = [&](std::size_t i, std::uint32_t max_used) {
        if (i == n) {
            f(a);
            return;
        }
        for (std::uint32_t c = 0; c <= max_used + 1; ++c) {
            a[i] = c;
            rec(i + 1, std::max(max_used, c));
        }
    };
    if (n == 0) {
        f(a);
        return;
    }
    rec(1, 0);
}

inline double brute_force_cpm_max(std::size_t n, const WeightedEdges& edges, double gamma) {
    double best = -INFINITY;
    for_each_partition(n, [&](const std::vector<std::uint32_t>& p) { best = std::max(best, cpm_oracle(n, edges, p, gamma)); });
    return best;
}

// Adjusted Rand index by explicit pair counting, O(n^2).
inline double ari_pairs(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b) {
    const std::size_t n = a.size();
    double both = 0, in_a = 0, in_b = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool sa = a[i] == a[j], sb = b[i] == b[j];
            both += sa && sb;
            in_a += sa;
            in_b += sb;
            total += 1;
        }
    const double expected = in_a * in_b / total;
    const double max_index = (in_a + in_b) / 2;
    if (max_index == expected) return 1.0;
    return (both - expected) / (max_index - expected);
}

// Random graph with dyadic weights so CPM sums are exact in binary floating point.
inline WeightedEdges random_dyadic_graph(std::size_t n, double density, std::mt19937_64& rng) {
    WeightedEdges e;
    std::uniform_real_distribution<double> u;
    std::uniform_int_distribution<int> w(1, 16);
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = a + 1; b < n; ++b)
            if (u(rng) < density) e.emplace_back(a, b, w(rng) / 8.0);
    return e;
}

}  // namespace testing
