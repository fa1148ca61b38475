#pragma once

#include "hreye/frames.hpp"
#include "hreye/protocol.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>

namespace hreye::test {

inline std::mt19937_64& rng() {
    static std::mt19937_64 r(0x48524579);
    return r;
}

inline int uniform_int(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(rng());
}

inline double uniform_real(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline LedFrame random_frame() {
    LedFrame f;
    for (auto& p : f) {
        p = {static_cast<std::uint8_t>(uniform_int(0, 255)), static_cast<std::uint8_t>(uniform_int(0, 255)),
             static_cast<std::uint8_t>(uniform_int(0, 255)), static_cast<std::uint8_t>(uniform_int(0, 255))};
    }
    return f;
}

inline DriverMessage random_message() {
    return {static_cast<std::uint8_t>(uniform_int(0, 1)),
            static_cast<std::uint32_t>(std::uniform_int_distribution<std::uint32_t>()(rng())), random_frame()};
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("hreye_" + tag + "_" + std::to_string(std::random_device{}()));
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
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

inline void spit(const std::filesystem::path& p, const std::string& text) {
    std::ofstream f(p, std::ios::binary | std::ios::trunc);
    f << text;
}

}  // namespace hreye::test
