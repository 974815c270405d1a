#pragma once

#include <filesystem>
#include <random>
#include <string>

#include "fadbio/csv.hpp"

// Scratch directory that cleans up after itself.
struct TempDir {
    std::filesystem::path path;

    TempDir() {
        std::random_device rd;
        const auto tag = std::to_string(rd()) + "-" + std::to_string(rd());
        path = std::filesystem::temp_directory_path() / ("fadbio-test-" + tag);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name, const std::string& content) const {
        const std::string p = (path / name).string();
        fadbio::atomic_write_file(p, content);
        return p;
    }
};
