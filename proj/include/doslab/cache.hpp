#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>

#include "doslab/sha256.hpp"

namespace doslab {

// write-temp-then-rename; an interrupted run never leaves a partial file at
// the destination
inline void atomic_write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::filesystem::path dir = path.parent_path();
    if (!dir.empty() && !std::filesystem::is_directory(dir))
        throw std::runtime_error("atomic_write_file: directory does not exist: " + dir.string());
    std::filesystem::path tmp = path;
    tmp += ".tmp." + std::to_string(std::random_device{}());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("atomic_write_file: cannot open " + tmp.string());
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("atomic_write_file: write failed for " + tmp.string());
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw std::runtime_error("atomic_write_file: rename failed for " + path.string());
    }
}

inline std::optional<std::string> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (!in.good() && !in.eof()) return std::nullopt;
    return bytes;
}

// Content-addressed result cache: one file per key, keys are SHA-256 of the
// canonical serialization of the defining inputs. Writes are idempotent.
class ResultCache {
  public:
    explicit ResultCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec || !std::filesystem::is_directory(dir_))
            throw std::runtime_error("ResultCache: cannot create cache directory " + dir_.string());
    }

    static std::string key_for(const std::string& canonical_inputs) { return sha256_hex(canonical_inputs); }

    std::optional<std::string> load(const std::string& key) const { return read_file(dir_ / (key + ".json")); }

    void store(const std::string& key, const std::string& bytes) const {
        atomic_write_file(dir_ / (key + ".json"), bytes);
    }

    const std::filesystem::path& dir() const { return dir_; }

  private:
    std::filesystem::path dir_;
};

}  // namespace doslab
