#pragma once

#include "landau/spectral.hpp"

#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

namespace landau::cli {

inline constexpr int schema_version = 1;

// JSON text with every floating-point value printed as %.17g.
std::string dump_json(const nlohmann::json& j, int indent = 2);
void write_json(const std::filesystem::path& p, const nlohmann::json& j);
nlohmann::json read_json(const std::filesystem::path& p);

// CSV with a leading "# config_hash=<hash> schema=<n>" line and a column header.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& p, const std::string& hash, const std::vector<std::string>& columns);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<double>& values);

private:
    std::FILE* f_ = nullptr;
    std::size_t n_ = 0;
};

// Snapshot file: one ASCII header line
//   LANDAU-SNAPSHOT 1 hash=<hash> k_max=<K> V=<V> N_v=<N> t=<t>
// followed by (2K+1) N little-endian float64 pairs (re, im), modes -K..K.
void write_snapshot(const std::filesystem::path& p, const SpectralState& s, const std::string& hash);
SpectralState read_snapshot(const std::filesystem::path& p);

}  // namespace landau::cli
