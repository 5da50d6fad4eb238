#pragma once

#include "embcomm/cli/config.hpp"

#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace embcomm::cli {

/// 17 significant digits; "inf", "-inf", "nan" for non-finite values.
std::string format_number(double v);

/// Finite numbers as numbers, non-finite as null.
nlohmann::json json_number(double v);

/// Comment lines naming the command, the seed and every resolved key.
std::vector<std::string> provenance_lines(const std::string& command, const RunConfig& cfg);

nlohmann::json config_json(const RunConfig& cfg);

// CSV with a '#' comment block, a header row and LF line endings.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& comments,
              const std::vector<std::string>& columns);

    void row(const std::vector<std::string>& cells);
    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::size_t columns_ = 0;
};

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Creates the directory (and parents); throws IoError on failure.
void ensure_directory(const std::filesystem::path& dir);

/// Reads "index,y_m,z_m" rows (comment lines and the header are skipped).
std::vector<Position> read_codebook_csv(const std::filesystem::path& path);

} // namespace embcomm::cli
