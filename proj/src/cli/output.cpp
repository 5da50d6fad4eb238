#include "embcomm/cli/output.hpp"

#include "embcomm/errors.hpp"

#include <boost/algorithm/string/trim.hpp>
#include <fmt/format.h>

#include <cmath>
#include <sstream>

namespace embcomm::cli {

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    return fmt::format("{:.17g}", v);
}

nlohmann::json json_number(double v) {
    if (!std::isfinite(v)) {
        return nullptr;
    }
    return v;
}

std::vector<std::string> provenance_lines(const std::string& command, const RunConfig& cfg) {
    std::vector<std::string> lines;
    lines.push_back("embcomm " + command);
    lines.push_back("seed = " + std::to_string(cfg.sim.seed));
    for (const auto& [k, v] : cfg.resolved()) {
        lines.push_back(k + " = " + v);
    }
    return lines;
}

nlohmann::json config_json(const RunConfig& cfg) {
    nlohmann::json c = nlohmann::json::object();
    for (const auto& [k, v] : cfg.resolved()) {
        c[k] = v;
    }
    return c;
}

CsvWriter::CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& comments,
                     const std::vector<std::string>& columns)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc), columns_(columns.size()) {
    if (!out_) {
        throw IoError("cannot open for writing: " + path.string());
    }
    for (const auto& c : comments) {
        out_ << "# " << c << '\n';
    }
    row(columns);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_) {
        throw IoError("CSV row width mismatch in " + path_.string());
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out_ << ',';
        }
        out_ << cells[i];
    }
    out_ << '\n';
    if (!out_) {
        throw IoError("write failed: " + path_.string());
    }
}

void CsvWriter::close() {
    out_.close();
    if (out_.fail()) {
        throw IoError("close failed: " + path_.string());
    }
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open for writing: " + path.string());
    }
    out << doc.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed: " + path.string());
    }
}

void ensure_directory(const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir)) {
        throw IoError("cannot create output directory: " + dir.string());
    }
}

std::vector<Position> read_codebook_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot read codebook: " + path.string());
    }
    std::vector<Position> pts;
    std::string line;
    bool header_seen = false;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        boost::algorithm::trim(line);
        if (line.empty() || line[0] == '#') {
            continue;
        }
        if (!header_seen) {
            header_seen = true;
            if (line != "index,y_m,z_m") {
                throw ConfigError("design.import_csv", "expected header index,y_m,z_m");
            }
            continue;
        }
        std::stringstream ss(line);
        std::string idx;
        std::string y;
        std::string z;
        if (!std::getline(ss, idx, ',') || !std::getline(ss, y, ',') || !std::getline(ss, z)) {
            throw ConfigError("design.import_csv", "malformed row at line " + std::to_string(lineno));
        }
        try {
            std::size_t used_y = 0;
            std::size_t used_z = 0;
            const double yv = std::stod(y, &used_y);
            const double zv = std::stod(z, &used_z);
            if (used_y != y.size() || used_z != z.size()) {
                throw std::invalid_argument("trailing characters");
            }
            pts.push_back(Position{yv, zv});
        } catch (const std::exception&) {
            throw ConfigError("design.import_csv", "bad number at line " + std::to_string(lineno));
        }
    }
    return pts;
}

} // namespace embcomm::cli
