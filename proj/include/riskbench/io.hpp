#ifndef RISKBENCH_IO_HPP
#define RISKBENCH_IO_HPP

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskbench/objectives.hpp"

namespace riskbench {

enum class DataFormat { Csv, Libsvm };
enum class LabelColumn { None, Last };

struct RawDataset {
    RowMat matrix;
    std::optional<std::vector<int>> labels;
    std::string source;
    std::optional<std::string> sha256;
};

/// Comma-separated numbers, one point per line. Blank lines are skipped; a
/// first line with no numeric field is treated as a header.
/// Throws ParseError (with line number), InconsistentWidth, EmptyInput.
RawDataset parse_csv(std::istream& in, const std::string& source, LabelColumn label_col = LabelColumn::None);

/// `label idx:val ...` lines with 1-based indices; d is the largest index seen.
RawDataset parse_libsvm(std::istream& in, const std::string& source);

/// Reads a file and records its SHA-256. Throws IoError when it cannot be opened.
RawDataset load(const std::filesystem::path& path, DataFormat format, LabelColumn label_col = LabelColumn::None);

void write_csv(const std::filesystem::path& path, const RawDataset& raw, LabelColumn label_col = LabelColumn::None);
void write_libsvm(const std::filesystem::path& path, const RawDataset& raw);

struct Normalization {
    Vec shift;          // added to every point
    double scale = 1.0; // then multiplied
};

/// Shifts by minus the bounding-box midpoint, then divides by the largest
/// norm when it exceeds 1.
PointSet normalize_to_unit_ball(const RawDataset& raw, Normalization* info = nullptr);

std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::filesystem::path& path);

/// Downloads url to dest (temp file + rename) and checks the SHA-256.
/// An existing dest with the right checksum is reused without downloading.
/// An empty sha256 skips verification. Throws ChecksumMismatch, NetworkError, IoError.
std::filesystem::path fetch(const std::string& url, const std::string& sha256, const std::filesystem::path& dest);

}  // namespace riskbench

#endif  // RISKBENCH_IO_HPP
