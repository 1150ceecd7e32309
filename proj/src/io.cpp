#include "riskbench/io.hpp"

#include <curl/curl.h>
#include <openssl/evp.h>
#include <unistd.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <sstream>

#include "riskbench/error.hpp"
#include "riskbench/format.hpp"

namespace riskbench {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool parse_number(std::string_view s, double& out) {
    s = trim(s);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    if (s.empty()) return false;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

bool parse_int(std::string_view s, int& out) {
    double v;
    if (!parse_number(s, v) || v != std::floor(v) || std::abs(v) > 2147483647.0) return false;
    out = static_cast<int>(v);
    return true;
}

[[noreturn]] void parse_fail(const std::string& source, std::size_t line, const std::string& what) {
    throw Error(ErrorKind::ParseError, source + ": line " + std::to_string(line) + ": " + what);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

RowMat to_matrix(const std::vector<std::vector<double>>& rows, std::size_t d) {
    RowMat m = RowMat::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t c = 0; c < rows[i].size(); ++c) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
    return m;
}

}  // namespace

RawDataset parse_csv(std::istream& in, const std::string& source, LabelColumn label_col) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t width = 0;
    std::string line;
    std::size_t lineno = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) continue;
        const auto fields = split(line, ',');
        if (first) {
            first = false;
            bool any_numeric = false;
            double tmp;
            for (auto f : fields) any_numeric = any_numeric || parse_number(f, tmp);
            if (!any_numeric) continue;
        }
        if (width == 0) {
            width = fields.size();
        } else if (fields.size() != width) {
            throw Error(ErrorKind::InconsistentWidth, source + ": line " + std::to_string(lineno) + ": expected " +
                                                          std::to_string(width) + " fields, found " +
                                                          std::to_string(fields.size()));
        }
        std::size_t ncoords = fields.size();
        if (label_col == LabelColumn::Last) {
            if (fields.size() < 2) parse_fail(source, lineno, "need a label column and at least one coordinate");
            int lab;
            if (!parse_int(fields.back(), lab)) parse_fail(source, lineno, "label is not an integer");
            labels.push_back(lab);
            --ncoords;
        }
        std::vector<double> row(ncoords);
        for (std::size_t c = 0; c < ncoords; ++c) {
            if (!parse_number(fields[c], row[c])) {
                parse_fail(source, lineno, "field " + std::to_string(c + 1) + " is not a finite number");
            }
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error(ErrorKind::EmptyInput, source + ": no data rows");
    RawDataset raw;
    raw.matrix = to_matrix(rows, rows.front().size());
    if (label_col == LabelColumn::Last) raw.labels = std::move(labels);
    raw.source = source;
    return raw;
}

RawDataset parse_libsvm(std::istream& in, const std::string& source) {
    std::vector<std::vector<std::pair<std::size_t, double>>> entries;
    std::vector<int> labels;
    std::size_t d = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream tokens(line);
        std::string tok;
        if (!(tokens >> tok)) continue;
        int lab;
        if (!parse_int(tok, lab)) parse_fail(source, lineno, "label '" + tok + "' is not an integer");
        labels.push_back(lab);
        std::vector<std::pair<std::size_t, double>> row;
        while (tokens >> tok) {
            const auto colon = tok.find(':');
            if (colon == std::string::npos) parse_fail(source, lineno, "expected idx:val, got '" + tok + "'");
            const std::string_view idx_s(tok.data(), colon);
            std::size_t idx = 0;
            const auto [ptr, ec] = std::from_chars(idx_s.data(), idx_s.data() + idx_s.size(), idx);
            if (ec != std::errc() || ptr != idx_s.data() + idx_s.size() || idx == 0) {
                parse_fail(source, lineno, "bad feature index in '" + tok + "'");
            }
            double v;
            if (!parse_number(std::string_view(tok).substr(colon + 1), v)) {
                parse_fail(source, lineno, "bad feature value in '" + tok + "'");
            }
            row.emplace_back(idx - 1, v);
            d = std::max(d, idx);
        }
        entries.push_back(std::move(row));
    }
    if (entries.empty()) throw Error(ErrorKind::EmptyInput, source + ": no data rows");
    RawDataset raw;
    raw.matrix = RowMat::Zero(static_cast<Eigen::Index>(entries.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < entries.size(); ++i)
        for (const auto& [c, v] : entries[i]) raw.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = v;
    raw.labels = std::move(labels);
    raw.source = source;
    return raw;
}

RawDataset load(const fs::path& path, DataFormat format, LabelColumn label_col) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    std::istringstream text(bytes);
    RawDataset raw = format == DataFormat::Csv ? parse_csv(text, path.string(), label_col)
                                               : parse_libsvm(text, path.string());
    raw.sha256 = sha256_hex(bytes);
    return raw;
}

void write_csv(const fs::path& path, const RawDataset& raw, LabelColumn label_col) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    const bool with_labels = label_col == LabelColumn::Last && raw.labels;
    for (Eigen::Index i = 0; i < raw.matrix.rows(); ++i) {
        for (Eigen::Index c = 0; c < raw.matrix.cols(); ++c) {
            if (c) out << ',';
            out << format_double(raw.matrix(i, c));
        }
        if (with_labels) out << ',' << (*raw.labels)[static_cast<std::size_t>(i)];
        out << '\n';
    }
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

void write_libsvm(const fs::path& path, const RawDataset& raw) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + path.string());
    for (Eigen::Index i = 0; i < raw.matrix.rows(); ++i) {
        out << (raw.labels ? (*raw.labels)[static_cast<std::size_t>(i)] : 0);
        for (Eigen::Index c = 0; c < raw.matrix.cols(); ++c) {
            // the last column is always written so the width survives a round trip
            if (raw.matrix(i, c) != 0.0 || c + 1 == raw.matrix.cols()) {
                out << ' ' << (c + 1) << ':' << format_double(raw.matrix(i, c));
            }
        }
        out << '\n';
    }
    if (!out) throw Error(ErrorKind::IoError, "write failed for " + path.string());
}

PointSet normalize_to_unit_ball(const RawDataset& raw, Normalization* info) {
    if (raw.matrix.rows() < 1) throw Error(ErrorKind::EmptyInput, "dataset has no points");
    const Vec lo = raw.matrix.colwise().minCoeff().transpose();
    const Vec hi = raw.matrix.colwise().maxCoeff().transpose();
    const Vec shift = -0.5 * (lo + hi);
    RowMat pts = raw.matrix.rowwise() + shift.transpose();
    double max_norm = 0.0;
    for (Eigen::Index i = 0; i < pts.rows(); ++i) max_norm = std::max(max_norm, pts.row(i).norm());
    const double scale = max_norm > 1.0 ? 1.0 / max_norm : 1.0;
    if (scale != 1.0) pts *= scale;
    if (info) {
        info->shift = shift;
        info->scale = scale;
    }
    return PointSet(std::move(pts), raw.source);
}

std::string sha256_hex(std::string_view bytes) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw Error(ErrorKind::IoError, "SHA-256 computation failed");
    }
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 15];
    }
    return out;
}

std::string sha256_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return sha256_hex(buf.str());
}

namespace {

std::size_t write_to_file(char* data, std::size_t size, std::size_t nmemb, void* user) {
    auto* out = static_cast<std::FILE*>(user);
    return std::fwrite(data, size, nmemb, out);
}

void curl_init_once() {
    static std::once_flag flag;
    std::call_once(flag, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

}  // namespace

fs::path fetch(const std::string& url, const std::string& sha256, const fs::path& dest) {
    if (fs::exists(dest) && !sha256.empty() && sha256_file(dest) == sha256) return dest;
    if (dest.has_parent_path()) fs::create_directories(dest.parent_path());
    const fs::path tmp = dest.string() + ".part-" + std::to_string(::getpid());

    std::FILE* out = std::fopen(tmp.c_str(), "wb");
    if (!out) throw Error(ErrorKind::IoError, "cannot write " + tmp.string());
    curl_init_once();
    CURL* curl = curl_easy_init();
    if (!curl) {
        std::fclose(out);
        fs::remove(tmp);
        throw Error(ErrorKind::NetworkError, "curl initialisation failed");
    }
    curl_easy_setopt(curl, CURLOPT_URL, url.c_str());
    curl_easy_setopt(curl, CURLOPT_WRITEFUNCTION, write_to_file);
    curl_easy_setopt(curl, CURLOPT_WRITEDATA, out);
    curl_easy_setopt(curl, CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(curl, CURLOPT_FAILONERROR, 1L);
    const CURLcode rc = curl_easy_perform(curl);
    curl_easy_cleanup(curl);
    const bool closed = std::fclose(out) == 0;
    if (rc != CURLE_OK || !closed) {
        fs::remove(tmp);
        throw Error(ErrorKind::NetworkError, url + ": " + (rc != CURLE_OK ? curl_easy_strerror(rc) : "write failed"));
    }
    if (!sha256.empty()) {
        const std::string got = sha256_file(tmp);
        if (got != sha256) {
            fs::remove(tmp);
            throw Error(ErrorKind::ChecksumMismatch, url + ": expected sha256 " + sha256 + ", got " + got);
        }
    }
    fs::rename(tmp, dest);
    return dest;
}

}  // namespace riskbench
