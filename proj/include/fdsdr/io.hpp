#pragma once

#include "fdsdr/error.hpp"
#include "fdsdr/estimator.hpp"
#include "fdsdr/linalg.hpp"
#include "fdsdr/metric_spaces.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

// =============================================================================
// CSV formats
//
//   matrix files (X.csv, truth.csv, beta_hat.csv, projected.csv): one row per
//   line, comma separated, no header.
//   responses.csv: one response per line.
//     vector / sphere  - the coordinates
//     quantile         - m non-decreasing quantile values on the midpoint grid
//     symmatrix        - q*q row-major entries; first line is the header "# q=<q>"
//   Lines starting with '#' are comments except the symmatrix header.
// =============================================================================

namespace fdsdr::io {

inline std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<double> parse_row(std::string_view line, const std::string& path, std::size_t line_no) {
    std::vector<double> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::string_view field = trim(line.substr(start, comma == std::string_view::npos ? line.npos : comma - start));
        double v = 0.0;
        const auto res = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || res.ec != std::errc() || res.ptr != field.data() + field.size())
            throw Error(ErrorKind::Parse, path + ":" + std::to_string(line_no) + ": cannot parse '" +
                                              std::string(field) + "' as a number");
        out.push_back(v);
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

struct CsvRow {
    std::size_t line_no;
    std::vector<double> values;
};

struct CsvContent {
    std::vector<std::string> comments;
    std::vector<CsvRow> rows;
};

inline CsvContent read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Parse, "cannot open " + path);
    CsvContent content;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '#') {
            content.comments.emplace_back(t);
            continue;
        }
        content.rows.push_back({line_no, parse_row(t, path, line_no)});
    }
    return content;
}

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorKind::InvalidInput, "cannot write " + path);
    return out;
}

inline void write_row(std::ostream& out, const auto& values, Index count) {
    for (Index j = 0; j < count; ++j) {
        if (j) out << ',';
        out << format_double(values(j));
    }
    out << '\n';
}

}  // namespace detail

inline Matrix read_matrix_csv(const std::string& path) {
    const auto content = detail::read_csv(path);
    if (content.rows.empty()) throw Error(ErrorKind::Parse, path + ": no data rows");
    const std::size_t cols = content.rows.front().values.size();
    Matrix m(static_cast<Index>(content.rows.size()), static_cast<Index>(cols));
    for (std::size_t i = 0; i < content.rows.size(); ++i) {
        const auto& row = content.rows[i];
        if (row.values.size() != cols)
            throw Error(ErrorKind::Parse, path + ":" + std::to_string(row.line_no) + ": expected " +
                                              std::to_string(cols) + " columns, found " +
                                              std::to_string(row.values.size()));
        for (std::size_t j = 0; j < cols; ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = row.values[j];
    }
    return m;
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
    auto out = detail::open_for_write(path);
    for (Index i = 0; i < m.rows(); ++i) detail::write_row(out, m.row(i), m.cols());
}

/// Parses responses of an explicitly declared kind. Sphere rows within 1e-6
/// of unit norm are renormalized; anything further off is rejected.
inline ResponseSample read_responses(const std::string& path, ResponseKind kind) {
    const auto content = detail::read_csv(path);
    if (content.rows.empty()) throw Error(ErrorKind::Parse, path + ": no data rows");

    Index q = 0;
    if (kind == ResponseKind::SymMatrix) {
        for (const auto& c : content.comments) {
            const auto pos = c.find("q=");
            if (pos != std::string::npos) q = std::stol(c.substr(pos + 2));
        }
        if (q <= 0) throw Error(ErrorKind::Parse, path + ": symmatrix file needs a '# q=<dim>' header");
    }

    std::vector<ResponseObject> objects;
    objects.reserve(content.rows.size());
    const std::size_t width = content.rows.front().values.size();
    for (std::size_t i = 0; i < content.rows.size(); ++i) {
        const auto& row = content.rows[i];
        const std::string where = path + ":" + std::to_string(row.line_no) + " (response " + std::to_string(i) + ")";
        if (row.values.size() != width)
            throw Error(ErrorKind::Parse, where + ": expected " + std::to_string(width) + " values, found " +
                                              std::to_string(row.values.size()));
        const Vector v = Eigen::Map<const Vector>(row.values.data(), static_cast<Index>(row.values.size()));
        try {
            switch (kind) {
                case ResponseKind::Vector: objects.emplace_back(VectorPoint{v}); break;
                case ResponseKind::Quantile: objects.emplace_back(QuantileDistribution(v)); break;
                case ResponseKind::Sphere: {
                    if (std::abs(v.norm() - 1.0) > 1e-6)
                        throw Error(ErrorKind::InvalidInput, "sphere row does not have unit norm");
                    // Rows already unit to working precision are kept bit-exact.
                    if (std::abs(v.norm() - 1.0) <= kSphereNormTolerance)
                        objects.emplace_back(SpherePoint(v));
                    else
                        objects.emplace_back(SpherePoint::from_direction(v));
                    break;
                }
                case ResponseKind::SymMatrix: {
                    if (v.size() != q * q)
                        throw Error(ErrorKind::InvalidInput, "expected q*q = " + std::to_string(q * q) + " values");
                    Matrix m(q, q);
                    for (Index a = 0; a < q; ++a)
                        for (Index b = 0; b < q; ++b) m(a, b) = v(a * q + b);
                    objects.emplace_back(SymMatrixPoint{SymMatrix(m)});
                    break;
                }
            }
        } catch (const Error& e) {
            throw Error(ErrorKind::Parse, where + ": " + e.what());
        }
    }
    return ResponseSample(std::move(objects));
}

inline void write_responses(const std::string& path, const ResponseSample& sample) {
    auto out = detail::open_for_write(path);
    if (sample.empty()) return;
    if (sample.kind() == ResponseKind::SymMatrix) out << "# q=" << shape_of(sample[0]) << '\n';
    for (const auto& obj : sample.objects()) {
        std::visit(
            [&](const auto& o) {
                using T = std::decay_t<decltype(o)>;
                if constexpr (std::is_same_v<T, VectorPoint>) {
                    detail::write_row(out, o.values, o.values.size());
                } else if constexpr (std::is_same_v<T, SymMatrixPoint>) {
                    const Matrix& m = o.value.matrix();
                    const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
                    const Eigen::Map<const Vector> flat(rm.data(), rm.size());
                    detail::write_row(out, flat, flat.size());
                } else {
                    detail::write_row(out, o.values(), o.values().size());
                }
            },
            obj);
    }
}

inline void ensure_directory(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error(ErrorKind::InvalidInput, "cannot create directory " + dir + ": " + ec.message());
}

}  // namespace fdsdr::io
