#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace sipkit {

/// One (index, delta) update to the frequency vector.
struct StreamUpdate {
    std::uint64_t index = 0;
    std::int64_t delta = 1;

    bool operator==(const StreamUpdate&) const = default;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline constexpr int kMaxDim = 4;

/// Integer grid point; dynamic size with a fixed upper bound, so no heap traffic.
using GridPoint = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1, 0, kMaxDim, 1>;

GridPoint make_point(std::initializer_list<std::int64_t> coords);

/// The discretized universe [m]^d with a point <-> index bijection
/// index = x_0 + m*x_1 + ... + m^{d-1}*x_{d-1}.
class GridUniverse {
public:
    GridUniverse(std::int64_t m, int d);

    std::int64_t m() const { return m_; }
    int d() const { return d_; }
    std::uint64_t size() const { return size_; }

    bool contains(const GridPoint& p) const;
    std::uint64_t encode(const GridPoint& p) const;
    GridPoint decode(std::uint64_t index) const;

private:
    std::int64_t m_;
    int d_;
    std::uint64_t size_;
};

/// Finite metric space given by an integer distance matrix.
class MetricSpace {
public:
    /// Validates symmetry, zero diagonal, non-negativity and the triangle inequality.
    explicit MetricSpace(Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> dist);

    int size() const { return static_cast<int>(dist_.rows()); }
    std::int64_t operator()(int a, int b) const { return dist_(a, b); }
    const auto& matrix() const { return dist_; }

    /// Sorted distinct distance values (0 included).
    std::vector<std::int64_t> distinct_distances() const;

private:
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> dist_;
};

/// Metric file: `m=<int>` followed by m rows of m integers.
MetricSpace read_metric(std::istream& in);
MetricSpace load_metric(const std::string& path);
void write_metric(std::ostream& out, const MetricSpace& metric);

enum class StreamKind { Updates, Grid, Metric };

struct StreamHeader {
    StreamKind kind = StreamKind::Updates;
    std::uint64_t universe = 0;  // u; m^d for grids; metric size for metric streams
    std::int64_t m = 0;
    int d = 0;
    std::string metric_path;
};

/// Single-pass reader over the text stream format. Holds one line at a time.
///
///   u=<int>                then `<index> <+1|-1>` per line
///   grid m=<int> d=<int>   then `<x_1> ... <x_d>` per line (one insertion each)
///   metric file=<path>     then `<element>` per line (one insertion each)
///
/// Blank lines and `#` comments are skipped.
class StreamReader {
public:
    explicit StreamReader(std::istream& in);

    const StreamHeader& header() const { return header_; }
    std::optional<StreamUpdate> next();
    std::size_t line() const { return line_; }

private:
    bool next_content_line(std::string& out);

    std::istream& in_;
    StreamHeader header_;
    std::optional<GridUniverse> grid_;
    std::size_t line_ = 0;
};

/// Reads the whole body; convenience over StreamReader.
std::vector<StreamUpdate> parse_stream(std::istream& in, StreamHeader* header = nullptr);

/// Exact aggregate a_i = sum of deltas for i.
std::vector<std::int64_t> frequencies(const std::vector<StreamUpdate>& updates, std::uint64_t u);

/// Grid point streams as points (deltas must be +1).
std::vector<GridPoint> read_points(std::istream& in, GridUniverse* grid_out = nullptr);

}  // namespace sipkit
