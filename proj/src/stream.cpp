#include "sipkit/stream.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace sipkit {

using detail::keyed;
using detail::keyed_int;
using detail::split_ws;
using detail::to_int;
using detail::trim;

GridPoint make_point(std::initializer_list<std::int64_t> coords) {
    GridPoint p(static_cast<Eigen::Index>(coords.size()));
    Eigen::Index i = 0;
    for (auto c : coords) p(i++) = c;
    return p;
}

GridUniverse::GridUniverse(std::int64_t m, int d) : m_(m), d_(d), size_(1) {
    if (m < 1) throw std::invalid_argument("grid side must be positive");
    if (d < 1 || d > kMaxDim) throw std::invalid_argument("grid dimension out of range");
    for (int i = 0; i < d; ++i) {
        if (size_ > (std::uint64_t{1} << 40) / static_cast<std::uint64_t>(m))
            throw std::invalid_argument("grid universe too large");
        size_ *= static_cast<std::uint64_t>(m);
    }
}

bool GridUniverse::contains(const GridPoint& p) const {
    if (p.size() != d_) return false;
    for (int i = 0; i < d_; ++i)
        if (p(i) < 0 || p(i) >= m_) return false;
    return true;
}

std::uint64_t GridUniverse::encode(const GridPoint& p) const {
    if (!contains(p)) throw std::out_of_range("point outside grid");
    std::uint64_t idx = 0;
    for (int i = d_ - 1; i >= 0; --i) idx = idx * static_cast<std::uint64_t>(m_) + static_cast<std::uint64_t>(p(i));
    return idx;
}

GridPoint GridUniverse::decode(std::uint64_t index) const {
    if (index >= size_) throw std::out_of_range("grid index out of range");
    GridPoint p(d_);
    for (int i = 0; i < d_; ++i) {
        p(i) = static_cast<std::int64_t>(index % static_cast<std::uint64_t>(m_));
        index /= static_cast<std::uint64_t>(m_);
    }
    return p;
}

MetricSpace::MetricSpace(Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> dist) : dist_(std::move(dist)) {
    const auto m = dist_.rows();
    if (m < 1 || dist_.cols() != m) throw std::invalid_argument("metric must be a non-empty square matrix");
    for (Eigen::Index a = 0; a < m; ++a) {
        if (dist_(a, a) != 0) throw std::invalid_argument("metric diagonal must be zero");
        for (Eigen::Index b = 0; b < m; ++b) {
            if (dist_(a, b) < 0) throw std::invalid_argument("metric distances must be non-negative");
            if (dist_(a, b) != dist_(b, a)) throw std::invalid_argument("metric must be symmetric");
            for (Eigen::Index c = 0; c < m; ++c)
                if (dist_(a, c) > dist_(a, b) + dist_(b, c))
                    throw std::invalid_argument("metric violates the triangle inequality");
        }
    }
}

std::vector<std::int64_t> MetricSpace::distinct_distances() const {
    std::vector<std::int64_t> out(dist_.data(), dist_.data() + dist_.size());
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

MetricSpace read_metric(std::istream& in) {
    std::string raw;
    std::size_t line = 0;
    std::string first;
    while (first.empty() && std::getline(in, raw)) {
        ++line;
        first = trim(raw);
    }
    if (first.empty()) throw ParseError(line, "missing metric header");
    const auto m = keyed_int(first, "m", line);
    if (m < 1) throw ParseError(line, "metric size must be positive");
    Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> dist(m, m);
    std::int64_t row = 0;
    while (row < m && std::getline(in, raw)) {
        ++line;
        auto t = trim(raw);
        if (t.empty()) continue;
        auto toks = split_ws(t);
        if (static_cast<std::int64_t>(toks.size()) != m) throw ParseError(line, "metric row has wrong length");
        for (std::int64_t c = 0; c < m; ++c) {
            auto v = to_int(toks[static_cast<std::size_t>(c)]);
            if (!v) throw ParseError(line, "bad distance '" + toks[static_cast<std::size_t>(c)] + "'");
            dist(row, c) = *v;
        }
        ++row;
    }
    if (row != m) throw ParseError(line, "metric file truncated");
    return MetricSpace(std::move(dist));
}

MetricSpace load_metric(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open metric file " + path);
    return read_metric(in);
}

void write_metric(std::ostream& out, const MetricSpace& metric) {
    out << "m=" << metric.size() << "\n";
    for (int a = 0; a < metric.size(); ++a) {
        for (int b = 0; b < metric.size(); ++b) out << (b ? " " : "") << metric(a, b);
        out << "\n";
    }
}

StreamReader::StreamReader(std::istream& in) : in_(in) {
    std::string first;
    if (!next_content_line(first)) throw ParseError(line_, "missing stream header");
    auto toks = split_ws(first);
    if (toks[0] == "grid") {
        if (toks.size() != 3) throw ParseError(line_, "grid header needs m= and d=");
        header_.kind = StreamKind::Grid;
        header_.m = keyed_int(toks[1], "m", line_);
        header_.d = static_cast<int>(keyed_int(toks[2], "d", line_));
        try {
            grid_.emplace(header_.m, header_.d);
        } catch (const std::exception& e) {
            throw ParseError(line_, e.what());
        }
        header_.universe = grid_->size();
    } else if (toks[0] == "metric") {
        if (toks.size() != 2) throw ParseError(line_, "metric header needs file=");
        header_.kind = StreamKind::Metric;
        header_.metric_path = keyed(toks[1], "file", line_);
    } else {
        if (toks.size() != 1) throw ParseError(line_, "expected u=<int>");
        header_.kind = StreamKind::Updates;
        auto u = keyed_int(toks[0], "u", line_);
        if (u < 1) throw ParseError(line_, "universe size must be positive");
        header_.universe = static_cast<std::uint64_t>(u);
    }
}

bool StreamReader::next_content_line(std::string& out) {
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_;
        out = trim(raw);
        if (!out.empty()) return true;
    }
    return false;
}

std::optional<StreamUpdate> StreamReader::next() {
    std::string t;
    if (!next_content_line(t)) return std::nullopt;
    auto toks = split_ws(t);
    switch (header_.kind) {
        case StreamKind::Updates: {
            if (toks.size() != 2) throw ParseError(line_, "expected '<index> <delta>'");
            auto idx = to_int(toks[0]);
            auto delta = to_int(toks[1]);
            if (!idx || *idx < 0) throw ParseError(line_, "bad index '" + toks[0] + "'");
            if (!delta) throw ParseError(line_, "bad delta '" + toks[1] + "'");
            if (static_cast<std::uint64_t>(*idx) >= header_.universe)
                throw ParseError(line_, "index " + toks[0] + " outside universe of size " +
                                            std::to_string(header_.universe));
            return StreamUpdate{static_cast<std::uint64_t>(*idx), *delta};
        }
        case StreamKind::Grid: {
            if (static_cast<int>(toks.size()) != header_.d) throw ParseError(line_, "wrong number of coordinates");
            GridPoint p(header_.d);
            for (int i = 0; i < header_.d; ++i) {
                auto c = to_int(toks[static_cast<std::size_t>(i)]);
                if (!c) throw ParseError(line_, "bad coordinate '" + toks[static_cast<std::size_t>(i)] + "'");
                p(i) = *c;
            }
            if (!grid_->contains(p)) throw ParseError(line_, "point outside grid");
            return StreamUpdate{grid_->encode(p), 1};
        }
        case StreamKind::Metric: {
            if (toks.size() != 1) throw ParseError(line_, "expected one metric element per line");
            auto idx = to_int(toks[0]);
            if (!idx || *idx < 0) throw ParseError(line_, "bad element '" + toks[0] + "'");
            if (header_.universe != 0 && static_cast<std::uint64_t>(*idx) >= header_.universe)
                throw ParseError(line_, "element outside metric space");
            return StreamUpdate{static_cast<std::uint64_t>(*idx), 1};
        }
    }
    return std::nullopt;
}

std::vector<StreamUpdate> parse_stream(std::istream& in, StreamHeader* header) {
    StreamReader reader(in);
    if (header) *header = reader.header();
    std::vector<StreamUpdate> out;
    while (auto upd = reader.next()) out.push_back(*upd);
    return out;
}

std::vector<std::int64_t> frequencies(const std::vector<StreamUpdate>& updates, std::uint64_t u) {
    std::vector<std::int64_t> a(u, 0);
    for (const auto& upd : updates) {
        if (upd.index >= u) throw std::out_of_range("update index outside universe");
        a[upd.index] += upd.delta;
    }
    return a;
}

std::vector<GridPoint> read_points(std::istream& in, GridUniverse* grid_out) {
    StreamReader reader(in);
    if (reader.header().kind != StreamKind::Grid) throw ParseError(reader.line(), "expected a grid point stream");
    GridUniverse grid(reader.header().m, reader.header().d);
    std::vector<GridPoint> pts;
    while (auto upd = reader.next()) pts.push_back(grid.decode(upd->index));
    if (grid_out) *grid_out = grid;
    return pts;
}

}  // namespace sipkit
