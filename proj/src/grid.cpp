#include "heattrack/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "heattrack/error.hpp"

namespace heattrack {

namespace {

void require_finite(std::span<const double> values, const char* what) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i])) {
            throw Error(ErrorKind::InvalidSignal,
                        std::string(what) + " has a non-finite value at node " + std::to_string(i));
        }
    }
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_for_write(const std::filesystem::path& path, const std::vector<std::string>& comment) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorKind::Io, "cannot open " + path.string() + " for writing");
    for (const auto& line : comment) out << "# " << line << '\n';
    return out;
}

struct CsvColumns {
    std::vector<double> first;
    std::vector<double> second;
};

// Two-column numeric CSV with a named header; blank and '#' lines skipped.
CsvColumns read_two_columns(const std::filesystem::path& path, const std::string& expected_header) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    CsvColumns cols;
    std::string line;
    int line_no = 0;
    bool seen_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!seen_header) {
            if (line != expected_header) {
                throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(line_no) + ": expected header '" +
                                               expected_header + "', got '" + line + "'");
            }
            seen_header = true;
            continue;
        }
        const auto comma = line.find(',');
        if (comma == std::string::npos || line.find(',', comma + 1) != std::string::npos) {
            throw Error(ErrorKind::Io,
                        path.string() + ":" + std::to_string(line_no) + ": expected two fields in '" + line + "'");
        }
        double a = 0.0;
        double b = 0.0;
        try {
            std::size_t pa = 0;
            std::size_t pb = 0;
            const std::string sa = line.substr(0, comma);
            const std::string sb = line.substr(comma + 1);
            a = std::stod(sa, &pa);
            b = std::stod(sb, &pb);
            if (pa != sa.size() || pb != sb.size()) throw std::invalid_argument("trailing characters");
        } catch (const std::exception&) {
            throw Error(ErrorKind::Io,
                        path.string() + ":" + std::to_string(line_no) + ": cannot parse numbers in '" + line + "'");
        }
        if (!std::isfinite(a) || !std::isfinite(b)) {
            throw Error(ErrorKind::Io, path.string() + ":" + std::to_string(line_no) + ": non-finite value");
        }
        cols.first.push_back(a);
        cols.second.push_back(b);
    }
    if (!seen_header) throw Error(ErrorKind::Io, path.string() + ": missing header '" + expected_header + "'");
    return cols;
}

void require_uniform(const std::vector<double>& nodes, double start, double h, const std::filesystem::path& path) {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const double expected = start + h * static_cast<double>(i);
        if (std::abs(nodes[i] - expected) > 1e-9 * std::max(1.0, std::abs(expected))) {
            throw Error(ErrorKind::Io, path.string() + ": row " + std::to_string(i + 1) +
                                           " breaks the uniform grid (expected " + format_double(expected) + ")");
        }
    }
}

}  // namespace

TimeGrid::TimeGrid(double t_end, int n_steps) : t_end_(t_end), n_steps_(n_steps), dt_(t_end / n_steps) {
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw Error(ErrorKind::InvalidGrid, "t_end must be positive");
    if (n_steps < 2) throw Error(ErrorKind::InvalidGrid, "n_steps must be at least 2");
}

SpaceGrid::SpaceGrid(double length, int n_cells) : length_(length), n_cells_(n_cells), dx_(length / n_cells) {
    if (!(length > 0.0) || !std::isfinite(length)) throw Error(ErrorKind::InvalidGrid, "length must be positive");
    if (n_cells < 4) throw Error(ErrorKind::InvalidGrid, "n_cells must be at least 4");
}

PseudoTimeGrid::PseudoTimeGrid(double s_max, int n_half) : s_max_(s_max), n_half_(n_half), ds_(s_max / n_half) {
    if (!(s_max > 0.0) || !std::isfinite(s_max)) throw Error(ErrorKind::InvalidGrid, "s_max must be positive");
    if (n_half < 2) throw Error(ErrorKind::InvalidGrid, "n_half must be at least 2");
}

Signal::Signal(TimeGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) {
        throw Error(ErrorKind::InvalidSignal, "signal length " + std::to_string(values_.size()) +
                                                  " does not match grid size " + std::to_string(grid_.size()));
    }
    require_finite(values_, "signal");
}

Signal::Signal(TimeGrid grid) : grid_(grid), values_(grid.size(), 0.0) {}

double Signal::sample(double t) const {
    return cubic_interpolate(values_, 0.0, grid_.dt(), std::clamp(t, 0.0, grid_.t_end()));
}

WaveSignal::WaveSignal(PseudoTimeGrid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw Error(ErrorKind::InvalidSignal, "wave signal length mismatch");
    require_finite(values_, "wave signal");
}

double WaveSignal::sample(double s) const {
    return cubic_interpolate(values_, -grid_.s_max(), grid_.ds(), std::clamp(s, -grid_.s_max(), grid_.s_max()));
}

HeatField::HeatField(TimeGrid tgrid, SpaceGrid xgrid, std::vector<double> values)
    : tgrid_(tgrid), xgrid_(xgrid), values_(std::move(values)) {
    if (values_.size() != tgrid_.size() * xgrid_.size()) throw Error(ErrorKind::InvalidInput, "field size mismatch");
    require_finite(values_, "field");
}

HeatField::HeatField(TimeGrid tgrid, SpaceGrid xgrid)
    : tgrid_(tgrid), xgrid_(xgrid), values_(tgrid.size() * xgrid.size(), 0.0) {}

WaveField::WaveField(PseudoTimeGrid sgrid, SpaceGrid xgrid)
    : sgrid_(sgrid), xgrid_(xgrid), values_(sgrid.size() * xgrid.size(), 0.0) {}

WaveSignal WaveField::column(std::size_t j) const {
    std::vector<double> v(sgrid_.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = (*this)(k, j);
    return WaveSignal(sgrid_, std::move(v));
}

std::vector<double> trapezoid_weights(const TimeGrid& grid) {
    std::vector<double> w(grid.size(), grid.dt());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

double inner_product(const Signal& a, const Signal& b) {
    if (!(a.grid() == b.grid())) throw Error(ErrorKind::IncompatibleGrid, "inner product on different grids");
    const auto w = trapezoid_weights(a.grid());
    double sum = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) sum += w[i] * a[i] * b[i];
    return sum;
}

double signal_norm(const Signal& s, NormKind kind) {
    const auto v = s.values();
    double sup = 0.0;
    for (double x : v) sup = std::max(sup, std::abs(x));
    switch (kind) {
        case NormKind::Sup:
            return sup;
        case NormKind::L2:
            return std::sqrt(inner_product(s, s));
        case NormKind::W1Inf: {
            const double h = s.grid().dt();
            const std::size_t n = v.size();
            double dmax = std::abs(-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
            dmax = std::max(dmax, std::abs(3.0 * v[n - 1] - 4.0 * v[n - 2] + v[n - 3]) / (2.0 * h));
            for (std::size_t i = 1; i + 1 < n; ++i) dmax = std::max(dmax, std::abs(v[i + 1] - v[i - 1]) / (2.0 * h));
            return std::max(sup, dmax);
        }
    }
    return sup;
}

Signal flux_at_left(const HeatField& field) {
    if (field.xgrid().n_cells() < 4) throw Error(ErrorKind::GridTooCoarse, "flux stencil needs 4 cells");
    const double scale = 1.0 / (12.0 * field.xgrid().dx());
    std::vector<double> out(field.tgrid().size());
    for (std::size_t n = 0; n < out.size(); ++n) {
        const auto y = field.row(n);
        out[n] = (-25.0 * y[0] + 48.0 * y[1] - 36.0 * y[2] + 16.0 * y[3] - 3.0 * y[4]) * scale;
    }
    return Signal(field.tgrid(), std::move(out));
}

CubicStencil cubic_stencil(std::size_t size, double origin, double h, double x) {
    const auto n = static_cast<long>(size);
    if (n < 4) throw Error(ErrorKind::InvalidGrid, "cubic interpolation needs 4 nodes");
    const double u = (x - origin) / h;
    const double nearest = std::round(u);
    if (std::abs(u - nearest) < 1e-12 && nearest >= 0 && nearest < n) {
        const long i = static_cast<long>(nearest);
        const long i0 = std::clamp(i - 1, 0L, n - 4);
        CubicStencil st{static_cast<std::size_t>(i0), {0.0, 0.0, 0.0, 0.0}};
        st.weights[i - i0] = 1.0;
        return st;
    }
    const long i0 = std::clamp(static_cast<long>(std::floor(u)) - 1, 0L, n - 4);
    const double p = u - static_cast<double>(i0);  // position relative to node i0
    return {static_cast<std::size_t>(i0),
            {-(p - 1.0) * (p - 2.0) * (p - 3.0) / 6.0, p * (p - 2.0) * (p - 3.0) / 2.0,
             -p * (p - 1.0) * (p - 3.0) / 2.0, p * (p - 1.0) * (p - 2.0) / 6.0}};
}

double cubic_interpolate(std::span<const double> values, double origin, double h, double x) {
    if (values.size() < 4) {
        const auto n = static_cast<long>(values.size());
        const double u = (x - origin) / h;
        const long i = std::clamp(static_cast<long>(std::floor(u)), 0L, n - 2);
        const double f = u - static_cast<double>(i);
        return (1.0 - f) * values[i] + f * values[i + 1];
    }
    const CubicStencil st = cubic_stencil(values.size(), origin, h, x);
    const double* v = values.data() + st.first;
    return st.weights[0] * v[0] + st.weights[1] * v[1] + st.weights[2] * v[2] + st.weights[3] * v[3];
}

Signal resample(const Signal& s, const TimeGrid& new_grid) {
    if (std::abs(s.grid().t_end() - new_grid.t_end()) > 1e-12 * s.grid().t_end()) {
        throw Error(ErrorKind::IncompatibleGrid, "resample requires equal horizons");
    }
    std::vector<double> out(new_grid.size());
    for (int i = 0; i <= new_grid.n_steps(); ++i) out[i] = s.sample(new_grid.node(i));
    out.front() = s.values().front();
    out.back() = s.values().back();
    return Signal(new_grid, std::move(out));
}

void write_signal_csv(const std::filesystem::path& path, const Signal& s, const std::vector<std::string>& comment) {
    auto out = open_for_write(path, comment);
    out << "t,value\n";
    for (int i = 0; i <= s.grid().n_steps(); ++i) out << format_double(s.grid().node(i)) << ',' << format_double(s[i]) << '\n';
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_wave_signal_csv(const std::filesystem::path& path, const WaveSignal& s,
                           const std::vector<std::string>& comment) {
    auto out = open_for_write(path, comment);
    out << "s,value\n";
    for (std::size_t k = 0; k < s.grid().size(); ++k) {
        out << format_double(s.grid().node(static_cast<int>(k))) << ',' << format_double(s[k]) << '\n';
    }
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

void write_field_csv(const std::filesystem::path& path, const HeatField& field, const std::vector<std::string>& comment) {
    auto out = open_for_write(path, comment);
    out << "t,x,value\n";
    for (int n = 0; n <= field.tgrid().n_steps(); ++n) {
        const std::string t = format_double(field.tgrid().node(n));
        for (int j = 0; j <= field.xgrid().n_cells(); ++j) {
            out << t << ',' << format_double(field.xgrid().node(j)) << ',' << format_double(field(n, j)) << '\n';
        }
    }
    if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

Signal read_signal_csv(const std::filesystem::path& path) {
    auto cols = read_two_columns(path, "t,value");
    if (cols.first.size() < 3) throw Error(ErrorKind::Io, path.string() + ": need at least 3 rows");
    if (cols.first.front() != 0.0) throw Error(ErrorKind::Io, path.string() + ": row 1 must start at t = 0");
    const int n_steps = static_cast<int>(cols.first.size()) - 1;
    const TimeGrid grid(cols.first.back(), n_steps);
    require_uniform(cols.first, 0.0, grid.dt(), path);
    return Signal(grid, std::move(cols.second));
}

WaveSignal read_wave_signal_csv(const std::filesystem::path& path) {
    auto cols = read_two_columns(path, "s,value");
    if (cols.first.size() < 5 || cols.first.size() % 2 == 0) {
        throw Error(ErrorKind::Io, path.string() + ": need an odd number (>= 5) of rows on a symmetric grid");
    }
    const double s_max = cols.first.back();
    if (std::abs(cols.first.front() + s_max) > 1e-9 * std::max(1.0, s_max)) {
        throw Error(ErrorKind::Io, path.string() + ": s grid must be symmetric about 0");
    }
    const int n_half = static_cast<int>(cols.first.size() / 2);
    const PseudoTimeGrid grid(s_max, n_half);
    require_uniform(cols.first, -s_max, grid.ds(), path);
    return WaveSignal(grid, std::move(cols.second));
}

}  // namespace heattrack
