#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace heattrack {

/// Uniform grid on [0, T] with nodes t_i = i * dt, i = 0..n_steps.
class TimeGrid {
public:
    TimeGrid(double t_end, int n_steps);

    double t_end() const noexcept { return t_end_; }
    int n_steps() const noexcept { return n_steps_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_steps_) + 1; }
    double node(int i) const noexcept {
        return i == n_steps_ ? t_end_ : t_end_ * static_cast<double>(i) / n_steps_;
    }

    bool operator==(const TimeGrid&) const = default;

private:
    double t_end_;
    int n_steps_;
    double dt_;
};

/// Uniform grid on [0, L] with nodes x_j = j * dx, j = 0..n_cells.
class SpaceGrid {
public:
    SpaceGrid(double length, int n_cells);

    double length() const noexcept { return length_; }
    int n_cells() const noexcept { return n_cells_; }
    double dx() const noexcept { return dx_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(n_cells_) + 1; }
    double node(int j) const noexcept {
        return j == n_cells_ ? length_ : length_ * static_cast<double>(j) / n_cells_;
    }

    bool operator==(const SpaceGrid&) const = default;

private:
    double length_;
    int n_cells_;
    double dx_;
};

/// Symmetric pseudo-time grid on [-S, S] for the wave side of the transmutation;
/// node k sits at s = -S + k * ds, k = 0..2*n_half.
class PseudoTimeGrid {
public:
    PseudoTimeGrid(double s_max, int n_half);

    double s_max() const noexcept { return s_max_; }
    int n_half() const noexcept { return n_half_; }
    double ds() const noexcept { return ds_; }
    std::size_t size() const noexcept { return 2 * static_cast<std::size_t>(n_half_) + 1; }
    double node(int k) const noexcept { return s_max_ * static_cast<double>(k - n_half_) / n_half_; }

    bool operator==(const PseudoTimeGrid&) const = default;

private:
    double s_max_;
    int n_half_;
    double ds_;
};

/// Nodal samples of a time signal. Immutable after construction.
class Signal {
public:
    Signal(TimeGrid grid, std::vector<double> values);
    explicit Signal(TimeGrid grid);  // zero signal

    const TimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    /// Piecewise-cubic reconstruction; clamps t to [0, T].
    double sample(double t) const;

private:
    TimeGrid grid_;
    std::vector<double> values_;
};

/// Nodal samples of a signal over the pseudo-time grid.
class WaveSignal {
public:
    WaveSignal(PseudoTimeGrid grid, std::vector<double> values);

    const PseudoTimeGrid& grid() const noexcept { return grid_; }
    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    double sample(double s) const;

private:
    PseudoTimeGrid grid_;
    std::vector<double> values_;
};

/// Space-time array indexed (time node, space node), row-major in time.
class HeatField {
public:
    HeatField(TimeGrid tgrid, SpaceGrid xgrid, std::vector<double> values);
    HeatField(TimeGrid tgrid, SpaceGrid xgrid);  // zero field

    const TimeGrid& tgrid() const noexcept { return tgrid_; }
    const SpaceGrid& xgrid() const noexcept { return xgrid_; }
    double operator()(std::size_t n, std::size_t j) const noexcept { return values_[n * xgrid_.size() + j]; }
    double& operator()(std::size_t n, std::size_t j) noexcept { return values_[n * xgrid_.size() + j]; }
    std::span<const double> row(std::size_t n) const noexcept {
        return {values_.data() + n * xgrid_.size(), xgrid_.size()};
    }
    std::span<double> row(std::size_t n) noexcept { return {values_.data() + n * xgrid_.size(), xgrid_.size()}; }
    std::span<const double> values() const noexcept { return values_; }

private:
    TimeGrid tgrid_;
    SpaceGrid xgrid_;
    std::vector<double> values_;
};

/// Wave state indexed (pseudo-time node, space node).
class WaveField {
public:
    WaveField(PseudoTimeGrid sgrid, SpaceGrid xgrid);

    const PseudoTimeGrid& sgrid() const noexcept { return sgrid_; }
    const SpaceGrid& xgrid() const noexcept { return xgrid_; }
    double operator()(std::size_t k, std::size_t j) const noexcept { return values_[k * xgrid_.size() + j]; }
    double& operator()(std::size_t k, std::size_t j) noexcept { return values_[k * xgrid_.size() + j]; }
    std::span<const double> row(std::size_t k) const noexcept {
        return {values_.data() + k * xgrid_.size(), xgrid_.size()};
    }
    std::span<double> row(std::size_t k) noexcept { return {values_.data() + k * xgrid_.size(), xgrid_.size()}; }

    /// Column j as a signal over s.
    WaveSignal column(std::size_t j) const;

private:
    PseudoTimeGrid sgrid_;
    SpaceGrid xgrid_;
    std::vector<double> values_;
};

enum class NormKind { Sup, L2, W1Inf };

/// sup = max |v|; l2 = sqrt of the trapezoid integral of v^2; w1inf = max of the
/// sup norm and the sup of the finite-difference derivative (second order,
/// centered inside and one-sided at the ends). The last one approximates the
/// true W^{1,inf} norm from samples.
double signal_norm(const Signal& s, NormKind kind);

/// Trapezoid weights for the time grid: dt/2 at the ends, dt inside.
std::vector<double> trapezoid_weights(const TimeGrid& grid);

/// Trapezoid L2(0,T) inner product of two signals on the same grid.
double inner_product(const Signal& a, const Signal& b);

/// d/dx y(t, 0) from the one-sided five-point stencil
/// (-25 y0 + 48 y1 - 36 y2 + 16 y3 - 3 y4) / (12 dx), at every time node.
Signal flux_at_left(const HeatField& field);

/// Cubic resampling onto a grid with the same horizon.
Signal resample(const Signal& s, const TimeGrid& new_grid);

/// Four-point Lagrange interpolation on a uniform grid starting at `origin`
/// with spacing `h`. The stencil is shifted inward near the ends, so the
/// reconstruction is exact for cubics everywhere.
double cubic_interpolate(std::span<const double> values, double origin, double h, double x);

/// The stencil behind cubic_interpolate: value = sum_k weights[k] * values[first + k].
struct CubicStencil {
    std::size_t first;
    double weights[4];
};
CubicStencil cubic_stencil(std::size_t n, double origin, double h, double x);

// CSV I/O. `comment` lines are written first, each prefixed with "# ".
void write_signal_csv(const std::filesystem::path& path, const Signal& s,
                      const std::vector<std::string>& comment = {});
void write_field_csv(const std::filesystem::path& path, const HeatField& field,
                     const std::vector<std::string>& comment = {});
void write_wave_signal_csv(const std::filesystem::path& path, const WaveSignal& s,
                           const std::vector<std::string>& comment = {});

/// Reads a `t,value` CSV with uniform nodes starting at t = 0. Lines starting
/// with '#' are skipped. Malformed rows raise an Io error naming the line.
Signal read_signal_csv(const std::filesystem::path& path);

/// Reads an `s,value` CSV over a symmetric uniform grid [-S, S].
WaveSignal read_wave_signal_csv(const std::filesystem::path& path);

}  // namespace heattrack
