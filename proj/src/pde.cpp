#include "heattrack/pde.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>

#include "heattrack/error.hpp"

namespace heattrack {

HeatStepper::HeatStepper(const SpaceGrid& xgrid, const TimeGrid& tgrid)
    : m_(static_cast<std::size_t>(xgrid.n_cells()) - 1), r_(tgrid.dt() / (xgrid.dx() * xgrid.dx())) {
    implicit_ = factor(m_, 1.0 + 2.0 * r_, -r_);
    crank_nicolson_ = factor(m_, 1.0 + r_, -0.5 * r_);
}

HeatStepper::Factor HeatStepper::factor(std::size_t m, double diag, double off) {
    Factor f;
    f.off = off;
    f.c.resize(m);
    f.denom.resize(m);
    double prev_c = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        const double d = diag - off * prev_c;
        f.denom[i] = d;
        f.c[i] = off / d;
        prev_c = f.c[i];
    }
    return f;
}

void HeatStepper::solve_factored(const Factor& f, std::span<double> x) {
    const std::size_t m = x.size();
    x[0] /= f.denom[0];
    for (std::size_t i = 1; i < m; ++i) x[i] = (x[i] - f.off * x[i - 1]) / f.denom[i];
    for (std::size_t i = m - 1; i-- > 0;) x[i] -= f.c[i] * x[i + 1];
}

void HeatStepper::solve(int n, std::span<double> rhs) const {
    solve_factored(theta(n) == 1.0 ? implicit_ : crank_nicolson_, rhs);
}

void HeatStepper::apply_explicit(int n, std::span<const double> in, std::span<double> out) const {
    const double a = (1.0 - theta(n)) * r_;
    const std::size_t m = in.size();
    for (std::size_t i = 0; i < m; ++i) {
        const double lo = i > 0 ? in[i - 1] : 0.0;
        const double hi = i + 1 < m ? in[i + 1] : 0.0;
        out[i] = in[i] + a * (lo - 2.0 * in[i] + hi);
    }
}

void HeatStepper::step(int n, std::span<double> u, double left_n, double left_np1, double right_n,
                       double right_np1) const {
    const double th = theta(n);
    thread_local std::vector<double> rhs;
    rhs.resize(u.size());
    apply_explicit(n, u, rhs);
    rhs.front() += r_ * ((1.0 - th) * left_n + th * left_np1);
    rhs.back() += r_ * ((1.0 - th) * right_n + th * right_np1);
    solve(n, rhs);
    std::copy(rhs.begin(), rhs.end(), u.begin());
}

HeatField solve_heat_forward(const HeatProblem& p) {
    if (!(p.left_bc.grid() == p.tgrid) || !(p.right_bc.grid() == p.tgrid)) {
        throw Error(ErrorKind::IncompatibleGrid, "boundary signals must live on the problem time grid");
    }
    if (p.initial.size() != p.xgrid.size()) throw Error(ErrorKind::InvalidInput, "initial state size mismatch");
    for (double v : p.initial) {
        if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "non-finite initial data");
    }
    const double corner_left = std::abs(p.initial.front() - p.left_bc[0]);
    const double corner_right = std::abs(p.initial.back() - p.right_bc[0]);
    if (corner_left > 1e-8 || corner_right > 1e-8) {
        std::cerr << "warning: heat problem corner data incompatible (left " << corner_left << ", right "
                  << corner_right << ")\n";
    }

    const HeatStepper stepper(p.xgrid, p.tgrid);
    HeatField field(p.tgrid, p.xgrid);
    const std::size_t M = p.xgrid.size() - 1;
    std::vector<double> u(p.initial.begin() + 1, p.initial.end() - 1);
    {
        auto row = field.row(0);
        std::copy(p.initial.begin(), p.initial.end(), row.begin());
    }
    for (int n = 0; n < p.tgrid.n_steps(); ++n) {
        stepper.step(n, u, p.left_bc[n], p.left_bc[n + 1], p.right_bc[n], p.right_bc[n + 1]);
        auto row = field.row(n + 1);
        row[0] = p.left_bc[n + 1];
        std::copy(u.begin(), u.end(), row.begin() + 1);
        row[M] = p.right_bc[n + 1];
    }
    return field;
}

HeatField solve_heat_adjoint(const AdjointProblem& p) {
    const int N = p.tgrid.n_steps();
    auto reversed = [N](const Signal& s) {
        std::vector<double> v(s.size());
        for (int n = 0; n <= N; ++n) v[n] = s[N - n];
        return Signal(s.grid(), std::move(v));
    };
    if (!(p.left_bc.grid() == p.tgrid) || !(p.right_bc.grid() == p.tgrid)) {
        throw Error(ErrorKind::IncompatibleGrid, "boundary signals must live on the problem time grid");
    }
    const HeatProblem forward{p.xgrid, p.tgrid, reversed(p.left_bc), reversed(p.right_bc),
                              std::vector<double>(p.xgrid.size(), 0.0)};
    const HeatField tau_field = solve_heat_forward(forward);
    HeatField out(p.tgrid, p.xgrid);
    for (int n = 0; n <= N; ++n) {
        const auto src = tau_field.row(N - n);
        std::copy(src.begin(), src.end(), out.row(n).begin());
    }
    return out;
}

Signal flux_at_right(const HeatField& field) {
    if (field.xgrid().n_cells() < 4) throw Error(ErrorKind::GridTooCoarse, "flux stencil needs 4 cells");
    const double scale = 1.0 / (12.0 * field.xgrid().dx());
    const std::size_t M = field.xgrid().size() - 1;
    std::vector<double> out(field.tgrid().size());
    for (std::size_t n = 0; n < out.size(); ++n) {
        const auto y = field.row(n);
        out[n] = (25.0 * y[M] - 48.0 * y[M - 1] + 36.0 * y[M - 2] - 16.0 * y[M - 3] + 3.0 * y[M - 4]) * scale;
    }
    return Signal(field.tgrid(), std::move(out));
}

WaveField solve_wave(const WaveProblem& p) {
    const double ds = p.sgrid.ds();
    const double dx = p.xgrid.dx();
    if (ds > dx * (1.0 + 1e-12)) throw Error(ErrorKind::Stability, "leapfrog needs ds <= dx (CFL)");
    if (!(p.control.grid() == p.sgrid)) throw Error(ErrorKind::IncompatibleGrid, "wave control grid mismatch");
    const std::size_t nx = p.xgrid.size();
    if (p.initial_displacement.size() != nx || p.initial_velocity.size() != nx) {
        throw Error(ErrorKind::InvalidInput, "wave initial data size mismatch");
    }
    const double c2 = (ds / dx) * (ds / dx);
    const std::size_t M = nx - 1;
    const std::size_t k0 = static_cast<std::size_t>(p.sgrid.n_half());
    const std::size_t K = p.sgrid.size() - 1;

    WaveField z(p.sgrid, p.xgrid);
    {
        auto row = z.row(k0);
        std::copy(p.initial_displacement.begin(), p.initial_displacement.end(), row.begin());
        row[0] = 0.0;
        row[M] = p.control[k0];
    }
    // direction = +1 runs k0 -> K, -1 runs k0 -> 0
    for (int direction : {+1, -1}) {
        const auto z0 = z.row(k0);
        const std::size_t k1 = direction > 0 ? k0 + 1 : k0 - 1;
        auto first = z.row(k1);
        for (std::size_t j = 1; j < M; ++j) {
            const double lap = z0[j - 1] - 2.0 * z0[j] + z0[j + 1];
            first[j] = z0[j] + direction * ds * p.initial_velocity[j] + 0.5 * c2 * lap;
        }
        first[0] = 0.0;
        first[M] = p.control[k1];
        std::size_t prev = k0;
        std::size_t cur = k1;
        while (direction > 0 ? cur < K : cur > 0) {
            const std::size_t next = direction > 0 ? cur + 1 : cur - 1;
            const auto zc = z.row(cur);
            const auto zp = z.row(prev);
            auto zn = z.row(next);
            for (std::size_t j = 1; j < M; ++j) {
                zn[j] = 2.0 * zc[j] - zp[j] + c2 * (zc[j - 1] - 2.0 * zc[j] + zc[j + 1]);
            }
            zn[0] = 0.0;
            zn[M] = p.control[next];
            prev = cur;
            cur = next;
        }
    }
    return z;
}

double wave_energy(const WaveField& z, std::size_t k) {
    const double ds = z.sgrid().ds();
    const double dx = z.xgrid().dx();
    const auto a = z.row(k);
    const auto b = z.row(k + 1);
    double kinetic = 0.0;
    double potential = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double v = (b[j] - a[j]) / ds;
        kinetic += v * v;
    }
    for (std::size_t j = 0; j + 1 < a.size(); ++j) potential += (b[j + 1] - b[j]) * (a[j + 1] - a[j]) / (dx * dx);
    return 0.5 * dx * (kinetic + potential);
}

}  // namespace heattrack
