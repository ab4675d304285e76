#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "heattrack/error.hpp"
#include "heattrack/grid.hpp"

using namespace heattrack;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / ("heattrack_grid_" + name);
    std::ofstream(p) << content;
    return p;
}

Signal sampled(const TimeGrid& g, double (*f)(double)) {
    std::vector<double> v(g.size());
    for (int i = 0; i <= g.n_steps(); ++i) v[i] = f(g.node(i));
    return Signal(g, v);
}

}  // namespace

TEST_CASE("grid construction and validation") {
    const TimeGrid t(2.0, 8);
    CHECK(t.dt() == doctest::Approx(0.25));
    CHECK(t.node(8) == 2.0);
    CHECK(t.size() == 9);
    CHECK_THROWS_AS(TimeGrid(0.0, 8), Error);
    CHECK_THROWS_AS(TimeGrid(1.0, 1), Error);
    CHECK_THROWS_AS(SpaceGrid(1.0, 3), Error);
    const PseudoTimeGrid s(3.0, 6);
    CHECK(s.size() == 13);
    CHECK(s.node(0) == -3.0);
    CHECK(s.node(6) == 0.0);
    CHECK(s.node(12) == 3.0);
}

TEST_CASE("signal rejects non-finite samples and wrong sizes") {
    const TimeGrid g(1.0, 4);
    CHECK_THROWS_AS(Signal(g, {0, 1, 2}), Error);
    CHECK_THROWS_AS(Signal(g, {0, 1, NAN, 2, 3}), Error);
}

TEST_CASE("norms of a linear signal") {
    const TimeGrid g(1.0, 100);
    const Signal s = sampled(g, [](double t) { return 2.0 * t; });
    CHECK(signal_norm(s, NormKind::Sup) == doctest::Approx(2.0));
    // int_0^1 4 t^2 dt = 4/3; trapezoid error is O(dt^2)
    CHECK(signal_norm(s, NormKind::L2) == doctest::Approx(std::sqrt(4.0 / 3.0)).epsilon(1e-4));
    CHECK(signal_norm(s, NormKind::W1Inf) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("trapezoid inner product is exact for linear products") {
    const TimeGrid g(1.0, 10);
    const Signal one = sampled(g, [](double) { return 1.0; });
    const Signal t = sampled(g, [](double x) { return x; });
    CHECK(inner_product(one, t) == doctest::Approx(0.5).epsilon(1e-14));
    const auto w = trapezoid_weights(g);
    CHECK(w.front() == doctest::Approx(0.05));
    CHECK(w[3] == doctest::Approx(0.1));
}

TEST_CASE("five-point flux is exact on quartics") {
    const TimeGrid tg(1.0, 3);
    const SpaceGrid xg(1.0, 8);
    HeatField f(tg, xg);
    for (std::size_t n = 0; n < tg.size(); ++n) {
        for (int j = 0; j <= 8; ++j) {
            const double x = xg.node(j);
            f(n, j) = (n + 1.0) * (3.0 * x - x * x + 2.0 * x * x * x * x);
        }
    }
    const Signal flux = flux_at_left(f);
    for (std::size_t n = 0; n < tg.size(); ++n) CHECK(flux[n] == doctest::Approx(3.0 * (n + 1.0)).epsilon(1e-12));
}

TEST_CASE("cubic interpolation reproduces cubics and hits nodes") {
    std::vector<double> v(11);
    auto p = [](double x) { return 1.0 - 2.0 * x + 0.5 * x * x * x; };
    for (int i = 0; i <= 10; ++i) v[i] = p(-1.0 + 0.2 * i);
    for (double x : {-1.0, -0.95, -0.31, 0.0, 0.47, 0.99, 1.0}) {
        CHECK(cubic_interpolate(v, -1.0, 0.2, x) == doctest::Approx(p(x)).epsilon(1e-13));
    }
    const CubicStencil st = cubic_stencil(v.size(), -1.0, 0.2, 0.2);
    double sum = 0.0;
    for (double w : st.weights) sum += w;
    CHECK(sum == doctest::Approx(1.0));
    CHECK(st.weights[6 - st.first] == 1.0);
}

TEST_CASE("resample keeps endpoints and smooth shapes") {
    const TimeGrid a(1.0, 50), b(1.0, 37);
    const Signal s = sampled(a, [](double t) { return std::sin(3.0 * t); });
    const Signal r = resample(s, b);
    CHECK(r[0] == s[0]);
    CHECK(r[37] == s[50]);
    for (int i = 0; i <= 37; ++i) CHECK(r[i] == doctest::Approx(std::sin(3.0 * b.node(i))).epsilon(1e-6));
}

TEST_CASE("signal CSV round trip and malformed input") {
    const TimeGrid g(1.0, 4);
    const Signal s(g, {0.0, 0.1, 0.2, 0.3, 0.4});
    const fs::path p = fs::temp_directory_path() / "heattrack_grid_roundtrip.csv";
    write_signal_csv(p, s, {"config_hash=0 version=test"});
    {
        std::ifstream in(p);
        std::string first;
        std::getline(in, first);
        CHECK(first.rfind("# config_hash=", 0) == 0);
    }
    const Signal back = read_signal_csv(p);
    CHECK(back.grid() == g);
    for (int i = 0; i <= 4; ++i) CHECK(back[i] == s[i]);

    const fs::path bad = temp_file("bad.csv", "t,value\n0,0\n0.5,abc\n1,1\n");
    try {
        read_signal_csv(bad);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Io);
        CHECK(std::string(e.what()).find("bad.csv:3:") != std::string::npos);
    }
    CHECK_THROWS_AS(read_signal_csv(temp_file("nonuniform.csv", "t,value\n0,0\n0.3,1\n1,2\n")), Error);
    CHECK_THROWS_AS(read_signal_csv(fs::temp_directory_path() / "heattrack_missing.csv"), Error);
}

TEST_CASE("wave signal CSV needs a symmetric grid") {
    const PseudoTimeGrid sg(1.0, 2);
    const WaveSignal w(sg, {1, 2, 3, 2, 1});
    const fs::path p = fs::temp_directory_path() / "heattrack_grid_wave.csv";
    write_wave_signal_csv(p, w);
    const WaveSignal back = read_wave_signal_csv(p);
    CHECK(back.grid() == sg);
    CHECK(back[2] == 3.0);
    CHECK_THROWS_AS(read_wave_signal_csv(temp_file("asym.csv", "s,value\n-1,0\n0,1\n2,0\n")), Error);
}
