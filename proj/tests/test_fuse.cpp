#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "satfuse/fuse.hpp"
#include "satfuse/metrics.hpp"
#include "satfuse/synth.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace satfuse;

namespace {

Raster random_raster(GridSpec g, std::uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    Raster r(g);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rng.uniform(lo, hi);
    return r;
}

/// Problem with all machinery in default shape: q/theta from the prototype.
FusionProblem small_problem(std::uint64_t seed, FusionConfig cfg = {}, int side = 8, int low = 4) {
    const GridSpec g{side, side};
    const GridSpec lo{low, low};
    const Raster proto = random_raster(g, seed, 0.3 * cfg.intensity_cap, 0.7 * cfg.intensity_cap);
    const Raster modis = downsample(proto, cfg.make_kernel(side / low), lo);
    return make_fusion_problem(proto, modis, std::nullopt, cfg);
}

/// Quadratic instance: q forced to 2, theta zero; the energy becomes a
/// strictly convex quadratic once gamma pins the constants.
FusionProblem quadratic_problem(std::uint64_t seed, double gamma, double vartheta) {
    FusionConfig cfg;
    cfg.gamma = gamma;
    cfg.vartheta = vartheta;
    const GridSpec g{8, 8};
    const GridSpec lo{4, 4};
    const Raster proto = random_raster(seed ? g : g, seed, 80.0, 170.0);
    Raster modis = downsample(proto, Kernel::box(2), lo);
    for (std::size_t i = 0; i < modis.size(); ++i) modis[i] += (i % 3 == 0) ? 2.0 : -1.5;

    FusionProblem p;
    p.q = TextureIndexField(g, 2.0);
    p.theta = VectorField(g);
    p.kernel = Kernel::box(2);
    p.cfg = cfg;
    p.prototype = proto;
    p.modis = modis;
    if (gamma > 0.0) {
        Raster observed = random_raster(g, seed + 5, 90.0, 160.0);
        DamageMask damage(g);
        for (std::size_t i = 0; i < damage.mask.size(); ++i) damage.mask[i] = (i % 4 == 0);
        p.observed = ObservedBand{std::move(observed), std::move(damage)};
    }
    p.validate();
    return p;
}

} // namespace

TEST_CASE("energy vanishes on a fully consistent constant instance") {
    FusionConfig cfg;
    cfg.gamma = 1.0;
    const GridSpec g{8, 8};
    const Raster c(g, 100.0);
    FusionProblem p;
    p.q = TextureIndexField(g, 2.0);
    p.theta = VectorField(g);
    p.kernel = Kernel::box(2);
    p.cfg = cfg;
    p.prototype = c;
    p.modis = downsample(c, p.kernel, GridSpec{4, 4});
    p.observed = ObservedBand{c, DamageMask(g)};
    const EnergyBreakdown e = energy(p, c);
    CHECK(e.total == 0.0);
    CHECK(e.directional == 0.0);
    CHECK(e.gradient_fidelity == 0.0);
    CHECK(e.observed_fidelity == 0.0);
    CHECK(e.lowres_fidelity == 0.0);
}

TEST_CASE("at u = prototype with consistent modis only the directional term remains") {
    FusionConfig cfg; // gamma = 0 by default
    const FusionProblem p = small_problem(11, cfg);
    const EnergyBreakdown e = energy(p, p.prototype);
    CHECK(e.gradient_fidelity == 0.0);
    CHECK(e.observed_fidelity == 0.0);
    CHECK(e.lowres_fidelity == doctest::Approx(0.0));
    CHECK(e.directional > 0.0);
    CHECK(e.total == doctest::Approx(e.directional));
}

TEST_CASE("each energy addend matches a direct-sum oracle") {
    const FusionProblem p = quadratic_problem(21, 0.8, 1.3);
    const Raster u = random_raster(p.prototype.grid(), 22, 50.0, 200.0);
    const EnergyBreakdown e = energy(p, u);

    // directional: q=2, theta=0 -> 0.5 |grad u|^2
    std::vector<double> gx, gy;
    oracle::gradient_loops(u, gx, gy);
    double a = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) a += 0.5 * (gx[i] * gx[i] + gy[i] * gy[i]);
    CHECK(e.directional == doctest::Approx(a).epsilon(1e-10));

    std::vector<double> px, py;
    oracle::gradient_loops(p.prototype, px, py);
    double b = 0.0;
    for (std::size_t i = 0; i < gx.size(); ++i) {
        const double dx = gx[i] - px[i], dy = gy[i] - py[i];
        b += dx * dx + dy * dy;
    }
    CHECK(e.gradient_fidelity == doctest::Approx(0.5 * p.cfg.mu * b).epsilon(1e-10));

    double c = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i)
        if (!p.observed->damage.mask[i]) {
            const double d = u[i] - p.observed->values[i];
            c += d * d;
        }
    CHECK(e.observed_fidelity == doctest::Approx(0.5 * p.cfg.gamma * c).epsilon(1e-10));

    const Raster low = oracle::downsample_loops(u, p.kernel, p.modis.grid());
    double d_sum = 0.0;
    for (std::size_t i = 0; i < low.size(); ++i) {
        const double r = low[i] - p.modis[i];
        d_sum += r * r;
    }
    CHECK(e.lowres_fidelity == doctest::Approx(0.5 * p.cfg.vartheta * d_sum).epsilon(1e-10));

    CHECK(e.total == doctest::Approx(e.directional + e.gradient_fidelity + e.observed_fidelity +
                                     e.lowres_fidelity));
}

TEST_CASE("energy rejects infeasible input") {
    const FusionProblem p = small_problem(31);
    Raster u = p.prototype;
    u[3] = -1.0;
    CHECK_THROWS_AS(energy(p, u), ValidationError);
    u[3] = p.cfg.intensity_cap + 1.0;
    CHECK_THROWS_AS(energy(p, u), ValidationError);
}

TEST_CASE("gradient matches central finite differences of the energy") {
    for (std::uint64_t seed : {41u, 42u, 43u}) {
        const FusionProblem p = small_problem(seed);
        const Raster u = random_raster(p.prototype.grid(), seed + 1, 0.35 * p.cfg.intensity_cap,
                                       0.65 * p.cfg.intensity_cap);
        const Raster g = energy_gradient(p, u);
        Rng rng(seed + 2);
        for (int dir = 0; dir < 5; ++dir) {
            Raster v(u.grid());
            for (std::size_t i = 0; i < v.size(); ++i) v[i] = rng.uniform(-1.0, 1.0);
            const double eps = 1e-5;
            Raster up(u.grid()), dn(u.grid());
            for (std::size_t i = 0; i < u.size(); ++i) {
                up[i] = u[i] + eps * v[i];
                dn[i] = u[i] - eps * v[i];
            }
            const double fd = (energy(p, up).total - energy(p, dn).total) / (2.0 * eps);
            const double an = dot(g.values(), v.values());
            CHECK(fd == doctest::Approx(an).epsilon(1e-4));
        }
    }
}

TEST_CASE("gradient vanishes on the consistent constant instance") {
    FusionConfig cfg;
    cfg.gamma = 2.0;
    const GridSpec g{8, 8};
    const Raster c(g, 42.0);
    FusionProblem p;
    p.q = TextureIndexField(g, 2.0);
    p.theta = VectorField(g);
    p.kernel = Kernel::box(2);
    p.cfg = cfg;
    p.prototype = c;
    p.modis = downsample(c, p.kernel, GridSpec{4, 4});
    p.observed = ObservedBand{c, DamageMask(g)};
    const Raster grad = energy_gradient(p, c);
    for (std::size_t i = 0; i < grad.size(); ++i) CHECK(grad[i] == 0.0);
}

TEST_CASE("quadratic gradient vanishes at the dense-solver optimum") {
    const FusionProblem p = quadratic_problem(51, 1.0, 1.0);
    const std::size_t n = p.prototype.size();
    auto apply_grad = [&](const std::vector<double>& v) {
        return energy_gradient(p, Raster(p.prototype.grid(), v)).values();
    };
    // the gradient map is affine for q=2, theta=0: solve grad(u) = 0 densely
    auto [a, b] = oracle::assemble_affine(n, apply_grad);
    const auto u_star = oracle::dense_solve(a, b);
    const Raster g = energy_gradient(p, Raster(p.prototype.grid(), u_star));
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(g[i]) <= 1e-8);
}

TEST_CASE("already-stationary constant instance returns immediately") {
    FusionConfig cfg;
    const GridSpec g{8, 8};
    const Raster c(g, 77.0);
    FusionProblem p;
    p.q = TextureIndexField(g, 2.0);
    p.theta = VectorField(g);
    p.kernel = Kernel::box(2);
    p.cfg = cfg;
    p.prototype = c;
    p.modis = downsample(c, p.kernel, GridSpec{4, 4});
    std::vector<TracePoint> trace;
    const Raster u = solve(p, c, &trace);
    CHECK(u == c);
    CHECK(trace.size() == 1);
}

TEST_CASE("projected descent solves the quadratic sub-case to the dense optimum") {
    FusionProblem p = quadratic_problem(61, 1.0, 1.0);
    p.cfg.descent_max_iters = 20000;
    p.cfg.descent_tol = 0.0; // run to the float floor
    const std::size_t n = p.prototype.size();
    auto apply_grad = [&](const std::vector<double>& v) {
        return energy_gradient(p, Raster(p.prototype.grid(), v)).values();
    };
    auto [a, b] = oracle::assemble_affine(n, apply_grad);
    const auto u_star = oracle::dense_solve(a, b);
    // the oracle optimum must be interior for the comparison to be fair
    for (double x : u_star) {
        CHECK(x > 0.0);
        CHECK(x < p.cfg.intensity_cap);
    }
    std::vector<TracePoint> trace;
    const Raster u = solve(p, p.prototype, &trace);
    double max_diff = 0.0;
    for (std::size_t i = 0; i < n; ++i) max_diff = std::max(max_diff, std::abs(u[i] - u_star[i]));
    CHECK(max_diff <= 1e-4);
    // energy decreased monotonically along the accepted steps
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i].energy.total < trace[i - 1].energy.total);
}

TEST_CASE("descent trace is monotone on a textured synthetic instance") {
    FusionConfig cfg;
    cfg.descent_max_iters = 400;
    const Scene scene = make_scene(7, GridSpec{24, 24}, 6, 1, cfg.intensity_cap);
    const Raster proto = scene.image.bands[0];
    Raster modis = downsample(proto, Kernel::box(3), GridSpec{8, 8});
    for (std::size_t i = 0; i < modis.size(); ++i) modis[i] *= 1.04;
    const FusionProblem p = make_fusion_problem(proto, modis, std::nullopt, cfg);
    std::vector<TracePoint> trace;
    const Raster u = solve(p, proto, &trace);
    REQUIRE(trace.size() > 1);
    for (std::size_t i = 1; i < trace.size(); ++i)
        CHECK(trace[i].energy.total < trace[i - 1].energy.total);
    // feasibility of the result
    for (std::size_t i = 0; i < u.size(); ++i) {
        CHECK(u[i] >= 0.0);
        CHECK(u[i] <= cfg.intensity_cap);
    }
    CHECK(energy(p, u).total <= trace.front().energy.total);
}

TEST_CASE("energy lower bound by the damped total variation holds") {
    // directional >= (1-eta^2)^2 * sum (1/q)|grad u|^q
    const FusionProblem p = small_problem(71);
    for (std::uint64_t seed : {72u, 73u}) {
        const Raster u = random_raster(p.prototype.grid(), seed, 0.0, p.cfg.intensity_cap);
        const EnergyBreakdown e = energy(p, u);
        const VectorField g = gradient(u);
        double plain = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i)
            plain += std::pow(std::hypot(g.x[i], g.y[i]), p.q.q[i]) / p.q.q[i];
        const double eta2 = p.cfg.eta * p.cfg.eta;
        CHECK(e.directional >= (1.0 - eta2) * (1.0 - eta2) * plain - 1e-9);
    }
}

TEST_CASE("beta scaling recovers least-squares scale factors") {
    GridSpec g{8, 8};
    const Raster u = random_raster(g, 81, 1.0, 9.0);
    CHECK(beta_scaling(u, u) == doctest::Approx(1.0).epsilon(1e-15));

    Raster tripled(g);
    for (std::size_t i = 0; i < u.size(); ++i) tripled[i] = 3.0 * u[i];
    CHECK(beta_scaling(tripled, u) == doctest::Approx(3.0).epsilon(1e-14));

    // optimality against a golden-section search over the scale
    const Raster ref = random_raster(g, 82, 1.0, 9.0);
    const double beta = beta_scaling(ref, u);
    auto miss = [&](double c) {
        double s = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double d = ref[i] - c * u[i];
            s += d * d;
        }
        return s;
    };
    double lo = -2.0, hi = 4.0;
    const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c1 = hi - phi * (hi - lo), c2 = lo + phi * (hi - lo);
    while (hi - lo > 1e-10) {
        if (miss(c1) < miss(c2)) {
            hi = c2;
            c2 = c1;
            c1 = hi - phi * (hi - lo);
        } else {
            lo = c1;
            c1 = c2;
            c2 = lo + phi * (hi - lo);
        }
    }
    // function comparisons near the flat minimum are noise-limited at
    // sqrt(machine epsilon), which bounds the bracketing accuracy
    CHECK(beta == doctest::Approx(0.5 * (lo + hi)).epsilon(1e-6));
    Rng rng(83);
    for (int k = 0; k < 50; ++k) CHECK(miss(beta) <= miss(rng.uniform(-2.0, 4.0)));

    CHECK_THROWS_AS(beta_scaling(ref, Raster(g, 0.0)), ValidationError);
}

TEST_CASE("beta scaling respects the damage mask") {
    GridSpec g{4, 4};
    Raster ref(g, 2.0), u0(g, 1.0);
    DamageMask mask(g);
    mask.mask[0] = 1;
    ref[0] = 1000.0; // damaged pixel must not contribute
    CHECK(beta_scaling(ref, u0, &mask) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("stationarity diagnostic is nonnegative-ish at the quadratic optimum") {
    FusionProblem p = quadratic_problem(91, 1.0, 1.0);
    const std::size_t n = p.prototype.size();
    auto apply_grad = [&](const std::vector<double>& v) {
        return energy_gradient(p, Raster(p.prototype.grid(), v)).values();
    };
    auto [a, b] = oracle::assemble_affine(n, apply_grad);
    const Raster u_star(p.prototype.grid(), oracle::dense_solve(a, b));
    CHECK(stationarity_worst_rel(p, u_star, 100, 2024) >= -1e-9);
}

namespace {

struct StitchedScenario {
    std::vector<MultiBandImage> series;
    std::vector<DamageMask> masks;
    MultiBandImage modis;
    MultiBandImage truth;
};

StitchedScenario restoration_scenario(std::uint64_t seed, double coverage) {
    FusionConfig cfg;
    const GridSpec g{32, 32};
    const GridSpec low{8, 8};
    Scene scene = make_scene(seed, g, 8, 3, cfg.intensity_cap);
    scene.image.tags.back() = {"B5", BandGroup::J2}; // exercise the copied group
    StitchedScenario s;
    auto frames = make_series(scene, {0, 5}, Evolution::Linear);
    s.truth = frames[1];
    DamageMask clouds = make_clouds(seed + 3, g, coverage);
    MultiBandImage corrupted = frames[1];
    for (Raster& band : corrupted.bands)
        for (std::size_t i = 0; i < band.size(); ++i)
            if (clouds.mask[i]) band[i] = 0.9 * cfg.intensity_cap;
    s.series = {frames[0], corrupted};
    s.masks = {DamageMask(g), clouds};
    s.modis = make_modis(s.truth, Kernel::box(4), low, 0.0);
    return s;
}

} // namespace

TEST_CASE("restoration with an empty mask returns the observed image on fused bands") {
    StitchedScenario s = restoration_scenario(101, 0.3);
    s.masks[1] = DamageMask(s.series[0].grid()); // wipe the damage
    FusionConfig cfg;
    cfg.gamma = 1.0;
    const MultiBandImage out = run_restoration(s.series, s.masks, s.modis, 1, cfg);
    for (std::size_t k = 0; k < out.band_count(); ++k)
        if (out.tags[k].group == BandGroup::J1) CHECK(out.bands[k] == s.series[1].bands[k]);
}

TEST_CASE("restoration stitches observed pixels and prototype-copies the second group") {
    const StitchedScenario s = restoration_scenario(103, 0.25);
    FusionConfig cfg;
    cfg.gamma = 1.0;
    cfg.descent_max_iters = 150;
    MultiBandImage proto;
    const MultiBandImage out =
        run_restoration(s.series, s.masks, s.modis, 1, cfg, 1, &proto);
    const DamageMask& damage = s.masks[1];
    for (std::size_t k = 0; k < out.band_count(); ++k) {
        if (out.tags[k].group == BandGroup::J1) {
            for (std::size_t i = 0; i < out.bands[k].size(); ++i)
                if (!damage.mask[i]) CHECK(out.bands[k][i] == s.series[1].bands[k][i]);
        } else {
            CHECK(out.bands[k] == proto.bands[k]);
        }
    }
    CHECK(out.timestamp == s.series[1].timestamp);
}

TEST_CASE("restored damage region beats the prototype fill against the truth") {
    const StitchedScenario s = restoration_scenario(107, 0.3);
    FusionConfig cfg;
    cfg.gamma = 1.0;
    cfg.descent_max_iters = 600;
    MultiBandImage proto;
    const MultiBandImage out = run_restoration(s.series, s.masks, s.modis, 1, cfg, 1, &proto);
    const DamageMask& damage = s.masks[1];
    double err_out = 0.0, err_proto = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < out.band_count(); ++k) {
        if (out.tags[k].group != BandGroup::J1) continue;
        for (std::size_t i = 0; i < out.bands[k].size(); ++i) {
            if (!damage.mask[i]) continue;
            const double t = s.truth.bands[k][i];
            err_out += (out.bands[k][i] - t) * (out.bands[k][i] - t);
            err_proto += (proto.bands[k][i] - t) * (proto.bands[k][i] - t);
            ++count;
        }
    }
    REQUIRE(count > 0);
    CHECK(err_out < err_proto);
}

TEST_CASE("restoration rejects gamma = 0 and excessive damage") {
    const StitchedScenario s = restoration_scenario(109, 0.2);
    FusionConfig cfg; // gamma = 0
    CHECK_THROWS_AS(run_restoration(s.series, s.masks, s.modis, 1, cfg), ValidationError);
}

TEST_CASE("interpolation at an endpoint day degenerates to that day's prototype path") {
    const StitchedScenario s = restoration_scenario(113, 0.2);
    FusionConfig cfg;
    cfg.descent_max_iters = 100;
    MultiBandImage proto;
    const MultiBandImage out =
        run_interpolation(s.series, s.masks, s.modis, 0.0, cfg, 1, &proto);
    // day 0 prototype is the first frame itself
    for (std::size_t k = 0; k < proto.band_count(); ++k)
        CHECK(proto.bands[k] == s.series[0].bands[k]);
    for (std::size_t k = 0; k < out.band_count(); ++k)
        if (out.tags[k].group == BandGroup::J2) CHECK(out.bands[k] == proto.bands[k]);
}

TEST_CASE("extrapolation with vartheta 0 keeps a constant prototype stationary") {
    FusionConfig cfg;
    cfg.vartheta = 0.0;
    const GridSpec g{16, 16};
    const GridSpec low{4, 4};
    MultiBandImage frame;
    frame.bands = {Raster(g, 120.0)};
    frame.tags = {{"B2", BandGroup::J1}};
    frame.timestamp = 0;
    MultiBandImage modis;
    modis.bands = {Raster(low, 120.0)};
    modis.tags = {{"B2", BandGroup::J1}};
    std::vector<BandSolve> solves;
    const MultiBandImage out = run_extrapolation({frame}, {DamageMask(g)}, modis, 6.0, cfg, 1,
                                                 nullptr, &solves);
    REQUIRE(solves.size() == 1);
    CHECK(solves[0].trace.size() == 1); // initialization already stationary
    CHECK(out.bands[0] == frame.bands[0]);
}

TEST_CASE("extrapolation copies the second band group from the last prototype") {
    const StitchedScenario s = restoration_scenario(127, 0.2);
    FusionConfig cfg;
    cfg.descent_max_iters = 100;
    MultiBandImage proto;
    const MultiBandImage out =
        run_extrapolation(s.series, s.masks, s.modis, 9.0, cfg, 1, &proto);
    for (std::size_t k = 0; k < out.band_count(); ++k)
        if (out.tags[k].group == BandGroup::J2) CHECK(out.bands[k] == proto.bands[k]);
    CHECK_THROWS_AS(run_extrapolation(s.series, s.masks, s.modis, 3.0, cfg), ValidationError);
}

TEST_CASE("extrapolation improves low-resolution consistency like interpolation") {
    FusionConfig cfg;
    cfg.descent_max_iters = 500;
    const GridSpec g{32, 32};
    const GridSpec low{8, 8};
    const Scene scene = make_scene(139, g, 8, 2, cfg.intensity_cap);
    auto frames = make_series(scene, {0, 5, 12}, Evolution::Logistic);
    const MultiBandImage truth = apply_field_event(scene, frames[2], 141, 0.1);
    const MultiBandImage modis = make_modis(truth, Kernel::box(4), low, 0.0);
    std::vector<MultiBandImage> series = {frames[0], frames[1]};
    std::vector<DamageMask> masks = {DamageMask(g), DamageMask(g)};

    MultiBandImage proto;
    const MultiBandImage out = run_extrapolation(series, masks, modis, 12.0, cfg, 1, &proto);
    const Kernel k = Kernel::box(4);
    std::size_t j1 = 0;
    double out_err = 0.0, proto_err = 0.0;
    for (std::size_t b = 0; b < out.band_count(); ++b) {
        if (out.tags[b].group != BandGroup::J1) continue;
        out_err += rmse(downsample(out.bands[b], k, low), modis.bands[j1]);
        proto_err += rmse(downsample(proto.bands[b], k, low), modis.bands[j1]);
        ++j1;
    }
    CHECK(out_err < proto_err);
}

TEST_CASE("restoration rejects damage above the 0.6 ceiling") {
    FusionConfig cfg;
    cfg.gamma = 1.0;
    const GridSpec g{16, 16};
    MultiBandImage frame;
    frame.bands = {Raster(g, 50.0)};
    frame.tags = {{"B2", BandGroup::J1}};
    frame.timestamp = 0;
    MultiBandImage second = frame;
    second.timestamp = 3;
    DamageMask heavy(g);
    for (std::size_t i = 0; i < 180; ++i) heavy.mask[i] = 1; // 180/256 = 0.70
    MultiBandImage modis;
    modis.bands = {Raster(GridSpec{4, 4}, 50.0)};
    modis.tags = {{"B2", BandGroup::J1}};
    CHECK_THROWS_AS(
        run_restoration({frame, second}, {DamageMask(g), heavy}, modis, 1, cfg),
        ValidationError);
}

TEST_CASE("band-parallel runs match the single-threaded result bit for bit") {
    FusionConfig cfg;
    cfg.descent_max_iters = 120;
    const GridSpec g{32, 32};
    const GridSpec low{8, 8};
    const Scene scene = make_scene(137, g, 6, 3, cfg.intensity_cap);
    auto frames = make_series(scene, {0, 5, 10}, Evolution::Logistic);
    const MultiBandImage truth = apply_field_event(scene, frames[1], 140, 0.1);
    const MultiBandImage modis = make_modis(truth, Kernel::box(4), low, 0.0);
    std::vector<MultiBandImage> series = {frames[0], frames[2]};
    std::vector<DamageMask> masks = {DamageMask(g), DamageMask(g)};
    const MultiBandImage one = run_interpolation(series, masks, modis, 5.0, cfg, 1);
    const MultiBandImage two = run_interpolation(series, masks, modis, 5.0, cfg, 2);
    REQUIRE(one.band_count() == two.band_count());
    for (std::size_t k = 0; k < one.band_count(); ++k) CHECK(one.bands[k] == two.bands[k]);
}

TEST_CASE("interpolation improves low-resolution consistency over the prototype") {
    FusionConfig cfg;
    cfg.descent_max_iters = 500;
    const GridSpec g{32, 32};
    const GridSpec low{8, 8};
    const Scene scene = make_scene(131, g, 8, 2, cfg.intensity_cap);
    auto frames = make_series(scene, {0, 5, 10}, Evolution::Logistic);
    const MultiBandImage truth = apply_field_event(scene, frames[1], 172, 0.1);
    const MultiBandImage modis = make_modis(truth, Kernel::box(4), low, 0.0);
    std::vector<MultiBandImage> series = {frames[0], frames[2]};
    std::vector<DamageMask> masks = {DamageMask(g), DamageMask(g)};

    MultiBandImage proto;
    const MultiBandImage out = run_interpolation(series, masks, modis, 5.0, cfg, 1, &proto);
    const Kernel k = Kernel::box(4);
    double out_err = 0.0, proto_err = 0.0;
    std::size_t j1 = 0;
    for (std::size_t b = 0; b < out.band_count(); ++b) {
        if (out.tags[b].group != BandGroup::J1) continue;
        const Raster lo_out = downsample(out.bands[b], k, low);
        const Raster lo_proto = downsample(proto.bands[b], k, low);
        for (std::size_t i = 0; i < lo_out.size(); ++i) {
            out_err += (lo_out[i] - modis.bands[j1][i]) * (lo_out[i] - modis.bands[j1][i]);
            proto_err += (lo_proto[i] - modis.bands[j1][i]) * (lo_proto[i] - modis.bands[j1][i]);
        }
        ++j1;
    }
    CHECK(out_err < proto_err);
}
