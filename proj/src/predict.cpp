#include "satfuse/predict.hpp"

#include "satfuse/metrics.hpp"
#include "satfuse/parallel.hpp"
#include "satfuse/solver.hpp"

#include <algorithm>
#include <cmath>

namespace satfuse {

void PredictionProblem::validate() const {
    cfg.validate();
    start.validate("prediction start");
    end.validate("prediction end");
    if (!(start.grid() == end.grid()))
        throw ValidationError("prediction: start and end grids differ");
    if (start.band_count() != end.band_count())
        throw ValidationError("prediction: band counts differ");
    if (!(start.timestamp < target_day && target_day < end.timestamp) &&
        !(target_day == end.timestamp))
        throw ValidationError("prediction: target day must lie in (start, end]");
}

double diffusion_weight(double grad_mag, double p, double floor) {
    // Huber-style regularization of |grad|^(p-2); keeps the lagged
    // diffusivity bounded by floor^(p-2) where the gradient vanishes.
    const double m2 = grad_mag * grad_mag + floor * floor;
    return std::clamp(std::pow(m2, 0.5 * (p - 2.0)), 1e-8, 1e8);
}

Raster p_laplacian_divergence(const Raster& u, const TextureIndexField& p, double floor) {
    if (!(u.grid() == p.grid))
        throw ValidationError("p_laplacian_divergence: grid mismatch");
    VectorField g = gradient(u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double w = diffusion_weight(std::hypot(g.x[i], g.y[i]), p.q[i], floor);
        g.x[i] *= w;
        g.y[i] *= w;
    }
    return divergence(g);
}

std::pair<Raster, Raster> spatiotemporal_derivatives(const PredictionProblem& problem, int band) {
    problem.validate();
    if (band < 0 || band >= static_cast<int>(problem.start.band_count()))
        throw ValidationError("spatiotemporal_derivatives: band out of range");
    const Raster& s0 = problem.start.bands[static_cast<std::size_t>(band)];
    const Raster& s1 = problem.end.bands[static_cast<std::size_t>(band)];
    const double span = static_cast<double>(problem.end.timestamp - problem.start.timestamp);

    Raster dt_raster(s0.grid());
    for (std::size_t i = 0; i < dt_raster.size(); ++i)
        dt_raster[i] = (s1[i] - s0[i]) / span;

    const Raster d0 =
        p_laplacian_divergence(s0, texture_index_static(s0, problem.cfg), problem.cfg.grad_floor);
    const Raster d1 =
        p_laplacian_divergence(s1, texture_index_static(s1, problem.cfg), problem.cfg.grad_floor);
    Raster div_avg(s0.grid());
    for (std::size_t i = 0; i < div_avg.size(); ++i)
        div_avg[i] = 0.5 * (d0[i] + d1[i]);
    return {std::move(dt_raster), std::move(div_avg)};
}

Raster estimate_source(const PredictionProblem& problem, int band) {
    auto [dt_raster, div_avg] = spatiotemporal_derivatives(problem, band);
    const GridSpec grid = dt_raster.grid();
    std::vector<double> f(grid.size());
    for (std::size_t i = 0; i < f.size(); ++i)
        f[i] = dt_raster[i] - div_avg[i];

    const double l2 = problem.cfg.lambda1 * problem.cfg.lambda1;
    auto apply = [&grid, l2](const std::vector<double>& v) {
        const Raster lap = laplacian(Raster(grid, v));
        std::vector<double> out(v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            out[i] = v[i] - l2 * lap[i];
        return out;
    };

    std::vector<double> x = f; // screened identity: f itself is a good start
    conjugate_gradient(apply, f, x, problem.cfg.cg_tol, problem.cfg.cg_max_iters);
    return Raster(grid, std::move(x));
}

std::vector<Raster> evolve_ibvp(const Raster& initial, const Raster& source, double t0, double t1,
                                const FusionConfig& cfg) {
    cfg.validate();
    if (!(t0 < t1)) throw ValidationError("evolve_ibvp: need t0 < t1");
    if (!(initial.grid() == source.grid()))
        throw ValidationError("evolve_ibvp: grid mismatch");

    const int steps = cfg.time_steps >= 1
                          ? cfg.time_steps
                          : std::max(1, static_cast<int>(std::llround(t1 - t0)));
    const double dt = (t1 - t0) / steps;
    const GridSpec grid = initial.grid();

    std::vector<Raster> levels;
    levels.reserve(static_cast<std::size_t>(steps) + 1);
    levels.push_back(initial);

    for (int n = 0; n < steps; ++n) {
        const Raster& u_old = levels.back();
        // exponent frozen to the latest iterate (lagged coefficient)
        const TextureIndexField p = texture_index_static(u_old, cfg);
        VectorField g = gradient(u_old);
        std::vector<double> w(g.size());
        for (std::size_t i = 0; i < w.size(); ++i)
            w[i] = diffusion_weight(std::hypot(g.x[i], g.y[i]), p.q[i], cfg.grad_floor);

        auto apply = [&grid, &w, dt](const std::vector<double>& v) {
            VectorField gv = gradient(Raster(grid, v));
            for (std::size_t i = 0; i < w.size(); ++i) {
                gv.x[i] *= w[i];
                gv.y[i] *= w[i];
            }
            const Raster d = divergence(gv);
            std::vector<double> out(v.size());
            for (std::size_t i = 0; i < v.size(); ++i)
                out[i] = v[i] - dt * d[i];
            return out;
        };

        std::vector<double> b(u_old.size());
        for (std::size_t i = 0; i < b.size(); ++i)
            b[i] = u_old[i] + dt * source[i];
        std::vector<double> x = u_old.values();
        conjugate_gradient(apply, b, x, cfg.cg_tol, cfg.cg_max_iters);
        levels.emplace_back(grid, std::move(x));
    }
    return levels;
}

PredictionResult predict_prototype(const PredictionProblem& problem, int threads) {
    problem.validate();
    const double t0 = static_cast<double>(problem.start.timestamp);
    const double t1 = static_cast<double>(problem.end.timestamp);
    const std::size_t nbands = problem.start.band_count();

    PredictionResult result;
    result.image.bands.resize(nbands);
    result.image.tags = problem.start.tags;
    result.image.timestamp = static_cast<std::int64_t>(std::llround(problem.target_day));
    result.endpoint_psnr.assign(nbands, 0.0);

    parallel_for_tasks(static_cast<int>(nbands), threads, [&](int band) {
        const Raster source = estimate_source(problem, band);
        const std::vector<Raster> levels =
            evolve_ibvp(problem.start.bands[static_cast<std::size_t>(band)], source, t0, t1,
                        problem.cfg);
        const double dt = (t1 - t0) / static_cast<double>(levels.size() - 1);
        const double pos = (problem.target_day - t0) / dt;
        const std::size_t nearest = static_cast<std::size_t>(
            std::clamp<long long>(std::llround(pos), 0, static_cast<long long>(levels.size()) - 1));
        result.image.bands[static_cast<std::size_t>(band)] = levels[nearest];
        result.endpoint_psnr[static_cast<std::size_t>(band)] =
            psnr(levels.back(), problem.end.bands[static_cast<std::size_t>(band)],
                 problem.cfg.intensity_cap);
    });
    return result;
}

} // namespace satfuse
