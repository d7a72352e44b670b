#include "satfuse/geometry.hpp"

#include <cmath>

namespace satfuse {

Raster tv_flow(const Raster& band, double eps, double t_stop, double dt) {
    if (!(eps > 0.0)) throw ValidationError("tv_flow: eps must be positive");
    if (!(dt > 0.0)) throw ValidationError("tv_flow: dt must be positive");
    if (t_stop < 0.0) throw ValidationError("tv_flow: t_stop must be nonnegative");

    Raster u = band;
    double t = 0.0;
    while (t < t_stop) {
        const double step = std::min(dt, t_stop - t);
        VectorField g = gradient(u);
        for (std::size_t i = 0; i < g.size(); ++i) {
            const double mag = std::hypot(g.x[i], g.y[i]);
            const double w = 1.0 / (mag + eps);
            g.x[i] *= w;
            g.y[i] *= w;
        }
        const Raster d = divergence(g);
        for (std::size_t i = 0; i < u.size(); ++i)
            u[i] += step * d[i];
        t += step;
    }
    return u;
}

VectorField normal_field(const Raster& band, double eps, double t_stop, double dt) {
    const Raster u = tv_flow(band, eps, t_stop, dt);
    VectorField g = gradient(u);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double mag = std::hypot(g.x[i], g.y[i]);
        const double w = 1.0 / (mag + eps);
        g.x[i] *= w;
        g.y[i] *= w;
    }
    return g;
}

VectorField normal_field(const Raster& band, const FusionConfig& cfg) {
    const double dt = cfg.flow_dt();
    return normal_field(band, cfg.eps, cfg.normal_flow_steps * dt, dt);
}

DirectionalOperator::DirectionalOperator(VectorField t, double e) : theta(std::move(t)), eta(e) {
    if (!(eta > 0.0 && eta < 1.0))
        throw ValidationError("directional operator: eta must lie in (0,1)");
    for (std::size_t i = 0; i < theta.size(); ++i)
        if (theta.norm_at(i) > 1.0 + 1e-12)
            throw ValidationError("directional operator: |theta| must not exceed 1");
}

namespace {
VectorField apply_impl(const DirectionalOperator& op, const VectorField& g) {
    if (!(op.theta.grid == g.grid))
        throw ValidationError("directional operator: grid mismatch");
    const double e2 = op.eta * op.eta;
    VectorField out(g.grid);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const double proj = op.theta.x[i] * g.x[i] + op.theta.y[i] * g.y[i];
        out.x[i] = g.x[i] - e2 * proj * op.theta.x[i];
        out.y[i] = g.y[i] - e2 * proj * op.theta.y[i];
    }
    return out;
}
} // namespace

VectorField apply_R(const DirectionalOperator& op, const VectorField& g) {
    return apply_impl(op, g);
}

VectorField apply_R_adjoint(const DirectionalOperator& op, const VectorField& g) {
    // I - eta^2 theta theta^T is symmetric at every pixel.
    return apply_impl(op, g);
}

double tangential_misalignment(const VectorField& theta, const VectorField& g) {
    if (!(theta.grid == g.grid))
        throw ValidationError("tangential_misalignment: grid mismatch");
    const double area = theta.grid.pixel_area();
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
        sum += std::abs(-theta.y[i] * g.x[i] + theta.x[i] * g.y[i]);
    return sum * area;
}

} // namespace satfuse
