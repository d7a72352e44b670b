#include "satfuse/texture.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace satfuse {

void TextureIndexField::validate() const {
    for (double v : q)
        if (!(v > 1.0) || !(v <= 2.0))
            throw ValidationError("texture index out of (1,2]: " + std::to_string(v));
}

double edge_stop(double s, double a) {
    if (s < 0.0) throw ValidationError("edge_stop: s must be nonnegative");
    if (!(a > 0.0)) throw ValidationError("edge_stop: a must be positive");
    return a / (a + s);
}

namespace {

/// |grad(G_sigma * band)|^2 per pixel. Reflecting continuation keeps the
/// index honest at the image border: a homogeneous scene cut off by the
/// frame stays homogeneous, so q stays 2 there.
std::vector<double> smoothed_gradient_energy(const Raster& band, const FusionConfig& cfg) {
    const VectorField g = gradient(convolve_gaussian(band, cfg.sigma, Padding::Reflect));
    std::vector<double> s(g.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        s[i] = g.x[i] * g.x[i] + g.y[i] * g.y[i];
    return s;
}

TextureIndexField from_energy(const GridSpec& grid, const std::vector<double>& s,
                              const FusionConfig& cfg) {
    TextureIndexField f(grid);
    for (std::size_t i = 0; i < s.size(); ++i)
        f.q[i] = 1.0 + edge_stop(s[i], cfg.a);
    return f;
}

} // namespace

TextureIndexField texture_index_static(const Raster& band, const FusionConfig& cfg) {
    cfg.validate();
    return from_energy(band.grid(), smoothed_gradient_energy(band, cfg), cfg);
}

TextureIndexField texture_index_flow(std::span<const TimedRaster> history, double t,
                                     const FusionConfig& cfg) {
    cfg.validate();
    if (history.empty())
        throw ValidationError("texture_index_flow: empty history");

    for (std::size_t k = 0; k + 1 < history.size(); ++k)
        if (history[k].time > history[k + 1].time)
            throw ValidationError("texture_index_flow: history must be time-ordered");

    std::vector<const TimedRaster*> window;
    for (const TimedRaster& snap : history)
        if (snap.time >= t - cfg.h && snap.time <= t)
            window.push_back(&snap);
    if (window.empty())
        throw ValidationError("texture_index_flow: no snapshot inside [t-h, t]");

    const GridSpec grid = window.front()->image.grid();
    if (window.size() == 1)
        return from_energy(grid, smoothed_gradient_energy(window.front()->image, cfg), cfg);

    std::vector<std::vector<double>> energies;
    energies.reserve(window.size());
    for (const TimedRaster* snap : window) {
        if (!(snap->image.grid() == grid))
            throw ValidationError("texture_index_flow: snapshots disagree on grid");
        energies.push_back(smoothed_gradient_energy(snap->image, cfg));
    }

    const double span = window.back()->time - window.front()->time;
    std::vector<double> avg(grid.size(), 0.0);
    if (span <= 0.0) {
        // coincident snapshot times: plain mean
        for (const auto& e : energies)
            for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += e[i];
        for (double& v : avg) v /= static_cast<double>(energies.size());
    } else {
        for (std::size_t k = 0; k + 1 < window.size(); ++k) {
            const double w = 0.5 * (window[k + 1]->time - window[k]->time) / span;
            for (std::size_t i = 0; i < avg.size(); ++i)
                avg[i] += w * (energies[k][i] + energies[k + 1][i]);
        }
    }
    return from_energy(grid, avg, cfg);
}

double gaussian_c1_norm(double sigma, const GridSpec& domain) {
    const double diam = domain.domain_diameter();
    const double two_pi_s2 = 2.0 * std::numbers::pi * sigma * sigma;
    return std::exp(-1.0) / two_pi_s2 * (1.0 + diam / (sigma * sigma));
}

double delta_lower_bound(const FusionConfig& cfg, const GridSpec& domain, double u_norm_sq) {
    cfg.validate();
    if (u_norm_sq < 0.0)
        throw ValidationError("delta_lower_bound: norm argument must be nonnegative");
    const double c1 = gaussian_c1_norm(cfg.sigma, domain);
    const double ah = cfg.a * cfg.h;
    return ah / (ah + c1 * c1 * domain.domain_area() * u_norm_sq);
}

} // namespace satfuse
