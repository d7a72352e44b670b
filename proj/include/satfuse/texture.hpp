#ifndef SATFUSE_TEXTURE_HPP
#define SATFUSE_TEXTURE_HPP

#include "satfuse/config.hpp"
#include "satfuse/raster.hpp"

#include <span>

namespace satfuse {

/// Per-pixel variable exponent in (1,2]: close to 1 at edges, close to 2 on
/// homogeneous regions. Drives all nonlinear diffusion terms.
struct TextureIndexField {
    GridSpec grid;
    std::vector<double> q;

    TextureIndexField() = default;
    explicit TextureIndexField(GridSpec g, double fill = 2.0) : grid(g), q(g.size(), fill) {}

    double operator[](std::size_t i) const { return q[i]; }
    void validate() const; // enforces 1 < q <= 2 pixelwise
};

/// Cauchy-law edge-stopping function g(s) = a/(a+s), strictly decreasing,
/// g(0) = 1.
double edge_stop(double s, double a);

/// q(x) = 1 + g(|grad(G_sigma * band)(x)|^2).
TextureIndexField texture_index_static(const Raster& band, const FusionConfig& cfg);

struct TimedRaster {
    double time = 0.0;
    Raster image;
};

/// Texture index of a discrete flow: the squared smoothed-gradient magnitude
/// is averaged over the snapshots falling in the window [t-h, t] (trapezoid
/// in time; a single snapshot degenerates to the static index).
TextureIndexField texture_index_flow(std::span<const TimedRaster> history, double t,
                                     const FusionConfig& cfg);

/// Closed-form lower bound delta such that every produced index satisfies
/// q(x) >= 1 + delta; equals 1 when the flow vanishes. u_norm_sq is the
/// squared space-time L2 norm of the flow over the window.
double delta_lower_bound(const FusionConfig& cfg, const GridSpec& domain, double u_norm_sq);

/// The C^1 norm of the Gaussian over the difference set of the domain,
/// evaluated by the closed-form expression used by delta_lower_bound.
double gaussian_c1_norm(double sigma, const GridSpec& domain);

} // namespace satfuse

#endif
