#ifndef SATFUSE_GEOMETRY_HPP
#define SATFUSE_GEOMETRY_HPP

#include "satfuse/config.hpp"
#include "satfuse/raster.hpp"

namespace satfuse {

/// Short run of the regularized total-variation flow
/// dU/dt = div(grad U / (|grad U| + eps)) with reflecting boundaries,
/// integrated by explicit steps from U(0) = band to t_stop.
Raster tv_flow(const Raster& band, double eps, double t_stop, double dt);

/// Unit normals to the topographic map:
/// theta = grad U(t_stop) / (|grad U(t_stop)| + eps), so |theta| < 1
/// pixelwise and theta = 0 wherever the gradient vanishes.
VectorField normal_field(const Raster& band, double eps, double t_stop, double dt);
VectorField normal_field(const Raster& band, const FusionConfig& cfg);

/// Pixelwise linear map R g = g - eta^2 (theta, g) theta. Damps the
/// component along theta by (1 - eta^2), leaves the tangential part intact.
struct DirectionalOperator {
    VectorField theta;
    double eta = 0.95;

    DirectionalOperator() = default;
    DirectionalOperator(VectorField t, double e);
};

VectorField apply_R(const DirectionalOperator& op, const VectorField& g);

/// Transpose of apply_R; R is pixelwise symmetric so this matches apply_R,
/// which the unit tests assert rather than assume.
VectorField apply_R_adjoint(const DirectionalOperator& op, const VectorField& g);

/// Diagnostic integral of |(theta_perp, g)|: small values mean the field's
/// level lines follow the normals' topographic map. Not part of any energy.
double tangential_misalignment(const VectorField& theta, const VectorField& g);

} // namespace satfuse

#endif
