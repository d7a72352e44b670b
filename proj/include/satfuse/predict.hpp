#ifndef SATFUSE_PREDICT_HPP
#define SATFUSE_PREDICT_HPP

#include "satfuse/config.hpp"
#include "satfuse/raster.hpp"
#include "satfuse/texture.hpp"

#include <utility>
#include <vector>

namespace satfuse {

/// Daily prediction between two structural prototypes: estimate a source
/// term from the observed change, then evolve the variable-exponent
/// diffusion from the start frame to the target day.
struct PredictionProblem {
    MultiBandImage start;
    MultiBandImage end;
    double target_day = 0.0;
    FusionConfig cfg;

    void validate() const;
};

/// Diffusivity |mag|^(p-2) with the magnitude clamped below at `floor`
/// before exponentiation and the result clamped to [1e-8, 1e8].
double diffusion_weight(double grad_mag, double p, double floor = 1e-2);

/// div(|grad u|^(p-2) grad u) with the clamped diffusivity.
Raster p_laplacian_divergence(const Raster& u, const TextureIndexField& p, double floor = 1e-2);

/// (time derivative, averaged p-Laplacian divergence) of the band across
/// the prediction interval; the divergence averages the two endpoint fluxes
/// with exponents from their own static texture indices.
std::pair<Raster, Raster> spatiotemporal_derivatives(const PredictionProblem& problem, int band);

/// Source term: solves (I - lambda1^2 Lap) v = f with reflecting boundary by
/// conjugate gradients, where f = time derivative - averaged divergence.
Raster estimate_source(const PredictionProblem& problem, int band);

/// Semi-implicit time stepping of du/dt - div(|grad u|^(p-2) grad u) = v
/// with the exponent lagged to the previous iterate. Returns every time
/// level including both endpoints; the first level is the initial bit-for-bit.
std::vector<Raster> evolve_ibvp(const Raster& initial, const Raster& source, double t0, double t1,
                                const FusionConfig& cfg);

struct PredictionResult {
    MultiBandImage image;                    // prototype at the time level nearest target_day
    std::vector<double> endpoint_psnr;       // per band, prediction at t1 vs the end frame
};

PredictionResult predict_prototype(const PredictionProblem& problem, int threads = 1);

} // namespace satfuse

#endif
