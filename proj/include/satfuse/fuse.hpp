#ifndef SATFUSE_FUSE_HPP
#define SATFUSE_FUSE_HPP

#include "satfuse/config.hpp"
#include "satfuse/geometry.hpp"
#include "satfuse/raster.hpp"
#include "satfuse/texture.hpp"

#include <optional>
#include <vector>

namespace satfuse {

/// Weighted addends of the fusion energy. total = directional +
/// gradient_fidelity + observed_fidelity + lowres_fidelity, with the mu /
/// gamma / vartheta weights already applied.
struct EnergyBreakdown {
    double total = 0.0;
    double directional = 0.0;       // (1/q) |R grad u|^q integral
    double gradient_fidelity = 0.0; // (mu/2) |grad u - grad prototype|^2
    double observed_fidelity = 0.0; // (gamma/2) |u - observed|^2 off the damage set
    double lowres_fidelity = 0.0;   // (vartheta/2) squared low-grid residuals
};

struct ObservedBand {
    Raster values;
    DamageMask damage;
};

/// One per-band constrained minimization instance.
struct FusionProblem {
    Raster prototype;                     // structural prototype of the band
    std::optional<ObservedBand> observed; // present in restoration mode only
    Raster modis;                         // low-resolution band
    TextureIndexField q;                  // texture index of the prototype
    VectorField theta;                    // unit normals of the prototype
    Kernel kernel;                        // resampling impulse response
    FusionConfig cfg;

    void validate() const;
};

/// Builds q, theta and the kernel from the prototype band and config.
FusionProblem make_fusion_problem(Raster prototype_band, Raster modis_band,
                                  std::optional<ObservedBand> observed, const FusionConfig& cfg);

/// Energy of a feasible u (0 <= u <= C pixelwise; violations are an error,
/// not a clamp).
EnergyBreakdown energy(const FusionProblem& problem, const Raster& u);

/// Exact gradient of the discrete energy.
Raster energy_gradient(const FusionProblem& problem, const Raster& u);

struct TracePoint {
    int iteration = 0;
    EnergyBreakdown energy;
};

/// Projected gradient descent: spectral (Barzilai-Borwein) trial steps with
/// halving backtracking, so every accepted step strictly decreases the
/// energy and every iterate stays inside the box. Stops on relative
/// decrease < cfg.descent_tol, cfg.descent_max_iters, or when no decreasing
/// step exists at the smallest step size.
Raster solve(const FusionProblem& problem, const Raster& initial,
             std::vector<TracePoint>* trace = nullptr);

/// Left side of the first-order optimality inequality <grad E(u), v - u>
/// for a feasible candidate v; nonnegative for every feasible v at an exact
/// minimizer.
double stationarity_inequality(const FusionProblem& problem, const Raster& u, const Raster& v);

/// Worst inequality value over n_dirs seeded random feasible directions,
/// normalized per direction by energy(u).total + energy(v).total (the
/// natural magnitude of the inequality's terms). Values >= -1e-6 certify
/// stationarity to six digits.
double stationarity_worst_rel(const FusionProblem& problem, const Raster& u, int n_dirs,
                              std::uint64_t seed);

/// Least-squares intensity match: argmin_c ||reference - c*u0|| over the
/// unmasked pixels (all pixels when mask is absent).
double beta_scaling(const Raster& reference, const Raster& u0, const DamageMask* mask = nullptr);

/// Per-band minimization record kept for reports and diagnostics.
struct BandSolve {
    std::size_t band = 0; // index within the image
    std::string tag;
    double beta = 1.0;
    Raster u0; // minimizer before intensity rescale
    std::vector<TracePoint> trace;
};

/// Restoration (the target day coincides with acquisition i_star): fused
/// values replace damaged pixels only; undamaged pixels and the copied-band
/// group pass through bit-for-bit.
MultiBandImage run_restoration(const std::vector<MultiBandImage>& series,
                               const std::vector<DamageMask>& masks, const MultiBandImage& modis,
                               std::size_t i_star, const FusionConfig& cfg, int threads = 1,
                               MultiBandImage* prototype_out = nullptr,
                               std::vector<BandSolve>* solves = nullptr);

/// Interpolation (target day strictly between two acquisitions): predicts
/// the prototype for the target day, then fuses each low-res-matched band.
MultiBandImage run_interpolation(const std::vector<MultiBandImage>& series,
                                 const std::vector<DamageMask>& masks, const MultiBandImage& modis,
                                 double target_day, const FusionConfig& cfg, int threads = 1,
                                 MultiBandImage* prototype_out = nullptr,
                                 std::vector<BandSolve>* solves = nullptr);

/// Extrapolation (target day after the last acquisition): the last
/// prototype stands in for the prediction; the solve path matches
/// interpolation.
MultiBandImage run_extrapolation(const std::vector<MultiBandImage>& series,
                                 const std::vector<DamageMask>& masks, const MultiBandImage& modis,
                                 double target_day, const FusionConfig& cfg, int threads = 1,
                                 MultiBandImage* prototype_out = nullptr,
                                 std::vector<BandSolve>* solves = nullptr);

} // namespace satfuse

#endif
