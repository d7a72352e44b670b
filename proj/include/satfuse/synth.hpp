#ifndef SATFUSE_SYNTH_HPP
#define SATFUSE_SYNTH_HPP

#include "satfuse/common.hpp"
#include "satfuse/raster.hpp"

#include <vector>

namespace satfuse {

/// Voronoi-cell agro scene: piecewise-constant per-field intensities with a
/// per-band signature. Carries the cell map so series generation can evolve
/// fields independently.
struct Scene {
    MultiBandImage image;
    std::vector<int> cell_of_pixel; // field id per pixel
    int n_fields = 0;
    std::uint64_t seed = 0;
};

/// Deterministic scene with values in [0, intensity_cap]. The first six
/// bands are tagged into the fused group, the rest into the copied group.
Scene make_scene(std::uint64_t seed, const GridSpec& grid, int n_fields, int bands,
                 double intensity_cap = 255.0);

enum class Evolution { Constant, Linear, Logistic };

/// Frames at the given day indices with smooth per-field multiplicative
/// intensity trajectories (identical frames under Constant).
std::vector<MultiBandImage> make_series(const Scene& scene, const std::vector<std::int64_t>& days,
                                        Evolution evolution);

/// Day-specific deviation from the smooth trajectories: every field gets a
/// multiplicative factor drawn from [1-strength, 1+strength]. Models events
/// (rain, harvest, flushes) visible only to the daily low-res sensor.
MultiBandImage apply_field_event(const Scene& scene, const MultiBandImage& frame,
                                 std::uint64_t seed, double strength);

/// Union of random ellipses thresholded to the requested damaged fraction
/// within +-2 percent. Coverage above 0.6 is rejected.
DamageMask make_clouds(std::uint64_t seed, const GridSpec& grid, double coverage);

/// Simulated low-resolution acquisition: the fused-group bands resampled
/// through the kernel, plus optional seeded additive noise.
MultiBandImage make_modis(const MultiBandImage& truth, const Kernel& kernel, const GridSpec& low,
                          double noise_sd, std::uint64_t noise_seed = 0);

/// Pixels whose 4-neighborhood crosses a field boundary.
std::size_t count_boundary_pixels(const Scene& scene);

} // namespace satfuse

#endif
