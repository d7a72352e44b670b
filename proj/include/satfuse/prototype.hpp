#ifndef SATFUSE_PROTOTYPE_HPP
#define SATFUSE_PROTOTYPE_HPP

#include "satfuse/raster.hpp"

#include <vector>

namespace satfuse {

/// Least-squares scale between the current frame and the previous prototype
/// over the undamaged pixels: sum(S * P) / sum(P * P) restricted to the
/// complement of the mask. Keeps filled regions free of false contours.
double gamma_coefficient(const Raster& current, const Raster& previous_prototype,
                         const DamageMask& mask);

/// Gap-filled series: the first frame must be cloud-free; for i >= 2 every
/// damaged pixel of frame i is replaced by gamma * previous prototype, per
/// band, while undamaged pixels are copied verbatim.
std::vector<MultiBandImage> build_prototypes(const std::vector<MultiBandImage>& series,
                                             const std::vector<DamageMask>& masks);

} // namespace satfuse

#endif
