#ifndef SATFUSE_METRICS_HPP
#define SATFUSE_METRICS_HPP

#include "satfuse/raster.hpp"

namespace satfuse {

/// Mean of squared differences (no square root). The companion rmse_sqrt
/// reports the rooted value; both are emitted so neither reading of the
/// name is silently imposed.
double rmse(const Raster& a, const Raster& b);
double rmse_sqrt(const Raster& a, const Raster& b);

/// Pearson correlation over all pixels; errors on constant inputs.
double corr(const Raster& a, const Raster& b);

/// Pearson correlation of 5-point-Laplacian-filtered rasters over interior
/// pixels (the filter kills affine trends there).
double corr_laplace(const Raster& a, const Raster& b);

/// Mean structural similarity: 11x11 Gaussian window with sigma 1.5,
/// c1=(0.01 L)^2, c2=(0.03 L)^2, pooled over fully interior windows.
double ssim(const Raster& a, const Raster& b, double dynamic_range);

/// Haar wavelet-based perceptual similarity: 3-scale Haar responses,
/// similarity of the two finest scales weighted by the coarsest, logistic
/// pooling with C=30, alpha=4.2. Result lies in [0,1].
double haarpsi(const Raster& a, const Raster& b);

/// 10*log10(peak^2 / MSE); +infinity for identical inputs.
double psnr(const Raster& a, const Raster& b, double peak);

/// (B8a - B4) / (B8a + B4); zero-denominator pixels map to 0 and are
/// counted into *warnings when provided.
Raster ndvi(const MultiBandImage& img, std::size_t* warnings = nullptr);

} // namespace satfuse

#endif
