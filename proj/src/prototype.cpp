#include "satfuse/prototype.hpp"

namespace satfuse {

double gamma_coefficient(const Raster& current, const Raster& previous_prototype,
                         const DamageMask& mask) {
    if (!(current.grid() == previous_prototype.grid()) || !(current.grid() == mask.grid))
        throw ValidationError("gamma_coefficient: grid mismatch");
    if (mask.undamaged_count() == 0)
        throw ValidationError("gamma_coefficient: mask damages every pixel");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < current.size(); ++i) {
        if (mask.mask[i]) continue;
        num += current[i] * previous_prototype[i];
        den += previous_prototype[i] * previous_prototype[i];
    }
    if (!(den > 0.0))
        throw ValidationError("gamma_coefficient: degenerate prototype (zero masked norm)");
    return num / den;
}

std::vector<MultiBandImage> build_prototypes(const std::vector<MultiBandImage>& series,
                                             const std::vector<DamageMask>& masks) {
    if (series.empty())
        throw ValidationError("build_prototypes: empty series");
    if (series.size() != masks.size())
        throw ValidationError("build_prototypes: series and mask counts differ");
    if (!masks.front().empty())
        throw ValidationError("build_prototypes: first image must be cloud-free");

    const GridSpec grid = series.front().grid();
    const std::size_t nbands = series.front().band_count();
    for (std::size_t i = 0; i < series.size(); ++i) {
        series[i].validate("series image " + std::to_string(i));
        if (!(series[i].grid() == grid) || !(masks[i].grid == grid))
            throw ValidationError("build_prototypes: grid mismatch at image " + std::to_string(i));
        if (series[i].band_count() != nbands)
            throw ValidationError("build_prototypes: band count mismatch at image " +
                                  std::to_string(i));
        if (i > 0 && series[i].timestamp <= series[i - 1].timestamp)
            throw ValidationError("build_prototypes: series must be strictly time-ordered");
    }

    std::vector<MultiBandImage> prototypes;
    prototypes.reserve(series.size());
    prototypes.push_back(series.front());

    for (std::size_t i = 1; i < series.size(); ++i) {
        const MultiBandImage& current = series[i];
        const MultiBandImage& prev = prototypes.back();
        const DamageMask& mask = masks[i];
        MultiBandImage out = current; // undamaged pixels copied bit-for-bit
        for (std::size_t k = 0; k < nbands; ++k) {
            if (mask.empty()) continue;
            const double gamma = gamma_coefficient(current.bands[k], prev.bands[k], mask);
            Raster& band = out.bands[k];
            const Raster& prev_band = prev.bands[k];
            for (std::size_t z = 0; z < band.size(); ++z)
                if (mask.mask[z]) band[z] = gamma * prev_band[z];
        }
        prototypes.push_back(std::move(out));
    }
    return prototypes;
}

} // namespace satfuse
