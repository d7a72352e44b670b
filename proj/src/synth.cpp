#include "satfuse/synth.hpp"

#include "satfuse/io.hpp"

#include <algorithm>
#include <cmath>

namespace satfuse {

std::vector<BandTag> default_band_tags(std::size_t n); // io.cpp

Scene make_scene(std::uint64_t seed, const GridSpec& grid, int n_fields, int bands,
                 double intensity_cap) {
    grid.validate();
    if (n_fields < 1) throw ValidationError("make_scene: need at least one field");
    if (bands < 1) throw ValidationError("make_scene: need at least one band");
    if (!(intensity_cap > 0.0)) throw ValidationError("make_scene: cap must be positive");

    Rng rng(seed);
    std::vector<double> site_x(static_cast<std::size_t>(n_fields));
    std::vector<double> site_y(static_cast<std::size_t>(n_fields));
    for (int f = 0; f < n_fields; ++f) {
        site_x[static_cast<std::size_t>(f)] = rng.uniform(0.0, grid.width - 1.0);
        site_y[static_cast<std::size_t>(f)] = rng.uniform(0.0, grid.height - 1.0);
    }

    Scene scene;
    scene.seed = seed;
    scene.n_fields = n_fields;
    scene.cell_of_pixel.resize(grid.size());
    for (int y = 0; y < grid.height; ++y)
        for (int x = 0; x < grid.width; ++x) {
            int best = 0;
            double best_d = 1e300;
            for (int f = 0; f < n_fields; ++f) {
                const double dx = x - site_x[static_cast<std::size_t>(f)];
                const double dy = y - site_y[static_cast<std::size_t>(f)];
                const double d = dx * dx + dy * dy;
                if (d < best_d) {
                    best_d = d;
                    best = f;
                }
            }
            scene.cell_of_pixel[static_cast<std::size_t>(y) * grid.width + x] = best;
        }

    // per-field, per-band signatures away from the box bounds so that
    // moderate growth keeps the series feasible
    scene.image.tags = default_band_tags(static_cast<std::size_t>(bands));
    scene.image.timestamp = 0;
    for (int b = 0; b < bands; ++b) {
        std::vector<double> level(static_cast<std::size_t>(n_fields));
        for (int f = 0; f < n_fields; ++f)
            level[static_cast<std::size_t>(f)] = intensity_cap * rng.uniform(0.15, 0.65);
        Raster band(grid);
        for (std::size_t i = 0; i < band.size(); ++i)
            band[i] = level[static_cast<std::size_t>(scene.cell_of_pixel[i])];
        scene.image.bands.push_back(std::move(band));
    }
    return scene;
}

std::vector<MultiBandImage> make_series(const Scene& scene, const std::vector<std::int64_t>& days,
                                        Evolution evolution) {
    if (days.empty()) throw ValidationError("make_series: no days given");
    for (std::size_t i = 0; i + 1 < days.size(); ++i)
        if (days[i] >= days[i + 1])
            throw ValidationError("make_series: days must be strictly increasing");

    const double t0 = static_cast<double>(days.front());
    const double t1 = static_cast<double>(days.back());
    const double span = std::max(1.0, t1 - t0);

    // per-field growth, derived from the scene seed
    Rng rng(scene.seed ^ 0x5eedf00dULL);
    std::vector<double> rate(static_cast<std::size_t>(scene.n_fields));
    std::vector<double> steep(static_cast<std::size_t>(scene.n_fields));
    for (int f = 0; f < scene.n_fields; ++f) {
        rate[static_cast<std::size_t>(f)] = rng.uniform(0.06, 0.16);
        steep[static_cast<std::size_t>(f)] = rng.uniform(4.0, 8.0);
    }

    auto multiplier = [&](int field, double t) {
        const double s = (t - t0) / span; // 0..1 across the series
        const double r = rate[static_cast<std::size_t>(field)];
        switch (evolution) {
            case Evolution::Constant:
                return 1.0;
            case Evolution::Linear:
                return 1.0 + r * s;
            case Evolution::Logistic: {
                const double k = steep[static_cast<std::size_t>(field)];
                const double sig0 = 1.0 / (1.0 + std::exp(k * 0.5));
                const double sig1 = 1.0 / (1.0 + std::exp(-k * 0.5));
                const double sig = 1.0 / (1.0 + std::exp(-k * (s - 0.5)));
                return 1.0 + r * (sig - sig0) / (sig1 - sig0);
            }
        }
        return 1.0;
    };

    std::vector<MultiBandImage> frames;
    frames.reserve(days.size());
    for (std::int64_t day : days) {
        MultiBandImage frame = scene.image;
        frame.timestamp = day;
        for (Raster& band : frame.bands)
            for (std::size_t i = 0; i < band.size(); ++i)
                band[i] *= multiplier(scene.cell_of_pixel[i], static_cast<double>(day));
        frames.push_back(std::move(frame));
    }
    return frames;
}

MultiBandImage apply_field_event(const Scene& scene, const MultiBandImage& frame,
                                 std::uint64_t seed, double strength) {
    if (!(frame.grid() == scene.image.grid()))
        throw ValidationError("apply_field_event: frame grid differs from the scene");
    if (strength < 0.0 || strength >= 1.0)
        throw ValidationError("apply_field_event: strength must lie in [0,1)");
    Rng rng(seed);
    std::vector<double> factor(static_cast<std::size_t>(scene.n_fields));
    for (double& f : factor) f = 1.0 + strength * (2.0 * rng.uniform() - 1.0);
    MultiBandImage out = frame;
    for (Raster& band : out.bands)
        for (std::size_t i = 0; i < band.size(); ++i)
            band[i] *= factor[static_cast<std::size_t>(scene.cell_of_pixel[i])];
    return out;
}

DamageMask make_clouds(std::uint64_t seed, const GridSpec& grid, double coverage) {
    grid.validate();
    if (coverage < 0.0 || coverage > 0.6)
        throw ValidationError("make_clouds: coverage must lie in [0, 0.6]");
    DamageMask mask(grid);
    if (coverage == 0.0) return mask;

    Rng rng(seed);
    const double total = static_cast<double>(grid.size());
    const double tol = 0.02;
    double scale = 1.0;
    bool reached = false;

    for (int attempt = 0; attempt < 4096; ++attempt) {
        const double frac = static_cast<double>(std::count(mask.mask.begin(), mask.mask.end(), 1)) / total;
        if (frac >= coverage - tol) {
            reached = true;
            break;
        }

        // candidate ellipse; shrink the draw scale whenever an overshoot forced a retry
        const double cx = rng.uniform(0.0, grid.width - 1.0);
        const double cy = rng.uniform(0.0, grid.height - 1.0);
        const double ax = scale * rng.uniform(0.06, 0.22) * grid.width;
        const double ay = scale * rng.uniform(0.06, 0.22) * grid.height;
        const double rot = rng.uniform(0.0, 3.14159265358979);
        const double cr = std::cos(rot), sr = std::sin(rot);

        std::vector<std::size_t> added;
        for (int y = 0; y < grid.height; ++y)
            for (int x = 0; x < grid.width; ++x) {
                const std::size_t i = static_cast<std::size_t>(y) * grid.width + x;
                if (mask.mask[i]) continue;
                const double dx = x - cx, dy = y - cy;
                const double ex = (cr * dx + sr * dy) / ax;
                const double ey = (-sr * dx + cr * dy) / ay;
                if (ex * ex + ey * ey <= 1.0) added.push_back(i);
            }
        const double new_frac = frac + static_cast<double>(added.size()) / total;
        if (new_frac > coverage + tol) {
            scale *= 0.7; // too big; try smaller clouds
            continue;
        }
        for (std::size_t i : added) mask.mask[i] = 1;
        scale = std::min(1.0, scale * 1.05);
    }
    if (!reached)
        throw ValidationError("make_clouds: could not reach the requested coverage");
    return mask;
}

MultiBandImage make_modis(const MultiBandImage& truth, const Kernel& kernel, const GridSpec& low,
                          double noise_sd, std::uint64_t noise_seed) {
    truth.validate("make_modis truth");
    MultiBandImage out;
    out.timestamp = truth.timestamp;
    Rng rng(noise_seed);
    for (std::size_t k = 0; k < truth.band_count(); ++k) {
        if (truth.tags[k].group != BandGroup::J1) continue;
        Raster band = downsample(truth.bands[k], kernel, low);
        if (noise_sd > 0.0) {
            for (std::size_t i = 0; i < band.size(); ++i) {
                // Box-Muller, deterministic by seed
                const double u1 = std::max(rng.uniform(), 1e-300);
                const double u2 = rng.uniform();
                band[i] += noise_sd * std::sqrt(-2.0 * std::log(u1)) *
                           std::cos(2.0 * 3.14159265358979 * u2);
            }
        }
        out.bands.push_back(std::move(band));
        out.tags.push_back(truth.tags[k]);
    }
    if (out.bands.empty())
        throw ValidationError("make_modis: truth image has no fused-group bands");
    return out;
}

std::size_t count_boundary_pixels(const Scene& scene) {
    const GridSpec& g = scene.image.grid();
    std::size_t n = 0;
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x) {
            const int c = scene.cell_of_pixel[static_cast<std::size_t>(y) * g.width + x];
            const bool boundary =
                (x + 1 < g.width && scene.cell_of_pixel[static_cast<std::size_t>(y) * g.width + x + 1] != c) ||
                (x > 0 && scene.cell_of_pixel[static_cast<std::size_t>(y) * g.width + x - 1] != c) ||
                (y + 1 < g.height && scene.cell_of_pixel[(static_cast<std::size_t>(y) + 1) * g.width + x] != c) ||
                (y > 0 && scene.cell_of_pixel[(static_cast<std::size_t>(y) - 1) * g.width + x] != c);
            if (boundary) ++n;
        }
    return n;
}

} // namespace satfuse
