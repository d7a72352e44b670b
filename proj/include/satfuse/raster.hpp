#ifndef SATFUSE_RASTER_HPP
#define SATFUSE_RASTER_HPP

#include "satfuse/common.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace satfuse {

/// Rectangular sample grid: pixel counts plus grid spacing in abstract
/// length units. Two rasters interoperate only if their grids are equal.
struct GridSpec {
    int width = 0;
    int height = 0;
    double pitch_x = 1.0;
    double pitch_y = 1.0;

    std::size_t size() const { return static_cast<std::size_t>(width) * height; }
    double pixel_area() const { return pitch_x * pitch_y; }
    /// Physical extent, treating pixels as cells: [0, width*pitch_x] x [0, height*pitch_y].
    double domain_area() const { return width * pitch_x * height * pitch_y; }
    double domain_diameter() const;

    void validate() const;
    bool operator==(const GridSpec&) const = default;
};

/// Single-band scalar field on a grid, row-major, double precision.
class Raster {
public:
    Raster() = default;
    Raster(GridSpec grid, double fill = 0.0)
        : grid_(grid), v_(grid.size(), fill) { grid_.validate(); }
    Raster(GridSpec grid, std::vector<double> values);

    const GridSpec& grid() const { return grid_; }
    int width() const { return grid_.width; }
    int height() const { return grid_.height; }
    std::size_t size() const { return v_.size(); }

    double& at(int x, int y) { return v_[static_cast<std::size_t>(y) * grid_.width + x]; }
    double at(int x, int y) const { return v_[static_cast<std::size_t>(y) * grid_.width + x]; }
    double& operator[](std::size_t i) { return v_[i]; }
    double operator[](std::size_t i) const { return v_[i]; }

    std::vector<double>& values() { return v_; }
    const std::vector<double>& values() const { return v_; }

    /// Throws ValidationError on NaN/Inf entries or size mismatch.
    void validate(const std::string& name = "raster") const;

    bool operator==(const Raster&) const = default;

private:
    GridSpec grid_;
    std::vector<double> v_;
};

/// Per-pixel 2-vector field (gradients, unit normals), stored as two planes.
struct VectorField {
    GridSpec grid;
    std::vector<double> x;
    std::vector<double> y;

    VectorField() = default;
    explicit VectorField(GridSpec g) : grid(g), x(g.size(), 0.0), y(g.size(), 0.0) {}

    std::size_t size() const { return x.size(); }
    double norm_at(std::size_t i) const;
};

/// Boolean damage mask; true marks a corrupted pixel.
struct DamageMask {
    GridSpec grid;
    std::vector<std::uint8_t> mask; // 0 = intact, 1 = damaged

    DamageMask() = default;
    explicit DamageMask(GridSpec g, bool damaged = false)
        : grid(g), mask(g.size(), damaged ? 1 : 0) {}

    bool empty() const;
    double damaged_fraction() const;
    std::size_t undamaged_count() const;
};

enum class BandGroup { J1, J2 };

struct BandTag {
    std::string name;   // e.g. "B2", "B8a"
    BandGroup group = BandGroup::J1;

    bool operator==(const BandTag&) const = default;
};

/// Ordered stack of co-registered bands sharing one grid, with a day index.
struct MultiBandImage {
    std::vector<Raster> bands;
    std::vector<BandTag> tags;
    std::int64_t timestamp = 0; // day index

    std::size_t band_count() const { return bands.size(); }
    const GridSpec& grid() const;
    int find_band(const std::string& tag_name) const; // -1 if absent
    void validate(const std::string& name = "image") const;
};

/// Square resampling kernel (impulse response of the low-resolution sensor).
struct Kernel {
    enum class Kind { Box, Lanczos };

    int size = 0;
    Kind kind = Kind::Box;
    std::vector<double> taps; // size*size, row-major

    static Kernel box(int size);
    static Kernel lanczos(int size, double lobes = 2.0);

    double tap(int p, int q) const { return taps[static_cast<std::size_t>(p) * size + q]; }
};

// ---- finite-difference / convolution primitives ------------------------

/// Forward differences scaled by pitch; zero at the right/bottom border so
/// the discrete field is consistent with a reflecting (zero normal
/// derivative) boundary.
VectorField gradient(const Raster& u);

/// Exact negative adjoint of gradient(): <grad u, f> = -<u, divergence(f)>
/// for every raster u and field f on the same grid.
Raster divergence(const VectorField& f);

/// divergence(gradient(u)); the 5-point Neumann-consistent Laplacian.
Raster laplacian(const Raster& u);

enum class Padding { Zero, Reflect };

/// Gaussian smoothing with zero extension outside the domain (the default)
/// or reflecting continuation. Separable taps sampled from the continuous
/// density, truncated at radius ceil(4*sigma/pitch), not renormalized.
Raster convolve_gaussian(const Raster& u, double sigma, Padding padding = Padding::Zero);

/// Convolution kernel*I sampled on the low grid. Low sample (i,j) anchors
/// at high pixel ((i+1)*rx-1, (j+1)*ry-1) and the K-window extends back
/// up-left, so a K=r box kernel yields exact block means; I is
/// zero-extended outside its grid.
Raster downsample(const Raster& high, const Kernel& kernel, const GridSpec& low);

/// Exact transpose of downsample(): scatters each low-grid value back
/// through the kernel taps onto the high grid.
Raster downsample_adjoint(const Raster& low_values, const Kernel& kernel, const GridSpec& high);

/// Y = 0.114*blue + 0.587*green + 0.299*red.
Raster spectral_energy(const MultiBandImage& img, int blue = 0, int green = 1, int red = 2);

// ---- small helpers used across modules ----------------------------------

double dot(const std::vector<double>& a, const std::vector<double>& b);
double dot(const VectorField& a, const VectorField& b);
double norm2(const std::vector<double>& a);

} // namespace satfuse

#endif
