#include "satfuse/raster.hpp"

#include <cmath>
#include <numbers>

namespace satfuse {

double GridSpec::domain_diameter() const {
    return std::hypot(width * pitch_x, height * pitch_y);
}

void GridSpec::validate() const {
    if (width < 2 || height < 2)
        throw ValidationError("grid must be at least 2x2, got " + std::to_string(width) + "x" +
                              std::to_string(height));
    if (!(pitch_x > 0.0) || !(pitch_y > 0.0))
        throw ValidationError("grid pitches must be positive");
}

Raster::Raster(GridSpec grid, std::vector<double> values)
    : grid_(grid), v_(std::move(values)) {
    grid_.validate();
    if (v_.size() != grid_.size())
        throw ValidationError("raster value count " + std::to_string(v_.size()) +
                              " does not match grid " + std::to_string(grid_.size()));
}

void Raster::validate(const std::string& name) const {
    grid_.validate();
    if (v_.size() != grid_.size())
        throw ValidationError(name + ": value count does not match grid");
    for (double x : v_)
        if (!std::isfinite(x))
            throw ValidationError(name + ": non-finite sample");
}

double VectorField::norm_at(std::size_t i) const {
    return std::hypot(x[i], y[i]);
}

bool DamageMask::empty() const {
    for (auto m : mask)
        if (m) return false;
    return true;
}

double DamageMask::damaged_fraction() const {
    if (mask.empty()) return 0.0;
    std::size_t n = 0;
    for (auto m : mask) n += m ? 1 : 0;
    return static_cast<double>(n) / static_cast<double>(mask.size());
}

std::size_t DamageMask::undamaged_count() const {
    std::size_t n = 0;
    for (auto m : mask) n += m ? 0 : 1;
    return n;
}

const GridSpec& MultiBandImage::grid() const {
    if (bands.empty())
        throw ValidationError("image has no bands");
    return bands.front().grid();
}

int MultiBandImage::find_band(const std::string& tag_name) const {
    for (std::size_t k = 0; k < tags.size(); ++k)
        if (tags[k].name == tag_name) return static_cast<int>(k);
    return -1;
}

void MultiBandImage::validate(const std::string& name) const {
    if (bands.empty())
        throw ValidationError(name + ": no bands");
    if (!tags.empty() && tags.size() != bands.size())
        throw ValidationError(name + ": tag count differs from band count");
    for (std::size_t k = 0; k < bands.size(); ++k) {
        bands[k].validate(name + " band " + std::to_string(k));
        if (!(bands[k].grid() == bands.front().grid()))
            throw ValidationError(name + ": bands disagree on grid");
    }
    for (std::size_t k = 0; k + 1 < tags.size(); ++k)
        for (std::size_t l = k + 1; l < tags.size(); ++l)
            if (tags[k].name == tags[l].name)
                throw ValidationError(name + ": duplicate band tag " + tags[k].name);
}

Kernel Kernel::box(int size) {
    if (size < 1) throw ValidationError("kernel size must be >= 1");
    Kernel k;
    k.size = size;
    k.kind = Kind::Box;
    k.taps.assign(static_cast<std::size_t>(size) * size, 1.0 / (static_cast<double>(size) * size));
    return k;
}

namespace {
double sinc(double x) {
    if (x == 0.0) return 1.0;
    const double px = std::numbers::pi * x;
    return std::sin(px) / px;
}
} // namespace

Kernel Kernel::lanczos(int size, double lobes) {
    if (size < 1) throw ValidationError("kernel size must be >= 1");
    if (!(lobes > 0.0)) throw ValidationError("lanczos lobe count must be positive");
    // Sample the windowed sinc uniformly across its support [-lobes, lobes]
    // and normalize to unit mass so constants are preserved.
    std::vector<double> w(size);
    double sum = 0.0;
    for (int p = 0; p < size; ++p) {
        const double z = (p + 0.5) * (2.0 * lobes / size) - lobes;
        w[p] = sinc(z) * sinc(z / lobes);
        sum += w[p];
    }
    for (double& x : w) x /= sum;
    Kernel k;
    k.size = size;
    k.kind = Kind::Lanczos;
    k.taps.resize(static_cast<std::size_t>(size) * size);
    for (int p = 0; p < size; ++p)
        for (int q = 0; q < size; ++q)
            k.taps[static_cast<std::size_t>(p) * size + q] = w[p] * w[q];
    return k;
}

VectorField gradient(const Raster& u) {
    const GridSpec& g = u.grid();
    VectorField f(g);
    const int W = g.width, H = g.height;
    const double inv_px = 1.0 / g.pitch_x, inv_py = 1.0 / g.pitch_y;
    for (int y = 0; y < H; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * W;
        for (int x = 0; x < W; ++x) {
            const std::size_t i = row + x;
            f.x[i] = (x + 1 < W) ? (u[i + 1] - u[i]) * inv_px : 0.0;
            f.y[i] = (y + 1 < H) ? (u[i + W] - u[i]) * inv_py : 0.0;
        }
    }
    return f;
}

Raster divergence(const VectorField& f) {
    const GridSpec& g = f.grid;
    Raster d(g);
    const int W = g.width, H = g.height;
    const double inv_px = 1.0 / g.pitch_x, inv_py = 1.0 / g.pitch_y;
    // Backward differences; the last column/row of f is outside the range of
    // gradient() and is ignored, which makes divergence the exact negative
    // adjoint of gradient for every field.
    for (int y = 0; y < H; ++y) {
        const std::size_t row = static_cast<std::size_t>(y) * W;
        for (int x = 0; x < W; ++x) {
            const std::size_t i = row + x;
            double fx_here = (x + 1 < W) ? f.x[i] : 0.0;
            double fx_left = (x > 0) ? f.x[i - 1] : 0.0;
            double fy_here = (y + 1 < H) ? f.y[i] : 0.0;
            double fy_up = (y > 0) ? f.y[i - W] : 0.0;
            d[i] = (fx_here - fx_left) * inv_px + (fy_here - fy_up) * inv_py;
        }
    }
    return d;
}

Raster laplacian(const Raster& u) {
    return divergence(gradient(u));
}

namespace {
// half-sample mirror: -1 -> 0, N -> N-1; repeated until inside
int reflect_index(int i, int n) {
    while (i < 0 || i >= n) {
        if (i < 0) i = -i - 1;
        if (i >= n) i = 2 * n - i - 1;
    }
    return i;
}
} // namespace

Raster convolve_gaussian(const Raster& u, double sigma, Padding padding) {
    if (!(sigma > 0.0))
        throw ValidationError("gaussian sigma must be positive");
    const GridSpec& g = u.grid();

    auto make_taps = [sigma](double pitch) {
        const int radius = static_cast<int>(std::ceil(4.0 * sigma / pitch));
        std::vector<double> t(static_cast<std::size_t>(2 * radius + 1));
        const double norm = pitch / (std::sqrt(2.0 * std::numbers::pi) * sigma);
        for (int k = -radius; k <= radius; ++k) {
            const double z = k * pitch;
            t[static_cast<std::size_t>(k + radius)] = norm * std::exp(-z * z / (2.0 * sigma * sigma));
        }
        return t;
    };

    const std::vector<double> tx = make_taps(g.pitch_x);
    const std::vector<double> ty = make_taps(g.pitch_y);
    const int rx = (static_cast<int>(tx.size()) - 1) / 2;
    const int ry = (static_cast<int>(ty.size()) - 1) / 2;
    const int W = g.width, H = g.height;
    const bool reflect = padding == Padding::Reflect;

    // Horizontal pass.
    Raster tmp(g);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double acc = 0.0;
            if (reflect) {
                for (int k = -rx; k <= rx; ++k)
                    acc += tx[static_cast<std::size_t>(k + rx)] * u.at(reflect_index(x + k, W), y);
            } else {
                const int k0 = std::max(-rx, -x), k1 = std::min(rx, W - 1 - x);
                for (int k = k0; k <= k1; ++k)
                    acc += tx[static_cast<std::size_t>(k + rx)] * u.at(x + k, y);
            }
            tmp.at(x, y) = acc;
        }
    }
    // Vertical pass.
    Raster out(g);
    for (int y = 0; y < H; ++y) {
        for (int x = 0; x < W; ++x) {
            double acc = 0.0;
            if (reflect) {
                for (int k = -ry; k <= ry; ++k)
                    acc += ty[static_cast<std::size_t>(k + ry)] * tmp.at(x, reflect_index(y + k, H));
            } else {
                const int k0 = std::max(-ry, -y), k1 = std::min(ry, H - 1 - y);
                for (int k = k0; k <= k1; ++k)
                    acc += ty[static_cast<std::size_t>(k + ry)] * tmp.at(x, y + k);
            }
            out.at(x, y) = acc;
        }
    }
    return out;
}

namespace {
void downsample_ratios(const GridSpec& high, const GridSpec& low, int& rx, int& ry) {
    if (low.width < 1 || low.height < 1)
        throw ValidationError("low grid is empty");
    if (high.width % low.width != 0 || high.height % low.height != 0)
        throw ValidationError("low grid does not fit inside the high grid footprint: " +
                              std::to_string(high.width) + "x" + std::to_string(high.height) +
                              " vs " + std::to_string(low.width) + "x" + std::to_string(low.height));
    rx = high.width / low.width;
    ry = high.height / low.height;
}
} // namespace

Raster downsample(const Raster& high, const Kernel& kernel, const GridSpec& low) {
    int rx = 0, ry = 0;
    downsample_ratios(high.grid(), low, rx, ry);
    const int K = kernel.size;
    const int W = high.width(), H = high.height();
    Raster out(low);
    for (int j = 0; j < low.height; ++j) {
        const int Y = (j + 1) * ry - 1;
        for (int i = 0; i < low.width; ++i) {
            const int X = (i + 1) * rx - 1;
            double acc = 0.0;
            for (int p = 0; p < K; ++p) {
                const int xx = X - p;
                if (xx < 0 || xx >= W) continue;
                for (int q = 0; q < K; ++q) {
                    const int yy = Y - q;
                    if (yy < 0 || yy >= H) continue;
                    acc += kernel.tap(p, q) * high.at(xx, yy);
                }
            }
            out.at(i, j) = acc;
        }
    }
    return out;
}

Raster downsample_adjoint(const Raster& low_values, const Kernel& kernel, const GridSpec& high) {
    int rx = 0, ry = 0;
    downsample_ratios(high, low_values.grid(), rx, ry);
    const int K = kernel.size;
    const int W = high.width, H = high.height;
    Raster out(high);
    for (int j = 0; j < low_values.height(); ++j) {
        const int Y = (j + 1) * ry - 1;
        for (int i = 0; i < low_values.width(); ++i) {
            const int X = (i + 1) * rx - 1;
            const double r = low_values.at(i, j);
            for (int p = 0; p < K; ++p) {
                const int xx = X - p;
                if (xx < 0 || xx >= W) continue;
                for (int q = 0; q < K; ++q) {
                    const int yy = Y - q;
                    if (yy < 0 || yy >= H) continue;
                    out.at(xx, yy) += kernel.tap(p, q) * r;
                }
            }
        }
    }
    return out;
}

Raster spectral_energy(const MultiBandImage& img, int blue, int green, int red) {
    const int n = static_cast<int>(img.band_count());
    if (n < 3)
        throw ValidationError("spectral energy needs at least 3 bands");
    for (int idx : {blue, green, red})
        if (idx < 0 || idx >= n)
            throw ValidationError("spectral energy band index out of range");
    const Raster& b = img.bands[static_cast<std::size_t>(blue)];
    const Raster& g = img.bands[static_cast<std::size_t>(green)];
    const Raster& r = img.bands[static_cast<std::size_t>(red)];
    Raster out(b.grid());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = 0.114 * b[i] + 0.587 * g[i] + 0.299 * r[i];
    return out;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double dot(const VectorField& a, const VectorField& b) {
    return dot(a.x, b.x) + dot(a.y, b.y);
}

double norm2(const std::vector<double>& a) {
    return std::sqrt(dot(a, a));
}

} // namespace satfuse
