#include "satfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace satfuse {

namespace {
void require_same_grid(const Raster& a, const Raster& b, const char* what) {
    if (!(a.grid() == b.grid()))
        throw ValidationError(std::string(what) + ": grid mismatch");
}
} // namespace

double rmse(const Raster& a, const Raster& b) {
    require_same_grid(a, b, "rmse");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return s / static_cast<double>(a.size());
}

double rmse_sqrt(const Raster& a, const Raster& b) {
    return std::sqrt(rmse(a, b));
}

double corr(const Raster& a, const Raster& b) {
    require_same_grid(a, b, "corr");
    const double n = static_cast<double>(a.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += a[i];
        mb += b[i];
    }
    ma /= n;
    mb /= n;
    double caa = 0.0, cbb = 0.0, cab = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double da = a[i] - ma, db = b[i] - mb;
        caa += da * da;
        cbb += db * db;
        cab += da * db;
    }
    if (!(caa > 0.0) || !(cbb > 0.0))
        throw ValidationError("corr: zero variance input");
    return cab / std::sqrt(caa * cbb);
}

double corr_laplace(const Raster& a, const Raster& b) {
    require_same_grid(a, b, "corr_laplace");
    const int W = a.width(), H = a.height();
    if (W < 3 || H < 3)
        throw ValidationError("corr_laplace: raster too small");
    const Raster la = laplacian(a), lb = laplacian(b);
    // interior pixels only; the boundary rows of the Neumann stencil carry
    // one-sided differences that do not kill affine trends
    const std::size_t n = static_cast<std::size_t>(W - 2) * (H - 2);
    std::vector<double> va, vb;
    va.reserve(n);
    vb.reserve(n);
    for (int y = 1; y + 1 < H; ++y)
        for (int x = 1; x + 1 < W; ++x) {
            va.push_back(la.at(x, y));
            vb.push_back(lb.at(x, y));
        }
    GridSpec g{W - 2, H - 2, 1.0, 1.0};
    return corr(Raster(g, std::move(va)), Raster(g, std::move(vb)));
}

double ssim(const Raster& a, const Raster& b, double dynamic_range) {
    require_same_grid(a, b, "ssim");
    if (!(dynamic_range > 0.0))
        throw ValidationError("ssim: dynamic range must be positive");
    constexpr int kRadius = 5; // 11x11 window
    const int W = a.width(), H = a.height();
    if (W < 2 * kRadius + 1 || H < 2 * kRadius + 1)
        throw ValidationError("ssim: raster smaller than the 11x11 window");

    // normalized 1-D Gaussian taps, sigma 1.5
    double taps[2 * kRadius + 1];
    double sum = 0.0;
    for (int k = -kRadius; k <= kRadius; ++k) {
        taps[k + kRadius] = std::exp(-static_cast<double>(k * k) / (2.0 * 1.5 * 1.5));
        sum += taps[k + kRadius];
    }
    for (double& t : taps) t /= sum;

    // separable weighted moments of a, b, a^2, b^2, ab
    auto filter = [&](const std::vector<double>& src) {
        std::vector<double> tmp(src.size()), out(src.size());
        for (int y = 0; y < H; ++y)
            for (int x = kRadius; x < W - kRadius; ++x) {
                double acc = 0.0;
                for (int k = -kRadius; k <= kRadius; ++k)
                    acc += taps[k + kRadius] * src[static_cast<std::size_t>(y) * W + x + k];
                tmp[static_cast<std::size_t>(y) * W + x] = acc;
            }
        for (int y = kRadius; y < H - kRadius; ++y)
            for (int x = kRadius; x < W - kRadius; ++x) {
                double acc = 0.0;
                for (int k = -kRadius; k <= kRadius; ++k)
                    acc += taps[k + kRadius] * tmp[static_cast<std::size_t>(y + k) * W + x];
                out[static_cast<std::size_t>(y) * W + x] = acc;
            }
        return out;
    };

    const std::size_t n = a.size();
    std::vector<double> aa(n), bb(n), ab(n);
    for (std::size_t i = 0; i < n; ++i) {
        aa[i] = a[i] * a[i];
        bb[i] = b[i] * b[i];
        ab[i] = a[i] * b[i];
    }
    const auto mu_a = filter(a.values());
    const auto mu_b = filter(b.values());
    const auto m_aa = filter(aa);
    const auto m_bb = filter(bb);
    const auto m_ab = filter(ab);

    const double c1 = (0.01 * dynamic_range) * (0.01 * dynamic_range);
    const double c2 = (0.03 * dynamic_range) * (0.03 * dynamic_range);

    double pooled = 0.0;
    std::size_t count = 0;
    for (int y = kRadius; y < H - kRadius; ++y)
        for (int x = kRadius; x < W - kRadius; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * W + x;
            const double va = m_aa[i] - mu_a[i] * mu_a[i];
            const double vb = m_bb[i] - mu_b[i] * mu_b[i];
            const double vab = m_ab[i] - mu_a[i] * mu_b[i];
            const double num = (2.0 * mu_a[i] * mu_b[i] + c1) * (2.0 * vab + c2);
            const double den = (mu_a[i] * mu_a[i] + mu_b[i] * mu_b[i] + c1) * (va + vb + c2);
            pooled += num / den;
            ++count;
        }
    return pooled / static_cast<double>(count);
}

namespace {

/// Haar response at one scale: the 2^j x 2^j kernel has value +-2^-j with
/// the sign split across the middle; `transpose` swaps the orientation.
/// Zero padding; the window for output pixel x spans [x - K/2, x + K/2 - 1].
std::vector<double> haar_response(const Raster& img, int scale, bool transpose) {
    const int K = 1 << scale;
    const int c = K / 2;
    const double amp = 1.0 / static_cast<double>(K);
    const int W = img.width(), H = img.height();
    // separable: signed average along one axis, plain average along the other
    std::vector<double> tmp(img.size(), 0.0), out(img.size(), 0.0);
    // pass 1: signed (or plain) vertical accumulation
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double acc = 0.0;
            for (int p = 0; p < K; ++p) {
                const int yy = y - c + p;
                if (yy < 0 || yy >= H) continue;
                const double sign = transpose ? 1.0 : (p < c ? -1.0 : 1.0);
                acc += sign * img.at(x, yy);
            }
            tmp[static_cast<std::size_t>(y) * W + x] = acc * amp;
        }
    // pass 2: the other axis
    for (int y = 0; y < H; ++y)
        for (int x = 0; x < W; ++x) {
            double acc = 0.0;
            for (int q = 0; q < K; ++q) {
                const int xx = x - c + q;
                if (xx < 0 || xx >= W) continue;
                const double sign = transpose ? (q < c ? -1.0 : 1.0) : 1.0;
                acc += sign * tmp[static_cast<std::size_t>(y) * W + xx];
            }
            out[static_cast<std::size_t>(y) * W + x] = acc * amp;
        }
    return out;
}

double logistic(double x, double alpha) { return 1.0 / (1.0 + std::exp(-alpha * x)); }

} // namespace

double haarpsi(const Raster& a, const Raster& b) {
    require_same_grid(a, b, "haarpsi");
    if (a.width() < 8 || a.height() < 8)
        throw ValidationError("haarpsi: raster smaller than the coarsest 8x8 filter");

    constexpr double kC = 30.0;
    constexpr double kAlpha = 4.2;
    const std::size_t n = a.size();

    double weighted = 0.0, weight_sum = 0.0;
    for (int ori = 0; ori < 2; ++ori) {
        const bool tr = ori == 1;
        const auto a1 = haar_response(a, 1, tr), b1 = haar_response(b, 1, tr);
        const auto a2 = haar_response(a, 2, tr), b2 = haar_response(b, 2, tr);
        const auto a3 = haar_response(a, 3, tr), b3 = haar_response(b, 3, tr);
        for (std::size_t i = 0; i < n; ++i) {
            const double m1a = std::abs(a1[i]), m1b = std::abs(b1[i]);
            const double m2a = std::abs(a2[i]), m2b = std::abs(b2[i]);
            const double sim1 = (2.0 * m1a * m1b + kC) / (m1a * m1a + m1b * m1b + kC);
            const double sim2 = (2.0 * m2a * m2b + kC) / (m2a * m2a + m2b * m2b + kC);
            const double sim = 0.5 * (sim1 + sim2);
            const double w = std::max(std::abs(a3[i]), std::abs(b3[i]));
            weighted += logistic(sim, kAlpha) * w;
            weight_sum += w;
        }
    }
    if (weight_sum == 0.0)
        return 1.0; // both images constant: every response vanishes
    const double pooled = weighted / weight_sum;
    const double inv = std::log(pooled / (1.0 - pooled)) / kAlpha;
    return inv * inv;
}

double psnr(const Raster& a, const Raster& b, double peak) {
    require_same_grid(a, b, "psnr");
    if (!(peak > 0.0))
        throw ValidationError("psnr: peak must be positive");
    const double mse = rmse(a, b);
    if (mse == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(peak * peak / mse);
}

Raster ndvi(const MultiBandImage& img, std::size_t* warnings) {
    const int near_ir = img.find_band("B8a");
    const int red = img.find_band("B4");
    if (near_ir < 0 || red < 0)
        throw ValidationError("ndvi: image lacks B4/B8a band tags");
    const Raster& nir = img.bands[static_cast<std::size_t>(near_ir)];
    const Raster& r = img.bands[static_cast<std::size_t>(red)];
    Raster out(nir.grid());
    std::size_t warn = 0;
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double den = nir[i] + r[i];
        if (den == 0.0) {
            out[i] = 0.0;
            ++warn;
        } else {
            out[i] = (nir[i] - r[i]) / den;
        }
    }
    if (warnings) *warnings = warn;
    return out;
}

} // namespace satfuse
