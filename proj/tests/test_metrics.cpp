#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "satfuse/metrics.hpp"
#include "support/oracles.hpp"

#include <cmath>

using namespace satfuse;

namespace {

Raster random_raster(GridSpec g, std::uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    Raster r(g);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rng.uniform(lo, hi);
    return r;
}

} // namespace

TEST_CASE("rmse is the mean of squared differences") {
    GridSpec g{4, 4};
    const Raster a = random_raster(g, 1, 0.0, 10.0);
    CHECK(rmse(a, a) == 0.0);

    Raster b(g);
    for (std::size_t i = 0; i < a.size(); ++i) b[i] = a[i] + 1.0;
    CHECK(rmse(a, b) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(rmse_sqrt(a, b) == doctest::Approx(1.0).epsilon(1e-14));

    const Raster c = random_raster(g, 2, 0.0, 10.0);
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - c[i]) * (a[i] - c[i]);
    CHECK(rmse(a, c) == doctest::Approx(s / 16.0).epsilon(1e-14));
    CHECK(rmse_sqrt(a, c) == doctest::Approx(std::sqrt(s / 16.0)).epsilon(1e-14));

    CHECK_THROWS_AS(rmse(a, Raster(GridSpec{5, 5})), ValidationError);
}

TEST_CASE("correlation basics") {
    GridSpec g{6, 6};
    const Raster a = random_raster(g, 3, 0.0, 10.0);
    CHECK(corr(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    Raster neg(g), affine(g);
    for (std::size_t i = 0; i < a.size(); ++i) {
        neg[i] = -a[i];
        affine[i] = 2.0 * a[i] + 3.0;
    }
    CHECK(corr(a, neg) == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(corr(a, affine) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(corr(a, Raster(g, 5.0)), ValidationError);
}

TEST_CASE("laplacian correlation ignores affine trends") {
    GridSpec g{10, 10};
    const Raster a = random_raster(g, 4, 0.0, 10.0);
    CHECK(corr_laplace(a, a) == doctest::Approx(1.0).epsilon(1e-12));

    Raster plus_plane(g);
    for (int y = 0; y < g.height; ++y)
        for (int x = 0; x < g.width; ++x)
            plus_plane.at(x, y) = a.at(x, y) + 3.0 * x - 2.0 * y + 11.0;
    CHECK(corr_laplace(a, plus_plane) == doctest::Approx(1.0).epsilon(1e-10));

    // compose-then-correlate oracle on a random pair, interior pixels
    const Raster b = random_raster(g, 5, 0.0, 10.0);
    const Raster la = laplacian(a), lb = laplacian(b);
    std::vector<double> va, vb;
    for (int y = 1; y + 1 < g.height; ++y)
        for (int x = 1; x + 1 < g.width; ++x) {
            va.push_back(la.at(x, y));
            vb.push_back(lb.at(x, y));
        }
    const double n = static_cast<double>(va.size());
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        ma += va[i];
        mb += vb[i];
    }
    ma /= n;
    mb /= n;
    double caa = 0.0, cbb = 0.0, cab = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) {
        caa += (va[i] - ma) * (va[i] - ma);
        cbb += (vb[i] - mb) * (vb[i] - mb);
        cab += (va[i] - ma) * (vb[i] - mb);
    }
    CHECK(corr_laplace(a, b) == doctest::Approx(cab / std::sqrt(caa * cbb)).epsilon(1e-12));
}

TEST_CASE("ssim equals 1 on identical rasters and stays within bounds") {
    GridSpec g{16, 16};
    const Raster a = random_raster(g, 6, 0.0, 255.0);
    CHECK(ssim(a, a, 255.0) == doctest::Approx(1.0).epsilon(1e-12));
    const double v = ssim(a, Raster(g, 128.0), 255.0);
    CHECK(v >= -1.0);
    CHECK(v <= 1.0);
    CHECK_THROWS_AS(ssim(a, a, 0.0), ValidationError);
    CHECK_THROWS_AS(ssim(Raster(GridSpec{8, 8}), Raster(GridSpec{8, 8}), 255.0), ValidationError);
}

TEST_CASE("ssim matches the windowed-statistics oracle") {
    GridSpec g{16, 16};
    const Raster a = random_raster(g, 7, 0.0, 255.0);
    Raster b = random_raster(g, 8, 0.0, 255.0);
    // blend so structure is shared but not identical
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 0.7 * a[i] + 0.3 * b[i];
    CHECK(ssim(a, b, 255.0) == doctest::Approx(oracle::ssim_direct(a, b, 255.0)).epsilon(1e-8));
}

TEST_CASE("ssim is symmetric") {
    GridSpec g{16, 16};
    const Raster a = random_raster(g, 9, 0.0, 255.0);
    const Raster b = random_raster(g, 10, 0.0, 255.0);
    CHECK(ssim(a, b, 255.0) == doctest::Approx(ssim(b, a, 255.0)).epsilon(1e-12));
}

TEST_CASE("haarpsi equals 1 on identical rasters and lies in [0,1]") {
    GridSpec g{16, 16};
    const Raster a = random_raster(g, 11, 0.0, 255.0);
    CHECK(haarpsi(a, a) == doctest::Approx(1.0).epsilon(1e-9));
    const Raster b = random_raster(g, 12, 0.0, 255.0);
    const double v = haarpsi(a, b);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    CHECK(haarpsi(a, b) == doctest::Approx(haarpsi(b, a)).epsilon(1e-12));
    CHECK_THROWS_AS(haarpsi(Raster(GridSpec{4, 4}), Raster(GridSpec{4, 4})), ValidationError);
}

TEST_CASE("haarpsi matches the direct-loop oracle on a 32x32 pair") {
    GridSpec g{32, 32};
    const Raster a = random_raster(g, 13, 0.0, 255.0);
    Raster b = a;
    Rng rng(14);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += rng.uniform(-20.0, 20.0);
    CHECK(haarpsi(a, b) == doctest::Approx(oracle::haarpsi_direct(a, b)).epsilon(1e-6));
}

TEST_CASE("psnr follows the logarithmic law") {
    GridSpec g{8, 8};
    const Raster a = random_raster(g, 15, 0.0, 255.0);
    Raster plus1(g);
    for (std::size_t i = 0; i < a.size(); ++i) plus1[i] = a[i] + 1.0;
    CHECK(psnr(a, plus1, 255.0) == doctest::Approx(10.0 * std::log10(255.0 * 255.0)).epsilon(1e-12));
    CHECK(psnr(a, plus1, 255.0) == doctest::Approx(48.1308).epsilon(1e-4));

    // halving the MSE adds about 3.0103 dB
    Raster half(g);
    for (std::size_t i = 0; i < a.size(); ++i) half[i] = a[i] + 1.0 / std::sqrt(2.0);
    CHECK(psnr(a, half, 255.0) - psnr(a, plus1, 255.0) == doctest::Approx(3.0103).epsilon(1e-4));

    CHECK(std::isinf(psnr(a, a, 255.0)));

    const Raster b = random_raster(g, 16, 0.0, 255.0);
    CHECK(psnr(a, b, 255.0) ==
          doctest::Approx(10.0 * std::log10(255.0 * 255.0 / rmse(a, b))).epsilon(1e-12));
}

TEST_CASE("ndvi is the normalized band difference") {
    GridSpec g{6, 6};
    MultiBandImage img;
    img.tags = {{"B4", BandGroup::J1}, {"B8a", BandGroup::J1}};

    img.bands = {Raster(g, 3.0), Raster(g, 3.0)};
    Raster n = ndvi(img);
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(n[i] == 0.0);

    img.bands = {Raster(g, 0.0), Raster(g, 5.0)};
    n = ndvi(img);
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(n[i] == 1.0);

    img.bands = {random_raster(g, 17, 0.5, 9.0), random_raster(g, 18, 0.5, 9.0)};
    n = ndvi(img);
    for (std::size_t i = 0; i < n.size(); ++i) {
        const double expect =
            (img.bands[1][i] - img.bands[0][i]) / (img.bands[1][i] + img.bands[0][i]);
        CHECK(n[i] == doctest::Approx(expect).epsilon(1e-14));
        CHECK(n[i] >= -1.0);
        CHECK(n[i] <= 1.0);
    }

    // zero denominators are counted and mapped to zero
    img.bands = {Raster(g, 0.0), Raster(g, 0.0)};
    std::size_t warnings = 0;
    n = ndvi(img, &warnings);
    CHECK(warnings == g.size());
    for (std::size_t i = 0; i < n.size(); ++i) CHECK(n[i] == 0.0);

    MultiBandImage untagged;
    untagged.bands = {Raster(g, 1.0)};
    untagged.tags = {{"B2", BandGroup::J1}};
    CHECK_THROWS_AS(ndvi(untagged), ValidationError);
}
