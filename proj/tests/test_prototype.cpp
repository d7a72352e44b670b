#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "satfuse/prototype.hpp"

using namespace satfuse;

namespace {

MultiBandImage one_band(const Raster& r, std::int64_t day) {
    MultiBandImage img;
    img.bands = {r};
    img.tags = {{"B2", BandGroup::J1}};
    img.timestamp = day;
    return img;
}

Raster random_raster(GridSpec g, std::uint64_t seed, double lo, double hi) {
    Rng rng(seed);
    Raster r(g);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = rng.uniform(lo, hi);
    return r;
}

} // namespace

TEST_CASE("gamma is 1 when current equals the previous prototype off the mask") {
    GridSpec g{3, 3};
    const Raster prev = random_raster(g, 1, 1.0, 5.0);
    Raster current = prev;
    DamageMask mask(g);
    mask.mask[4] = 1;
    current[4] = -999.0; // damaged value must not matter
    CHECK(gamma_coefficient(current, prev, mask) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("gamma scales linearly") {
    GridSpec g{3, 3};
    const Raster prev = random_raster(g, 2, 1.0, 5.0);
    Raster current(g);
    for (std::size_t i = 0; i < current.size(); ++i) current[i] = 2.0 * prev[i];
    DamageMask mask(g);
    mask.mask[0] = 1;
    CHECK(gamma_coefficient(current, prev, mask) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("gamma matches the masked dot-product oracle on a mixed 3x3 case") {
    GridSpec g{3, 3};
    Raster current(g), prev(g);
    const double cur_vals[9] = {4, 2, 1, 8, 3, 5, 9, 7, 6};
    const double prev_vals[9] = {1, 2, 3, 4, 5, 6, 7, 8, 9};
    for (int i = 0; i < 9; ++i) {
        current[static_cast<std::size_t>(i)] = cur_vals[i];
        prev[static_cast<std::size_t>(i)] = prev_vals[i];
    }
    DamageMask mask(g);
    mask.mask[1] = mask.mask[5] = mask.mask[6] = 1;

    double num = 0.0, den = 0.0;
    for (int i : {0, 2, 3, 4, 7, 8}) {
        num += cur_vals[i] * prev_vals[i];
        den += prev_vals[i] * prev_vals[i];
    }
    CHECK(gamma_coefficient(current, prev, mask) == doctest::Approx(num / den).epsilon(1e-15));
}

TEST_CASE("gamma rejects degenerate inputs") {
    GridSpec g{2, 2};
    DamageMask all(g, true);
    CHECK_THROWS_AS(gamma_coefficient(Raster(g, 1.0), Raster(g, 1.0), all), ValidationError);
    DamageMask one(g);
    one.mask[0] = 1;
    CHECK_THROWS_AS(gamma_coefficient(Raster(g, 1.0), Raster(g, 0.0), one), ValidationError);
}

TEST_CASE("prototypes equal inputs when no mask is damaged") {
    GridSpec g{4, 4};
    std::vector<MultiBandImage> series = {one_band(random_raster(g, 3, 0, 9), 0),
                                          one_band(random_raster(g, 4, 0, 9), 5)};
    std::vector<DamageMask> masks = {DamageMask(g), DamageMask(g)};
    const auto protos = build_prototypes(series, masks);
    REQUIRE(protos.size() == 2);
    CHECK(protos[0].bands[0] == series[0].bands[0]);
    CHECK(protos[1].bands[0] == series[1].bands[0]);
    CHECK(protos[1].timestamp == 5);
}

TEST_CASE("a frame equal to the first off the mask is reconstructed inside it") {
    GridSpec g{4, 4};
    const Raster base = random_raster(g, 5, 1.0, 9.0);
    Raster corrupted = base;
    DamageMask mask(g);
    mask.mask[5] = mask.mask[6] = 1;
    corrupted[5] = corrupted[6] = 777.0;
    std::vector<MultiBandImage> series = {one_band(base, 0), one_band(corrupted, 3)};
    std::vector<DamageMask> masks = {DamageMask(g), mask};
    const auto protos = build_prototypes(series, masks);
    // gamma is exactly 1, so the filled pixels reproduce the first frame
    CHECK(protos[1].bands[0][5] == doctest::Approx(base[5]).epsilon(1e-15));
    CHECK(protos[1].bands[0][6] == doctest::Approx(base[6]).epsilon(1e-15));
}

TEST_CASE("a globally rescaled frame fills with the rescaled previous prototype") {
    GridSpec g{4, 4};
    const Raster base = random_raster(g, 6, 1.0, 9.0);
    Raster scaled(g);
    for (std::size_t i = 0; i < base.size(); ++i) scaled[i] = 1.5 * base[i];
    DamageMask mask(g);
    mask.mask[9] = mask.mask[10] = 1;
    Raster corrupted = scaled;
    corrupted[9] = corrupted[10] = -1.0;
    std::vector<MultiBandImage> series = {one_band(base, 0), one_band(corrupted, 4)};
    std::vector<DamageMask> masks = {DamageMask(g), mask};
    const auto protos = build_prototypes(series, masks);
    CHECK(protos[1].bands[0][9] == doctest::Approx(1.5 * base[9]).epsilon(1e-12));
    CHECK(protos[1].bands[0][10] == doctest::Approx(1.5 * base[10]).epsilon(1e-12));
}

TEST_CASE("undamaged pixels pass through bit-for-bit") {
    GridSpec g{5, 5};
    const Raster r0 = random_raster(g, 7, 0.0, 100.0);
    const Raster r1 = random_raster(g, 8, 0.0, 100.0);
    DamageMask mask(g);
    for (std::size_t i = 0; i < 7; ++i) mask.mask[i] = 1;
    std::vector<MultiBandImage> series = {one_band(r0, 0), one_band(r1, 2)};
    std::vector<DamageMask> masks = {DamageMask(g), mask};
    const auto protos = build_prototypes(series, masks);
    for (std::size_t i = 0; i < r1.size(); ++i)
        if (!mask.mask[i]) CHECK(protos[1].bands[0][i] == r1[i]);
}

TEST_CASE("prototype construction is equivariant under global scaling") {
    GridSpec g{5, 5};
    const Raster r0 = random_raster(g, 9, 1.0, 50.0);
    const Raster r1 = random_raster(g, 10, 1.0, 50.0);
    DamageMask mask(g);
    mask.mask[2] = mask.mask[12] = mask.mask[22] = 1;
    std::vector<DamageMask> masks = {DamageMask(g), mask};

    std::vector<MultiBandImage> series = {one_band(r0, 0), one_band(r1, 1)};
    const auto protos = build_prototypes(series, masks);

    const double c = 3.5;
    Raster s0(g), s1(g);
    for (std::size_t i = 0; i < r0.size(); ++i) {
        s0[i] = c * r0[i];
        s1[i] = c * r1[i];
    }
    std::vector<MultiBandImage> scaled_series = {one_band(s0, 0), one_band(s1, 1)};
    const auto scaled_protos = build_prototypes(scaled_series, masks);
    for (std::size_t i = 0; i < r0.size(); ++i)
        CHECK(scaled_protos[1].bands[0][i] ==
              doctest::Approx(c * protos[1].bands[0][i]).epsilon(1e-12));
}

TEST_CASE("prototype construction rejects invalid series") {
    GridSpec g{4, 4};
    DamageMask dirty(g);
    dirty.mask[0] = 1;
    std::vector<MultiBandImage> series = {one_band(Raster(g, 1.0), 0), one_band(Raster(g, 1.0), 2)};

    std::vector<DamageMask> bad_first = {dirty, DamageMask(g)};
    CHECK_THROWS_AS(build_prototypes(series, bad_first), ValidationError);

    std::vector<MultiBandImage> unordered = {one_band(Raster(g, 1.0), 5), one_band(Raster(g, 1.0), 2)};
    std::vector<DamageMask> masks = {DamageMask(g), DamageMask(g)};
    CHECK_THROWS_AS(build_prototypes(unordered, masks), ValidationError);

    std::vector<MultiBandImage> mixed = {one_band(Raster(g, 1.0), 0),
                                         one_band(Raster(GridSpec{5, 5}, 1.0), 2)};
    std::vector<DamageMask> masks2 = {DamageMask(g), DamageMask(GridSpec{5, 5})};
    CHECK_THROWS_AS(build_prototypes(mixed, masks2), ValidationError);
}
