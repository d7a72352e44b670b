#ifndef SATFUSE_IO_HPP
#define SATFUSE_IO_HPP

#include "satfuse/raster.hpp"

#include <optional>
#include <string>
#include <vector>

namespace satfuse {

// SFR1 container: magic "SFR1", little-endian u32 width, u32 height,
// u32 band_count, u64 timestamp_day_index, then band-sequential row-major
// float32 samples.

void write_sfr1(const std::string& path, const MultiBandImage& img);
MultiBandImage read_sfr1(const std::string& path);

/// Single raster convenience wrappers (band_count 1).
void write_sfr1(const std::string& path, const Raster& band, std::int64_t timestamp = 0);
Raster read_sfr1_band(const std::string& path, int band = 0);

// Binary PGM (P5), 8-bit or 16-bit (16-bit is big-endian per the format).
// Values are clipped to [0, maxval] and rounded on export.

void write_pgm(const std::string& path, const Raster& band, int maxval = 255);
Raster read_pgm(const std::string& path, int* maxval_out = nullptr);

// Damage masks ride in single-band SFR1 files holding 0/1 samples.
void write_mask(const std::string& path, const DamageMask& mask);
DamageMask read_mask(const std::string& path);

/// One time-series entry of a fusion manifest.
struct ManifestEntry {
    std::string image_path;
    std::string mask_path; // empty = no mask
    std::int64_t day = 0;
};

/// Plain-text run manifest. Entry lines look like
///   image=img_000.sfr mask=mask_000.sfr day=0
///   image=img_001.sfr mask=none day=10
/// plus optional single-value lines: modis=<path>, truth=<path>,
/// target_day=<int>. Relative paths resolve against the manifest directory.
struct Manifest {
    std::vector<ManifestEntry> entries;
    std::string modis_path;               // empty = absent
    std::string truth_path;               // empty = absent
    std::optional<std::int64_t> target_day;
};

Manifest read_manifest(const std::string& path);
void write_manifest(const std::string& path, const Manifest& m);

} // namespace satfuse

#endif
