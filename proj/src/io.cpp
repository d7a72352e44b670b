#include "satfuse/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace satfuse {

namespace {

void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
    put_u32(os, static_cast<std::uint32_t>(v & 0xffffffffULL));
    put_u32(os, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4))
        throw ValidationError(path + ": truncated header");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& is, const std::string& path) {
    std::uint64_t lo = get_u32(is, path);
    std::uint64_t hi = get_u32(is, path);
    return lo | (hi << 32);
}

void put_f32(std::ostream& os, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(os, v);
}

float get_f32(std::istream& is, const std::string& path) {
    std::uint32_t v = get_u32(is, path);
    float f;
    std::memcpy(&f, &v, 4);
    return f;
}

// Default band naming when an image carries no tags: the six channels with
// low-resolution counterparts first, the remaining ones after.
const char* kJ1Names[6] = {"B2", "B3", "B4", "B8a", "B11", "B12"};
const char* kJ2Names[7] = {"B1", "B5", "B6", "B7", "B8", "B9", "B10"};

} // namespace

std::vector<BandTag> default_band_tags(std::size_t n); // forward

std::vector<BandTag> default_band_tags(std::size_t n) {
    std::vector<BandTag> tags;
    tags.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (k < 6)
            tags.push_back({kJ1Names[k], BandGroup::J1});
        else if (k < 13)
            tags.push_back({kJ2Names[k - 6], BandGroup::J2});
        else
            tags.push_back({"X" + std::to_string(k), BandGroup::J2});
    }
    return tags;
}

void write_sfr1(const std::string& path, const MultiBandImage& img) {
    img.validate(path);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    os.write("SFR1", 4);
    put_u32(os, static_cast<std::uint32_t>(img.grid().width));
    put_u32(os, static_cast<std::uint32_t>(img.grid().height));
    put_u32(os, static_cast<std::uint32_t>(img.band_count()));
    put_u64(os, static_cast<std::uint64_t>(img.timestamp));
    for (const Raster& band : img.bands)
        for (double v : band.values())
            put_f32(os, static_cast<float>(v));
    if (!os) throw ValidationError("write failed: " + path);
}

MultiBandImage read_sfr1(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open: " + path);
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, "SFR1", 4) != 0)
        throw ValidationError(path + ": not an SFR1 file");
    const std::uint32_t w = get_u32(is, path);
    const std::uint32_t h = get_u32(is, path);
    const std::uint32_t nb = get_u32(is, path);
    const std::uint64_t ts = get_u64(is, path);
    if (w < 2 || h < 2 || nb < 1 || w > 1u << 20 || h > 1u << 20 || nb > 4096)
        throw ValidationError(path + ": implausible header");
    MultiBandImage img;
    img.timestamp = static_cast<std::int64_t>(ts);
    GridSpec grid{static_cast<int>(w), static_cast<int>(h), 1.0, 1.0};
    for (std::uint32_t b = 0; b < nb; ++b) {
        Raster band(grid);
        for (std::size_t i = 0; i < band.size(); ++i)
            band[i] = static_cast<double>(get_f32(is, path));
        img.bands.push_back(std::move(band));
    }
    img.tags = default_band_tags(nb);
    img.validate(path);
    return img;
}

void write_sfr1(const std::string& path, const Raster& band, std::int64_t timestamp) {
    MultiBandImage img;
    img.bands.push_back(band);
    img.tags = default_band_tags(1);
    img.timestamp = timestamp;
    write_sfr1(path, img);
}

Raster read_sfr1_band(const std::string& path, int band) {
    MultiBandImage img = read_sfr1(path);
    if (band < 0 || band >= static_cast<int>(img.band_count()))
        throw ValidationError(path + ": band index out of range");
    return std::move(img.bands[static_cast<std::size_t>(band)]);
}

void write_pgm(const std::string& path, const Raster& band, int maxval) {
    if (maxval != 255 && maxval != 65535)
        throw ValidationError("pgm maxval must be 255 or 65535");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    os << "P5\n" << band.width() << " " << band.height() << "\n" << maxval << "\n";
    for (double v : band.values()) {
        long q = std::lround(std::clamp(v, 0.0, static_cast<double>(maxval)));
        if (maxval == 255) {
            unsigned char b = static_cast<unsigned char>(q);
            os.write(reinterpret_cast<const char*>(&b), 1);
        } else {
            unsigned char b[2] = {static_cast<unsigned char>((q >> 8) & 0xff),
                                  static_cast<unsigned char>(q & 0xff)};
            os.write(reinterpret_cast<const char*>(b), 2);
        }
    }
    if (!os) throw ValidationError("write failed: " + path);
}

Raster read_pgm(const std::string& path, int* maxval_out) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ValidationError("cannot open: " + path);
    std::string magic;
    is >> magic;
    if (magic != "P5") throw ValidationError(path + ": not a binary PGM (P5) file");
    auto next_int = [&is, &path]() {
        // skip whitespace and '#' comment lines
        for (;;) {
            int c = is.peek();
            if (c == '#') {
                std::string line;
                std::getline(is, line);
            } else if (std::isspace(c)) {
                is.get();
            } else {
                break;
            }
        }
        long v = -1;
        if (!(is >> v) || v < 0) throw ValidationError(path + ": malformed PGM header");
        return v;
    };
    const long w = next_int();
    const long h = next_int();
    const long maxval = next_int();
    if (maxval != 255 && maxval != 65535)
        throw ValidationError(path + ": unsupported PGM maxval " + std::to_string(maxval));
    is.get(); // single whitespace after maxval
    Raster out(GridSpec{static_cast<int>(w), static_cast<int>(h), 1.0, 1.0});
    const int bytes = maxval == 255 ? 1 : 2;
    std::vector<unsigned char> buf(out.size() * static_cast<std::size_t>(bytes));
    if (!is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
        throw ValidationError(path + ": truncated PGM payload");
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (bytes == 1)
            out[i] = buf[i];
        else
            out[i] = 256.0 * buf[2 * i] + buf[2 * i + 1];
    }
    if (maxval_out) *maxval_out = static_cast<int>(maxval);
    return out;
}

void write_mask(const std::string& path, const DamageMask& mask) {
    Raster r(mask.grid);
    for (std::size_t i = 0; i < r.size(); ++i)
        r[i] = mask.mask[i] ? 1.0 : 0.0;
    write_sfr1(path, r, 0);
}

DamageMask read_mask(const std::string& path) {
    Raster r = read_sfr1_band(path);
    DamageMask m(r.grid());
    for (std::size_t i = 0; i < r.size(); ++i)
        m.mask[i] = r[i] > 0.5 ? 1 : 0;
    return m;
}

namespace {
std::string resolve_relative(const std::string& base_dir, const std::string& p) {
    if (p.empty()) return p;
    std::filesystem::path fp(p);
    if (fp.is_absolute()) return p;
    return (std::filesystem::path(base_dir) / fp).string();
}
} // namespace

Manifest read_manifest(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ValidationError("cannot open manifest: " + path);
    const std::string dir = std::filesystem::path(path).parent_path().string();
    Manifest m;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        std::string tok;
        ManifestEntry entry;
        bool has_image = false, has_day = false;
        while (ls >> tok) {
            auto eq = tok.find('=');
            if (eq == std::string::npos)
                throw ValidationError(path + ":" + std::to_string(lineno) +
                                      ": expected key=value, got '" + tok + "'");
            const std::string key = tok.substr(0, eq);
            const std::string val = tok.substr(eq + 1);
            if (key == "image") {
                entry.image_path = resolve_relative(dir, val);
                has_image = true;
            } else if (key == "mask") {
                entry.mask_path = (val == "none") ? "" : resolve_relative(dir, val);
            } else if (key == "day") {
                entry.day = std::stoll(val);
                has_day = true;
            } else if (key == "modis") {
                m.modis_path = resolve_relative(dir, val);
            } else if (key == "truth") {
                m.truth_path = resolve_relative(dir, val);
            } else if (key == "target_day") {
                m.target_day = std::stoll(val);
            } else {
                throw ValidationError(path + ":" + std::to_string(lineno) +
                                      ": unknown manifest key '" + key + "'");
            }
        }
        if (has_image) {
            if (!has_day)
                throw ValidationError(path + ":" + std::to_string(lineno) + ": image entry lacks day=");
            m.entries.push_back(std::move(entry));
        }
    }
    for (std::size_t i = 0; i + 1 < m.entries.size(); ++i)
        if (m.entries[i].day >= m.entries[i + 1].day)
            throw ValidationError(path + ": manifest entries must be strictly time-ordered");
    return m;
}

void write_manifest(const std::string& path, const Manifest& m) {
    std::ofstream os(path);
    if (!os) throw ValidationError("cannot open for writing: " + path);
    auto base = [&](const std::string& p) {
        return std::filesystem::path(p).filename().string();
    };
    for (const auto& e : m.entries) {
        os << "image=" << base(e.image_path) << " mask="
           << (e.mask_path.empty() ? std::string("none") : base(e.mask_path)) << " day=" << e.day
           << "\n";
    }
    if (!m.modis_path.empty()) os << "modis=" << base(m.modis_path) << "\n";
    if (!m.truth_path.empty()) os << "truth=" << base(m.truth_path) << "\n";
    if (m.target_day) os << "target_day=" << *m.target_day << "\n";
    if (!os) throw ValidationError("write failed: " + path);
}

} // namespace satfuse
