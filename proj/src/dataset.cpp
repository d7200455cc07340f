#include "glyphwarp/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

namespace glyphwarp {

namespace {

constexpr char kMagic[4] = {'C', 'D', 'S', '1'};

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(static_cast<std::uint8_t>(v & 0xFF));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint16_t get_u16(std::span<const std::uint8_t> b, std::size_t at) {
    return static_cast<std::uint16_t>(b[at] | (b[at + 1] << 8));
}

std::uint64_t get_u64(std::span<const std::uint8_t> b, std::size_t at) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[at + static_cast<std::size_t>(i)];
    return v;
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw CdsError(CdsError::Kind::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw CdsError(CdsError::Kind::io, "cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw CdsError(CdsError::Kind::io, "short write to " + path.string());
}

}  // namespace

ClassRange class_range(ClassSet set) {
    switch (set) {
        case ClassSet::digits: return {0, 10};
        case ClassSet::upper: return {10, 26};
        case ClassSet::lower: return {36, 26};
        case ClassSet::all: break;
    }
    return {0, kClassCount};
}

const char* to_string(ClassSet set) {
    switch (set) {
        case ClassSet::digits: return "digits";
        case ClassSet::upper: return "upper";
        case ClassSet::lower: return "lower";
        case ClassSet::all: break;
    }
    return "all";
}

ClassSet parse_class_set(const std::string& name) {
    std::string n = name;
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (n == "all" || n == "all62") return ClassSet::all;
    if (n == "digits") return ClassSet::digits;
    if (n == "upper") return ClassSet::upper;
    if (n == "lower") return ClassSet::lower;
    throw std::invalid_argument("unknown class set '" + name + "'");
}

char label_char(int label) {
    if (label < 10) return static_cast<char>('0' + label);
    if (label < 36) return static_cast<char>('A' + label - 10);
    return static_cast<char>('a' + label - 36);
}

Split make_split(std::size_t total, std::size_t n_train, std::size_t n_valid, std::size_t n_test) {
    if (n_train + n_valid + n_test > total)
        throw std::invalid_argument("split sizes exceed dataset size");
    Split s;
    s.train = {0, n_train};
    s.valid = {n_train, n_train + n_valid};
    s.test = {n_train + n_valid, n_train + n_valid + n_test};
    return s;
}

LabeledDataset slice(const LabeledDataset& ds, IndexRange range) {
    if (range.begin > range.end || range.end > ds.size())
        throw std::invalid_argument("slice range outside dataset");
    LabeledDataset out;
    out.meta = ds.meta;
    out.items.assign(ds.items.begin() + static_cast<std::ptrdiff_t>(range.begin),
                     ds.items.begin() + static_cast<std::ptrdiff_t>(range.end));
    return out;
}

LabeledDataset filter_classes(const LabeledDataset& ds, ClassSet set, bool rebase) {
    const auto range = class_range(set);
    LabeledDataset out;
    out.meta = ds.meta;
    for (const auto& s : ds.items) {
        if (!range.contains(s.label)) continue;
        Sample copy = s;
        if (rebase) copy.label = static_cast<std::uint8_t>(s.label - range.first);
        out.items.push_back(copy);
    }
    return out;
}

std::uint8_t quantize_pixel(double v) {
    return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0));
}

GreyImage quantize(const GreyImage& img) {
    GreyImage out;
    for (std::size_t i = 0; i < kPixels; ++i) out[i] = quantize_pixel(img[i]) / 255.0;
    return out;
}

std::vector<std::uint8_t> encode_cds(const LabeledDataset& ds) {
    std::vector<std::uint8_t> out;
    out.reserve(kCdsHeaderSize + ds.size() * kCdsRecordSize);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    put_u16(out, kCdsVersion);
    put_u16(out, 0);
    put_u64(out, ds.size());
    for (const auto& s : ds.items) {
        if (s.label >= kClassCount)
            throw CdsError(CdsError::Kind::label_range,
                           "label " + std::to_string(s.label) + " outside 0..61");
        for (double v : s.image.pixels()) out.push_back(quantize_pixel(v));
        out.push_back(s.label);
    }
    return out;
}

LabeledDataset decode_cds(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < kCdsHeaderSize)
        throw CdsError(CdsError::Kind::truncated, "file shorter than the 16-byte header");
    if (!std::equal(std::begin(kMagic), std::end(kMagic), bytes.begin()))
        throw CdsError(CdsError::Kind::bad_magic, "missing CDS1 magic");
    const auto version = get_u16(bytes, 4);
    if (version != kCdsVersion)
        throw CdsError(CdsError::Kind::version_mismatch,
                       "unsupported CDS version " + std::to_string(version));
    const std::uint64_t count = get_u64(bytes, 8);
    const std::size_t payload = bytes.size() - kCdsHeaderSize;
    if (count > payload / kCdsRecordSize)
        throw CdsError(CdsError::Kind::truncated,
                       "header announces " + std::to_string(count) + " records but only " +
                           std::to_string(payload / kCdsRecordSize) + " are present");
    if (payload != count * kCdsRecordSize)
        throw CdsError(CdsError::Kind::trailing_data, "unexpected bytes after the last record");

    LabeledDataset ds;
    ds.items.resize(static_cast<std::size_t>(count));
    for (std::size_t r = 0; r < count; ++r) {
        const std::size_t base = kCdsHeaderSize + r * kCdsRecordSize;
        auto& s = ds.items[r];
        for (std::size_t i = 0; i < kPixels; ++i) s.image[i] = bytes[base + i] / 255.0;
        s.label = bytes[base + kPixels];
        if (s.label >= kClassCount)
            throw CdsError(CdsError::Kind::label_range, "record " + std::to_string(r) + " has label " +
                                                            std::to_string(s.label) + " outside 0..61");
    }
    return ds;
}

std::filesystem::path meta_path(const std::filesystem::path& path) {
    return path.string() + ".meta";
}

std::string format_meta(const std::map<std::string, std::string>& meta) {
    std::string out;
    for (const auto& [k, v] : meta) out += k + "=" + v + "\n";
    return out;
}

std::map<std::string, std::string> parse_meta(const std::string& text) {
    std::map<std::string, std::string> meta;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        meta[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return meta;
}

void write_cds(const LabeledDataset& ds, const std::filesystem::path& path) {
    write_file(path, encode_cds(ds));
    const std::string meta = format_meta(ds.meta);
    write_file(meta_path(path), std::span(reinterpret_cast<const std::uint8_t*>(meta.data()), meta.size()));
}

LabeledDataset read_cds(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    LabeledDataset ds = decode_cds(bytes);
    if (std::filesystem::exists(meta_path(path))) {
        const auto raw = read_file(meta_path(path));
        ds.meta = parse_meta(std::string(raw.begin(), raw.end()));
    }
    return ds;
}

GrayMap render_contact_sheet(const LabeledDataset& ds, int rows, int cols) {
    if (rows < 1 || cols < 1) throw std::invalid_argument("contact sheet needs rows, cols >= 1");
    if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) > ds.size())
        throw std::invalid_argument("contact sheet asks for " + std::to_string(rows * cols) +
                                    " images but the dataset holds " + std::to_string(ds.size()));
    GrayMap map;
    map.width = cols * kSide + (cols - 1) * kSheetGap;
    map.height = rows * kSide + (rows - 1) * kSheetGap;
    map.pixels.assign(static_cast<std::size_t>(map.width) * map.height, 0);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            const auto& img = ds.items[static_cast<std::size_t>(r * cols + c)].image;
            const int ox = c * (kSide + kSheetGap);
            const int oy = r * (kSide + kSheetGap);
            for (int y = 0; y < kSide; ++y)
                for (int x = 0; x < kSide; ++x)
                    map.pixels[static_cast<std::size_t>(oy + y) * map.width + ox + x] =
                        quantize_pixel(img(x, y));
        }
    }
    return map;
}

std::vector<std::uint8_t> encode_pgm(const GrayMap& map) {
    const std::string header =
        "P5\n" + std::to_string(map.width) + " " + std::to_string(map.height) + "\n255\n";
    std::vector<std::uint8_t> out(header.begin(), header.end());
    out.insert(out.end(), map.pixels.begin(), map.pixels.end());
    return out;
}

void export_contact_sheet(const LabeledDataset& ds, int rows, int cols,
                          const std::filesystem::path& path) {
    write_file(path, encode_pgm(render_contact_sheet(ds, rows, cols)));
}

}  // namespace glyphwarp
