#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "glyphwarp/image.hpp"

namespace glyphwarp {

inline constexpr int kClassCount = 62;

/// Class subsets of the 62-way task: 0-9 digits, 10-35 upper, 36-61 lower.
enum class ClassSet : std::uint8_t { all, digits, upper, lower };

struct ClassRange {
    int first;
    int count;
    bool contains(int label) const { return label >= first && label < first + count; }
};

ClassRange class_range(ClassSet set);
const char* to_string(ClassSet set);
/// Accepts all|all62|digits|upper|lower. Throws std::invalid_argument.
ClassSet parse_class_set(const std::string& name);
/// '0'-'9', 'A'-'Z', 'a'-'z'.
char label_char(int label);

struct Sample {
    GreyImage image;
    std::uint8_t label = 0;
    friend bool operator==(const Sample&, const Sample&) = default;
};

struct LabeledDataset {
    std::vector<Sample> items;
    std::map<std::string, std::string> meta;

    std::size_t size() const { return items.size(); }
    bool empty() const { return items.empty(); }
    friend bool operator==(const LabeledDataset&, const LabeledDataset&) = default;
};

struct IndexRange {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

struct Split {
    IndexRange train;
    IndexRange valid;
    IndexRange test;
};

/// Consecutive train/valid/test ranges. Throws std::invalid_argument when the
/// sizes overflow `total`.
Split make_split(std::size_t total, std::size_t n_train, std::size_t n_valid, std::size_t n_test);
LabeledDataset slice(const LabeledDataset& ds, IndexRange range);
/// Keeps only samples whose label lies in `set`; labels are re-based to
/// 0..count-1 when `rebase` is true.
LabeledDataset filter_classes(const LabeledDataset& ds, ClassSet set, bool rebase);

/// Round-trips a pixel through the 8-bit storage encoding.
std::uint8_t quantize_pixel(double v);
GreyImage quantize(const GreyImage& img);

// --------------------------------------------------------------- CDS files
//
//   offset  size  field
//        0     4  magic "CDS1"
//        4     2  version (u16 LE, = 1)
//        6     2  reserved (u16, = 0)
//        8     8  count (u64 LE)
//       16  1025  per record: 1024 row-major 8-bit intensities, 1 label byte
//
// Metadata lives next to the data in "<path>.meta" as UTF-8 key=value lines.

inline constexpr std::uint16_t kCdsVersion = 1;
inline constexpr std::size_t kCdsHeaderSize = 16;
inline constexpr std::size_t kCdsRecordSize = kPixels + 1;

class CdsError : public std::runtime_error {
public:
    enum class Kind { io, bad_magic, version_mismatch, truncated, trailing_data, label_range };
    CdsError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

std::vector<std::uint8_t> encode_cds(const LabeledDataset& ds);
/// Parses the binary payload; never reads outside `bytes`.
LabeledDataset decode_cds(std::span<const std::uint8_t> bytes);

void write_cds(const LabeledDataset& ds, const std::filesystem::path& path);
/// Reads the payload and, if present, the .meta sidecar.
LabeledDataset read_cds(const std::filesystem::path& path);

std::filesystem::path meta_path(const std::filesystem::path& path);
std::string format_meta(const std::map<std::string, std::string>& meta);
std::map<std::string, std::string> parse_meta(const std::string& text);

// ---------------------------------------------------------- contact sheets

inline constexpr int kSheetGap = 2;

struct GrayMap {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;
};

/// Tiles the first rows*cols images with 2-px black separators.
/// Throws std::invalid_argument when rows*cols exceeds the dataset size.
GrayMap render_contact_sheet(const LabeledDataset& ds, int rows, int cols);
std::vector<std::uint8_t> encode_pgm(const GrayMap& map);
void export_contact_sheet(const LabeledDataset& ds, int rows, int cols,
                          const std::filesystem::path& path);

}  // namespace glyphwarp
