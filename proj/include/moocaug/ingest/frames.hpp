#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace moocaug::ingest {

inline constexpr std::size_t kHistogramBins = 256;

struct Frame {
  std::int64_t t_ms = 0;
  std::vector<double> histogram;  // normalized luminance histogram
  double edge_density = 0;        // in [0, 1]
  std::string source_ref;

  friend bool operator==(const Frame&, const Frame&) = default;
};

// Invariants: strictly increasing t_ms, histograms sum to 1 within 1e-9,
// edge densities in [0, 1].
struct FrameSeries {
  std::vector<Frame> frames;

  friend bool operator==(const FrameSeries&, const FrameSeries&) = default;
};

// 8-bit luminance raster, row-major.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::uint8_t at(int x, int y) const {
    return pixels[static_cast<std::size_t>(y) * static_cast<std::size_t>(width) +
                  static_cast<std::size_t>(x)];
  }
};

// Decodes binary or ASCII Netpbm (P2, P3, P5, P6). Colour input is reduced
// to luma with Rec. 601 weights. Throws IngestError(kCorruptImage).
GrayImage decode_netpbm(std::string_view bytes);
GrayImage read_image(const std::filesystem::path& path);

// Binary P5 encoding, used by fixture generators.
std::string encode_pgm(const GrayImage& image);

std::vector<double> luminance_histogram(const GrayImage& image);

// Fraction of pixels whose forward-difference gradient magnitude (intensities
// scaled to [0, 1], replicate border) exceeds `threshold_fraction` of the
// largest attainable magnitude, sqrt(2).
double edge_density(const GrayImage& image, double threshold_fraction);

struct FrameLoadOptions {
  std::int64_t sample_interval_ms = 1000;
  // Time between consecutive images of the source sequence.
  std::int64_t source_period_ms = 1000;
  double edge_threshold = 0.1;
};

struct FrameLoadResult {
  FrameSeries series;
  std::vector<std::string> warnings;  // skipped corrupt images
};

// `asset` is either a histogram cache file, a directory holding
// `histograms.mvhc`, or a directory of Netpbm images ordered by file name.
// Image i is taken at i * source_period_ms; one image is kept per
// sample_interval_ms. Throws IngestError(kNoFrames) when nothing loads.
FrameLoadResult load_frames(const std::filesystem::path& asset, const FrameLoadOptions& options);

inline constexpr std::string_view kHistogramCacheName = "histograms.mvhc";

// Histogram cache layout (all little-endian):
//   bytes 0-3   magic "MVHC"
//   u32         version (1)
//   u32         bin count B
//   u32         frame count N
//   N records:  i64 t_ms, f64 edge_density, B x f64 histogram
void write_histogram_cache(const std::filesystem::path& path, const FrameSeries& series);
FrameSeries read_histogram_cache(const std::filesystem::path& path);

// Divides by the sum. Throws IngestError(kCorruptImage) on a zero or
// negative mass.
void normalize_histogram(std::vector<double>& histogram);

}  // namespace moocaug::ingest
