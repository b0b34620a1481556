#include "moocaug/ingest/frames.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "moocaug/common/text.hpp"
#include "moocaug/ingest/errors.hpp"

namespace moocaug::ingest {
namespace {

constexpr char kCacheMagic[4] = {'M', 'V', 'H', 'C'};
constexpr std::uint32_t kCacheVersion = 1;

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IngestError(IngestErrc::kIo, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

[[noreturn]] void corrupt(const std::string& what) {
  throw IngestError(IngestErrc::kCorruptImage, what);
}

class NetpbmReader {
 public:
  explicit NetpbmReader(std::string_view data) : data_(data) {}

  unsigned long next_number() {
    skip_space_and_comments();
    if (pos_ >= data_.size() || data_[pos_] < '0' || data_[pos_] > '9') corrupt("bad header number");
    unsigned long v = 0;
    while (pos_ < data_.size() && data_[pos_] >= '0' && data_[pos_] <= '9') {
      v = v * 10 + static_cast<unsigned long>(data_[pos_] - '0');
      if (v > 1u << 24) corrupt("header number too large");
      ++pos_;
    }
    return v;
  }

  void skip_space_and_comments() {
    while (pos_ < data_.size()) {
      const char c = data_[pos_];
      if (c == '#') {
        while (pos_ < data_.size() && data_[pos_] != '\n' && data_[pos_] != '\r') ++pos_;
      } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v') {
        ++pos_;
      } else {
        break;
      }
    }
  }

  // Exactly one whitespace byte separates the header from binary data.
  void skip_single_space() {
    if (pos_ >= data_.size()) corrupt("truncated header");
    ++pos_;
  }

  unsigned binary_sample(bool wide) {
    const std::size_t need = wide ? 2 : 1;
    if (pos_ + need > data_.size()) corrupt("truncated pixel data");
    unsigned v = static_cast<unsigned char>(data_[pos_]);
    if (wide) v = (v << 8) | static_cast<unsigned char>(data_[pos_ + 1]);
    pos_ += need;
    return v;
  }

 private:
  std::string_view data_;
  std::size_t pos_ = 2;
};

std::uint8_t to_byte(double value, unsigned long maxval) {
  const double scaled = value * 255.0 / static_cast<double>(maxval);
  return static_cast<std::uint8_t>(std::clamp(std::lround(scaled), 0L, 255L));
}

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(std::string_view data, std::size_t& pos) {
  if (pos + sizeof(T) > data.size()) {
    throw IngestError(IngestErrc::kCorruptImage, "histogram cache truncated");
  }
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, data.data() + pos, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  pos += sizeof(T);
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

bool is_image_file(const std::filesystem::path& p) {
  const auto ext = ascii_lower(p.extension().string());
  return ext == ".pgm" || ext == ".ppm" || ext == ".pnm";
}

}  // namespace

GrayImage decode_netpbm(std::string_view bytes) {
  if (bytes.size() < 2 || bytes[0] != 'P') corrupt("not a Netpbm image");
  const char type = bytes[1];
  if (type != '2' && type != '3' && type != '5' && type != '6') corrupt("unsupported Netpbm type");
  const bool colour = type == '3' || type == '6';
  const bool binary = type == '5' || type == '6';

  NetpbmReader reader(bytes);
  GrayImage image;
  image.width = static_cast<int>(reader.next_number());
  image.height = static_cast<int>(reader.next_number());
  const auto maxval = reader.next_number();
  if (image.width <= 0 || image.height <= 0) corrupt("empty image");
  if (maxval == 0 || maxval > 65535) corrupt("bad maxval");
  if (binary) reader.skip_single_space();

  const bool wide = maxval > 255;
  const std::size_t count = static_cast<std::size_t>(image.width) * static_cast<std::size_t>(image.height);
  image.pixels.resize(count);
  auto sample = [&]() -> unsigned {
    const unsigned v = binary ? reader.binary_sample(wide) : static_cast<unsigned>(reader.next_number());
    if (v > maxval) corrupt("sample exceeds maxval");
    return v;
  };
  for (std::size_t i = 0; i < count; ++i) {
    if (colour) {
      const double r = sample();
      const double g = sample();
      const double b = sample();
      image.pixels[i] = to_byte(0.299 * r + 0.587 * g + 0.114 * b, maxval);
    } else {
      image.pixels[i] = to_byte(sample(), maxval);
    }
  }
  return image;
}

GrayImage read_image(const std::filesystem::path& path) {
  try {
    return decode_netpbm(slurp(path));
  } catch (const IngestError& e) {
    if (e.code() == IngestErrc::kCorruptImage) corrupt(path.string() + ": " + e.what());
    throw;
  }
}

std::string encode_pgm(const GrayImage& image) {
  std::string out = "P5\n" + std::to_string(image.width) + " " + std::to_string(image.height) + "\n255\n";
  out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
  return out;
}

std::vector<double> luminance_histogram(const GrayImage& image) {
  std::vector<double> hist(kHistogramBins, 0.0);
  for (const auto p : image.pixels) hist[p] += 1.0;
  const double n = static_cast<double>(image.pixels.size());
  for (auto& h : hist) h /= n;
  return hist;
}

double edge_density(const GrayImage& image, double threshold_fraction) {
  const double threshold = threshold_fraction * std::sqrt(2.0);
  std::size_t edges = 0;
  for (int y = 0; y < image.height; ++y) {
    for (int x = 0; x < image.width; ++x) {
      const double here = image.at(x, y) / 255.0;
      const double gx = x + 1 < image.width ? image.at(x + 1, y) / 255.0 - here : 0.0;
      const double gy = y + 1 < image.height ? image.at(x, y + 1) / 255.0 - here : 0.0;
      if (std::hypot(gx, gy) > threshold) ++edges;
    }
  }
  return static_cast<double>(edges) / static_cast<double>(image.pixels.size());
}

void normalize_histogram(std::vector<double>& histogram) {
  double sum = 0;
  for (const double v : histogram) {
    if (!std::isfinite(v) || v < 0) throw IngestError(IngestErrc::kCorruptImage, "invalid histogram bin");
    sum += v;
  }
  if (!(sum > 0)) throw IngestError(IngestErrc::kCorruptImage, "histogram has no mass");
  for (auto& v : histogram) v /= sum;
}

void write_histogram_cache(const std::filesystem::path& path, const FrameSeries& series) {
  const std::uint32_t bins =
      series.frames.empty() ? static_cast<std::uint32_t>(kHistogramBins)
                            : static_cast<std::uint32_t>(series.frames.front().histogram.size());
  std::string out(kCacheMagic, 4);
  put_le<std::uint32_t>(out, kCacheVersion);
  put_le<std::uint32_t>(out, bins);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(series.frames.size()));
  for (const auto& f : series.frames) {
    if (f.histogram.size() != bins) throw IngestError(IngestErrc::kIo, "histogram length differs between frames");
    put_le<std::int64_t>(out, f.t_ms);
    put_le<double>(out, f.edge_density);
    for (const double v : f.histogram) put_le<double>(out, v);
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IngestError(IngestErrc::kIo, "cannot write " + path.string());
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
}

FrameSeries read_histogram_cache(const std::filesystem::path& path) {
  const auto data = slurp(path);
  if (data.size() < 16 || std::memcmp(data.data(), kCacheMagic, 4) != 0) {
    throw IngestError(IngestErrc::kCorruptImage, path.string() + ": not a histogram cache");
  }
  std::size_t pos = 4;
  const auto version = get_le<std::uint32_t>(data, pos);
  if (version != kCacheVersion) {
    throw IngestError(IngestErrc::kCorruptImage,
                      path.string() + ": unsupported cache version " + std::to_string(version));
  }
  const auto bins = get_le<std::uint32_t>(data, pos);
  const auto count = get_le<std::uint32_t>(data, pos);
  if (bins == 0) throw IngestError(IngestErrc::kCorruptImage, "histogram cache with zero bins");
  const std::size_t record = 16 + 8 * static_cast<std::size_t>(bins);
  if (data.size() != 16 + record * count) {
    throw IngestError(IngestErrc::kCorruptImage, path.string() + ": size does not match header");
  }
  FrameSeries series;
  series.frames.reserve(count);
  const auto name = path.filename().string();
  for (std::uint32_t i = 0; i < count; ++i) {
    Frame f;
    f.t_ms = get_le<std::int64_t>(data, pos);
    f.edge_density = get_le<double>(data, pos);
    f.histogram.resize(bins);
    for (auto& v : f.histogram) v = get_le<double>(data, pos);
    if (!(f.edge_density >= 0 && f.edge_density <= 1)) {
      throw IngestError(IngestErrc::kCorruptImage, "edge density out of range in frame " + std::to_string(i));
    }
    if (!series.frames.empty() && f.t_ms <= series.frames.back().t_ms) {
      throw IngestError(IngestErrc::kCorruptImage, "timestamps not increasing at frame " + std::to_string(i));
    }
    normalize_histogram(f.histogram);
    f.source_ref = name + "#" + std::to_string(i);
    series.frames.push_back(std::move(f));
  }
  return series;
}

FrameLoadResult load_frames(const std::filesystem::path& asset, const FrameLoadOptions& options) {
  namespace fs = std::filesystem;
  if (options.sample_interval_ms <= 0 || options.source_period_ms <= 0) {
    throw IngestError(IngestErrc::kNoFrames, "sampling intervals must be positive");
  }
  FrameLoadResult result;
  std::error_code ec;
  if (fs::is_regular_file(asset, ec)) {
    result.series = read_histogram_cache(asset);
  } else if (fs::is_directory(asset, ec) && fs::is_regular_file(asset / kHistogramCacheName, ec)) {
    result.series = read_histogram_cache(asset / kHistogramCacheName);
  } else if (fs::is_directory(asset, ec)) {
    std::vector<fs::path> images;
    for (const auto& entry : fs::directory_iterator(asset)) {
      if (entry.is_regular_file() && is_image_file(entry.path())) images.push_back(entry.path());
    }
    std::sort(images.begin(), images.end());
    std::size_t previous = images.size();
    const auto interval = options.sample_interval_ms;
    const auto period = options.source_period_ms;
    for (std::int64_t k = 0;; ++k) {
      const auto idx = static_cast<std::size_t>((2 * k * interval + period) / (2 * period));
      if (idx >= images.size()) break;
      if (idx == previous) continue;
      previous = idx;
      try {
        const auto image = read_image(images[idx]);
        Frame f;
        f.t_ms = static_cast<std::int64_t>(idx) * period;
        f.histogram = luminance_histogram(image);
        f.edge_density = edge_density(image, options.edge_threshold);
        f.source_ref = images[idx].filename().string();
        result.series.frames.push_back(std::move(f));
      } catch (const IngestError& e) {
        if (e.code() != IngestErrc::kCorruptImage) throw;
        result.warnings.push_back(std::string("skipped corrupt image: ") + e.what());
      }
    }
  } else {
    throw IngestError(IngestErrc::kNoFrames, "frame source not found: " + asset.string());
  }
  if (result.series.frames.empty()) {
    throw IngestError(IngestErrc::kNoFrames, "no frames loaded from " + asset.string());
  }
  return result;
}

}  // namespace moocaug::ingest
