#pragma once

// Renders a lecture-like frame sequence with known slide changes. Each slide
// is a flat background with a few dark "text line" bars; consecutive slides
// differ in bar count so their edge densities differ. Illumination jumps
// add a constant to every pixel of the remaining frames of a slide, which
// moves the histogram but leaves every gradient untouched.

#include <cstdint>
#include <string>
#include <vector>

#include "moocaug/ingest/frames.hpp"

namespace moocaug::testing {

struct SyntheticSlideSpec {
  int bars = 1;
  int background = 200;
  // Frame offsets within the slide at which brightness steps up.
  std::vector<int> illumination_steps;
  int illumination_delta = 12;
};

struct SyntheticLecture {
  ingest::FrameSeries series;
  std::vector<ingest::GrayImage> images;
  std::vector<std::int64_t> change_points_ms;  // true slide starts after the first
  std::vector<std::int64_t> illumination_ms;   // spurious jumps
  std::int64_t duration_ms = 0;
};

inline ingest::GrayImage render_slide(const SyntheticSlideSpec& spec, int brightness_offset, int width = 80,
                                      int height = 60) {
  ingest::GrayImage img;
  img.width = width;
  img.height = height;
  img.pixels.assign(static_cast<std::size_t>(width * height), static_cast<std::uint8_t>(spec.background));
  for (int b = 0; b < spec.bars; ++b) {
    const int y0 = 4 + b * 4;
    const int x1 = width - 6 - (b * 7) % 23;
    for (int y = y0; y < y0 + 2 && y < height; ++y)
      for (int x = 6; x < x1; ++x) img.pixels[static_cast<std::size_t>(y * width + x)] = 40;
  }
  for (auto& p : img.pixels) p = static_cast<std::uint8_t>(p + brightness_offset);
  return img;
}

inline SyntheticLecture make_synthetic_lecture(const std::vector<SyntheticSlideSpec>& slides,
                                               int frames_per_slide = 6, std::int64_t period_ms = 1000,
                                               double edge_threshold = 0.1) {
  SyntheticLecture out;
  std::int64_t t = 0;
  for (std::size_t s = 0; s < slides.size(); ++s) {
    if (s > 0) out.change_points_ms.push_back(t);
    int offset = 0;
    for (int f = 0; f < frames_per_slide; ++f, t += period_ms) {
      for (const int step : slides[s].illumination_steps) {
        if (step == f) {
          offset += slides[s].illumination_delta;
          out.illumination_ms.push_back(t);
        }
      }
      auto img = render_slide(slides[s], offset);
      ingest::Frame frame;
      frame.t_ms = t;
      frame.histogram = ingest::luminance_histogram(img);
      frame.edge_density = ingest::edge_density(img, edge_threshold);
      frame.source_ref = "synthetic#" + std::to_string(out.images.size());
      out.series.frames.push_back(std::move(frame));
      out.images.push_back(std::move(img));
    }
  }
  out.duration_ms = t;
  return out;
}

// Ten slides whose bar counts alternate enough for every true change to
// move the edge density by well over 30 %, with three illumination jumps.
inline SyntheticLecture ten_slide_lecture() {
  const int bars[10] = {2, 5, 2, 6, 3, 8, 3, 9, 4, 12};
  std::vector<SyntheticSlideSpec> slides;
  for (int k = 0; k < 10; ++k) {
    SyntheticSlideSpec s;
    s.bars = bars[k];
    s.background = 190 + (k % 4) * 8;
    slides.push_back(s);
  }
  slides[1].illumination_steps = {3};
  slides[4].illumination_steps = {2};
  slides[8].illumination_steps = {4};
  return make_synthetic_lecture(slides);
}

// Two real slide changes and two brightness-only jumps.
inline SyntheticLecture two_true_two_spurious_lecture() {
  std::vector<SyntheticSlideSpec> slides(3);
  slides[0].bars = 3;
  slides[0].illumination_steps = {3};
  slides[1].bars = 8;
  slides[1].background = 210;
  slides[1].illumination_steps = {2};
  slides[2].bars = 2;
  slides[2].background = 180;
  return make_synthetic_lecture(slides);
}

}  // namespace moocaug::testing
