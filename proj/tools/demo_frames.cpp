// Renders the frame sequence of the bundled demo lecture: eight slides
// drawn at the boxes listed in data/demo/annotations.json, one PGM per
// second. Two slides carry a brightness step (a camera exposure change)
// that the segmenter must not mistake for a slide change.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "moocaug/ingest/frames.hpp"

namespace {

using moocaug::ingest::GrayImage;

constexpr int kWidth = 160;
constexpr int kHeight = 90;

struct Canvas {
  GrayImage img;

  explicit Canvas(int background) {
    img.width = kWidth;
    img.height = kHeight;
    img.pixels.assign(static_cast<std::size_t>(kWidth * kHeight), static_cast<std::uint8_t>(background));
  }

  void put(int x, int y, int v) {
    if (x < 0 || y < 0 || x >= kWidth || y >= kHeight) return;
    img.pixels[static_cast<std::size_t>(y * kWidth + x)] = static_cast<std::uint8_t>(v);
  }

  // Normalized rectangle.
  void rect(double nx, double ny, double nw, double nh, int v) {
    const int x0 = static_cast<int>(nx * kWidth), y0 = static_cast<int>(ny * kHeight);
    const int x1 = static_cast<int>((nx + nw) * kWidth), y1 = static_cast<int>((ny + nh) * kHeight);
    for (int y = y0; y < y1; ++y)
      for (int x = x0; x < x1; ++x) put(x, y, v);
  }

  void frame(double nx, double ny, double nw, double nh, int v) {
    const int x0 = static_cast<int>(nx * kWidth), y0 = static_cast<int>(ny * kHeight);
    const int x1 = static_cast<int>((nx + nw) * kWidth) - 1, y1 = static_cast<int>((ny + nh) * kHeight) - 1;
    for (int x = x0; x <= x1; ++x) put(x, y0, v), put(x, y1, v);
    for (int y = y0; y <= y1; ++y) put(x0, y, v), put(x1, y, v);
  }

  // Lines of "text": short dark bars inside the box.
  void text(double nx, double ny, double nw, double nh, int lines, int v) {
    const double step = nh / lines;
    for (int i = 0; i < lines; ++i) {
      const double len = nw * (0.6 + 0.4 * ((i * 7) % 5) / 4.0);
      rect(nx, ny + i * step + step * 0.25, len, step * 0.4, v);
    }
  }

  void disk(double cx, double cy, double r, int v) {
    for (int y = 0; y < kHeight; ++y)
      for (int x = 0; x < kWidth; ++x) {
        const double dx = (x + 0.5) / kWidth - cx, dy = ((y + 0.5) / kHeight - cy) * kHeight / kWidth;
        if (dx * dx + dy * dy <= r * r) put(x, y, v);
      }
  }

  void segment(double x0, double y0, double x1, double y1, int v) {
    const int n = 200;
    for (int i = 0; i <= n; ++i) {
      const double t = static_cast<double>(i) / n;
      put(static_cast<int>((x0 + (x1 - x0) * t) * kWidth), static_cast<int>((y0 + (y1 - y0) * t) * kHeight), v);
    }
  }

  void bars(double nx, double ny, double nw, double nh, const std::vector<double>& heights, double gap, int v) {
    const double slot = nw / static_cast<double>(heights.size());
    for (std::size_t i = 0; i < heights.size(); ++i) {
      const double h = nh * heights[i];
      rect(nx + slot * static_cast<double>(i) + slot * gap / 2, ny + nh - h, slot * (1 - gap), h, v);
    }
    segment(nx, ny + nh, nx + nw, ny + nh, 20);
  }

  void person(double nx, double ny, double nw, double nh, int v) {
    disk(nx + nw / 2, ny + nh * 0.18, nw * 0.22, v);
    rect(nx + nw * 0.1, ny + nh * 0.4, nw * 0.8, nh * 0.6, v);
  }

  // Wavy strokes standing in for handwriting.
  void scribble(double nx, double ny, double nw, double nh, int lines, int v) {
    for (int l = 0; l < lines; ++l) {
      const double base = ny + nh * (l + 0.5) / lines;
      for (int i = 0; i < 300; ++i) {
        const double t = i / 299.0;
        const double y = base + nh / lines * 0.3 * std::sin(t * 40 + l);
        put(static_cast<int>((nx + nw * t) * kWidth), static_cast<int>(y * kHeight), v);
      }
    }
  }
};

GrayImage slide(int index) {
  switch (index) {
    case 0: {  // teacher on camera
      Canvas c(90);
      c.rect(0, 0.8, 1, 0.2, 70);
      c.person(0.35, 0.1, 0.3, 0.9, 150);
      return c.img;
    }
    case 1: {  // pie chart
      Canvas c(230);
      c.text(0.1, 0.05, 0.5, 0.08, 1, 30);
      c.disk(0.275, 0.51, 0.17, 120);
      c.segment(0.275, 0.51, 0.275, 0.2, 20);
      c.segment(0.275, 0.51, 0.42, 0.7, 20);
      c.segment(0.275, 0.51, 0.13, 0.75, 20);
      c.text(0.55, 0.25, 0.35, 0.3, 3, 40);
      return c.img;
    }
    case 2: {  // bar graph and table
      Canvas c(222);
      c.text(0.1, 0.05, 0.5, 0.08, 1, 30);
      c.bars(0.08, 0.2, 0.45, 0.65, {0.9, 0.7, 0.5, 0.3}, 0.4, 90);
      for (int r = 0; r <= 4; ++r) c.segment(0.6, 0.25 + 0.1 * r, 0.92, 0.25 + 0.1 * r, 30);
      for (int k = 0; k <= 2; ++k) c.segment(0.6 + 0.16 * k, 0.25, 0.6 + 0.16 * k, 0.65, 30);
      return c.img;
    }
    case 3: {  // dot plot
      Canvas c(214);
      c.text(0.1, 0.05, 0.5, 0.08, 1, 30);
      c.segment(0.1, 0.8, 0.9, 0.8, 20);
      const int stacks[12] = {1, 0, 2, 1, 3, 4, 5, 3, 2, 1, 1, 0};
      for (int i = 0; i < 12; ++i)
        for (int k = 0; k < stacks[i]; ++k) c.disk(0.14 + i * 0.065, 0.75 - k * 0.1, 0.012, 60);
      return c.img;
    }
    case 4: {  // histogram with the relative frequency equation
      Canvas c(226);
      c.text(0.1, 0.05, 0.5, 0.08, 1, 30);
      c.bars(0.08, 0.2, 0.5, 0.62, {0.2, 0.45, 0.8, 1.0, 0.7, 0.4, 0.15}, 0.0, 100);
      for (int i = 1; i < 7; ++i) c.segment(0.08 + 0.5 / 7 * i, 0.3, 0.08 + 0.5 / 7 * i, 0.82, 226);
      c.text(0.62, 0.35, 0.32, 0.1, 1, 25);
      c.text(0.62, 0.55, 0.3, 0.15, 2, 45);
      return c.img;
    }
    case 5: {  // whiteboard with the teacher at the side
      Canvas c(240);
      c.scribble(0.08, 0.2, 0.55, 0.15, 2, 35);
      c.scribble(0.1, 0.45, 0.45, 0.4, 5, 50);
      c.person(0.68, 0.2, 0.28, 0.8, 110);
      return c.img;
    }
    case 6: {  // two worked examples
      Canvas c(218);
      c.text(0.1, 0.05, 0.4, 0.08, 1, 30);
      c.frame(0.05, 0.25, 0.42, 0.55, 40);
      c.bars(0.08, 0.32, 0.36, 0.42, {1.0, 0.8, 0.5, 0.3, 0.2, 0.1, 0.05}, 0.0, 80);
      c.frame(0.53, 0.25, 0.42, 0.55, 40);
      c.bars(0.56, 0.32, 0.36, 0.42, {0.1, 0.35, 0.75, 1.0, 0.75, 0.35, 0.1}, 0.0, 80);
      // Grid lines and captions under both panels
      for (int g = 1; g < 4; ++g) {
        c.segment(0.06, 0.32 + 0.105 * g, 0.46, 0.32 + 0.105 * g, 150);
        c.segment(0.54, 0.32 + 0.105 * g, 0.94, 0.32 + 0.105 * g, 150);
      }
      c.text(0.06, 0.83, 0.38, 0.14, 2, 40);
      c.text(0.54, 0.83, 0.38, 0.14, 2, 40);
      return c.img;
    }
    default: {  // quiz
      Canvas c(206);
      c.text(0.1, 0.05, 0.2, 0.08, 1, 30);
      c.text(0.1, 0.25, 0.8, 0.5, 6, 35);
      return c.img;
    }
  }
}

struct SlideTiming {
  int start_s;
  int end_s;
  int exposure_step_s;  // -1: none
};

constexpr SlideTiming kTimeline[8] = {{0, 40, -1},    {40, 90, 65},   {90, 140, -1},  {140, 190, -1},
                                      {190, 260, 230}, {260, 300, -1}, {300, 340, -1}, {340, 360, -1}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Render the demo lecture frames"};
  std::filesystem::path out;
  app.add_option("--out", out, "Directory to fill with NNNNNN.pgm frames")->required();
  CLI11_PARSE(app, argc, argv);

  std::filesystem::create_directories(out);
  int written = 0;
  for (int s = 0; s < 8; ++s) {
    const auto base = slide(s);
    for (int t = kTimeline[s].start_s; t < kTimeline[s].end_s; ++t) {
      auto img = base;
      if (kTimeline[s].exposure_step_s >= 0 && t >= kTimeline[s].exposure_step_s) {
        for (auto& p : img.pixels) p = static_cast<std::uint8_t>(std::min(255, p + 10));
      }
      char name[32];
      std::snprintf(name, sizeof name, "%06d.pgm", t);
      std::ofstream f(out / name, std::ios::binary | std::ios::trunc);
      f << moocaug::ingest::encode_pgm(img);
      if (!f) {
        std::cerr << "cannot write " << (out / name).string() << "\n";
        return 1;
      }
      ++written;
    }
  }
  std::cout << written << " frames written to " << out.string() << "\n";
  return 0;
}
