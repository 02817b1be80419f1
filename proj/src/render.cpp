#include "sglayout/render.hpp"

#include <sstream>
#include <stdexcept>

#include "sglayout/parsing.hpp"
#include "sglayout/util.hpp"

namespace sglayout::render {

void RenderStyle::validate() const {
  if (canvas_width <= 0 || canvas_height <= 0) {
    throw std::invalid_argument("render style: canvas dimensions must be positive");
  }
  if (stroke_width < 0 || font_size <= 0) {
    throw std::invalid_argument("render style: bad stroke width or font size");
  }
}

namespace {

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

int hue_of(const std::string& category) {
  return static_cast<int>(fnv1a64(category) % 360);
}

}  // namespace

std::string render_svg(const LayoutSample& sample, const Vocab& vocab, const RenderStyle& style) {
  style.validate();
  if (sample.boxes.size() != sample.graph.object_categories.size()) {
    throw std::invalid_argument("render: sample \"" + sample.id + "\" has no boxes");
  }

  const double W = style.canvas_width;
  const double H = style.canvas_height;
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.canvas_width
      << "\" height=\"" << style.canvas_height << "\" viewBox=\"0 0 " << style.canvas_width << " "
      << style.canvas_height << "\">\n";
  for (std::size_t i = 0; i < sample.boxes.size(); ++i) {
    const BoundingBox& b = sample.boxes[i];
    const std::string& name =
        vocab.categories.at(static_cast<std::size_t>(sample.graph.object_categories[i]));
    const int hue = hue_of(name);
    const double w = b.w * W;
    const double h = b.h * H;
    const double x = b.x * W - w / 2.0;
    const double y = b.y * H - h / 2.0;
    svg << "  <rect x=\"" << format_double(x) << "\" y=\"" << format_double(y) << "\" width=\""
        << format_double(w) << "\" height=\"" << format_double(h) << "\" fill=\"hsl(" << hue
        << ",70%,80%)\" fill-opacity=\"0.5\" stroke=\"hsl(" << hue << ",70%,35%)\" stroke-width=\""
        << format_double(style.stroke_width) << "\"/>\n";
    svg << "  <text x=\"" << format_double(x + style.stroke_width)
        << "\" y=\"" << format_double(y + style.font_size) << "\" font-family=\"sans-serif\" "
        << "font-size=\"" << format_double(style.font_size) << "\" fill=\"hsl(" << hue
        << ",70%,25%)\">" << xml_escape(name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_svg(const LayoutSample& sample, const Vocab& vocab, const RenderStyle& style,
               const std::string& path) {
  write_file(path, render_svg(sample, vocab, style));
}

}  // namespace sglayout::render
