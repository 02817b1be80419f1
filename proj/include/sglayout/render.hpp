#pragma once

#include <string>

#include "sglayout/types.hpp"

namespace sglayout::render {

struct RenderStyle {
  int canvas_width = 512;
  int canvas_height = 512;
  double stroke_width = 2.0;
  double font_size = 12.0;

  void validate() const;  // throws unless canvas dims are positive
};

// One rect plus one category label per object, normalized centers/extents
// scaled to the canvas. Attribute order is fixed and colors derive from a
// hash of the category name, so output is byte-stable across runs and vocab
// reorderings. The sample must carry boxes.
std::string render_svg(const LayoutSample& sample, const Vocab& vocab, const RenderStyle& style);

void write_svg(const LayoutSample& sample, const Vocab& vocab, const RenderStyle& style,
               const std::string& path);

}  // namespace sglayout::render
