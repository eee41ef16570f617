#pragma once

// Static SVG render of a document graph: word boxes, skeleton edges between
// box centers, and optionally the reading-order codes of one target's
// neighbors drawn in red next to each neighbor.

#include <algorithm>
#include <cstdio>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

#include "formgraph/docmodel.hpp"
#include "formgraph/geometry.hpp"
#include "formgraph/rope.hpp"

namespace formgraph {

struct RenderOptions {
  bool show_text = true;
  std::optional<std::size_t> rope_target;  // vertex position, not reading index
};

namespace render_detail {

inline std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

inline std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out.push_back(c);
    }
  }
  return out;
}

}  // namespace render_detail

inline void render_svg(const Document& d, const DocGraph& g, const RenderOptions& opt, std::ostream& os) {
  using render_detail::num;
  if (opt.rope_target && *opt.rope_target >= d.size())
    throw UsageError("render target " + std::to_string(*opt.rope_target) + " out of range (" +
                     std::to_string(d.size()) + " tokens)");
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(d.page_width) << "\" height=\""
     << num(d.page_height) << "\" viewBox=\"0 0 " << num(d.page_width) << ' ' << num(d.page_height)
     << "\">\n";
  os << "<rect x=\"0\" y=\"0\" width=\"" << num(d.page_width) << "\" height=\"" << num(d.page_height)
     << "\" fill=\"white\"/>\n";

  os << "<g stroke=\"#4a7bd0\" stroke-width=\"1\">\n";
  for (auto [i, j] : g.skeleton.undirected_edges) {
    const Point a = box_center(d.tokens[static_cast<std::size_t>(i)].box);
    const Point b = box_center(d.tokens[static_cast<std::size_t>(j)].box);
    os << "<line x1=\"" << num(a.x) << "\" y1=\"" << num(a.y) << "\" x2=\"" << num(b.x)
       << "\" y2=\"" << num(b.y) << "\"/>\n";
  }
  os << "</g>\n";

  os << "<g fill=\"none\" stroke=\"#333\" stroke-width=\"0.8\">\n";
  for (std::size_t v = 0; v < d.size(); ++v) {
    const auto& b = d.tokens[v].box;
    const bool target = opt.rope_target && *opt.rope_target == v;
    os << "<rect x=\"" << num(b.x0) << "\" y=\"" << num(b.y0) << "\" width=\"" << num(b.width())
       << "\" height=\"" << num(b.height()) << '"' << (target ? " stroke=\"red\" stroke-width=\"2\"" : "")
       << "/>\n";
  }
  os << "</g>\n";

  if (opt.show_text) {
    os << "<g font-family=\"sans-serif\" fill=\"#666\">\n";
    for (const auto& t : d.tokens)
      os << "<text x=\"" << num(t.box.x0) << "\" y=\"" << num(t.box.y1 - 0.2 * t.box.height())
         << "\" font-size=\"" << num(0.7 * t.box.height()) << "\">" << render_detail::escape(t.text)
         << "</text>\n";
    os << "</g>\n";
  }

  if (opt.rope_target) {
    const auto codes = rope_codes(g, reading_order_of(d));
    const auto target = static_cast<int>(*opt.rope_target);
    os << "<g font-family=\"sans-serif\" font-weight=\"bold\" fill=\"red\">\n";
    for (int e : g.incoming[static_cast<std::size_t>(target)]) {
      const auto& b = d.tokens[static_cast<std::size_t>(g.directed_edges[static_cast<std::size_t>(e)].src)].box;
      os << "<text x=\"" << num(b.x1 + 2.0) << "\" y=\"" << num(b.y0) << "\" font-size=\""
         << num(std::max(10.0, b.height())) << "\">" << codes.codes[static_cast<std::size_t>(e)]
         << "</text>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
}

inline std::string render_svg(const Document& d, const RenderOptions& opt = {}) {
  std::ostringstream os;
  render_svg(d, build_doc_graph(d), opt, os);
  return os.str();
}

}  // namespace formgraph
