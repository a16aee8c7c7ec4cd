#include "fap/render.hpp"

#include <sstream>
#include <stdexcept>

namespace fap {

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string leaf_label(const Leaf& leaf) {
  switch (leaf.kind) {
    case Leaf::Kind::Success: return to_string(leaf.valuation);
    case Leaf::Kind::Fail: return "fail";
    case Leaf::Kind::Error: return "error (" + std::string(to_string(leaf.cause)) + ")";
  }
  return "?";
}

class Renderer {
 public:
  explicit Renderer(const RenderOptions& opts) : opts_(opts) {}

  std::string text(const TraceNode& root) {
    text_node(root, 0);
    return out_.str();
  }

  std::string dot(const TraceNode& root) {
    out_ << "digraph trace {\n";
    dot_node(root, -1);
    out_ << "}\n";
    return out_.str();
  }

 private:
  // Returns false once the budget is used up (after emitting the marker).
  bool admit() {
    if (count_ < opts_.max_nodes) {
      ++count_;
      return true;
    }
    return false;
  }

  void text_node(const TraceNode& n, int depth) {
    if (truncated_) return;
    std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    if (!admit()) {
      out_ << indent << "... (truncated)\n";
      truncated_ = true;
      return;
    }
    if (n.leaf) {
      out_ << indent << (n.leaf->kind == Leaf::Kind::Success ? "success " + leaf_label(*n.leaf) : leaf_label(*n.leaf))
           << '\n';
      return;
    }
    out_ << indent << '[' << n.tag << "] " << (n.formula.empty() ? "(empty)" : n.formula);
    if (opts_.show_valuations) out_ << " | " << to_string(n.valuation);
    if (!n.note.empty()) out_ << "  -- " << n.note;
    out_ << '\n';
    for (const auto& c : n.children) text_node(c, depth + 1);
  }

  void dot_node(const TraceNode& n, long parent) {
    if (truncated_) return;
    long id = static_cast<long>(count_);
    if (!admit()) {
      out_ << "  n" << id << " [label=\"...\", shape=plaintext];\n";
      if (parent >= 0) out_ << "  n" << parent << " -> n" << id << ";\n";
      truncated_ = true;
      return;
    }
    if (n.leaf) {
      const char* shape = n.leaf->kind == Leaf::Kind::Success ? "box"
                          : n.leaf->kind == Leaf::Kind::Fail  ? "diamond"
                                                              : "octagon";
      out_ << "  n" << id << " [label=\"" << dot_escape(leaf_label(*n.leaf)) << "\", shape=" << shape << "];\n";
    } else {
      std::string label = "[" + n.tag + "] " + (n.formula.empty() ? "(empty)" : n.formula);
      label = dot_escape(label);
      if (opts_.show_valuations) label += "\\n" + dot_escape(to_string(n.valuation));
      out_ << "  n" << id << " [label=\"" << label << "\"];\n";
    }
    if (parent >= 0) out_ << "  n" << parent << " -> n" << id << ";\n";
    for (const auto& c : n.children) dot_node(c, id);
  }

  const RenderOptions& opts_;
  std::ostringstream out_;
  std::size_t count_ = 0;
  bool truncated_ = false;
};

}  // namespace

std::string render(const TraceNode& root, const RenderOptions& options) {
  if (options.max_nodes == 0) throw std::invalid_argument("max_nodes must be at least 1");
  Renderer r(options);
  return options.format == RenderOptions::Format::Dot ? r.dot(root) : r.text(root);
}

}  // namespace fap
