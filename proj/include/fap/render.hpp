#pragma once

#include <cstddef>
#include <string>

#include "fap/engine.hpp"

namespace fap {

struct RenderOptions {
  enum class Format { Text, Dot };

  Format format = Format::Text;
  // Nodes beyond this many (in pre-order) are replaced by a marker.
  std::size_t max_nodes = 10000;
  bool show_valuations = true;
};

// Throws std::invalid_argument if max_nodes is 0.
std::string render(const TraceNode& root, const RenderOptions& options = {});

}  // namespace fap
