#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace karlin {

enum class Component { large, small, combined };

inline const char* component_name(Component c) {
  switch (c) {
    case Component::large: return "large";
    case Component::small: return "small";
    default: return "combined";
  }
}

/// Real-valued field values over the lattice plus provenance metadata.
struct FieldGrid {
  std::vector<double> values;       // row-major
  std::vector<std::size_t> shape;
  Component component = Component::combined;
  std::map<std::string, std::string> meta;  // resolved params, seeds, counters
};

}  // namespace karlin
