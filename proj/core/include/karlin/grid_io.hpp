#pragma once

#include <string>

#include "karlin/field.hpp"

namespace karlin::grid_io {

/// Deterministic CSV: one grid row per line, values at full double precision.
void write_csv(const FieldGrid& field, const std::string& path);

/// Self-describing binary format: magic "KSF1", little-endian u32 rank,
/// u32 dims, f64 values row-major, then a length-prefixed UTF-8 JSON
/// metadata blob.
void write_binary(const FieldGrid& field, const std::string& path);
FieldGrid read_binary(const std::string& path);

/// Binary PPM heatmap with a fixed diverging colormap; values clipped at the
/// 1st/99th percentiles (stable fields have extreme outliers).
void write_image(const FieldGrid& field, const std::string& path);

}  // namespace karlin::grid_io
