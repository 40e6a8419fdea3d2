#include "karlin/grid_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "json.hpp"

namespace karlin::grid_io {

namespace {

constexpr char kMagic[4] = {'K', 'S', 'F', '1'};

std::pair<std::size_t, std::size_t> rows_cols(const FieldGrid& field) {
  if (field.shape.empty()) throw std::invalid_argument("field has no shape");
  if (field.shape.size() == 1) return {1, field.shape[0]};
  if (field.shape.size() == 2) return {field.shape[0], field.shape[1]};
  throw std::invalid_argument("grids of rank > 2 are not supported");
}

void write_u32(std::ofstream& out, std::uint32_t v) {
  // Little-endian regardless of host.
  const unsigned char b[4] = {
      static_cast<unsigned char>(v & 0xff),
      static_cast<unsigned char>((v >> 8) & 0xff),
      static_cast<unsigned char>((v >> 16) & 0xff),
      static_cast<unsigned char>((v >> 24) & 0xff)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::ifstream& in) {
  unsigned char b[4];
  in.read(reinterpret_cast<char*>(b), 4);
  return static_cast<std::uint32_t>(b[0]) |
         (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) |
         (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

void write_csv(const FieldGrid& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const auto [rows, cols] = rows_cols(field);
  char buf[40];
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      std::snprintf(buf, sizeof(buf), "%.17g", field.values[r * cols + c]);
      if (c) out << ',';
      out << buf;
    }
    out << '\n';
  }
}

void write_binary(const FieldGrid& field, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(kMagic, 4);
  write_u32(out, static_cast<std::uint32_t>(field.shape.size()));
  for (std::size_t d : field.shape) write_u32(out, static_cast<std::uint32_t>(d));
  static_assert(sizeof(double) == 8);
  out.write(reinterpret_cast<const char*>(field.values.data()),
            static_cast<std::streamsize>(field.values.size() * 8));
  nlohmann::json meta;
  meta["component"] = component_name(field.component);
  for (const auto& [k, v] : field.meta) meta[k] = v;
  const std::string blob = meta.dump();
  write_u32(out, static_cast<std::uint32_t>(blob.size()));
  out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
}

FieldGrid read_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error(path + ": not a KSF1 grid file");
  const std::uint32_t rank = read_u32(in);
  if (rank == 0 || rank > 2) throw std::runtime_error("unsupported rank");
  FieldGrid field;
  std::size_t total = 1;
  for (std::uint32_t i = 0; i < rank; ++i) {
    field.shape.push_back(read_u32(in));
    total *= field.shape.back();
  }
  field.values.resize(total);
  in.read(reinterpret_cast<char*>(field.values.data()),
          static_cast<std::streamsize>(total * 8));
  const std::uint32_t blob_len = read_u32(in);
  std::string blob(blob_len, '\0');
  in.read(blob.data(), blob_len);
  if (!in) throw std::runtime_error(path + ": truncated KSF1 file");
  const auto meta = nlohmann::json::parse(blob);
  for (const auto& [k, v] : meta.items()) {
    if (k == "component") {
      const std::string c = v.get<std::string>();
      field.component = c == "large"   ? Component::large
                        : c == "small" ? Component::small
                                       : Component::combined;
    } else {
      field.meta[k] = v.get<std::string>();
    }
  }
  return field;
}

void write_image(const FieldGrid& field, const std::string& path) {
  const auto [rows, cols] = rows_cols(field);
  std::vector<double> sorted = field.values;
  std::sort(sorted.begin(), sorted.end());
  const auto quantile = [&](double q) {
    const auto idx = static_cast<std::size_t>(
        q * static_cast<double>(sorted.size() - 1));
    return sorted[idx];
  };
  double lo = quantile(0.01), hi = quantile(0.99);
  if (!(hi > lo)) {
    lo -= 0.5;
    hi += 0.5;
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "P6\n" << cols << ' ' << rows << "\n255\n";
  // Blue -> white -> red diverging map.
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      double v = (field.values[r * cols + c] - lo) / (hi - lo);
      v = std::clamp(v, 0.0, 1.0);
      unsigned char rgb[3];
      if (v < 0.5) {
        const double t = v / 0.5;
        rgb[0] = static_cast<unsigned char>(255.0 * t * 0.9 + 20.0 * (1 - t));
        rgb[1] = static_cast<unsigned char>(255.0 * t * 0.9 + 40.0 * (1 - t));
        rgb[2] = static_cast<unsigned char>(255.0 * t * 0.1 + 230.0 * (1 - t) + 25.0 * t);
      } else {
        const double t = (v - 0.5) / 0.5;
        rgb[0] = static_cast<unsigned char>(230.0 * (1 - t) + 200.0 * t + 25.0 * (1 - t));
        rgb[1] = static_cast<unsigned char>(230.0 * (1 - t) + 30.0 * t);
        rgb[2] = static_cast<unsigned char>(230.0 * (1 - t) + 30.0 * t);
      }
      out.write(reinterpret_cast<const char*>(rgb), 3);
    }
  }
}

}  // namespace karlin::grid_io
