#pragma once

#include "boxspline/reconstruct.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace boxspline {

/// 8-bit grayscale image, row 0 at the top.
struct GrayImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  std::string pgm() const;  // binary P5
  /// FNV-1a 64 of the P5 bytes.
  std::uint64_t checksum() const;
  std::size_t nonzero() const;
  void write(const std::string& path) const;
};

/// Ambient slice plane of a 3D spline: coordinate `axis` fixed at `value`.
struct SlicePlane {
  int axis = 2;
  double value = 0.0;
};
/// Parses "x=0.25", "y=0", "z=-1".
SlicePlane parse_slice_plane(const std::string& spec);

/// Spline values on a resolution^2 pixel grid covering the support's bounding
/// box in the two free axes, scaled so the maximum maps to 255. `empty` is set
/// when the plane misses the support (all-zero image).
GrayImage render_slice(const DirectionMatrix& xi, int resolution, const SlicePlane& plane = {}, bool* empty = nullptr);

/// Orthographic view down -z of the level set field = iso over [-extent, extent]^3:
/// per pixel the ray is marched in steps of h/4, the first crossing bisected
/// to 1e-6, and shaded by the Lambert term of the central-difference gradient.
GrayImage raycast(const SplineField& field, double iso, int resolution, double extent);

}  // namespace boxspline
