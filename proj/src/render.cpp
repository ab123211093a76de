#include "boxspline/render.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace boxspline {

std::string GrayImage::pgm() const {
  std::string out = "P5\n" + std::to_string(width) + " " + std::to_string(height) + "\n255\n";
  out.append(pixels.begin(), pixels.end());
  return out;
}

std::uint64_t GrayImage::checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : pgm()) h = (h ^ c) * 1099511628211ull;
  return h;
}

std::size_t GrayImage::nonzero() const {
  return static_cast<std::size_t>(std::count_if(pixels.begin(), pixels.end(), [](std::uint8_t p) { return p != 0; }));
}

void GrayImage::write(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  const std::string bytes = pgm();
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

SlicePlane parse_slice_plane(const std::string& spec) {
  if (spec.size() < 3 || spec[1] != '=' || spec[0] < 'x' || spec[0] > 'z')
    throw std::invalid_argument("slice plane must look like x=<v>, y=<v> or z=<v>, got '" + spec + "'");
  SlicePlane p;
  p.axis = spec[0] - 'x';
  std::size_t used = 0;
  p.value = std::stod(spec.substr(2), &used);
  if (used != spec.size() - 2) throw std::invalid_argument("bad slice value in '" + spec + "'");
  return p;
}

GrayImage render_slice(const DirectionMatrix& xi, int resolution, const SlicePlane& plane, bool* empty) {
  const int a = xi.lattice.ambient;
  if (a != xi.dim() || (a != 2 && a != 3)) throw std::invalid_argument("render_slice: needs a 2D or 3D spline");
  if (resolution < 1) throw std::invalid_argument("render_slice: resolution must be positive");
  if (a == 3 && (plane.axis < 0 || plane.axis > 2)) throw std::invalid_argument("render_slice: bad axis");
  const PiecewisePolynomial pp = to_ppform(xi);
  const Eigen::VectorXd extent = 0.5 * xi.columns.cwiseAbs().rowwise().sum();
  int u_axis = 0, v_axis = 1;
  if (a == 3) {
    u_axis = plane.axis == 0 ? 1 : 0;
    v_axis = plane.axis == 2 ? 1 : 2;
  }
  std::vector<double> values(static_cast<std::size_t>(resolution) * resolution);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(a);
  if (a == 3) x[plane.axis] = plane.value;
  double peak = 0.0;
  for (int row = 0; row < resolution; ++row) {
    for (int col = 0; col < resolution; ++col) {
      x[u_axis] = -extent[u_axis] + (col + 0.5) * 2.0 * extent[u_axis] / resolution;
      x[v_axis] = extent[v_axis] - (row + 0.5) * 2.0 * extent[v_axis] / resolution;
      const double v = std::max(0.0, pp(x));
      values[static_cast<std::size_t>(row) * resolution + col] = v;
      peak = std::max(peak, v);
    }
  }
  GrayImage img{resolution, resolution, std::vector<std::uint8_t>(values.size(), 0)};
  if (empty) *empty = peak <= 0.0;
  if (peak > 0.0)
    for (std::size_t i = 0; i < values.size(); ++i) img.pixels[i] = static_cast<std::uint8_t>(std::lround(255.0 * values[i] / peak));
  return img;
}

GrayImage raycast(const SplineField& field, double iso, int resolution, double extent) {
  if (field.directions().lattice.ambient != 3) throw std::invalid_argument("raycast: needs a 3D field");
  if (resolution < 1 || extent <= 0.0) throw std::invalid_argument("raycast: bad resolution or extent");
  const double step = field.h() / 4.0;
  const double delta = field.h() * 1e-2;
  GrayImage img{resolution, resolution, std::vector<std::uint8_t>(static_cast<std::size_t>(resolution) * resolution, 0)};
  Eigen::VectorXd p(3);
  for (int row = 0; row < resolution; ++row) {
    for (int col = 0; col < resolution; ++col) {
      p[0] = -extent + (col + 0.5) * 2.0 * extent / resolution;
      p[1] = extent - (row + 0.5) * 2.0 * extent / resolution;
      auto g = [&](double z) {
        p[2] = z;
        return field(p) - iso;
      };
      double z0 = extent, g0 = g(z0);
      bool hit = false;
      while (z0 > -extent) {
        const double z1 = std::max(-extent, z0 - step);
        const double g1 = g(z1);
        if ((g0 < 0.0) != (g1 < 0.0)) {
          double hi = z0, lo = z1, ghi = g0;
          while (hi - lo > 1e-6) {
            const double mid = 0.5 * (hi + lo);
            const double gm = g(mid);
            if ((gm < 0.0) == (ghi < 0.0)) {
              hi = mid;
              ghi = gm;
            } else {
              lo = mid;
            }
          }
          z0 = 0.5 * (hi + lo);
          hit = true;
          break;
        }
        z0 = z1;
        g0 = g1;
      }
      if (!hit) continue;
      Eigen::Vector3d grad;
      for (int i = 0; i < 3; ++i) {
        Eigen::VectorXd q = p;
        q[2] = z0;
        q[i] += delta;
        const double fp = field(q);
        q[i] -= 2.0 * delta;
        grad[i] = (fp - field(q)) / (2.0 * delta);
      }
      const double len = grad.norm();
      const double lambert = len > 0.0 ? std::abs(grad[2]) / len : 1.0;
      img.pixels[static_cast<std::size_t>(row) * resolution + col] = static_cast<std::uint8_t>(std::lround(40.0 + 215.0 * lambert));
    }
  }
  return img;
}

}  // namespace boxspline
