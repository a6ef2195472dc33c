#include "fracphase/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fracphase/util.hpp"

namespace fracphase {

namespace {

// A boundary face: a point in 1D, an axis-aligned segment of length h in 2D.
struct Face {
  int axis;      // normal axis
  double coord;  // position along the normal axis
  double span0;  // segment start along the other axis (2D)
};

double face_distance(const Face& f, const double* x, int dim, double h) {
  if (dim == 1) return std::abs(x[0] - f.coord);
  const int other = 1 - f.axis;
  const double dn = x[f.axis] - f.coord;
  const double t = std::clamp(x[other], f.span0, f.span0 + h);
  const double dt = x[other] - t;
  return std::hypot(dn, dt);
}

// Faces between differently-masked cells; `beyond` supplies the mask just
// outside the extended grid (nullptr: treat outside as its own value, i.e.
// no faces on the grid edge).
template <typename MaskFn, typename BeyondFn>
std::vector<Face> collect_faces(const BoxDomain& d, MaskFn mask, BeyondFn beyond,
                                bool use_beyond) {
  std::vector<Face> faces;
  const int nx = d.nx(), ny = d.ny();
  const double h = d.h();
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const int c = d.cell(ix, iy);
      const bool mc = mask(c);
      const auto xc = d.center(c);
      // +x neighbor
      {
        bool mn;
        if (ix + 1 < nx)
          mn = mask(d.cell(ix + 1, iy));
        else if (use_beyond) {
          const double p[2] = {xc[0] + h, xc[1]};
          mn = beyond(p);
        } else
          mn = mc;
        if (mn != mc) faces.push_back({0, xc[0] + 0.5 * h, xc[1] - 0.5 * h});
      }
      if (ix == 0 && use_beyond) {
        const double p[2] = {xc[0] - h, xc[1]};
        if (beyond(p) != mc) faces.push_back({0, xc[0] - 0.5 * h, xc[1] - 0.5 * h});
      }
      if (d.dim() == 2) {
        bool mn;
        if (iy + 1 < ny)
          mn = mask(d.cell(ix, iy + 1));
        else if (use_beyond) {
          const double p[2] = {xc[0], xc[1] + h};
          mn = beyond(p);
        } else
          mn = mc;
        if (mn != mc) faces.push_back({1, xc[1] + 0.5 * h, xc[0] - 0.5 * h});
        if (iy == 0 && use_beyond) {
          const double p[2] = {xc[0], xc[1] - h};
          if (beyond(p) != mc) faces.push_back({1, xc[1] - 0.5 * h, xc[0] - 0.5 * h});
        }
      }
    }
  return faces;
}

template <typename MaskFn>
std::vector<double> distances_from_faces(const BoxDomain& d, const std::vector<Face>& faces,
                                         MaskFn mask) {
  std::vector<double> out(d.cell_count());
  parallel_for(d.cell_count(), [&](int c) {
    const auto x = d.center(c);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& f : faces) best = std::min(best, face_distance(f, x.data(), d.dim(), d.h()));
    out[c] = mask(c) ? best : -best;
  });
  return out;
}

}  // namespace

std::vector<double> signed_distance(const IndicatorSet& A) {
  const auto& d = A.domain;
  auto mask = [&](int c) { return A.mask[c] != 0; };
  auto beyond = [&](const double* p) { return A.in_set_beyond(p, d.dim()); };
  const auto faces = collect_faces(d, mask, beyond, true);
  if (faces.empty())
    throw std::invalid_argument("signed_distance: set has no boundary (empty or full)");
  return distances_from_faces(d, faces, mask);
}

std::vector<double> subset_boundary_distance(const BoxDomain& d, std::span<const int> D) {
  std::vector<std::uint8_t> in(d.cell_count(), 0);
  for (int c : D) in[c] = 1;
  auto mask = [&](int c) { return in[c] != 0; };
  const auto faces =
      collect_faces(d, mask, [](const double*) { return false; }, true);
  if (faces.empty())
    throw std::invalid_argument("subset_boundary_distance: subset has no boundary");
  return distances_from_faces(d, faces, mask);
}

double pixel_perimeter(const IndicatorSet& E, std::span<const int> region) {
  const auto& d = E.domain;
  std::vector<std::uint8_t> in(d.cell_count(), 0);
  for (int c : region) in[c] = 1;
  const int nx = d.nx(), ny = d.ny();
  long count = 0;
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      const int c = d.cell(ix, iy);
      if (!in[c]) continue;
      if (ix + 1 < nx) {
        const int nb = d.cell(ix + 1, iy);
        if (in[nb] && E.mask[c] != E.mask[nb]) ++count;
      }
      if (d.dim() == 2 && iy + 1 < ny) {
        const int nb = d.cell(ix, iy + 1);
        if (in[nb] && E.mask[c] != E.mask[nb]) ++count;
      }
    }
  return (d.dim() == 1 ? 1.0 : d.h()) * static_cast<double>(count);
}

}  // namespace fracphase
