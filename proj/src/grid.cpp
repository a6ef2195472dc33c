#include "fracphase/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace fracphase {

namespace {
// h must divide len to within 1e-12 relative.
int divide_exact(double len, double h, const char* what) {
  const double q = len / h;
  const double r = std::round(q);
  if (r < 0.5 || std::abs(q - r) > 1e-12 * std::max(1.0, std::abs(q))) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "%s: %.17g is not an integer multiple of h=%.17g",
                  what, len, h);
    throw std::invalid_argument(buf);
  }
  return static_cast<int>(r);
}
}  // namespace

bool SignRegion::is_half_space(int dim, int* axis) const {
  int finite_axis = -1;
  int finite_count = 0;
  for (int k = 0; k < dim; ++k) {
    const bool lo_f = std::isfinite(lo[k]);
    const bool hi_f = std::isfinite(hi[k]);
    if (lo_f && hi_f) return false;
    if (lo_f || hi_f) {
      ++finite_count;
      finite_axis = k;
    }
  }
  if (finite_count != 1) return false;
  if (axis) *axis = finite_axis;
  return true;
}

BoxDomain BoxDomain::create(int dim, const std::vector<double>& lower,
                            const std::vector<double>& upper, double h,
                            double collar_radius) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("BoxDomain: dim must be 1 or 2");
  if (static_cast<int>(lower.size()) != dim || static_cast<int>(upper.size()) != dim)
    throw std::invalid_argument("BoxDomain: bounds length must equal dim");
  if (!(h > 0)) throw std::invalid_argument("BoxDomain: h must be positive");
  if (collar_radius < 0) throw std::invalid_argument("BoxDomain: collar_radius must be >= 0");

  BoxDomain d;
  d.dim_ = dim;
  d.h_ = h;
  d.collar_ = collar_radius;
  d.collar_cells_ = collar_radius == 0 ? 0 : divide_exact(collar_radius, h, "collar_radius");
  d.collar_ = d.collar_cells_ * h;
  for (int k = 0; k < dim; ++k) {
    if (!(upper[k] - lower[k] > 0))
      throw std::invalid_argument("BoxDomain: upper must exceed lower");
    const int n = divide_exact(upper[k] - lower[k], h, "extent");
    d.lower_[k] = lower[k];
    d.upper_[k] = upper[k];
    d.ext_[k] = n + 2 * d.collar_cells_;
  }
  if (dim == 1) {
    d.ext_[1] = 1;
    d.lower_[1] = d.upper_[1] = 0.0;
  }
  if (d.interior_count() <= 0) throw std::invalid_argument("BoxDomain: empty interior");
  return d;
}

int BoxDomain::interior_count() const {
  int n = 1;
  for (int k = 0; k < dim_; ++k) n *= ext_[k] - 2 * collar_cells_;
  return n;
}

double BoxDomain::cell_measure() const { return dim_ == 1 ? h_ : h_ * h_; }

std::vector<int> BoxDomain::interior_cells() const {
  std::vector<int> out;
  out.reserve(interior_count());
  for (int c = 0; c < cell_count(); ++c)
    if (is_interior(c)) out.push_back(c);
  return out;
}

std::vector<int> BoxDomain::collar_cells() const {
  std::vector<int> out;
  out.reserve(cell_count() - interior_count());
  for (int c = 0; c < cell_count(); ++c)
    if (!is_interior(c)) out.push_back(c);
  return out;
}

std::vector<int> BoxDomain::all_cells() const {
  std::vector<int> out(cell_count());
  for (int c = 0; c < cell_count(); ++c) out[c] = c;
  return out;
}

std::vector<int> BoxDomain::cells_in_box(const std::vector<double>& lo,
                                         const std::vector<double>& hi) const {
  std::vector<int> out;
  for (int c = 0; c < cell_count(); ++c) {
    if (!is_interior(c)) continue;
    auto x = center(c);
    bool in = true;
    for (int k = 0; k < dim_; ++k)
      if (x[k] < lo[k] || x[k] > hi[k]) in = false;
    if (in) out.push_back(c);
  }
  return out;
}

bool BoxDomain::same_grid(const BoxDomain& o) const {
  if (dim_ != o.dim_ || ext_ != o.ext_ || collar_cells_ != o.collar_cells_) return false;
  if (std::abs(h_ - o.h_) > 1e-15 * h_) return false;
  for (int k = 0; k < dim_; ++k)
    if (std::abs(lower_[k] - o.lower_[k]) > 1e-12 || std::abs(upper_[k] - o.upper_[k]) > 1e-12)
      return false;
  return true;
}

std::uint64_t BoxDomain::hash() const {
  auto mix = [](std::uint64_t h, std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
  };
  auto bits = [](double x) {
    std::uint64_t u;
    static_assert(sizeof u == sizeof x);
    std::memcpy(&u, &x, sizeof u);
    return u;
  };
  std::uint64_t h = static_cast<std::uint64_t>(dim_);
  h = mix(h, bits(h_));
  h = mix(h, static_cast<std::uint64_t>(collar_cells_));
  for (int k = 0; k < dim_; ++k) {
    h = mix(h, bits(lower_[k]));
    h = mix(h, bits(upper_[k]));
  }
  return h;
}

double ProfileTable::eval(double x) const {
  if (t.empty()) throw std::logic_error("ProfileTable: empty");
  if (x <= t.front()) return u.front() < 0 ? -1.0 : 1.0;
  if (x >= t.back()) return u.back() < 0 ? -1.0 : 1.0;
  auto it = std::upper_bound(t.begin(), t.end(), x);
  const std::size_t j = static_cast<std::size_t>(it - t.begin());
  const double w = (x - t[j - 1]) / (t[j] - t[j - 1]);
  return u[j - 1] + w * (u[j] - u[j - 1]);
}

double ExteriorSpec::value_at(const double* x, int dim) const {
  switch (kind) {
    case Kind::Constant:
      return constant;
    case Kind::SignPattern:
      return pattern.sign_at(x, dim);
    case Kind::Profile: {
      if (!profile_table)
        throw std::logic_error("ExteriorSpec: profile exterior without a registered evaluator");
      const double d = profile_orient * (x[profile_axis] - profile_offset);
      return profile_table->eval(d / profile_eps);
    }
  }
  return 0.0;
}

ExteriorSpec ExteriorSpec::constant_value(double c) {
  if (std::abs(c) > 1.0) throw std::invalid_argument("exterior constant must lie in [-1,1]");
  ExteriorSpec e;
  e.kind = Kind::Constant;
  e.constant = c;
  return e;
}

ExteriorSpec ExteriorSpec::sign_pattern(SignRegion r) {
  ExteriorSpec e;
  e.kind = Kind::SignPattern;
  e.pattern = r;
  return e;
}

ExteriorSpec ExteriorSpec::profile_tag() {
  ExteriorSpec e;
  e.kind = Kind::Profile;
  return e;
}

ExteriorSpec ExteriorSpec::layer_profile(int axis, double offset, double orient,
                                         double eps,
                                         std::shared_ptr<const ProfileTable> table) {
  ExteriorSpec e;
  e.kind = Kind::Profile;
  e.profile_axis = axis;
  e.profile_offset = offset;
  e.profile_orient = orient;
  e.profile_eps = eps;
  e.profile_table = std::move(table);
  return e;
}

std::string ExteriorSpec::cache_key() const {
  char buf[256];
  switch (kind) {
    case Kind::Constant:
      std::snprintf(buf, sizeof buf, "const:%.17g", constant);
      break;
    case Kind::SignPattern:
      std::snprintf(buf, sizeof buf, "sign:%d:%.17g,%.17g,%.17g,%.17g",
                    pattern.inside_is_plus ? 1 : 0, pattern.lo[0], pattern.hi[0],
                    pattern.lo[1], pattern.hi[1]);
      break;
    case Kind::Profile:
      std::snprintf(buf, sizeof buf, "prof:%p:%d:%.17g:%.17g:%.17g",
                    static_cast<const void*>(profile_table.get()), profile_axis,
                    profile_offset, profile_orient, profile_eps);
      break;
  }
  return buf;
}

ScalarField ScalarField::constant(const BoxDomain& d, double v, ExteriorSpec ext) {
  if (std::abs(v) > 1.0) throw std::invalid_argument("ScalarField: value outside [-1,1]");
  ScalarField u;
  u.domain = d;
  u.values.assign(d.cell_count(), v);
  u.exterior = std::move(ext);
  return u;
}

void ScalarField::validate() const {
  if (static_cast<int>(values.size()) != domain.cell_count())
    throw std::invalid_argument("ScalarField: value count does not match grid");
  for (double v : values)
    if (!(std::abs(v) <= 1.0)) throw std::invalid_argument("ScalarField: value outside [-1,1]");
}

bool IndicatorSet::in_set_beyond(const double* x, int dim) const {
  switch (ext_kind) {
    case ExteriorMask::AllFalse:
      return false;
    case ExteriorMask::AllTrue:
      return true;
    case ExteriorMask::Region:
      return ext_region.sign_at(x, dim) > 0;
  }
  return false;
}

IndicatorSet IndicatorSet::from_predicate(const BoxDomain& d,
                                          bool (*pred)(const double*, int, const void*),
                                          const void* ctx) {
  IndicatorSet s;
  s.domain = d;
  s.mask.resize(d.cell_count());
  for (int c = 0; c < d.cell_count(); ++c) {
    auto x = d.center(c);
    s.mask[c] = pred(x.data(), d.dim(), ctx) ? 1 : 0;
  }
  return s;
}

IndicatorSet IndicatorSet::from_region(const BoxDomain& d, const SignRegion& inside) {
  IndicatorSet s;
  s.domain = d;
  s.mask.resize(d.cell_count());
  for (int c = 0; c < d.cell_count(); ++c) {
    auto x = d.center(c);
    s.mask[c] = inside.sign_at(x.data(), d.dim()) > 0 ? 1 : 0;
  }
  s.ext_kind = ExteriorMask::Region;
  s.ext_region = inside;
  return s;
}

IndicatorSet IndicatorSet::half_space(const BoxDomain& d, int axis, double offset,
                                      bool positive_in_set) {
  return from_region(d, SignRegion::half_space(axis, offset, positive_in_set));
}

ScalarField to_field(const IndicatorSet& set) {
  ScalarField u;
  u.domain = set.domain;
  u.values.resize(set.domain.cell_count());
  for (int c = 0; c < set.domain.cell_count(); ++c)
    u.values[c] = set.mask[c] ? 1.0 : -1.0;
  switch (set.ext_kind) {
    case IndicatorSet::ExteriorMask::AllFalse:
      u.exterior = ExteriorSpec::constant_value(-1.0);
      break;
    case IndicatorSet::ExteriorMask::AllTrue:
      u.exterior = ExteriorSpec::constant_value(1.0);
      break;
    case IndicatorSet::ExteriorMask::Region:
      u.exterior = ExteriorSpec::sign_pattern(set.ext_region);
      break;
  }
  return u;
}

IndicatorSet threshold_field(const ScalarField& u) {
  IndicatorSet s;
  s.domain = u.domain;
  s.mask.resize(u.values.size());
  for (std::size_t c = 0; c < u.values.size(); ++c) s.mask[c] = u.values[c] > 0 ? 1 : 0;
  switch (u.exterior.kind) {
    case ExteriorSpec::Kind::Constant:
      s.ext_kind = u.exterior.constant > 0 ? IndicatorSet::ExteriorMask::AllTrue
                                           : IndicatorSet::ExteriorMask::AllFalse;
      break;
    case ExteriorSpec::Kind::SignPattern:
      s.ext_kind = IndicatorSet::ExteriorMask::Region;
      s.ext_region = u.exterior.pattern;
      break;
    case ExteriorSpec::Kind::Profile: {
      // The profile's far field is the half-space it interpolates.
      s.ext_kind = IndicatorSet::ExteriorMask::Region;
      s.ext_region = SignRegion::half_space(u.exterior.profile_axis, u.exterior.profile_offset,
                                            u.exterior.profile_orient > 0);
      break;
    }
  }
  return s;
}

double l1_distance(const ScalarField& a, const ScalarField& b,
                   std::span<const int> region) {
  if (!a.domain.same_grid(b.domain))
    throw std::invalid_argument("l1_distance: fields live on different grids");
  double s = 0.0;
  for (int c : region) s += std::abs(a.values[c] - b.values[c]);
  return s * a.domain.cell_measure();
}

std::vector<int> set_union(std::span<const int> a, std::span<const int> b) {
  std::vector<int> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::vector<int> set_difference(std::span<const int> a, std::span<const int> b) {
  std::vector<int> out;
  out.reserve(a.size());
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

bool sets_disjoint(std::span<const int> a, std::span<const int> b) {
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (a[i] == b[j]) return false;
    if (a[i] < b[j])
      ++i;
    else
      ++j;
  }
  return true;
}

void write_mask(const std::string& path, const IndicatorSet& set) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_mask: cannot open " + path);
  const auto& d = set.domain;
  char head[256];
  std::snprintf(head, sizeof head, "# dim=%d nx=%d ny=%d h=%.17g lower0=%.17g lower1=%.17g collar_cells=%d\n",
                d.dim(), d.nx(), d.ny(), d.h(), d.ext_lower(0) + d.collar_radius(),
                d.dim() == 2 ? d.ext_lower(1) + d.collar_radius() : 0.0,
                d.collar_cells_per_side());
  out << head;
  for (int iy = 0; iy < d.ny(); ++iy) {
    for (int ix = 0; ix < d.nx(); ++ix) {
      if (ix) out << ' ';
      out << (set.mask[d.cell(ix, iy)] ? 1 : 0);
    }
    out << '\n';
  }
}

IndicatorSet read_mask(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_mask: cannot open " + path);
  std::string header;
  std::getline(in, header);
  int dim = 0, nx = 0, ny = 0, collar_cells = 0;
  double h = 0, lo0 = 0, lo1 = 0;
  if (std::sscanf(header.c_str(),
                  "# dim=%d nx=%d ny=%d h=%lg lower0=%lg lower1=%lg collar_cells=%d",
                  &dim, &nx, &ny, &h, &lo0, &lo1, &collar_cells) != 7)
    throw std::runtime_error("read_mask: bad header in " + path);
  std::vector<double> lower, upper;
  lower.push_back(lo0);
  upper.push_back(lo0 + (nx - 2 * collar_cells) * h);
  if (dim == 2) {
    lower.push_back(lo1);
    upper.push_back(lo1 + (ny - 2 * collar_cells) * h);
  }
  IndicatorSet s;
  s.domain = BoxDomain::create(dim, lower, upper, h, collar_cells * h);
  s.mask.resize(s.domain.cell_count());
  for (int iy = 0; iy < ny; ++iy)
    for (int ix = 0; ix < nx; ++ix) {
      int v;
      if (!(in >> v)) throw std::runtime_error("read_mask: truncated matrix in " + path);
      s.mask[s.domain.cell(ix, iy)] = v ? 1 : 0;
    }
  return s;
}

void write_field_csv(const std::string& path, const ScalarField& u) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_field_csv: cannot open " + path);
  const auto& d = u.domain;
  out << (d.dim() == 2 ? "cell,x,y,value\n" : "cell,x,value\n");
  char line[160];
  for (int c = 0; c < d.cell_count(); ++c) {
    auto x = d.center(c);
    if (d.dim() == 2)
      std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g\n", c, x[0], x[1], u.values[c]);
    else
      std::snprintf(line, sizeof line, "%d,%.17g,%.17g\n", c, x[0], u.values[c]);
    out << line;
  }
}

}  // namespace fracphase
