#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace fracphase {

// Axis-aligned +/-1 sign pattern: +1 inside the (possibly unbounded) box,
// -1 outside, or flipped. Covers constant signs, half-spaces and quadrants.
struct SignRegion {
  std::array<double, 2> lo{-std::numeric_limits<double>::infinity(),
                           -std::numeric_limits<double>::infinity()};
  std::array<double, 2> hi{std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::infinity()};
  bool inside_is_plus = true;

  bool contains(const double* x, int dim) const {
    for (int k = 0; k < dim; ++k)
      if (x[k] <= lo[k] || x[k] > hi[k]) return false;
    return true;
  }
  double sign_at(const double* x, int dim) const {
    return contains(x, dim) == inside_is_plus ? 1.0 : -1.0;
  }

  static SignRegion all(bool plus) {
    SignRegion r;
    r.inside_is_plus = plus;
    return r;
  }
  // +1 where x[axis] > offset (or < offset when positive_is_plus is false).
  static SignRegion half_space(int axis, double offset, bool positive_is_plus = true) {
    SignRegion r;
    if (positive_is_plus)
      r.lo[axis] = offset;
    else
      r.hi[axis] = offset;
    return r;
  }
  bool is_half_space(int dim, int* axis = nullptr) const;
};

// Uniform Cartesian grid over an interior box plus a discretized exterior
// collar; the analytic tail takes over beyond the collar.
class BoxDomain {
 public:
  BoxDomain() = default;
  // Throws std::invalid_argument when h does not divide the extents or the
  // collar, or the bounds are inconsistent.
  static BoxDomain create(int dim, const std::vector<double>& lower,
                          const std::vector<double>& upper, double h,
                          double collar_radius);

  int dim() const { return dim_; }
  double h() const { return h_; }
  double collar_radius() const { return collar_; }
  int collar_cells_per_side() const { return collar_cells_; }

  double lower(int axis) const { return lower_[axis]; }
  double upper(int axis) const { return upper_[axis]; }
  double ext_lower(int axis) const { return lower_[axis] - collar_; }
  double ext_upper(int axis) const { return upper_[axis] + collar_; }

  // Extended grid = interior + collar, row-major, x fastest.
  int nx() const { return ext_[0]; }
  int ny() const { return ext_[1]; }
  int cell_count() const { return ext_[0] * ext_[1]; }
  int interior_count() const;

  std::array<int, 2> coord(int cell) const {
    return {cell % ext_[0], cell / ext_[0]};
  }
  int cell(int ix, int iy = 0) const { return iy * ext_[0] + ix; }
  std::array<double, 2> center(int cell) const {
    auto c = coord(cell);
    return {ext_lower(0) + (c[0] + 0.5) * h_,
            dim_ == 2 ? ext_lower(1) + (c[1] + 0.5) * h_ : 0.0};
  }
  bool is_interior(int cell) const {
    auto c = coord(cell);
    for (int k = 0; k < dim_; ++k)
      if (c[k] < collar_cells_ || c[k] >= ext_[k] - collar_cells_) return false;
    return true;
  }
  double cell_measure() const;  // h^dim

  std::vector<int> interior_cells() const;
  std::vector<int> collar_cells() const;
  std::vector<int> all_cells() const;
  // Interior cells whose centers lie in [lo, hi] (per axis).
  std::vector<int> cells_in_box(const std::vector<double>& lo,
                                const std::vector<double>& hi) const;

  bool same_grid(const BoxDomain& o) const;
  std::uint64_t hash() const;

 private:
  int dim_ = 1;
  std::array<double, 2> lower_{0, 0}, upper_{0, 0};
  double h_ = 1.0;
  double collar_ = 0.0;
  int collar_cells_ = 0;
  std::array<int, 2> ext_{1, 1};  // cells per axis, extended grid
};

// Tabulated monotone layer profile u0 with linear interpolation, clamped to
// +/-1 beyond the sample range.
struct ProfileTable {
  std::vector<double> t;  // strictly increasing
  std::vector<double> u;
  double eval(double x) const;
  double clamp_range() const { return t.empty() ? 0.0 : std::max(-t.front(), t.back()); }
};

// What u looks like beyond the collar.
struct ExteriorSpec {
  enum class Kind { Constant, SignPattern, Profile };
  Kind kind = Kind::Constant;
  double constant = -1.0;  // Constant
  SignRegion pattern;      // SignPattern

  // Profile: u(y) = table((dot(y,axis) - offset)/eps) across an axis-aligned
  // interface. The table is the registered evaluator; a Profile spec without
  // one is just a tag and cannot be integrated against.
  int profile_axis = 0;
  double profile_offset = 0.0;
  double profile_orient = 1.0;  // +1: u increases toward +axis
  double profile_eps = 1.0;
  std::shared_ptr<const ProfileTable> profile_table;

  bool has_evaluator() const { return kind != Kind::Profile || profile_table != nullptr; }
  // Pointwise value beyond the collar (Profile requires an evaluator).
  double value_at(const double* x, int dim) const;

  static ExteriorSpec constant_value(double c);
  static ExteriorSpec sign_pattern(SignRegion r);
  static ExteriorSpec profile_tag();  // no evaluator
  static ExteriorSpec layer_profile(int axis, double offset, double orient,
                                    double eps,
                                    std::shared_ptr<const ProfileTable> table);
  // Key for tail-moment caching; equal keys imply identical tail integrals.
  std::string cache_key() const;
};

// Grid sample of an admissible |u| <= 1 over interior + collar.
struct ScalarField {
  BoxDomain domain;
  std::vector<double> values;  // one per extended cell
  ExteriorSpec exterior;

  static ScalarField constant(const BoxDomain& d, double v,
                              ExteriorSpec ext = ExteriorSpec::constant_value(-1.0));
  double operator[](int cell) const { return values[cell]; }
  double& operator[](int cell) { return values[cell]; }
  void validate() const;  // throws if any |value| > 1
};

// Pixel set over the extended grid with a rule for cells beyond the collar.
struct IndicatorSet {
  BoxDomain domain;
  std::vector<std::uint8_t> mask;  // one per extended cell
  enum class ExteriorMask { AllFalse, AllTrue, Region };
  ExteriorMask ext_kind = ExteriorMask::AllFalse;
  SignRegion ext_region;  // used when ext_kind == Region (true inside == plus)

  bool in_set_beyond(const double* x, int dim) const;
  static IndicatorSet from_predicate(const BoxDomain& d,
                                     bool (*pred)(const double*, int, const void*),
                                     const void* ctx);
  static IndicatorSet half_space(const BoxDomain& d, int axis, double offset,
                                 bool positive_in_set = true);
  static IndicatorSet from_region(const BoxDomain& d, const SignRegion& inside);
};

// u = +1 on masked cells, -1 elsewhere; the exterior rule carries over.
ScalarField to_field(const IndicatorSet& set);
// Threshold at 0: value > 0 becomes masked.
IndicatorSet threshold_field(const ScalarField& u);

// Sum over region of |a - b| * h^dim. Throws on mismatched grids.
double l1_distance(const ScalarField& a, const ScalarField& b,
                   std::span<const int> region);

// Sorted-set helpers for cell subsets.
std::vector<int> set_union(std::span<const int> a, std::span<const int> b);
std::vector<int> set_difference(std::span<const int> a, std::span<const int> b);
bool sets_disjoint(std::span<const int> a, std::span<const int> b);

// Plain-text {0,1} matrix I/O for masks; CSV I/O for fields.
void write_mask(const std::string& path, const IndicatorSet& set);
IndicatorSet read_mask(const std::string& path);
void write_field_csv(const std::string& path, const ScalarField& u);

}  // namespace fracphase
