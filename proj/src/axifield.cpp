#include "ivse/axifield.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

namespace ivse {

AxiGrid AxiGrid::make(double r_min, double r_max, double z_min, double z_max, std::size_t n_r,
                      std::size_t n_z) {
  if (!(std::isfinite(r_min) && std::isfinite(r_max) && std::isfinite(z_min) && std::isfinite(z_max)))
    throw ConfigError("grid: bounds must be finite");
  if (r_min < 0.0) throw ConfigError("grid: r_min must be >= 0");
  if (z_min < 0.0) throw ConfigError("grid: z_min must be >= 0 (upper half-plane)");
  if (!(r_max > r_min)) throw ConfigError("grid: r_max must exceed r_min");
  if (!(z_max > z_min)) throw ConfigError("grid: z_max must exceed z_min");
  if (n_r < 2 || n_z < 2) throw ConfigError("grid: n_r and n_z must be >= 2");
  return AxiGrid{r_min, r_max, z_min, z_max, n_r, n_z};
}

AxiScalarField::AxiScalarField(const AxiGrid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != grid.size()) throw DomainError("field: value count does not match grid");
}

double AxiScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

bool AxiScalarField::all_finite() const {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

std::vector<char> SupportRegion::mask() const {
  std::vector<char> m(grid.size(), 0);
  for (std::size_t c : cells) m[c] = 1;
  return m;
}

bool SupportRegion::covers(double r, double z) const {
  const double dr = grid.dr();
  const double dz = grid.dz();
  const double fi = (r - grid.r_min) / dr;
  const double fj = (z - grid.z_min) / dz;
  if (fi < 0.0 || fj < 0.0 || fi > static_cast<double>(grid.n_r) || fj > static_cast<double>(grid.n_z))
    return false;
  // A point on a shared edge belongs to every adjacent cell.
  const auto candidates = [](double f, std::size_t n) {
    std::array<std::size_t, 2> out{};
    std::size_t count = 0;
    const double fl = std::floor(f);
    const auto lo = static_cast<long>(fl);
    if (lo >= 0 && static_cast<std::size_t>(lo) < n) out[count++] = static_cast<std::size_t>(lo);
    if (f == fl && lo - 1 >= 0 && static_cast<std::size_t>(lo - 1) < n)
      out[count++] = static_cast<std::size_t>(lo - 1);
    return std::pair{out, count};
  };
  const auto [ci, ni] = candidates(fi, grid.n_r);
  const auto [cj, nj] = candidates(fj, grid.n_z);
  for (std::size_t a = 0; a < ni; ++a)
    for (std::size_t b = 0; b < nj; ++b)
      if (std::binary_search(cells.begin(), cells.end(), grid.index(ci[a], cj[b]))) return true;
  return false;
}

SupportRegion SupportRegion::from_cells(const AxiGrid& grid, std::vector<std::size_t> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  SupportRegion region{grid, std::move(cells), {}};
  if (region.cells.empty()) return region;
  BoundingBox box{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  for (std::size_t c : region.cells) {
    if (c >= grid.size()) throw DomainError("support region: cell index outside grid");
    const double r = grid.r(c / grid.n_z);
    const double z = grid.z(c % grid.n_z);
    box.r_lo = std::min(box.r_lo, r);
    box.r_hi = std::max(box.r_hi, r);
    box.z_lo = std::min(box.z_lo, z);
    box.z_hi = std::max(box.z_hi, z);
  }
  region.box = box;
  return region;
}

double RingProfile::operator()(double r, double z) const {
  const double a = (r - r_c) / rho_r;
  const double b = (z - z_c) / rho_z;
  const double q = a * a + b * b;
  if (q >= 1.0) return 0.0;
  return amplitude * std::exp(-1.0 / (1.0 - q));
}

double RingProfile::odd(double r, double z) const { return z >= 0.0 ? (*this)(r, z) : -(*this)(r, -z); }

AxiScalarField make_vortex_ring_pair(std::array<double, 2> center, std::array<double, 2> radii,
                                     double amplitude, const AxiGrid& grid) {
  return make_vortex_ring_pair(RingProfile{center[0], center[1], radii[0], radii[1], amplitude}, grid);
}

AxiScalarField make_vortex_ring_pair(const RingProfile& p, const AxiGrid& grid) {
  if (!std::isfinite(p.amplitude) || p.amplitude > 0.0)
    throw ConfigError("ring pair: amplitude must be <= 0 (nonpositive vorticity in the upper half-plane)");
  if (!(p.rho_r > 0.0) || !(p.rho_z > 0.0)) throw ConfigError("ring pair: radii must be positive");
  if (!(p.r_c - p.rho_r > 0.0)) throw ConfigError("ring pair: support must stay off the axis (r_c - rho_r > 0)");
  if (!(p.z_c - p.rho_z > 0.0)) throw ConfigError("ring pair: support must stay off the plane (z_c - rho_z > 0)");
  if (!(p.r_c - p.rho_r > grid.r_min && p.r_c + p.rho_r < grid.r_max))
    throw ConfigError("ring pair: ellipse must lie strictly inside the grid in r");
  if (!(p.z_c - p.rho_z > grid.z_min && p.z_c + p.rho_z < grid.z_max))
    throw ConfigError("ring pair: ellipse must lie strictly inside the grid in z");
  AxiScalarField f(grid);
  for (std::size_t i = 0; i < grid.n_r; ++i)
    for (std::size_t j = 0; j < grid.n_z; ++j) f.at(i, j) = p(grid.r(i), grid.z(j));
  return f;
}

double functional_Q(const AxiScalarField& field) {
  const AxiGrid& g = field.grid;
  std::vector<double> terms(g.size());
  for (std::size_t i = 0; i < g.n_r; ++i) {
    const double r2 = g.r(i) * g.r(i);
    for (std::size_t j = 0; j < g.n_z; ++j) terms[g.index(i, j)] = r2 * field.at(i, j);
  }
  return -pairwise_sum(terms) * g.cell_area();
}

GeometryReport validate_geometry(const AxiScalarField& field) {
  const AxiGrid& g = field.grid;
  GeometryReport report;
  for (std::size_t i = 0; i < g.n_r; ++i) {
    for (std::size_t j = 0; j < g.n_z; ++j) {
      const double v = field.at(i, j);
      if (v > report.max_positive) {
        report.max_positive = v;
        report.max_positive_at = std::array<std::size_t, 2>{i, j};
      }
      if (i == 0 || j == 0 || i + 1 == g.n_r || j + 1 == g.n_z)
        report.boundary_max_abs = std::max(report.boundary_max_abs, std::abs(v));
    }
  }
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < g.size(); ++c)
    if (field.values[c] != 0.0) cells.push_back(c);
  if (!cells.empty()) report.support_box = SupportRegion::from_cells(g, std::move(cells)).box;
  return report;
}

SupportRegion support_region(const AxiScalarField& field, double threshold) {
  if (!(threshold >= 0.0)) throw DomainError("support_region: threshold must be >= 0");
  std::vector<std::size_t> cells;
  for (std::size_t c = 0; c < field.values.size(); ++c)
    if (std::abs(field.values[c]) > threshold) cells.push_back(c);
  if (cells.empty()) throw EmptyRegionError("support_region: no cell exceeds the threshold");
  return SupportRegion::from_cells(field.grid, std::move(cells));
}

namespace {

constexpr std::size_t kHeaderBytes = 48;

template <typename T>
void put_le(std::vector<unsigned char>& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits = 0;
  std::memcpy(&bits, &value, 8);
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>((bits >> (8 * b)) & 0xffu));
}

template <typename T>
T get_le(const unsigned char* in) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(in[b]) << (8 * b);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

}  // namespace

void write_snapshot(const std::filesystem::path& base, const AxiScalarField& field,
                    const nlohmann::json& metadata) {
  const AxiGrid& g = field.grid;
  std::vector<unsigned char> bytes;
  bytes.reserve(kHeaderBytes + 8 * field.values.size());
  put_le(bytes, g.r_min);
  put_le(bytes, g.r_max);
  put_le(bytes, g.z_min);
  put_le(bytes, g.z_max);
  put_le(bytes, static_cast<std::uint64_t>(g.n_r));
  put_le(bytes, static_cast<std::uint64_t>(g.n_z));
  for (double v : field.values) put_le(bytes, v);

  std::filesystem::path bin = base;
  bin += ".bin";
  std::ofstream out(bin, std::ios::binary);
  if (!out) throw Error("snapshot: cannot open " + bin.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));

  nlohmann::json side = metadata;
  side["format"] = "ivse-axi-field";
  side["version"] = 1;
  side["byte_order"] = "little";
  side["grid"] = {{"r_min", g.r_min}, {"r_max", g.r_max}, {"z_min", g.z_min},
                  {"z_max", g.z_max}, {"n_r", g.n_r},     {"n_z", g.n_z}};
  side["payload_bytes"] = 8 * field.values.size();
  side["layout"] = "row-major, z fastest";
  std::filesystem::path json_path = base;
  json_path += ".json";
  std::ofstream js(json_path);
  if (!js) throw Error("snapshot: cannot open " + json_path.string());
  js << side.dump(2) << '\n';
}

AxiScalarField read_snapshot(const std::filesystem::path& bin_path) {
  std::ifstream in(bin_path, std::ios::binary);
  if (!in) throw Error("snapshot: cannot open " + bin_path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes) throw DomainError("snapshot: truncated header");
  const unsigned char* p = bytes.data();
  const auto r_min = get_le<double>(p);
  const auto r_max = get_le<double>(p + 8);
  const auto z_min = get_le<double>(p + 16);
  const auto z_max = get_le<double>(p + 24);
  const auto n_r = get_le<std::uint64_t>(p + 32);
  const auto n_z = get_le<std::uint64_t>(p + 40);
  const AxiGrid grid = AxiGrid::make(r_min, r_max, z_min, z_max, n_r, n_z);
  if (bytes.size() - kHeaderBytes != 8 * grid.size())
    throw DomainError("snapshot: payload length " + std::to_string(bytes.size() - kHeaderBytes) +
                      " does not match grid (" + std::to_string(8 * grid.size()) + " expected)");
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = get_le<double>(p + kHeaderBytes + 8 * k);
  return AxiScalarField(grid, std::move(values));
}

}  // namespace ivse
