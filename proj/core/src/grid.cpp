#include "scatter/grid.hpp"

#include <cstdio>
#include <cstring>
#include <memory>

namespace scatter {

Grid1D Grid1D::half_line(double r_max, int n) {
  if (!(r_max > 0.0) || n < 4)
    fail(ErrorCode::GridTooSmall, "half_line needs r_max > 0 and n >= 4");
  Grid1D g;
  g.kind = DomainKind::HalfLineDirichlet;
  g.r_min = 0.0;
  g.r_max = r_max;
  g.n = n;
  g.h = r_max / (n + 1);
  return g;
}

Grid1D Grid1D::full_line(double r_half, int n) {
  if (!(r_half > 0.0) || n < 4 || n % 2 != 0)
    fail(ErrorCode::GridTooSmall, "full_line needs r_half > 0 and even n >= 4");
  Grid1D g;
  g.kind = DomainKind::FullLinePeriodic;
  g.r_min = -r_half;
  g.r_max = r_half;
  g.n = n;
  g.h = 2.0 * r_half / n;
  return g;
}

WaveField& WaveField::operator+=(const WaveField& o) {
  if (!grid.same_as(o.grid) || modes != o.modes)
    fail(ErrorCode::DimensionMismatch, "wave field shape mismatch");
  values += o.values;
  return *this;
}

WaveField& WaveField::operator-=(const WaveField& o) {
  if (!grid.same_as(o.grid) || modes != o.modes)
    fail(ErrorCode::DimensionMismatch, "wave field shape mismatch");
  values -= o.values;
  return *this;
}

WaveField& WaveField::operator*=(cplx s) {
  values *= s;
  return *this;
}

cplx inner(const WaveField& a, const WaveField& b) {
  if (!a.grid.same_as(b.grid) || a.modes != b.modes)
    fail(ErrorCode::DimensionMismatch, "wave field shape mismatch");
  return a.grid.h * (a.values.conjugate().cwiseProduct(b.values)).sum();
}

WaveField operator+(WaveField a, const WaveField& b) { return a += b; }
WaveField operator-(WaveField a, const WaveField& b) { return a -= b; }
WaveField operator*(cplx s, WaveField a) { return a *= s; }

namespace {
constexpr char kMagic[8] = {'S', 'C', 'W', 'F', '0', '0', '0', '1'};
constexpr uint32_t kVersion = 1;

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

template <typename T>
void write_pod(std::FILE* f, const T& v) {
  if (std::fwrite(&v, sizeof(T), 1, f) != 1)
    fail(ErrorCode::IoError, "short write");
}

template <typename T>
T read_pod(std::FILE* f) {
  T v;
  if (std::fread(&v, sizeof(T), 1, f) != 1) fail(ErrorCode::IoError, "short read");
  return v;
}
}  // namespace

void save_field(const WaveField& u, const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  std::fwrite(kMagic, 1, 8, f.get());
  write_pod(f.get(), kVersion);
  write_pod(f.get(), static_cast<uint8_t>(u.grid.kind));
  const uint8_t pad[3] = {0, 0, 0};
  std::fwrite(pad, 1, 3, f.get());
  write_pod(f.get(), static_cast<uint64_t>(u.grid.n));
  write_pod(f.get(), static_cast<uint64_t>(u.modes));
  write_pod(f.get(), u.grid.r_min);
  write_pod(f.get(), u.grid.r_max);
  // row-major: all modes of r_0, then r_1, ...
  for (int i = 0; i < u.grid.n; ++i)
    for (int j = 0; j < u.modes; ++j) write_pod(f.get(), u.values(i, j));
}

WaveField load_field(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
  if (!f) fail(ErrorCode::IoError, "cannot open " + path);
  char magic[8];
  if (std::fread(magic, 1, 8, f.get()) != 8 || std::memcmp(magic, kMagic, 8) != 0)
    fail(ErrorCode::IoError, "bad magic in " + path);
  if (read_pod<uint32_t>(f.get()) != kVersion)
    fail(ErrorCode::IoError, "unsupported version in " + path);
  const auto kind = static_cast<DomainKind>(read_pod<uint8_t>(f.get()));
  uint8_t pad[3];
  if (std::fread(pad, 1, 3, f.get()) != 3) fail(ErrorCode::IoError, "short read");
  const auto n = static_cast<int>(read_pod<uint64_t>(f.get()));
  const auto modes = static_cast<int>(read_pod<uint64_t>(f.get()));
  const double r_min = read_pod<double>(f.get());
  const double r_max = read_pod<double>(f.get());

  Grid1D g = kind == DomainKind::HalfLineDirichlet
                 ? Grid1D::half_line(r_max, n)
                 : Grid1D::full_line(r_max, n);
  if (g.r_min != r_min) fail(ErrorCode::IoError, "inconsistent grid bounds");
  WaveField u(g, modes);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < modes; ++j) u.values(i, j) = read_pod<cplx>(f.get());
  return u;
}

}  // namespace scatter
