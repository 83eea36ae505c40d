#include "ghostsim/array_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace ghostsim {
namespace {

constexpr char kArrayMagic[8] = {'G', 'H', 'S', 'T', 'A', 'R', 'R', '1'};
constexpr char kCheckpointMagic[8] = {'G', 'H', 'S', 'T', 'C', 'H', 'K', '1'};

// All integers on disk are little-endian; these narrow helpers keep the
// writer/reader honest on any host byte order.
void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u64(std::ostream& os, std::uint64_t v) {
  put_u32(os, static_cast<std::uint32_t>(v));
  put_u32(os, static_cast<std::uint32_t>(v >> 32));
}

std::uint32_t get_u32(std::istream& is, const std::string& path) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4))
    throw FormatError(path + ": truncated header");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& is, const std::string& path) {
  std::uint64_t lo = get_u32(is, path);
  std::uint64_t hi = get_u32(is, path);
  return lo | (hi << 32);
}

void put_f64(std::ostream& os, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(os, bits);
}

double get_f64(std::istream& is, const std::string& path) {
  std::uint64_t bits = get_u64(is, path);
  double v;
  std::memcpy(&v, &bits, 8);
  return v;
}

std::size_t total_count(const std::vector<std::uint32_t>& extents, const std::string& path) {
  if (extents.empty()) throw FormatError(path + ": zero-dimensional array");
  std::size_t total = 1;
  for (std::uint32_t e : extents) {
    if (e == 0) throw FormatError(path + ": zero extent");
    if (total > (std::size_t{1} << 32) / e) throw FormatError(path + ": extents overflow");
    total *= e;
  }
  return total;
}

void write_array_body(std::ostream& os, const std::vector<std::uint32_t>& extents,
                      std::uint8_t code, const double* flat, std::size_t doubles) {
  os.write(kArrayMagic, 8);
  put_u32(os, static_cast<std::uint32_t>(extents.size()));
  for (std::uint32_t e : extents) put_u32(os, e);
  os.put(static_cast<char>(code));
  for (std::size_t i = 0; i < doubles; ++i) put_f64(os, flat[i]);
}

AnyArray read_array_body(std::istream& is, const std::string& path) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kArrayMagic, 8) != 0)
    throw FormatError(path + ": bad array magic");
  std::uint32_t ndims = get_u32(is, path);
  if (ndims == 0 || ndims > 8) throw FormatError(path + ": unreasonable dimension count");
  AnyArray out;
  out.extents.resize(ndims);
  for (auto& e : out.extents) e = get_u32(is, path);
  std::size_t count = total_count(out.extents, path);
  int code = is.get();
  if (code != 0 && code != 1) throw FormatError(path + ": unknown element code");
  out.is_complex = (code == 1);
  out.values.resize(count);
  for (auto& v : out.values) {
    double re = get_f64(is, path);
    double im = out.is_complex ? get_f64(is, path) : 0.0;
    v = cplx(re, im);
  }
  return out;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError(path + ": cannot open for writing");
  return os;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError(path + ": cannot open");
  return is;
}

void finish_write(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw FormatError(path + ": write failed");
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_array(const std::string& path, const RealArray& a) {
  if (a.values.size() != total_count(a.extents, path))
    throw FormatError(path + ": value count does not match extents");
  auto os = open_out(path);
  write_array_body(os, a.extents, 0, a.values.data(), a.values.size());
  finish_write(os, path);
}

void write_array(const std::string& path, const ComplexArray& a) {
  if (a.values.size() != total_count(a.extents, path))
    throw FormatError(path + ": value count does not match extents");
  auto os = open_out(path);
  write_array_body(os, a.extents, 1, reinterpret_cast<const double*>(a.values.data()),
                   a.values.size() * 2);
  finish_write(os, path);
}

AnyArray read_array(const std::string& path) {
  auto is = open_in(path);
  AnyArray out = read_array_body(is, path);
  // Anything left over means the extents lied.
  is.peek();
  if (!is.eof()) throw FormatError(path + ": trailing bytes after payload");
  return out;
}

void write_pattern_csv(const std::string& path, const Pattern& p) {
  p.validate();
  std::ofstream os(path, std::ios::trunc);
  if (!os) throw FormatError(path + ": cannot open for writing");
  os << "# axis: " << axis_kind_name(p.kind) << "\n";
  if (p.dims == 1) {
    os << "# columns: axis,value\n";
    for (std::size_t i = 0; i < p.axis.size(); ++i)
      os << fmt17(p.axis[i]) << ',' << fmt17(p.values[i]) << "\n";
  } else {
    os << "# columns: axis_y,axis_x,value\n";
    int n = static_cast<int>(p.axis.size());
    for (int iy = 0; iy < n; ++iy)
      for (int ix = 0; ix < n; ++ix)
        os << fmt17(p.axis[iy]) << ',' << fmt17(p.axis[ix]) << ','
           << fmt17(p.values[static_cast<std::size_t>(iy) * n + ix]) << "\n";
  }
  os.flush();
  if (!os) throw FormatError(path + ": write failed");
}

Pattern read_pattern_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError(path + ": cannot open");
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& what) {
    throw FormatError(path + ":" + std::to_string(lineno) + ": " + what);
  };
  if (!std::getline(is, line)) { lineno = 1; fail("empty file"); }
  ++lineno;
  Pattern p;
  if (line.rfind("# axis: ", 0) != 0) fail("expected '# axis: <kind>' header");
  std::string kind = line.substr(8);
  if (kind == axis_kind_name(AxisKind::displacement)) p.kind = AxisKind::displacement;
  else if (kind == axis_kind_name(AxisKind::frequency)) p.kind = AxisKind::frequency;
  else fail("unknown axis kind '" + kind + "'");
  if (!std::getline(is, line)) { ++lineno; fail("missing columns header"); }
  ++lineno;
  int cols;
  if (line == "# columns: axis,value") cols = 2;
  else if (line == "# columns: axis_y,axis_x,value") cols = 3;
  else fail("unrecognized columns header");
  p.dims = (cols == 2) ? 1 : 2;
  std::vector<double> ys, xs;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream row(line);
    double v[3];
    char comma;
    for (int c = 0; c < cols; ++c) {
      if (c > 0 && (!(row >> comma) || comma != ',')) fail("expected comma");
      if (!(row >> v[c])) fail("bad number");
    }
    std::string rest;
    if (row >> rest) fail("trailing fields");
    if (cols == 2) {
      p.axis.push_back(v[0]);
      p.values.push_back(v[1]);
    } else {
      ys.push_back(v[0]);
      xs.push_back(v[1]);
      p.values.push_back(v[2]);
    }
  }
  if (p.dims == 2) {
    // Rows were written in raster order (y outer, x inner) over one shared
    // axis; recover the axis from the first scanline and check the raster.
    std::size_t total = p.values.size();
    std::size_t n = 0;
    while (n < total && ys[n] == ys[0]) ++n;
    if (n == 0 || total != n * n)
      throw FormatError(path + ": 2D pattern is not a complete square raster");
    p.axis.assign(xs.begin(), xs.begin() + static_cast<std::ptrdiff_t>(n));
    for (std::size_t i = 0; i < total; ++i)
      if (xs[i] != p.axis[i % n] || ys[i] != p.axis[i / n])
        throw FormatError(path + ": 2D raster rows do not share one square axis");
  }
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return p;
}

void write_pattern_array(const std::string& path, const Pattern& p) {
  p.validate();
  RealArray a;
  std::uint32_t n = static_cast<std::uint32_t>(p.axis.size());
  if (p.dims == 1) {
    a.extents = {2, n};
    a.values = p.axis;
    a.values.insert(a.values.end(), p.values.begin(), p.values.end());
  } else {
    a.extents = {n + 1, n};
    a.values = p.axis;
    a.values.insert(a.values.end(), p.values.begin(), p.values.end());
  }
  write_array(path, a);
}

Pattern read_pattern_array(const std::string& path) {
  AnyArray a = read_array(path);
  if (a.is_complex || a.extents.size() != 2)
    throw FormatError(path + ": not a pattern array");
  std::uint32_t rows = a.extents[0], n = a.extents[1];
  Pattern p;
  if (rows == 2) p.dims = 1;
  else if (rows == n + 1) p.dims = 2;
  else throw FormatError(path + ": pattern array has unexpected shape");
  p.axis.resize(n);
  for (std::uint32_t i = 0; i < n; ++i) p.axis[i] = a.values[i].real();
  std::size_t count = (p.dims == 1) ? n : std::size_t{n} * n;
  p.values.resize(count);
  for (std::size_t i = 0; i < count; ++i) p.values[i] = a.values[n + i].real();
  // The container does not record the axis kind; desk-scale displacement axes
  // stay far below a meter while spatial-frequency axes run to thousands of
  // cycles per meter, so the magnitude decides.
  double amax = std::max(std::abs(p.axis.front()), std::abs(p.axis.back()));
  p.kind = (amax < 1.0) ? AxisKind::displacement : AxisKind::frequency;
  try {
    p.validate();
  } catch (const std::exception& e) {
    throw FormatError(path + ": " + e.what());
  }
  return p;
}

void write_pgm16(const std::string& path, int rows, int cols, const std::vector<double>& v) {
  if (v.size() != static_cast<std::size_t>(rows) * cols)
    throw FormatError(path + ": value count does not match image shape");
  double lo = v[0], hi = v[0];
  for (double x : v) {
    lo = std::min(lo, x);
    hi = std::max(hi, x);
  }
  double scale = (hi > lo) ? 65535.0 / (hi - lo) : 0.0;
  auto os = open_out(path);
  os << "P5\n" << cols << ' ' << rows << "\n65535\n";
  for (double x : v) {
    unsigned value = static_cast<unsigned>((x - lo) * scale + 0.5);
    os.put(static_cast<char>(value >> 8));
    os.put(static_cast<char>(value & 0xff));
  }
  finish_write(os, path);
}

void write_checkpoint(const std::string& path, const Checkpoint& c) {
  if (c.record_order.size() != c.real_records.size() + c.complex_records.size())
    throw FormatError(path + ": record order does not cover all records");
  std::string tmp = path + ".tmp";
  {
    auto os = open_out(tmp);
    os.write(kCheckpointMagic, 8);
    put_u64(os, c.realizations_done);
    put_u64(os, c.config_hash);
    put_u32(os, static_cast<std::uint32_t>(c.record_order.size()));
    std::size_t ri = 0, ci = 0;
    for (int tag : c.record_order) {
      if (tag == 0) {
        const RealArray& a = c.real_records[ri++];
        write_array_body(os, a.extents, 0, a.values.data(), a.values.size());
      } else {
        const ComplexArray& a = c.complex_records[ci++];
        write_array_body(os, a.extents, 1, reinterpret_cast<const double*>(a.values.data()),
                         a.values.size() * 2);
      }
    }
    finish_write(os, tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0)
    throw FormatError(path + ": rename from temporary failed");
}

Checkpoint read_checkpoint(const std::string& path) {
  auto is = open_in(path);
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kCheckpointMagic, 8) != 0)
    throw FormatError(path + ": bad checkpoint magic");
  Checkpoint c;
  c.realizations_done = get_u64(is, path);
  c.config_hash = get_u64(is, path);
  std::uint32_t count = get_u32(is, path);
  if (count > 64) throw FormatError(path + ": unreasonable record count");
  for (std::uint32_t i = 0; i < count; ++i) {
    AnyArray a = read_array_body(is, path);
    if (a.is_complex) {
      ComplexArray ca;
      ca.extents = a.extents;
      ca.values = std::move(a.values);
      c.complex_records.push_back(std::move(ca));
      c.record_order.push_back(1);
    } else {
      RealArray ra;
      ra.extents = a.extents;
      ra.values.reserve(a.values.size());
      for (const cplx& z : a.values) ra.values.push_back(z.real());
      c.real_records.push_back(std::move(ra));
      c.record_order.push_back(0);
    }
  }
  is.peek();
  if (!is.eof()) throw FormatError(path + ": trailing bytes after records");
  return c;
}

std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 0x100000001b3ull;
  }
  return h;
}

}  // namespace ghostsim
