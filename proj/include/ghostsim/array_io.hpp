#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "ghostsim/optics_core.hpp"

namespace ghostsim {

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Binary array container. Layout, all little-endian:
//   8 bytes magic "GHSTARR1"
//   u32 ndims, then ndims x u32 extents (row-major, slowest first)
//   u8 element code: 0 = float64, 1 = complex128 (re, im pairs)
//   payload
struct RealArray {
  std::vector<std::uint32_t> extents;
  std::vector<double> values;
};
struct ComplexArray {
  std::vector<std::uint32_t> extents;
  std::vector<cplx> values;
};

void write_array(const std::string& path, const RealArray& a);
void write_array(const std::string& path, const ComplexArray& a);

// Reads either element type; real files come back with zero imaginary parts
// and is_complex = false.
struct AnyArray {
  std::vector<std::uint32_t> extents;
  std::vector<cplx> values;
  bool is_complex = false;
};
AnyArray read_array(const std::string& path);

// Pattern CSV: two comment lines ("# axis: <kind>", "# columns: axis,value"),
// then "axis,value" rows printed with %.17g (lossless round-trip).
// 2D patterns store one row per sample as "y,x,value" with a matching header.
void write_pattern_csv(const std::string& path, const Pattern& p);
Pattern read_pattern_csv(const std::string& path);

// Pattern in the binary container: 1D files are a 2 x n real array (row 0 the
// axis, row 1 the values); 2D files are (n+1) x n with the axis in row 0.
void write_pattern_array(const std::string& path, const Pattern& p);
Pattern read_pattern_array(const std::string& path);

// 16-bit big-endian binary PGM, values mapped min..max onto 0..65535.
void write_pgm16(const std::string& path, int rows, int cols, const std::vector<double>& v);

// Checkpoint container: "GHSTCHK1", u64 realizations_done, u64 config_hash,
// u32 record count, then embedded array records (same layout as write_array,
// magic included) in a fixed order chosen by the writer.
struct Checkpoint {
  std::uint64_t realizations_done = 0;
  std::uint64_t config_hash = 0;
  std::vector<RealArray> real_records;
  std::vector<ComplexArray> complex_records;
  std::vector<int> record_order;  // 0 = next real record, 1 = next complex record
};
// write_checkpoint stages to path + ".tmp" and renames, so a crash mid-write
// never corrupts an existing checkpoint.
void write_checkpoint(const std::string& path, const Checkpoint& c);
Checkpoint read_checkpoint(const std::string& path);

// FNV-1a over a byte string; used to tie checkpoints to the producing config.
std::uint64_t fnv1a(const std::string& bytes);

}  // namespace ghostsim
