#pragma once

#include <cstdint>
#include <istream>
#include <ostream>
#include <string>

namespace tmppi {

/// Little-endian writer for the dataset and model containers.
class BinaryWriter {
 public:
  explicit BinaryWriter(std::ostream& out) : out_(out) {}

  void bytes(const void* data, std::size_t n);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
  void f64(double v);
  /// u32 length followed by the raw characters.
  void str(const std::string& s);

 private:
  std::ostream& out_;
};

/// Reader counterpart; throws FormatError on truncated input.
class BinaryReader {
 public:
  explicit BinaryReader(std::istream& in) : in_(in) {}

  void bytes(void* data, std::size_t n);
  std::uint32_t u32();
  std::uint64_t u64();
  std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
  double f64();
  /// Rejects strings longer than max_len.
  std::string str(std::size_t max_len = 4096);
  /// True once the stream has no further bytes.
  bool at_end();

 private:
  std::istream& in_;
};

}  // namespace tmppi
