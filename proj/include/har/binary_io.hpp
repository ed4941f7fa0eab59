#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace har {

/// Appends little-endian scalars to a byte buffer.
class BinaryWriter {
 public:
  void bytes(std::string_view b) { buf_.append(b); }
  void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
  void u16(std::uint16_t v);
  void u32(std::uint32_t v);
  void u64(std::uint64_t v);
  void f32(float v);
  void f64(double v);
  void f32s(std::span<const float> v);
  /// u32 length followed by the raw bytes.
  void str(std::string_view s);

  const std::string& buffer() const { return buf_; }
  std::string take() { return std::move(buf_); }

 private:
  std::string buf_;
};

/// Bounds-checked little-endian reader; throws FormatError on truncation.
class BinaryReader {
 public:
  BinaryReader(std::string_view data, std::string source)
      : data_(data), source_(std::move(source)) {}

  std::string_view bytes(std::size_t n);
  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  float f32();
  double f64();
  void f32s(std::span<float> out);
  std::string str();

  /// Throws FormatError unless the next bytes equal `magic`.
  void expect_magic(std::string_view magic);
  bool at_end() const { return pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }
  const std::string& source() const { return source_; }

 private:
  std::string_view take(std::size_t n);

  std::string_view data_;
  std::size_t pos_ = 0;
  std::string source_;
};

/// Named float tensor as stored in checkpoint and stats files:
/// u32 name length, name bytes, u32 rank, rank x u32 dims, row-major f32 data.
struct TensorRecord {
  std::string name;
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::size_t element_count() const;
};

void write_tensor_record(BinaryWriter& w, const TensorRecord& record);
TensorRecord read_tensor_record(BinaryReader& r);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// never observe a partially written file.
void atomic_write_file(const std::filesystem::path& path, std::string_view bytes);

/// Reads a whole file; throws FormatError when it cannot be opened.
std::string read_binary_file(const std::filesystem::path& path);

}  // namespace har
