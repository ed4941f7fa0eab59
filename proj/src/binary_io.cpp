#include "har/binary_io.hpp"

#include "har/error.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <system_error>

#include <unistd.h>

namespace har {

namespace {

template <class U>
void put_le(std::string& buf, U v) {
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    buf.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
}

template <class U>
U get_le(std::string_view b) {
  U v = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) {
    v |= static_cast<U>(static_cast<unsigned char>(b[i])) << (8 * i);
  }
  return v;
}

}  // namespace

void BinaryWriter::u16(std::uint16_t v) { put_le(buf_, v); }
void BinaryWriter::u32(std::uint32_t v) { put_le(buf_, v); }
void BinaryWriter::u64(std::uint64_t v) { put_le(buf_, v); }
void BinaryWriter::f32(float v) { put_le(buf_, std::bit_cast<std::uint32_t>(v)); }
void BinaryWriter::f64(double v) { put_le(buf_, std::bit_cast<std::uint64_t>(v)); }

void BinaryWriter::f32s(std::span<const float> v) {
  buf_.reserve(buf_.size() + 4 * v.size());
  for (float x : v) f32(x);
}

void BinaryWriter::str(std::string_view s) {
  u32(static_cast<std::uint32_t>(s.size()));
  buf_.append(s);
}

std::string_view BinaryReader::take(std::size_t n) {
  if (n > data_.size() - pos_) {
    throw FormatError(source_ + ": truncated (needed " + std::to_string(n) + " bytes at offset " +
                      std::to_string(pos_) + ", " + std::to_string(data_.size() - pos_) +
                      " left)");
  }
  const auto out = data_.substr(pos_, n);
  pos_ += n;
  return out;
}

std::string_view BinaryReader::bytes(std::size_t n) { return take(n); }
std::uint8_t BinaryReader::u8() { return static_cast<std::uint8_t>(take(1)[0]); }
std::uint16_t BinaryReader::u16() { return get_le<std::uint16_t>(take(2)); }
std::uint32_t BinaryReader::u32() { return get_le<std::uint32_t>(take(4)); }
std::uint64_t BinaryReader::u64() { return get_le<std::uint64_t>(take(8)); }
float BinaryReader::f32() { return std::bit_cast<float>(u32()); }
double BinaryReader::f64() { return std::bit_cast<double>(u64()); }

void BinaryReader::f32s(std::span<float> out) {
  const auto raw = take(4 * out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = std::bit_cast<float>(get_le<std::uint32_t>(raw.substr(4 * i, 4)));
  }
}

std::string BinaryReader::str() {
  const auto n = u32();
  return std::string(take(n));
}

void BinaryReader::expect_magic(std::string_view magic) {
  if (remaining() < magic.size() || data_.substr(pos_, magic.size()) != magic) {
    throw FormatError(source_ + ": bad magic, expected '" + std::string(magic) + "'");
  }
  pos_ += magic.size();
}

std::size_t TensorRecord::element_count() const {
  std::size_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void write_tensor_record(BinaryWriter& w, const TensorRecord& record) {
  if (record.data.size() != record.element_count()) {
    throw ShapeError("tensor record '" + record.name + "': data size does not match dims");
  }
  w.str(record.name);
  w.u32(static_cast<std::uint32_t>(record.dims.size()));
  for (auto d : record.dims) w.u32(d);
  w.f32s(record.data);
}

TensorRecord read_tensor_record(BinaryReader& r) {
  TensorRecord rec;
  rec.name = r.str();
  const auto rank = r.u32();
  if (rank > 8) throw FormatError(r.source() + ": tensor '" + rec.name + "' has rank " + std::to_string(rank));
  rec.dims.resize(rank);
  std::uint64_t count = 1;
  for (auto& d : rec.dims) {
    d = r.u32();
    count *= d;
  }
  if (count * 4 > r.remaining()) {
    throw FormatError(r.source() + ": tensor '" + rec.name + "' extends past end of file");
  }
  rec.data.resize(static_cast<std::size_t>(count));
  r.f32s(rec.data);
  return rec;
}

void atomic_write_file(const std::filesystem::path& path, std::string_view bytes) {
  auto tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      std::filesystem::remove(tmp, ec);
      throw std::runtime_error("write failed for " + tmp.string());
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw std::runtime_error("cannot rename onto " + path.string());
  }
}

std::string read_binary_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace har
