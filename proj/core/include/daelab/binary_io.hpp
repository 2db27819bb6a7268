#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace daelab {

// Little-endian encoder used by the checkpoint and dataset formats.
class ByteWriter {
public:
    void bytes(std::string_view raw);
    void u16(std::uint16_t v);
    void u32(std::uint32_t v);
    void u64(std::uint64_t v);
    void f32(float v);
    void f64(double v);

    const std::vector<std::uint8_t>& buffer() const noexcept { return buf_; }

private:
    template <class U>
    void put(U v);
    std::vector<std::uint8_t> buf_;
};

// Bounds-checked little-endian decoder. Reads past the end throw FormatError
// carrying the offset of the failed read.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    std::string bytes(std::size_t n, const char* what);
    std::uint16_t u16(const char* what);
    std::uint32_t u32(const char* what);
    std::uint64_t u64(const char* what);
    float f32(const char* what);
    double f64(const char* what);

    std::uint64_t offset() const noexcept { return pos_; }
    std::size_t remaining() const noexcept { return data_.size() - pos_; }

private:
    template <class U>
    U take(const char* what);
    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);

// Writes to a sibling temporary and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data);
void write_text_atomic(const std::filesystem::path& path, std::string_view text);

// 64-bit FNV-1a, used for dataset checksums in run manifests.
std::uint64_t fnv1a64(std::span<const std::uint8_t> data);

}  // namespace daelab
