#include "daelab/binary_io.hpp"

#include <bit>
#include <fstream>
#include <iterator>

#include "daelab/errors.hpp"

namespace daelab {

template <class U>
void ByteWriter::put(U v) {
    for (std::size_t i = 0; i < sizeof(U); ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void ByteWriter::bytes(std::string_view raw) { buf_.insert(buf_.end(), raw.begin(), raw.end()); }
void ByteWriter::u16(std::uint16_t v) { put(v); }
void ByteWriter::u32(std::uint32_t v) { put(v); }
void ByteWriter::u64(std::uint64_t v) { put(v); }
void ByteWriter::f32(float v) { put(std::bit_cast<std::uint32_t>(v)); }
void ByteWriter::f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }

template <class U>
U ByteReader::take(const char* what) {
    if (remaining() < sizeof(U)) {
        throw FormatError(std::string("truncated input while reading ") + what, pos_);
    }
    U v = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) v |= static_cast<U>(static_cast<U>(data_[pos_ + i]) << (8 * i));
    pos_ += sizeof(U);
    return v;
}

std::string ByteReader::bytes(std::size_t n, const char* what) {
    if (remaining() < n) throw FormatError(std::string("truncated input while reading ") + what, pos_);
    std::string out(reinterpret_cast<const char*>(data_.data() + pos_), n);
    pos_ += n;
    return out;
}

std::uint16_t ByteReader::u16(const char* what) { return take<std::uint16_t>(what); }
std::uint32_t ByteReader::u32(const char* what) { return take<std::uint32_t>(what); }
std::uint64_t ByteReader::u64(const char* what) { return take<std::uint64_t>(what); }
float ByteReader::f32(const char* what) { return std::bit_cast<float>(take<std::uint32_t>(what)); }
double ByteReader::f64(const char* what) { return std::bit_cast<double>(take<std::uint64_t>(what)); }

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return std::vector<std::uint8_t>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> data) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
        if (!out) throw IoError("short write to " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string() + ": " + ec.message());
}

void write_text_atomic(const std::filesystem::path& path, std::string_view text) {
    write_file_atomic(path, std::span(reinterpret_cast<const std::uint8_t*>(text.data()), text.size()));
}

std::uint64_t fnv1a64(std::span<const std::uint8_t> data) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (auto b : data) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace daelab
