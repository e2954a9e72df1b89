#include "tfnet/tensor_file.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <stdexcept>

namespace tfnet {

namespace {

constexpr std::array<char, 4> kMagic = {'T', 'F', 'T', '1'};

std::runtime_error io_error(const std::filesystem::path& path, const char* what) {
    return std::runtime_error(std::string(what) + ": " + path.string());
}

}  // namespace

void write_u32_le(std::ostream& out, std::uint32_t value) {
    const std::array<char, 4> bytes = {static_cast<char>(value & 0xFF), static_cast<char>((value >> 8) & 0xFF),
                                       static_cast<char>((value >> 16) & 0xFF),
                                       static_cast<char>((value >> 24) & 0xFF)};
    out.write(bytes.data(), bytes.size());
}

std::uint32_t read_u32_le(std::istream& in) {
    std::array<unsigned char, 4> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    return static_cast<std::uint32_t>(bytes[0]) | (static_cast<std::uint32_t>(bytes[1]) << 8) |
           (static_cast<std::uint32_t>(bytes[2]) << 16) | (static_cast<std::uint32_t>(bytes[3]) << 24);
}

void write_f32_le(std::ostream& out, std::span<const float> values) {
    if constexpr (std::endian::native == std::endian::little) {
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(float)));
    } else {
        for (float v : values) write_u32_le(out, std::bit_cast<std::uint32_t>(v));
    }
}

void read_f32_le(std::istream& in, std::span<float> values) {
    if constexpr (std::endian::native == std::endian::little) {
        in.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(values.size() * sizeof(float)));
    } else {
        for (float& v : values) v = std::bit_cast<float>(read_u32_le(in));
    }
}

TensorFileWriter::TensorFileWriter(const std::filesystem::path& path, std::span<const std::uint32_t> dims)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw io_error(path, "cannot open tensor file for writing");
    out_.write(kMagic.data(), kMagic.size());
    write_u32_le(out_, static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) write_u32_le(out_, d);
    position_ = header_size(dims.size());
    if (!out_) throw io_error(path, "failed writing tensor header");
}

std::uint64_t TensorFileWriter::write_block(std::span<const float> values) {
    const std::uint64_t offset = position_;
    write_f32_le(out_, values);
    if (!out_) throw io_error(path_, "failed writing tensor block");
    position_ += values.size() * sizeof(float);
    return offset;
}

void TensorFileWriter::close() {
    out_.close();
    if (!out_) throw io_error(path_, "failed closing tensor file");
}

TensorFileHeader read_tensor_header(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path, "cannot open tensor file");
    std::array<char, 4> magic{};
    in.read(magic.data(), magic.size());
    if (!in || magic != kMagic) throw io_error(path, "not a TFT1 tensor file");
    TensorFileHeader header;
    const std::uint32_t rank = read_u32_le(in);
    if (rank > 16) throw io_error(path, "implausible tensor rank");
    for (std::uint32_t i = 0; i < rank; ++i) header.dims.push_back(read_u32_le(in));
    if (!in) throw io_error(path, "truncated tensor header");
    return header;
}

std::vector<float> read_tensor_block(const std::filesystem::path& path, std::uint64_t offset, std::size_t count) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error(path, "cannot open tensor file");
    in.seekg(static_cast<std::streamoff>(offset));
    std::vector<float> values(count);
    read_f32_le(in, values);
    if (!in) throw io_error(path, "truncated tensor block");
    return values;
}

}  // namespace tfnet
