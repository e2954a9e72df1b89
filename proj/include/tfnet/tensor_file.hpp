#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <vector>

namespace tfnet {

/// Float tensor container: magic "TFT1", u32 rank, u32 dims[rank], then little-endian float32
/// payload blocks in row-major order. Offsets are absolute byte positions in the file.
class TensorFileWriter {
public:
    TensorFileWriter(const std::filesystem::path& path, std::span<const std::uint32_t> dims);

    /// Appends a block and returns its byte offset.
    std::uint64_t write_block(std::span<const float> values);
    void close();

    static std::uint64_t header_size(std::size_t rank) { return 8 + 4 * static_cast<std::uint64_t>(rank); }

private:
    std::filesystem::path path_;
    std::ofstream out_;
    std::uint64_t position_ = 0;
};

struct TensorFileHeader {
    std::vector<std::uint32_t> dims;
};

TensorFileHeader read_tensor_header(const std::filesystem::path& path);

/// Reads `count` floats starting at byte `offset`.
std::vector<float> read_tensor_block(const std::filesystem::path& path, std::uint64_t offset, std::size_t count);

void write_u32_le(std::ostream& out, std::uint32_t value);
std::uint32_t read_u32_le(std::istream& in);
void write_f32_le(std::ostream& out, std::span<const float> values);
void read_f32_le(std::istream& in, std::span<float> values);

}  // namespace tfnet
