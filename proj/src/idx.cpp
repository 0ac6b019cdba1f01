#include "icla/idx.hpp"

#include <fstream>
#include <iterator>
#include <string>

#include "icla/errors.hpp"

namespace icla::data {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    if (offset + 4 > bytes.size()) {
        throw ParseError("idx: truncated header", offset);
    }
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

}  // namespace

IdxFile parse_idx(std::span<const std::uint8_t> bytes) {
    IdxFile f;
    f.magic = read_be32(bytes, 0);
    if (f.magic != kIdxImageMagic && f.magic != kIdxLabelMagic) {
        throw ParseError("idx: bad magic " + std::to_string(f.magic), 0);
    }
    const std::size_t ndims = f.magic == kIdxImageMagic ? 3 : 1;
    std::size_t offset = 4;
    std::size_t expected = 1;
    for (std::size_t i = 0; i < ndims; ++i, offset += 4) {
        f.dims.push_back(read_be32(bytes, offset));
        expected *= f.dims.back();
    }
    if (bytes.size() - offset < expected) {
        throw ParseError("idx: truncated payload, expected " + std::to_string(expected) +
                             " bytes, found " + std::to_string(bytes.size() - offset),
                         bytes.size());
    }
    if (bytes.size() - offset > expected) {
        throw ParseError("idx: trailing bytes after payload", offset + expected);
    }
    f.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(offset), bytes.end());
    return f;
}

IdxFile load_idx(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("idx: cannot open " + path.string());
    const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in),
                                          std::istreambuf_iterator<char>()};
    try {
        return parse_idx(bytes);
    } catch (const ParseError& e) {
        throw ParseError(path.string() + ": " + e.what(), e.offset());
    }
}

nn::Matrix idx_images(const IdxFile& file) {
    if (file.magic != kIdxImageMagic) throw ParseError("idx: not an image file", 0);
    const std::size_t n = file.dims.at(0);
    const std::size_t d = std::size_t{file.dims.at(1)} * file.dims.at(2);
    nn::Matrix x(n, d);
    auto v = x.values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = file.payload[i] / 255.0;
    return x;
}

std::vector<int> idx_labels(const IdxFile& file) {
    if (file.magic != kIdxLabelMagic) throw ParseError("idx: not a label file", 0);
    return {file.payload.begin(), file.payload.end()};
}

std::vector<std::uint8_t> encode_idx(const IdxFile& file) {
    std::vector<std::uint8_t> out;
    write_be32(out, file.magic);
    for (std::uint32_t d : file.dims) write_be32(out, d);
    out.insert(out.end(), file.payload.begin(), file.payload.end());
    return out;
}

}  // namespace icla::data
