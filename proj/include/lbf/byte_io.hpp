#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

#include "lbf/error.hpp"

namespace lbf {

static_assert(std::endian::native == std::endian::little,
              "byte encodings assume a little-endian host");

// Appends fixed-width little-endian fields to a byte buffer.
class ByteWriter {
public:
    template <typename T>
        requires std::is_arithmetic_v<T>
    void put(T value) {
        unsigned char raw[sizeof(T)];
        std::memcpy(raw, &value, sizeof(T));
        bytes_.insert(bytes_.end(), raw, raw + sizeof(T));
    }

    void put_bytes(std::span<const std::uint8_t> data) {
        bytes_.insert(bytes_.end(), data.begin(), data.end());
    }

    void put_tag(std::string_view tag) {
        bytes_.insert(bytes_.end(), tag.begin(), tag.end());
    }

    // Length-prefixed (u64) nested block.
    void put_block(std::span<const std::uint8_t> data) {
        put<std::uint64_t>(data.size());
        put_bytes(data);
    }

    std::size_t size() const { return bytes_.size(); }
    const std::vector<std::uint8_t>& bytes() const& { return bytes_; }
    std::vector<std::uint8_t> take() && { return std::move(bytes_); }

private:
    std::vector<std::uint8_t> bytes_;
};

class ByteReader {
public:
    explicit ByteReader(std::span<const std::uint8_t> data) : data_(data) {}

    template <typename T>
        requires std::is_arithmetic_v<T>
    T get() {
        require(sizeof(T));
        T value;
        std::memcpy(&value, data_.data() + pos_, sizeof(T));
        pos_ += sizeof(T);
        return value;
    }

    std::span<const std::uint8_t> get_bytes(std::size_t n) {
        require(n);
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    void expect_tag(std::string_view tag) {
        auto raw = get_bytes(tag.size());
        if (std::memcmp(raw.data(), tag.data(), tag.size()) != 0) {
            throw ParseError("bad magic: expected \"" + std::string(tag) + "\"");
        }
    }

    std::span<const std::uint8_t> get_block() {
        auto n = get<std::uint64_t>();
        return get_bytes(static_cast<std::size_t>(n));
    }

    bool at_end() const { return pos_ == data_.size(); }
    std::size_t remaining() const { return data_.size() - pos_; }

private:
    void require(std::size_t n) const {
        if (data_.size() - pos_ < n) throw ParseError("truncated input");
    }

    std::span<const std::uint8_t> data_;
    std::size_t pos_ = 0;
};

std::vector<std::uint8_t> read_file_bytes(const std::string& path);
void write_file_bytes(const std::string& path, std::span<const std::uint8_t> bytes);

}  // namespace lbf
