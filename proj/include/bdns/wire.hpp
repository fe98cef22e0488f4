#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bdns::wire {

// Shared framing for every binary object this project serializes:
// 4-byte magic "BDNS", 1-byte format version, 1-byte object tag, then
// object-specific sections. Multi-byte integers are little-endian.
inline constexpr std::array<uint8_t, 4> kMagic{'B', 'D', 'N', 'S'};
inline constexpr uint8_t kVersion = 1;

enum class ObjectTag : uint8_t {
    public_key = 1,
    pir_query = 2,
    pir_response = 3,
    cache_snapshot = 4,
    populate_msg = 5,
    miss_proof = 6,
    query_key = 7,
    transcript_sig = 8,
};

class WireError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class Writer {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u16(uint16_t v) { append_le(v); }
    void u32(uint32_t v) { append_le(v); }
    void u64(uint64_t v) { append_le(v); }
    void f64(double v) {
        uint64_t bits;
        std::memcpy(&bits, &v, 8);
        u64(bits);
    }
    void bytes(std::span<const uint8_t> v) { buf_.insert(buf_.end(), v.begin(), v.end()); }
    // length-prefixed section
    void blob(std::span<const uint8_t> v) {
        u32(static_cast<uint32_t>(v.size()));
        bytes(v);
    }
    void str(std::string_view v) {
        blob({reinterpret_cast<const uint8_t*>(v.data()), v.size()});
    }
    void header(ObjectTag tag) {
        bytes(kMagic);
        u8(kVersion);
        u8(static_cast<uint8_t>(tag));
    }

    const std::vector<uint8_t>& data() const { return buf_; }
    std::vector<uint8_t> take() { return std::move(buf_); }

private:
    template <typename T>
    void append_le(T v) {
        for (size_t i = 0; i < sizeof(T); ++i)
            buf_.push_back(static_cast<uint8_t>(v >> (8 * i)));
    }

    std::vector<uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::span<const uint8_t> data) : data_(data) {}

    uint8_t u8() { return take(1)[0]; }
    uint16_t u16() { return read_le<uint16_t>(); }
    uint32_t u32() { return read_le<uint32_t>(); }
    uint64_t u64() { return read_le<uint64_t>(); }
    double f64() {
        uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, 8);
        return v;
    }
    std::span<const uint8_t> bytes(size_t n) { return take(n); }
    std::span<const uint8_t> blob() {
        uint32_t n = u32();
        return take(n);
    }
    std::string str() {
        auto b = blob();
        return std::string(reinterpret_cast<const char*>(b.data()), b.size());
    }
    void header(ObjectTag expected) {
        auto m = take(4);
        if (!std::equal(m.begin(), m.end(), kMagic.begin()))
            throw WireError("bad magic");
        uint8_t ver = u8();
        if (ver != kVersion) throw WireError("unsupported version " + std::to_string(ver));
        uint8_t tag = u8();
        if (tag != static_cast<uint8_t>(expected)) throw WireError("unexpected object tag");
    }

    bool done() const { return pos_ == data_.size(); }
    size_t remaining() const { return data_.size() - pos_; }

private:
    template <typename T>
    T read_le() {
        auto b = take(sizeof(T));
        T v = 0;
        for (size_t i = 0; i < sizeof(T); ++i)
            v |= static_cast<T>(b[i]) << (8 * i);
        return v;
    }

    std::span<const uint8_t> take(size_t n) {
        if (data_.size() - pos_ < n) throw WireError("truncated input");
        auto out = data_.subspan(pos_, n);
        pos_ += n;
        return out;
    }

    std::span<const uint8_t> data_;
    size_t pos_ = 0;
};

}  // namespace bdns::wire
