#include "hdrtv/weights.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <zlib.h>

namespace hdrtv {

namespace {

constexpr char kMagic[4] = {'H', 'D', 'C', 'W'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kAlign = 64;

void put_u16(std::vector<std::uint8_t>& b, std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& b, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& b, std::uint64_t v) {
    for (int i = 0; i < 8; ++i)
        b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t size) : data_(data), size_(size) {}

    std::uint8_t u8() { return *take(1); }
    std::uint16_t u16() {
        const std::uint8_t* p = take(2);
        return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
    }
    std::uint32_t u32() {
        const std::uint8_t* p = take(4);
        return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
               (static_cast<std::uint32_t>(p[2]) << 16) |
               (static_cast<std::uint32_t>(p[3]) << 24);
    }
    std::uint64_t u64() {
        std::uint64_t lo = u32();
        std::uint64_t hi = u32();
        return lo | (hi << 32);
    }
    std::string str(std::size_t n) {
        const std::uint8_t* p = take(n);
        return std::string(reinterpret_cast<const char*>(p), n);
    }

private:
    const std::uint8_t* take(std::size_t n) {
        if (pos_ + n > size_)
            throw CorruptWeights("weights container: truncated header");
        const std::uint8_t* p = data_ + pos_;
        pos_ += n;
        return p;
    }
    const std::uint8_t* data_;
    std::size_t size_;
    std::size_t pos_ = 0;
};

std::uint32_t checksum(const std::uint8_t* data, std::size_t size) {
    ::uLong crc = ::crc32(0L, Z_NULL, 0);
    // crc32 takes uInt chunks; feed in pieces in case of very large stores.
    while (size > 0) {
        const std::size_t chunk = size > (1u << 30) ? (1u << 30) : size;
        crc = ::crc32(crc, data, static_cast<uInt>(chunk));
        data += chunk;
        size -= chunk;
    }
    return static_cast<std::uint32_t>(crc);
}

} // namespace

void ModelWeights::put(std::string name, WeightTensor tensor) {
    if (tensor.data.size() != tensor.count())
        throw ShapeError("weight tensor '" + name + "': data size does not match dims");
    auto it = tensors_.find(name);
    if (it == tensors_.end()) {
        order_.push_back(name);
        tensors_.emplace(std::move(name), std::move(tensor));
    } else {
        it->second = std::move(tensor);
    }
}

const WeightTensor& ModelWeights::get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end())
        throw MissingWeightError(name);
    return it->second;
}

bool ModelWeights::contains(const std::string& name) const {
    return tensors_.count(name) != 0;
}

std::size_t ModelWeights::element_count() const {
    std::size_t n = 0;
    for (const auto& [name, t] : tensors_)
        n += t.data.size();
    return n;
}

void save_weights(const ModelWeights& weights, const std::string& path) {
    // Header size is known up front, so data offsets can be laid out first.
    std::size_t header_size = 4 + 4 + 4;
    for (const auto& name : weights.names()) {
        const WeightTensor& t = weights.get(name);
        header_size += 2 + name.size() + 1 + 4 * t.dims.size() + 8;
    }

    std::vector<std::uint64_t> offsets;
    std::uint64_t cursor = header_size;
    for (const auto& name : weights.names()) {
        cursor = (cursor + kAlign - 1) / kAlign * kAlign;
        offsets.push_back(cursor);
        cursor += weights.get(name).data.size() * 4;
    }

    std::vector<std::uint8_t> buf;
    buf.reserve(cursor + 4);
    buf.insert(buf.end(), kMagic, kMagic + 4);
    put_u32(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(weights.tensor_count()));
    std::size_t idx = 0;
    for (const auto& name : weights.names()) {
        const WeightTensor& t = weights.get(name);
        if (name.size() > 0xffff)
            throw IoError("weight name too long: " + name);
        put_u16(buf, static_cast<std::uint16_t>(name.size()));
        buf.insert(buf.end(), name.begin(), name.end());
        buf.push_back(static_cast<std::uint8_t>(t.dims.size()));
        for (auto d : t.dims)
            put_u32(buf, d);
        put_u64(buf, offsets[idx++]);
    }

    idx = 0;
    for (const auto& name : weights.names()) {
        const WeightTensor& t = weights.get(name);
        buf.resize(offsets[idx++], 0);
        for (float f : t.data)
            put_u32(buf, std::bit_cast<std::uint32_t>(f));
    }

    put_u32(buf, checksum(buf.data(), buf.size()));

    std::FILE* fp = std::fopen(path.c_str(), "wb");
    if (!fp)
        throw IoError("cannot open for writing: " + path);
    const std::size_t written = std::fwrite(buf.data(), 1, buf.size(), fp);
    if (std::fclose(fp) != 0 || written != buf.size())
        throw IoError("short write: " + path);
}

ModelWeights load_weights(const std::string& path) {
    std::FILE* fp = std::fopen(path.c_str(), "rb");
    if (!fp)
        throw IoError("cannot open: " + path);
    std::vector<std::uint8_t> buf;
    std::uint8_t chunk[65536];
    std::size_t n;
    while ((n = std::fread(chunk, 1, sizeof chunk, fp)) > 0)
        buf.insert(buf.end(), chunk, chunk + n);
    const bool read_error = std::ferror(fp) != 0;
    std::fclose(fp);
    if (read_error)
        throw IoError("read failed: " + path);

    if (buf.size() < 4 + 4 + 4 + 4)
        throw CorruptWeights("weights container too small: " + path);

    const std::size_t body = buf.size() - 4;
    std::uint32_t stored_crc;
    std::memcpy(&stored_crc, buf.data() + body, 4);
    std::uint32_t le_crc = static_cast<std::uint32_t>(buf[body]) |
                           (static_cast<std::uint32_t>(buf[body + 1]) << 8) |
                           (static_cast<std::uint32_t>(buf[body + 2]) << 16) |
                           (static_cast<std::uint32_t>(buf[body + 3]) << 24);
    if (checksum(buf.data(), body) != le_crc)
        throw CorruptWeights("CRC mismatch: " + path);

    Reader r(buf.data(), body);
    if (r.str(4) != std::string(kMagic, 4))
        throw CorruptWeights("bad magic: " + path);
    if (r.u32() != kVersion)
        throw CorruptWeights("unsupported container version: " + path);
    const std::uint32_t count = r.u32();

    struct Record {
        std::string name;
        std::vector<std::uint32_t> dims;
        std::uint64_t offset;
    };
    std::vector<Record> records(count);
    for (auto& rec : records) {
        const std::uint16_t name_len = r.u16();
        rec.name = r.str(name_len);
        const std::uint8_t rank = r.u8();
        rec.dims.resize(rank);
        for (auto& d : rec.dims)
            d = r.u32();
        rec.offset = r.u64();
    }

    ModelWeights weights;
    for (auto& rec : records) {
        if (weights.contains(rec.name))
            throw CorruptWeights("duplicate tensor name: " + rec.name);
        std::uint64_t elems = 1;
        for (auto d : rec.dims) {
            elems *= d;
            if (elems > (1ull << 32))
                throw CorruptWeights("tensor too large: " + rec.name);
        }
        const std::uint64_t bytes = elems * 4;
        if (rec.offset > body || bytes > body - rec.offset)
            throw CorruptWeights("tensor data out of bounds: " + rec.name);

        WeightTensor t;
        t.dims = std::move(rec.dims);
        t.data.resize(elems);
        for (std::uint64_t i = 0; i < elems; ++i) {
            const std::uint8_t* p = buf.data() + rec.offset + i * 4;
            std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                                 (static_cast<std::uint32_t>(p[1]) << 8) |
                                 (static_cast<std::uint32_t>(p[2]) << 16) |
                                 (static_cast<std::uint32_t>(p[3]) << 24);
            t.data[i] = std::bit_cast<float>(bits);
        }
        weights.put(std::move(rec.name), std::move(t));
    }
    return weights;
}

ModelWeights seeded_weights(std::uint64_t seed, std::span<const WeightSpec> specs) {
    Xorshift64Star rng(seed);
    ModelWeights weights;
    for (const auto& spec : specs) {
        WeightTensor t;
        t.dims = spec.dims;
        t.data.resize(spec.count());
        for (float& v : t.data)
            v = rng.uniform_pm_half();
        weights.put(spec.name, std::move(t));
    }
    return weights;
}

ConvParams conv_params(const ModelWeights& weights, const std::string& prefix,
                       int stride) {
    const WeightTensor& w = weights.get(prefix + ".weight");
    const WeightTensor& b = weights.get(prefix + ".bias");
    if (w.dims.size() != 4)
        throw ShapeError("conv weight '" + prefix + ".weight' must be rank 4");
    if (w.dims[2] != w.dims[3])
        throw ShapeError("conv weight '" + prefix + ".weight' must be square");
    if (b.dims.size() != 1 || b.dims[0] != w.dims[0])
        throw ShapeError("conv bias '" + prefix + ".bias' must match out channels");

    ConvParams p;
    p.weight = w.data;
    p.bias = b.data;
    p.out_ch = static_cast<int>(w.dims[0]);
    p.in_ch = static_cast<int>(w.dims[1]);
    p.k = static_cast<int>(w.dims[2]);
    p.stride = stride;
    return p;
}

} // namespace hdrtv
