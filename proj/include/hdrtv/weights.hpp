#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "hdrtv/tensor.hpp"

namespace hdrtv {

// A named parameter array of arbitrary rank, as stored in the weights
// container. Network code views these through ConvParams spans.
struct WeightTensor {
    std::vector<std::uint32_t> dims;
    std::vector<float> data;

    std::size_t count() const {
        std::size_t n = 1;
        for (auto d : dims)
            n *= d;
        return n;
    }
};

// Insertion-ordered name -> tensor store. Immutable once a model starts
// reading from it; one store may serve any number of concurrent forwards.
class ModelWeights {
public:
    void put(std::string name, WeightTensor tensor);
    const WeightTensor& get(const std::string& name) const; // MissingWeightError
    bool contains(const std::string& name) const;
    const std::vector<std::string>& names() const { return order_; }
    std::size_t tensor_count() const { return order_.size(); }
    std::size_t element_count() const;

private:
    std::vector<std::string> order_;
    std::unordered_map<std::string, WeightTensor> tensors_;
};

// Shape of one required parameter tensor; the per-model spec lists drive the
// census, the seeded generator, and gen-weights.
struct WeightSpec {
    std::string name;
    std::vector<std::uint32_t> dims;

    std::size_t count() const {
        std::size_t n = 1;
        for (auto d : dims)
            n *= d;
        return n;
    }
};

// Binary container: magic "HDCW", version u32(1), tensor count u32, then one
// record per tensor (name length u16, UTF-8 name, rank u8, dims u32 x rank,
// absolute data offset u64), a 64-byte-aligned float32 data section, and a
// trailing CRC32 over all preceding bytes. Everything is little-endian; a
// big-endian host byte-swaps on load.
ModelWeights load_weights(const std::string& path);
void save_weights(const ModelWeights& weights, const std::string& path);

// xorshift64* (Marsaglia/Vigna): state' = state ^= state >> 12, ^= state << 25,
// ^= state >> 27; output = state * 0x2545F4914F6CDD1D. A zero seed is replaced
// by 0x9E3779B97F4A7C15 since the all-zero state is a fixed point.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed)
        : state_(seed ? seed : 0x9E3779B97F4A7C15ull) {}

    std::uint64_t next() {
        std::uint64_t x = state_;
        x ^= x >> 12;
        x ^= x << 25;
        x ^= x >> 27;
        state_ = x;
        return x * 0x2545F4914F6CDD1Dull;
    }

    // Uniform in [-0.5, 0.5) from the top 24 bits; every step is exact float
    // arithmetic, so identical seeds give bit-identical streams everywhere.
    float uniform_pm_half() {
        return static_cast<float>(next() >> 40) * (1.0f / 16777216.0f) - 0.5f;
    }

private:
    std::uint64_t state_;
};

// Fills every listed tensor, in list order, from a single xorshift64* stream.
ModelWeights seeded_weights(std::uint64_t seed, std::span<const WeightSpec> specs);

// Views "<prefix>.weight" / "<prefix>.bias" as static conv parameters.
// The weight must be rank 4 (out, in, k, k) with a square odd kernel.
ConvParams conv_params(const ModelWeights& weights, const std::string& prefix,
                       int stride = 1);

} // namespace hdrtv
